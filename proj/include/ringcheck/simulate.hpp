#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ringcheck/protocol.hpp"

// Randomized asynchronous execution with message accounting, plus the
// phase-synchronous oracle that computes the expected winner round by round.

namespace ringcheck {

struct Scheduler {
  enum class Kind { UniformEnabled, RoundRobin };
  Kind kind = Kind::UniformEnabled;
  uint64_t seed = 0;

  static Scheduler uniform(uint64_t seed) { return {Kind::UniformEnabled, seed}; }
  static Scheduler round_robin() { return {Kind::RoundRobin, 0}; }
};

struct SimReport {
  std::optional<int> elected;      // ring position of the leader
  std::optional<int> elected_vid;  // its virtual id (equals the max uid)
  uint64_t steps = 0;
  uint64_t link_transmissions = 0;  // writes into any inbox
  bool terminated = false;          // leader elected and everything else blocked
  bool overflow = false;            // General variant hit a full FIFO
};

struct SyncPhaseReport {
  uint64_t phases = 0;
  std::vector<uint64_t> survivors_per_phase;  // strictly decreasing to 1
  int winner = 0;       // ring position of the last remaining active node
  int winner_vid = 0;   // equals the maximum uid
};

// Applies enabled steps under the scheduler until the ring is quiescent with a
// leader, the step budget runs out, or a FIFO overflows. The optional observer
// sees every intermediate state (used by safety-invariant tests).
SimReport run_async(Variant variant, const std::vector<int>& uids, Scheduler sched,
                    uint64_t max_steps,
                    const std::function<void(const GlobalState&)>& observer = {});

// Lockstep phases over active nodes with relays transparent: each active node
// reads the vids of its two nearest active predecessors and survives iff the
// first exceeds both the second and its own vid (adopting it).
SyncPhaseReport sync_oracle(const std::vector<int>& uids);

struct SweepRow {
  Variant variant;
  int n = 0;
  uint64_t seed = 0;
  std::vector<int> uids;
  SimReport report;
  int oracle_winner = 0;
  uint64_t oracle_phases = 0;
};

// One row per (variant, n, run) with a fresh seeded uid permutation per run.
// Deterministic for a fixed base_seed and independent of worker count.
std::vector<SweepRow> sweep(const std::vector<Variant>& variants, const std::vector<int>& n_range,
                            int runs_per_cell, uint64_t base_seed, int workers = 1,
                            uint64_t max_steps = 1'000'000);

std::string sweep_csv_header();
std::string sweep_row_csv(const SweepRow& row);

// Envelope the per-run link transmissions must stay under for rings of size n.
uint64_t message_bound(int n);

// Fisher-Yates shuffle of 0..n-1, deterministic for a given seed.
std::vector<int> seeded_permutation(int n, uint64_t seed);

}  // namespace ringcheck
