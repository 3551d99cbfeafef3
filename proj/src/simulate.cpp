#include "ringcheck/simulate.hpp"

#include <algorithm>
#include <bit>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ringcheck {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

SimReport run_async(Variant variant, const std::vector<int>& uids, Scheduler sched,
                    uint64_t max_steps,
                    const std::function<void(const GlobalState&)>& observer) {
  if (max_steps < 1) throw std::invalid_argument("max_steps must be positive");
  GlobalState g = initial_state(variant, uids);
  const int n = g.size();
  std::mt19937_64 rng(sched.seed);
  int rr = 0;

  SimReport report;
  if (observer) observer(g);

  std::vector<int> enabled;
  enabled.reserve(static_cast<size_t>(n));
  while (report.steps < max_steps) {
    enabled.clear();
    for (int i = 0; i < n; ++i) {
      if (step_enabled(variant, g, i)) enabled.push_back(i);
    }
    if (enabled.empty()) break;  // quiescent

    int pick;
    if (sched.kind == Scheduler::Kind::UniformEnabled) {
      pick = enabled[static_cast<size_t>(rng() % enabled.size())];
    } else {
      pick = -1;
      for (int off = 0; off < n && pick < 0; ++off) {
        int candidate = (rr + off) % n;
        if (step_enabled(variant, g, candidate)) pick = candidate;
      }
      rr = (pick + 1) % n;
    }

    StepOutcome outcome = step(variant, g, pick);
    if (outcome.kind == StepKind::Overflow) {
      report.overflow = true;
      return report;
    }
    g = std::move(outcome.next);
    ++report.steps;
    report.link_transmissions += static_cast<uint64_t>(outcome.inbox_writes);
    if (observer) observer(g);
  }

  bool quiescent = true;
  for (int i = 0; i < n && quiescent; ++i) {
    if (step_enabled(variant, g, i)) quiescent = false;
  }
  std::vector<int> leaders = leader_set(g);
  if (quiescent && leaders.size() == 1) {
    report.terminated = true;
    report.elected = leaders[0];
    report.elected_vid = g.nodes[static_cast<size_t>(leaders[0])].vid;
  }
  return report;
}

SyncPhaseReport sync_oracle(const std::vector<int>& uids) {
  GlobalState init = initial_state(Variant::Modified, uids);  // validates uids
  const int n = init.size();

  std::vector<bool> active(static_cast<size_t>(n), true);
  std::vector<int> vid(uids);
  int active_count = n;

  auto prev_active = [&](int from) {
    int p = from;
    do {
      p = (p - 1 + n) % n;
    } while (!active[static_cast<size_t>(p)]);
    return p;
  };

  SyncPhaseReport report;
  while (active_count > 1) {
    std::vector<int> new_vid(vid);
    std::vector<bool> survive(static_cast<size_t>(n), false);
    for (int i = 0; i < n; ++i) {
      if (!active[static_cast<size_t>(i)]) continue;
      int p1 = prev_active(i);
      int p2 = prev_active(p1);
      int id2 = vid[static_cast<size_t>(p1)];
      int id3 = vid[static_cast<size_t>(p2)];
      if (id2 > std::max(vid[static_cast<size_t>(i)], id3)) {
        survive[static_cast<size_t>(i)] = true;
        new_vid[static_cast<size_t>(i)] = id2;
      }
    }
    active_count = 0;
    for (int i = 0; i < n; ++i) {
      active[static_cast<size_t>(i)] = survive[static_cast<size_t>(i)];
      if (survive[static_cast<size_t>(i)]) ++active_count;
    }
    vid = std::move(new_vid);
    ++report.phases;
    report.survivors_per_phase.push_back(static_cast<uint64_t>(active_count));
  }

  for (int i = 0; i < n; ++i) {
    if (active[static_cast<size_t>(i)]) {
      report.winner = i;
      report.winner_vid = vid[static_cast<size_t>(i)];
      break;
    }
  }
  return report;
}

std::vector<int> seeded_permutation(int n, uint64_t seed) {
  std::vector<int> uids(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) uids[static_cast<size_t>(i)] = i;
  std::mt19937_64 rng(seed);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng() % static_cast<uint64_t>(i + 1));
    std::swap(uids[static_cast<size_t>(i)], uids[static_cast<size_t>(j)]);
  }
  return uids;
}

namespace {

SweepRow run_cell(Variant variant, int variant_idx, int n, int run, uint64_t base_seed,
                  uint64_t max_steps) {
  SweepRow row;
  row.variant = variant;
  row.n = n;
  row.seed = splitmix64(splitmix64(splitmix64(base_seed + static_cast<uint64_t>(variant_idx)) +
                                   static_cast<uint64_t>(n)) +
                        static_cast<uint64_t>(run));
  // The ring permutation depends on (n, run) only, so the same cell across
  // variants exercises the same ring and must elect the same position.
  uint64_t uid_seed = splitmix64(
      splitmix64(splitmix64(base_seed ^ 0x517cc1b727220a95ull) + static_cast<uint64_t>(n)) +
      static_cast<uint64_t>(run));
  row.uids = seeded_permutation(n, uid_seed);
  row.report = run_async(variant, row.uids, Scheduler::uniform(row.seed), max_steps);
  SyncPhaseReport oracle = sync_oracle(row.uids);
  row.oracle_winner = oracle.winner;
  row.oracle_phases = oracle.phases;
  return row;
}

}  // namespace

std::vector<SweepRow> sweep(const std::vector<Variant>& variants, const std::vector<int>& n_range,
                            int runs_per_cell, uint64_t base_seed, int workers, uint64_t max_steps) {
  if (runs_per_cell < 1) throw std::invalid_argument("runs_per_cell must be positive");
  const size_t cells = variants.size() * n_range.size() * static_cast<size_t>(runs_per_cell);
  std::vector<SweepRow> rows(cells);

#ifdef _OPENMP
  if (workers <= 0) workers = omp_get_max_threads();
#else
  workers = 1;
#endif

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
  for (int64_t idx = 0; idx < static_cast<int64_t>(cells); ++idx) {
    size_t rest = static_cast<size_t>(idx);
    const size_t run = rest % static_cast<size_t>(runs_per_cell);
    rest /= static_cast<size_t>(runs_per_cell);
    const size_t n_idx = rest % n_range.size();
    const size_t v_idx = rest / n_range.size();
    rows[static_cast<size_t>(idx)] =
        run_cell(variants[v_idx], static_cast<int>(v_idx), n_range[n_idx], static_cast<int>(run),
                 base_seed, max_steps);
  }
  return rows;
}

std::string sweep_csv_header() {
  return "variant,n,seed,uids,elected,elected_vid,steps,link_transmissions,oracle_winner,phases";
}

std::string sweep_row_csv(const SweepRow& row) {
  std::string uids;
  for (size_t i = 0; i < row.uids.size(); ++i) {
    if (i) uids += '-';
    uids += std::to_string(row.uids[i]);
  }
  std::string out = variant_name(row.variant);
  out += ',' + std::to_string(row.n);
  out += ',' + std::to_string(row.seed);
  out += ',' + uids;
  out += ',' + (row.report.elected ? std::to_string(*row.report.elected) : std::string());
  out += ',' + (row.report.elected_vid ? std::to_string(*row.report.elected_vid) : std::string());
  out += ',' + std::to_string(row.report.steps);
  out += ',' + std::to_string(row.report.link_transmissions);
  out += ',' + std::to_string(row.oracle_winner);
  out += ',' + std::to_string(row.oracle_phases);
  return out;
}

uint64_t message_bound(int n) {
  const uint64_t log2n = static_cast<uint64_t>(std::bit_width(static_cast<uint64_t>(n)) - 1);
  return 2 * static_cast<uint64_t>(n) * (log2n + 2) + 2 * static_cast<uint64_t>(n);
}

}  // namespace ringcheck
