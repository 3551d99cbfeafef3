#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ringcheck/protocol.hpp"

// Exhaustive breadth-first exploration of the reachable labeled transition
// graph. State ids are assigned in BFS discovery order with process labels
// expanded in ascending order, so the graph is bit-stable across runs and
// across worker counts.

namespace ringcheck {

struct ExploreLimits {
  size_t max_states = 10'000'000;
  size_t max_steps_per_trace = 1'000'000;
};

struct TruncatedGraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Absent edge marker for hand-built graphs (protocol exploration always emits
// exactly n outgoing edges per state, self-loops included).
constexpr uint32_t kNoEdge = 0xFFFFFFFFu;

class StateGraph {
 public:
  Variant variant = Variant::Modified;
  int n = 0;                    // ring size == outgoing edges per state
  size_t rec_size = 0;
  std::vector<uint8_t> arena;   // num_states * rec_size canonical records
  std::vector<uint32_t> edges;  // num_states * n targets, label = position
  bool truncated = false;
  bool overflow_reached = false;
  std::optional<uint32_t> overflow_state;  // absorbing error sink, if created

  uint32_t num_states() const { return static_cast<uint32_t>(edges.size() / static_cast<size_t>(n)); }

  std::span<const uint8_t> record(uint32_t id) const {
    return {arena.data() + static_cast<size_t>(id) * rec_size, rec_size};
  }

  bool is_error_state(uint32_t id) const { return overflow_state && *overflow_state == id; }

  GlobalState decode(uint32_t id) const;

  uint32_t target(uint32_t s, int label) const {
    return edges[static_cast<size_t>(s) * static_cast<size_t>(n) + static_cast<size_t>(label)];
  }

  bool all_self_loops(uint32_t s) const {
    for (int l = 0; l < n; ++l) {
      if (target(s, l) != s) return false;
    }
    return true;
  }
};

struct ExploreStats {
  uint64_t reachable_states = 0;
  uint64_t transitions = 0;   // self-loops excluded
  uint64_t self_loops = 0;
  uint64_t quiescent_nonleader = 0;
  uint64_t peak_frontier = 0;  // largest BFS layer
};

// A path through the graph. Each entry is (state id, label of the edge taken
// from that state); the final entry's label is -1 for plain paths. For lassos,
// loop_start indexes the entry the final edge returns to.
struct Trace {
  std::vector<std::pair<uint32_t, int>> prefix;
  std::optional<size_t> loop_start;

  size_t edge_count() const {
    return loop_start ? prefix.size() : prefix.size() - 1;
  }
};

// Single-worker reference exploration.
std::pair<StateGraph, ExploreStats> explore_serial(Variant variant, const std::vector<int>& uids,
                                                   const ExploreLimits& limits = {});

// Layer-parallel exploration: successor records for one BFS layer are computed
// across OpenMP threads, then deduplicated in canonical order, so the result
// is identical to explore_serial for any worker count.
std::pair<StateGraph, ExploreStats> explore_parallel(Variant variant, const std::vector<int>& uids,
                                                     const ExploreLimits& limits = {}, int workers = 0);

// Dispatch: workers <= 1 runs the serial reference.
std::pair<StateGraph, ExploreStats> explore(Variant variant, const std::vector<int>& uids,
                                            const ExploreLimits& limits = {}, int workers = 1);

// Shortest prefix (by edge count) from state 0 to a state satisfying target.
// Throws TruncatedGraphError if exploration was cut off.
std::optional<Trace> find_trace_to(const StateGraph& graph,
                                   const std::function<bool(const GlobalState&)>& target);

struct QuiescentPartition {
  std::vector<uint32_t> with_leader;
  std::vector<uint32_t> without_leader;
};

// State ids whose every outgoing edge is a self-loop.
QuiescentPartition quiescent_states(const StateGraph& graph);

// True if the trace replays through the graph's edges (used by tests and
// report rendering).
bool trace_is_valid(const StateGraph& graph, const Trace& trace);

}  // namespace ringcheck
