#include "ringcheck/statespace.hpp"

#include <algorithm>
#include <cstring>
#include <deque>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ringcheck {

namespace {

constexpr uint32_t kNoId = 0xFFFFFFFFu;

uint64_t fnv1a(const uint8_t* data, size_t len) {
  uint64_t h = 1469598103934665603ull;
  for (size_t i = 0; i < len; ++i) {
    h ^= data[i];
    h *= 1099511628211ull;
  }
  return h;
}

// Open-addressing dedup table over the record arena. Stores state ids only;
// equality is resolved by comparing record bytes in the arena.
class StateIndex {
 public:
  explicit StateIndex(size_t rec_size) : rec_size_(rec_size), slots_(1 << 16, kNoId), mask_((1 << 16) - 1) {}

  // Returns the id of rec, inserting it into the arena if new. Returns kNoId
  // when inserting would exceed max_states.
  uint32_t find_or_insert(const uint8_t* rec, std::vector<uint8_t>& arena, size_t max_states) {
    if ((count_ + 1) * 10 > slots_.size() * 6) grow(arena);
    size_t idx = fnv1a(rec, rec_size_) & mask_;
    while (true) {
      uint32_t id = slots_[idx];
      if (id == kNoId) {
        if (count_ >= max_states) return kNoId;
        uint32_t fresh = static_cast<uint32_t>(count_++);
        arena.insert(arena.end(), rec, rec + rec_size_);
        slots_[idx] = fresh;
        return fresh;
      }
      if (std::memcmp(arena.data() + static_cast<size_t>(id) * rec_size_, rec, rec_size_) == 0) {
        return id;
      }
      idx = (idx + 1) & mask_;
    }
  }

  size_t count() const { return count_; }

 private:
  void grow(const std::vector<uint8_t>& arena) {
    std::vector<uint32_t> bigger(slots_.size() * 2, kNoId);
    size_t mask = bigger.size() - 1;
    for (uint32_t id : slots_) {
      if (id == kNoId) continue;
      size_t idx = fnv1a(arena.data() + static_cast<size_t>(id) * rec_size_, rec_size_) & mask;
      while (bigger[idx] != kNoId) idx = (idx + 1) & mask;
      bigger[idx] = id;
    }
    slots_ = std::move(bigger);
    mask_ = mask;
  }

  size_t rec_size_;
  std::vector<uint32_t> slots_;
  size_t mask_;
  size_t count_ = 0;
};

struct ExploreContext {
  StateGraph graph;
  ExploreStats stats;
  StateIndex index;
  size_t max_states;
  bool done = false;  // truncation hit, stop everything

  ExploreContext(Variant variant, int n, size_t max_states_)
      : index(record_size(variant, n)), max_states(max_states_) {
    graph.variant = variant;
    graph.n = n;
    graph.rec_size = record_size(variant, n);
  }

  uint32_t discovered() const { return static_cast<uint32_t>(index.count()); }

  uint32_t error_state_id() {
    if (!graph.overflow_state) {
      std::vector<uint8_t> rec(graph.rec_size, 0xFF);
      uint32_t id = index.find_or_insert(rec.data(), graph.arena, max_states);
      if (id == kNoId) return kNoId;
      graph.overflow_state = id;
    }
    return *graph.overflow_state;
  }

  // Appends the edges of state s given its n precomputed outcomes. kinds[l] is
  // the StepKind; recs points at n candidate records (Progress entries only).
  // Returns false when the state limit was hit (edges rolled back).
  bool commit_edges(uint32_t s, const uint8_t* recs, const StepKind* kinds) {
    size_t edge_base = graph.edges.size();
    for (int l = 0; l < graph.n; ++l) {
      uint32_t tgt;
      switch (kinds[l]) {
        case StepKind::Progress:
          tgt = index.find_or_insert(recs + static_cast<size_t>(l) * graph.rec_size, graph.arena, max_states);
          break;
        case StepKind::Stutter:
          tgt = s;
          break;
        case StepKind::Overflow:
        default:
          tgt = error_state_id();
          if (tgt != kNoId) graph.overflow_reached = true;
          break;
      }
      if (tgt == kNoId) {
        graph.edges.resize(edge_base);
        graph.truncated = true;
        done = true;
        return false;
      }
      graph.edges.push_back(tgt);
      if (tgt == s) {
        ++stats.self_loops;
      } else {
        ++stats.transitions;
      }
    }
    return true;
  }

  void expand_state(uint32_t s, uint8_t* recs, StepKind* kinds) const {
    if (graph.is_error_state(s)) {
      for (int l = 0; l < graph.n; ++l) kinds[l] = StepKind::Stutter;  // absorbing sink
      return;
    }
    GlobalState g = canonical_decode(graph.variant, graph.record(s));
    for (int l = 0; l < graph.n; ++l) {
      StepOutcome o = step(graph.variant, g, l);
      kinds[l] = o.kind;
      if (o.kind == StepKind::Progress) {
        canonical_encode_into(graph.variant, o.next, recs + static_cast<size_t>(l) * graph.rec_size);
      }
    }
  }

  void finish() {
    stats.reachable_states = discovered();
    if (graph.truncated) return;
    for (uint32_t s = 0; s < graph.num_states(); ++s) {
      if (!graph.all_self_loops(s)) continue;
      if (graph.is_error_state(s) || !record_any_leader(graph.record(s))) {
        ++stats.quiescent_nonleader;
      }
    }
  }
};

void validate_limits(const ExploreLimits& limits) {
  if (limits.max_states < 1 || limits.max_steps_per_trace < 1) {
    throw std::invalid_argument("explore limits must be positive");
  }
}

}  // namespace

GlobalState StateGraph::decode(uint32_t id) const {
  if (is_error_state(id)) throw std::invalid_argument("overflow sink has no protocol state");
  return canonical_decode(variant, record(id));
}

std::pair<StateGraph, ExploreStats> explore_serial(Variant variant, const std::vector<int>& uids,
                                                   const ExploreLimits& limits) {
  validate_limits(limits);
  GlobalState init = initial_state(variant, uids);
  const int n = init.size();
  ExploreContext ctx(variant, n, limits.max_states);

  std::vector<uint8_t> init_rec(ctx.graph.rec_size);
  canonical_encode_into(variant, init, init_rec.data());
  ctx.index.find_or_insert(init_rec.data(), ctx.graph.arena, ctx.max_states);

  std::vector<uint8_t> recs(static_cast<size_t>(n) * ctx.graph.rec_size);
  std::vector<StepKind> kinds(static_cast<size_t>(n));

  uint32_t layer_begin = 0;
  uint32_t layer_end = 1;
  ctx.stats.peak_frontier = 1;
  while (layer_begin < layer_end && !ctx.done) {
    for (uint32_t s = layer_begin; s < layer_end && !ctx.done; ++s) {
      ctx.expand_state(s, recs.data(), kinds.data());
      ctx.commit_edges(s, recs.data(), kinds.data());
    }
    layer_begin = layer_end;
    layer_end = ctx.discovered();
    ctx.stats.peak_frontier = std::max<uint64_t>(ctx.stats.peak_frontier, layer_end - layer_begin);
  }
  ctx.finish();
  return {std::move(ctx.graph), ctx.stats};
}

std::pair<StateGraph, ExploreStats> explore_parallel(Variant variant, const std::vector<int>& uids,
                                                     const ExploreLimits& limits, int workers) {
  validate_limits(limits);
#ifdef _OPENMP
  if (workers <= 0) workers = omp_get_max_threads();
#else
  workers = 1;
#endif
  GlobalState init = initial_state(variant, uids);
  const int n = init.size();
  ExploreContext ctx(variant, n, limits.max_states);

  std::vector<uint8_t> init_rec(ctx.graph.rec_size);
  canonical_encode_into(variant, init, init_rec.data());
  ctx.index.find_or_insert(init_rec.data(), ctx.graph.arena, ctx.max_states);

  constexpr uint32_t kChunk = 1 << 14;
  std::vector<uint8_t> recs;
  std::vector<StepKind> kinds;

  uint32_t layer_begin = 0;
  uint32_t layer_end = 1;
  ctx.stats.peak_frontier = 1;
  while (layer_begin < layer_end && !ctx.done) {
    for (uint32_t chunk_begin = layer_begin; chunk_begin < layer_end && !ctx.done; chunk_begin += kChunk) {
      const uint32_t chunk_end = std::min(chunk_begin + kChunk, layer_end);
      const size_t chunk = chunk_end - chunk_begin;
      recs.resize(chunk * static_cast<size_t>(n) * ctx.graph.rec_size);
      kinds.resize(chunk * static_cast<size_t>(n));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64) num_threads(workers)
#endif
      for (int64_t off = 0; off < static_cast<int64_t>(chunk); ++off) {
        ctx.expand_state(chunk_begin + static_cast<uint32_t>(off),
                         recs.data() + static_cast<size_t>(off) * static_cast<size_t>(n) * ctx.graph.rec_size,
                         kinds.data() + static_cast<size_t>(off) * static_cast<size_t>(n));
      }

      // Deduplicate in canonical (state asc, label asc) order: ids come out
      // exactly as in the serial reference.
      for (size_t off = 0; off < chunk && !ctx.done; ++off) {
        ctx.commit_edges(chunk_begin + static_cast<uint32_t>(off),
                         recs.data() + off * static_cast<size_t>(n) * ctx.graph.rec_size,
                         kinds.data() + off * static_cast<size_t>(n));
      }
    }
    layer_begin = layer_end;
    layer_end = ctx.discovered();
    ctx.stats.peak_frontier = std::max<uint64_t>(ctx.stats.peak_frontier, layer_end - layer_begin);
  }
  ctx.finish();
  return {std::move(ctx.graph), ctx.stats};
}

std::pair<StateGraph, ExploreStats> explore(Variant variant, const std::vector<int>& uids,
                                            const ExploreLimits& limits, int workers) {
  if (workers == 1) return explore_serial(variant, uids, limits);
  return explore_parallel(variant, uids, limits, workers);
}

std::optional<Trace> find_trace_to(const StateGraph& graph,
                                   const std::function<bool(const GlobalState&)>& target) {
  if (graph.truncated) throw TruncatedGraphError("exploration was truncated; traces unavailable");
  const uint32_t count = graph.num_states();
  if (count == 0) return std::nullopt;

  auto satisfies = [&](uint32_t s) {
    if (graph.is_error_state(s)) return false;
    return target(graph.decode(s));
  };

  std::vector<uint32_t> parent(count, kNoId);
  std::vector<int16_t> parent_label(count, -1);
  std::vector<bool> visited(count, false);
  std::deque<uint32_t> queue;
  queue.push_back(0);
  visited[0] = true;

  uint32_t found = kNoId;
  if (satisfies(0)) {
    found = 0;
  } else {
    while (!queue.empty() && found == kNoId) {
      uint32_t s = queue.front();
      queue.pop_front();
      for (int l = 0; l < graph.n && found == kNoId; ++l) {
        uint32_t t = graph.target(s, l);
        if (t == kNoEdge || visited[t]) continue;
        visited[t] = true;
        parent[t] = s;
        parent_label[t] = static_cast<int16_t>(l);
        if (satisfies(t)) {
          found = t;
        } else {
          queue.push_back(t);
        }
      }
    }
  }
  if (found == kNoId) return std::nullopt;

  Trace trace;
  std::vector<std::pair<uint32_t, int>> rev;
  rev.emplace_back(found, -1);
  for (uint32_t s = found; parent[s] != kNoId; s = parent[s]) {
    rev.emplace_back(parent[s], parent_label[s]);
  }
  trace.prefix.assign(rev.rbegin(), rev.rend());
  return trace;
}

QuiescentPartition quiescent_states(const StateGraph& graph) {
  if (graph.truncated) throw TruncatedGraphError("exploration was truncated; scan unavailable");
  QuiescentPartition out;
  for (uint32_t s = 0; s < graph.num_states(); ++s) {
    if (!graph.all_self_loops(s)) continue;
    if (!graph.is_error_state(s) && record_any_leader(graph.record(s))) {
      out.with_leader.push_back(s);
    } else {
      out.without_leader.push_back(s);
    }
  }
  return out;
}

bool trace_is_valid(const StateGraph& graph, const Trace& trace) {
  if (trace.prefix.empty()) return false;
  for (size_t i = 0; i + 1 < trace.prefix.size(); ++i) {
    auto [s, l] = trace.prefix[i];
    if (l < 0 || l >= graph.n) return false;
    if (graph.target(s, l) != trace.prefix[i + 1].first) return false;
  }
  auto [last, last_label] = trace.prefix.back();
  if (trace.loop_start) {
    if (*trace.loop_start >= trace.prefix.size()) return false;
    if (last_label < 0 || last_label >= graph.n) return false;
    return graph.target(last, last_label) == trace.prefix[*trace.loop_start].first;
  }
  return last_label == -1;
}

}  // namespace ringcheck
