#pragma once

// Naive reference semantics for the temporal operators, computed by explicit
// path and lasso enumeration on small graphs. Deliberately structured unlike
// the fixpoint engine so the two can cross-check each other.

#include <cstdint>
#include <deque>
#include <vector>

#include "ringcheck/bitset.hpp"
#include "ringcheck/statespace.hpp"

namespace oracle {

using ringcheck::Bitset;
using ringcheck::kNoEdge;
using ringcheck::StateGraph;

// All states reachable from s by paths staying inside `within` (s included
// when it is inside).
inline Bitset reach_within(const StateGraph& g, const Bitset& within, uint32_t s) {
  Bitset seen(g.num_states());
  if (!within.get(s)) return seen;
  std::deque<uint32_t> q{s};
  seen.set(s);
  while (!q.empty()) {
    uint32_t v = q.front();
    q.pop_front();
    for (int l = 0; l < g.n; ++l) {
      uint32_t t = g.target(v, l);
      if (t == kNoEdge || seen.get(t) || !within.get(t)) continue;
      seen.set(t);
      q.push_back(t);
    }
  }
  return seen;
}

inline bool ex_holds(const StateGraph& g, const Bitset& s_set, uint32_t s) {
  for (int l = 0; l < g.n; ++l) {
    uint32_t t = g.target(s, l);
    if (t != kNoEdge && s_set.get(t)) return true;
  }
  return false;
}

// E[a U b]: some path from s through a-states ending in a b-state.
inline bool eu_holds(const StateGraph& g, const Bitset& a, const Bitset& b, uint32_t s) {
  if (b.get(s)) return true;
  if (!a.get(s)) return false;
  Bitset seen(g.num_states());
  std::deque<uint32_t> q{s};
  seen.set(s);
  while (!q.empty()) {
    uint32_t v = q.front();
    q.pop_front();
    for (int l = 0; l < g.n; ++l) {
      uint32_t t = g.target(v, l);
      if (t == kNoEdge || seen.get(t)) continue;
      if (b.get(t)) return true;
      if (!a.get(t)) continue;
      seen.set(t);
      q.push_back(t);
    }
  }
  return false;
}

// EG s_set: an infinite path from s staying in s_set, i.e. a reachable cycle
// inside the set.
inline bool eg_holds(const StateGraph& g, const Bitset& s_set, uint32_t s) {
  if (!s_set.get(s)) return false;
  Bitset reach = reach_within(g, s_set, s);
  for (uint32_t t = 0; t < g.num_states(); ++t) {
    if (!reach.get(t)) continue;
    // Cycle through t: one edge out of t, then back to t within the set.
    for (int l = 0; l < g.n; ++l) {
      uint32_t u = g.target(t, l);
      if (u == kNoEdge || !s_set.get(u)) continue;
      if (u == t || reach_within(g, s_set, u).get(t)) return true;
    }
  }
  return false;
}

// Fair EG: an infinite path within s_set along which every label occurs
// infinitely often, i.e. a reachable closed walk inside the set that uses all
// labels. Enumerated over (state, labels-seen) pairs.
inline bool fair_eg_holds(const StateGraph& g, const Bitset& s_set, uint32_t s) {
  if (!s_set.get(s)) return false;
  if (g.n > 16) return false;  // oracle scale guard
  const uint32_t full = (uint32_t{1} << g.n) - 1;
  Bitset anchors = reach_within(g, s_set, s);
  for (uint32_t t = 0; t < g.num_states(); ++t) {
    if (!anchors.get(t)) continue;
    std::vector<uint8_t> seen(static_cast<size_t>(g.num_states()) << g.n, 0);
    std::deque<std::pair<uint32_t, uint32_t>> q;
    q.emplace_back(t, 0);
    seen[(static_cast<size_t>(t) << g.n)] = 1;
    bool found = false;
    while (!q.empty() && !found) {
      auto [v, mask] = q.front();
      q.pop_front();
      for (int l = 0; l < g.n && !found; ++l) {
        uint32_t u = g.target(v, l);
        if (u == kNoEdge || !s_set.get(u)) continue;
        uint32_t m = mask | (uint32_t{1} << l);
        if (u == t && m == full) {
          found = true;
          break;
        }
        size_t key = (static_cast<size_t>(u) << g.n) | m;
        if (!seen[key]) {
          seen[key] = 1;
          q.emplace_back(u, m);
        }
      }
    }
    if (found) return true;
  }
  return false;
}

}  // namespace oracle
