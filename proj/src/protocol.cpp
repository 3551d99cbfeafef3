#include "ringcheck/protocol.hpp"

#include <algorithm>

namespace ringcheck {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::General: return "general";
    case Variant::Modified: return "modified";
    case Variant::ExtraModified: return "extra";
  }
  return "?";
}

std::optional<Variant> variant_from_name(std::string_view name) {
  if (name == "general" || name == "alg2") return Variant::General;
  if (name == "modified" || name == "alg3") return Variant::Modified;
  if (name == "extra" || name == "extramodified" || name == "alg4") return Variant::ExtraModified;
  return std::nullopt;
}

const char* pc_name(uint8_t p) {
  switch (p) {
    case pc::S0: return "S0";
    case pc::S1: return "S1";
    case pc::S2: return "S2";
    case pc::S3: return "S3";
    case pc::S4: return "S4";
    case pc::S5: return "S5";
    case pc::LEAD: return "LEAD";
  }
  return "?";
}

GlobalState initial_state(Variant /*variant*/, const std::vector<int>& uids) {
  const int n = static_cast<int>(uids.size());
  if (n == 0) throw EmptyRingError("ring must have at least one node");
  if (n > kMaxRing) throw IndexError("ring size exceeds supported maximum");
  std::vector<bool> seen(static_cast<size_t>(n), false);
  for (int u : uids) {
    if (u < 0 || u >= n) throw IndexError("uid outside [0, n-1]");
    if (seen[static_cast<size_t>(u)]) throw DuplicateUidError("uids must be pairwise distinct");
    seen[static_cast<size_t>(u)] = true;
  }
  GlobalState g;
  g.nodes.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    g.nodes[static_cast<size_t>(i)].vid = static_cast<uint8_t>(uids[static_cast<size_t>(i)]);
  }
  return g;
}

namespace {

// FIFO capacity equals the ring size.
bool fifo_full(const GlobalState& g, int node) {
  return static_cast<int>(g.nodes[static_cast<size_t>(node)].fifo.size()) >= g.size();
}

uint8_t fifo_pop(LocalState& n) {
  uint8_t v = n.fifo.front();
  n.fifo.erase(n.fifo.begin());
  return v;
}

void clear_temps(LocalState& n, const StepOptions& opts) {
  if (opts.clear_dead_temps) {
    n.id2 = kNone;
    n.id3 = kNone;
  }
}

StepOutcome progress(GlobalState&& next, int writes) {
  return StepOutcome{StepKind::Progress, std::move(next), writes};
}

StepOutcome stutter() { return StepOutcome{StepKind::Stutter, {}, 0}; }
StepOutcome overflow() { return StepOutcome{StepKind::Overflow, {}, 0}; }

StepOutcome step_general(const GlobalState& g, int i, const StepOptions& opts) {
  const LocalState& me = g.nodes[static_cast<size_t>(i)];
  const int succ = g.successor_of(i);

  if (me.pc == pc::LEAD) return stutter();

  if (me.mode == Mode::Relay) {
    // Receive and forward in one atomic step; pc stays S0.
    if (me.fifo.empty()) return stutter();
    GlobalState next = g;
    uint8_t m = fifo_pop(next.nodes[static_cast<size_t>(i)]);
    if (fifo_full(next, succ)) return overflow();
    next.nodes[static_cast<size_t>(succ)].fifo.push_back(m);
    return progress(std::move(next), 1);
  }

  switch (me.pc) {
    case pc::S0: {
      if (fifo_full(g, succ)) return overflow();
      GlobalState next = g;
      next.nodes[static_cast<size_t>(succ)].fifo.push_back(me.vid);
      next.nodes[static_cast<size_t>(i)].pc = pc::S1;
      return progress(std::move(next), 1);
    }
    case pc::S1: {
      if (me.fifo.empty()) return stutter();
      GlobalState next = g;
      next.nodes[static_cast<size_t>(i)].id2 = fifo_pop(next.nodes[static_cast<size_t>(i)]);
      next.nodes[static_cast<size_t>(i)].pc = pc::S2;
      return progress(std::move(next), 0);
    }
    case pc::S2: {
      if (me.vid == me.id2) {
        GlobalState next = g;
        next.nodes[static_cast<size_t>(i)].pc = pc::LEAD;
        return progress(std::move(next), 0);
      }
      if (fifo_full(g, succ)) return overflow();
      GlobalState next = g;
      next.nodes[static_cast<size_t>(succ)].fifo.push_back(me.id2);
      next.nodes[static_cast<size_t>(i)].pc = pc::S3;
      return progress(std::move(next), 1);
    }
    case pc::S3: {
      if (me.fifo.empty()) return stutter();
      GlobalState next = g;
      next.nodes[static_cast<size_t>(i)].id3 = fifo_pop(next.nodes[static_cast<size_t>(i)]);
      next.nodes[static_cast<size_t>(i)].pc = pc::S4;
      return progress(std::move(next), 0);
    }
    case pc::S4: {
      GlobalState next = g;
      LocalState& n = next.nodes[static_cast<size_t>(i)];
      if (n.id2 > std::max(n.vid, n.id3)) {
        n.vid = n.id2;
      } else {
        n.mode = Mode::Relay;
      }
      clear_temps(n, opts);
      n.pc = pc::S0;
      return progress(std::move(next), 0);
    }
    default:
      return stutter();
  }
}

StepOutcome step_modified(const GlobalState& g, int i, const StepOptions& opts) {
  const LocalState& me = g.nodes[static_cast<size_t>(i)];
  const int succ = g.successor_of(i);
  const LocalState& next_node = g.nodes[static_cast<size_t>(succ)];

  if (me.pc == pc::LEAD) return stutter();

  if (me.mode == Mode::Relay) {
    switch (me.pc) {
      case pc::S0: {
        // The listing stores the forwarded message in the vid field.
        if (me.slot == kNone) return stutter();
        GlobalState next = g;
        LocalState& n = next.nodes[static_cast<size_t>(i)];
        n.vid = n.slot;
        n.slot = kNone;
        n.pc = pc::S1;
        return progress(std::move(next), 0);
      }
      case pc::S1: {
        if (next_node.slot != kNone) return stutter();
        GlobalState next = g;
        next.nodes[static_cast<size_t>(succ)].slot = me.vid;
        next.nodes[static_cast<size_t>(i)].pc = pc::S0;
        return progress(std::move(next), 1);
      }
      default:
        return stutter();
    }
  }

  switch (me.pc) {
    case pc::S0: {
      if (next_node.slot != kNone) return stutter();
      GlobalState next = g;
      next.nodes[static_cast<size_t>(succ)].slot = me.vid;
      next.nodes[static_cast<size_t>(i)].pc = pc::S2;
      return progress(std::move(next), 1);
    }
    case pc::S2: {
      if (me.slot == kNone) return stutter();
      GlobalState next = g;
      LocalState& n = next.nodes[static_cast<size_t>(i)];
      n.id2 = n.slot;
      n.slot = kNone;
      n.pc = pc::S3;
      return progress(std::move(next), 0);
    }
    case pc::S3: {
      if (me.vid == me.id2) {
        GlobalState next = g;
        next.nodes[static_cast<size_t>(i)].pc = pc::LEAD;
        return progress(std::move(next), 0);
      }
      if (next_node.slot != kNone) return stutter();
      GlobalState next = g;
      next.nodes[static_cast<size_t>(succ)].slot = me.id2;
      next.nodes[static_cast<size_t>(i)].pc = pc::S4;
      return progress(std::move(next), 1);
    }
    case pc::S4: {
      if (me.slot == kNone) return stutter();
      GlobalState next = g;
      LocalState& n = next.nodes[static_cast<size_t>(i)];
      n.id3 = n.slot;
      n.slot = kNone;
      n.pc = pc::S5;
      return progress(std::move(next), 0);
    }
    case pc::S5: {
      GlobalState next = g;
      LocalState& n = next.nodes[static_cast<size_t>(i)];
      if (n.id2 > std::max(n.vid, n.id3)) {
        n.vid = n.id2;
      } else {
        n.mode = Mode::Relay;
      }
      clear_temps(n, opts);
      n.pc = pc::S0;
      return progress(std::move(next), 0);
    }
    default:
      return stutter();
  }
}

StepOutcome step_extra(const GlobalState& g, int i, const StepOptions& opts) {
  const LocalState& me = g.nodes[static_cast<size_t>(i)];
  const int succ = g.successor_of(i);
  const LocalState& next_node = g.nodes[static_cast<size_t>(succ)];

  if (me.pc == pc::LEAD) return stutter();

  if (me.mode == Mode::Relay) {
    // Fused receive-forward: the relay acts as part of the wiring.
    if (me.slot == kNone || next_node.slot != kNone) return stutter();
    GlobalState next = g;
    next.nodes[static_cast<size_t>(succ)].slot = me.slot;
    next.nodes[static_cast<size_t>(i)].slot = kNone;
    return progress(std::move(next), 1);
  }

  switch (me.pc) {
    case pc::S0:
    case pc::S2:
    case pc::S3:
      return step_modified(g, i, opts);
    case pc::S4: {
      // Fused receive + decide; S5 absent.
      if (me.slot == kNone) return stutter();
      GlobalState next = g;
      LocalState& n = next.nodes[static_cast<size_t>(i)];
      n.id3 = n.slot;
      n.slot = kNone;
      if (n.id2 > std::max(n.vid, n.id3)) {
        n.vid = n.id2;
      } else {
        n.mode = Mode::Relay;
      }
      clear_temps(n, opts);
      n.pc = pc::S0;
      return progress(std::move(next), 0);
    }
    default:
      return stutter();
  }
}

}  // namespace

StepOutcome step(Variant variant, const GlobalState& g, int i, const StepOptions& opts) {
  if (i < 0 || i >= g.size()) throw IndexError("process index out of range");
  switch (variant) {
    case Variant::General: return step_general(g, i, opts);
    case Variant::Modified: return step_modified(g, i, opts);
    case Variant::ExtraModified: return step_extra(g, i, opts);
  }
  return stutter();
}

StepOutcome step(Variant variant, const GlobalState& g, int i) {
  return step(variant, g, i, StepOptions{});
}

bool step_enabled(Variant variant, const GlobalState& g, int i) {
  if (i < 0 || i >= g.size()) throw IndexError("process index out of range");
  const LocalState& me = g.nodes[static_cast<size_t>(i)];
  if (me.pc == pc::LEAD) return false;
  const int succ = g.successor_of(i);
  const LocalState& next_node = g.nodes[static_cast<size_t>(succ)];

  switch (variant) {
    case Variant::General:
      if (me.mode == Mode::Relay) return !me.fifo.empty();
      switch (me.pc) {
        case pc::S0: return true;
        case pc::S1: return !me.fifo.empty();
        case pc::S2: return true;
        case pc::S3: return !me.fifo.empty();
        case pc::S4: return true;
        default: return false;
      }
    case Variant::Modified:
      if (me.mode == Mode::Relay) {
        return me.pc == pc::S0 ? me.slot != kNone : next_node.slot == kNone;
      }
      switch (me.pc) {
        case pc::S0: return next_node.slot == kNone;
        case pc::S2: return me.slot != kNone;
        case pc::S3: return me.vid == me.id2 || next_node.slot == kNone;
        case pc::S4: return me.slot != kNone;
        case pc::S5: return true;
        default: return false;
      }
    case Variant::ExtraModified:
      if (me.mode == Mode::Relay) return me.slot != kNone && next_node.slot == kNone;
      switch (me.pc) {
        case pc::S0: return next_node.slot == kNone;
        case pc::S2: return me.slot != kNone;
        case pc::S3: return me.vid == me.id2 || next_node.slot == kNone;
        case pc::S4: return me.slot != kNone;
        default: return false;
      }
  }
  return false;
}

std::vector<StepOutcome> successors(Variant variant, const GlobalState& g) {
  std::vector<StepOutcome> out;
  out.reserve(static_cast<size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) {
    StepOutcome o = step(variant, g, i);
    if (o.kind != StepKind::Progress) o.next = g;  // self-loop / error marker carrier
    out.push_back(std::move(o));
  }
  return out;
}

bool atom_eval(Variant variant, const GlobalState& g, const Atom& a) {
  switch (a.kind) {
    case Atom::Kind::IsLeader:
      if (a.node < 0 || a.node >= g.size()) throw IndexError("atom node index out of range");
      return g.nodes[static_cast<size_t>(a.node)].pc == pc::LEAD;
    case Atom::Kind::VidEquals:
      if (a.node < 0 || a.node >= g.size()) throw IndexError("atom node index out of range");
      return g.nodes[static_cast<size_t>(a.node)].vid == a.value;
    case Atom::Kind::ModeIs:
      if (a.node < 0 || a.node >= g.size()) throw IndexError("atom node index out of range");
      return g.nodes[static_cast<size_t>(a.node)].mode == a.mode;
    case Atom::Kind::Quiescent:
      for (int i = 0; i < g.size(); ++i) {
        if (step(variant, g, i).kind != StepKind::Stutter) return false;
      }
      return true;
  }
  return false;
}

std::vector<int> leader_set(const GlobalState& g) {
  std::vector<int> out;
  for (int i = 0; i < g.size(); ++i) {
    if (g.nodes[static_cast<size_t>(i)].pc == pc::LEAD) out.push_back(i);
  }
  return out;
}

namespace {

size_t node_record_width(Variant variant, int n) {
  return 6 + (variant == Variant::General ? static_cast<size_t>(n) : 1);
}

}  // namespace

size_t record_size(Variant variant, int n) {
  return 1 + static_cast<size_t>(n) * node_record_width(variant, n);
}

void canonical_encode_into(Variant variant, const GlobalState& g, uint8_t* out) {
  const int n = g.size();
  const size_t w = node_record_width(variant, n);
  out[0] = static_cast<uint8_t>(n);
  for (int i = 0; i < n; ++i) {
    const LocalState& node = g.nodes[static_cast<size_t>(i)];
    uint8_t* rec = out + 1 + static_cast<size_t>(i) * w;
    rec[0] = node.vid;
    rec[1] = static_cast<uint8_t>(node.mode);
    rec[2] = node.pc;
    rec[3] = node.id2 == kNone ? 0 : static_cast<uint8_t>(node.id2 + 1);
    rec[4] = node.id3 == kNone ? 0 : static_cast<uint8_t>(node.id3 + 1);
    if (variant == Variant::General) {
      rec[5] = static_cast<uint8_t>(node.fifo.size());
      for (int k = 0; k < n; ++k) {
        rec[6 + k] = k < static_cast<int>(node.fifo.size()) ? node.fifo[static_cast<size_t>(k)] : 0;
      }
    } else {
      rec[5] = node.slot == kNone ? 0 : 1;
      rec[6] = node.slot == kNone ? 0 : static_cast<uint8_t>(node.slot + 1);
    }
  }
}

std::vector<uint8_t> canonical_encode(Variant variant, const GlobalState& g) {
  std::vector<uint8_t> out(record_size(variant, g.size()));
  canonical_encode_into(variant, g, out.data());
  return out;
}

GlobalState canonical_decode(Variant variant, std::span<const uint8_t> record) {
  if (record.empty()) throw std::invalid_argument("empty record");
  const int n = record[0];
  if (n == 0 || record.size() != record_size(variant, n)) {
    throw std::invalid_argument("record size mismatch");
  }
  const size_t w = node_record_width(variant, n);
  GlobalState g;
  g.nodes.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const uint8_t* rec = record.data() + 1 + static_cast<size_t>(i) * w;
    LocalState& node = g.nodes[static_cast<size_t>(i)];
    node.vid = rec[0];
    node.mode = static_cast<Mode>(rec[1]);
    node.pc = rec[2];
    node.id2 = rec[3] == 0 ? kNone : static_cast<uint8_t>(rec[3] - 1);
    node.id3 = rec[4] == 0 ? kNone : static_cast<uint8_t>(rec[4] - 1);
    if (variant == Variant::General) {
      node.fifo.assign(rec + 6, rec + 6 + rec[5]);
    } else {
      node.slot = rec[5] == 0 ? kNone : static_cast<uint8_t>(rec[6] - 1);
    }
  }
  return g;
}

bool record_is_leader(std::span<const uint8_t> record, int node) {
  const int n = record[0];
  const size_t w = (record.size() - 1) / static_cast<size_t>(n);
  return record[1 + static_cast<size_t>(node) * w + 2] == pc::LEAD;
}

uint8_t record_vid(std::span<const uint8_t> record, int node) {
  const int n = record[0];
  const size_t w = (record.size() - 1) / static_cast<size_t>(n);
  return record[1 + static_cast<size_t>(node) * w];
}

Mode record_mode(std::span<const uint8_t> record, int node) {
  const int n = record[0];
  const size_t w = (record.size() - 1) / static_cast<size_t>(n);
  return static_cast<Mode>(record[1 + static_cast<size_t>(node) * w + 1]);
}

bool record_any_leader(std::span<const uint8_t> record) {
  const int n = record[0];
  for (int i = 0; i < n; ++i) {
    if (record_is_leader(record, i)) return true;
  }
  return false;
}

}  // namespace ringcheck
