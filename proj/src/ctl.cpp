#include "ringcheck/ctl.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <unordered_map>

namespace ringcheck {

namespace {
constexpr uint32_t kNone32 = 0xFFFFFFFFu;
}

// ---------------------------------------------------------------------------
// Formula construction and printing

FormulaPtr Formula::constant(bool value) {
  auto f = std::make_shared<Formula>();
  f->kind = value ? FormulaKind::ConstTrue : FormulaKind::ConstFalse;
  return f;
}

FormulaPtr Formula::make(Atom a) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::AtomRef;
  f->atom = a;
  return f;
}

FormulaPtr Formula::make(FormulaKind k, FormulaPtr operand) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->lhs = std::move(operand);
  return f;
}

FormulaPtr Formula::make(FormulaKind k, FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

namespace {

std::string atom_to_string(const Atom& a) {
  switch (a.kind) {
    case Atom::Kind::IsLeader: return "leader(" + std::to_string(a.node) + ")";
    case Atom::Kind::VidEquals: return "vid(" + std::to_string(a.node) + ")=" + std::to_string(a.value);
    case Atom::Kind::ModeIs:
      return "mode(" + std::to_string(a.node) + ")=" + (a.mode == Mode::Active ? "active" : "relay");
    case Atom::Kind::Quiescent: return "quiescent";
  }
  return "?";
}

std::string wrap(const Formula& f) {
  std::string s = to_string(f);
  switch (f.kind) {
    case FormulaKind::ConstTrue:
    case FormulaKind::ConstFalse:
    case FormulaKind::AtomRef:
      return s;
    default:
      return "(" + s + ")";
  }
}

}  // namespace

std::string to_string(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::ConstTrue: return "true";
    case FormulaKind::ConstFalse: return "false";
    case FormulaKind::AtomRef: return atom_to_string(f.atom);
    case FormulaKind::Not: return "!" + wrap(*f.lhs);
    case FormulaKind::And: return wrap(*f.lhs) + " & " + wrap(*f.rhs);
    case FormulaKind::Or: return wrap(*f.lhs) + " | " + wrap(*f.rhs);
    case FormulaKind::Implies: return wrap(*f.lhs) + " -> " + wrap(*f.rhs);
    case FormulaKind::EX: return "EX " + wrap(*f.lhs);
    case FormulaKind::EG: return "EG " + wrap(*f.lhs);
    case FormulaKind::AX: return "AX " + wrap(*f.lhs);
    case FormulaKind::AF: return "AF " + wrap(*f.lhs);
    case FormulaKind::AG: return "AG " + wrap(*f.lhs);
    case FormulaKind::EF: return "EF " + wrap(*f.lhs);
    case FormulaKind::EU: return "E[" + to_string(*f.lhs) + " U " + to_string(*f.rhs) + "]";
    case FormulaKind::AU: return "A[" + to_string(*f.lhs) + " U " + to_string(*f.rhs) + "]";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, int n) : text_(text), n_(n) {}

  FormulaPtr parse() {
    FormulaPtr f = parse_implies();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return f;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!eat(c)) throw ParseError(std::string("expected '") + what + "'", pos_);
  }

  // Longest run of letters at the cursor; empty if none.
  std::string_view peek_word() {
    skip_ws();
    size_t end = pos_;
    while (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) ++end;
    return text_.substr(pos_, end - pos_);
  }

  bool eat_word(std::string_view w) {
    if (peek_word() == w) {
      pos_ += w.size();
      return true;
    }
    return false;
  }

  int parse_int() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) throw ParseError("expected a number", pos_);
    return std::stoi(std::string(text_.substr(start, pos_ - start)));
  }

  int parse_index() {
    int idx = parse_int();
    if (idx < 0 || idx >= n_) {
      throw IndexError("node index " + std::to_string(idx) + " out of range for ring of " + std::to_string(n_));
    }
    return idx;
  }

  FormulaPtr parse_implies() {
    FormulaPtr lhs = parse_or();
    skip_ws();
    if (pos_ + 1 < text_.size() && text_[pos_] == '-' && text_[pos_ + 1] == '>') {
      pos_ += 2;
      return Formula::make(FormulaKind::Implies, std::move(lhs), parse_implies());
    }
    return lhs;
  }

  FormulaPtr parse_or() {
    FormulaPtr f = parse_and();
    while (true) {
      skip_ws();
      if (pos_ < text_.size() && (text_[pos_] == '|' || text_[pos_] == '/')) {
        ++pos_;
        f = Formula::make(FormulaKind::Or, std::move(f), parse_and());
      } else {
        break;
      }
    }
    return f;
  }

  FormulaPtr parse_and() {
    FormulaPtr f = parse_unary();
    while (eat('&')) f = Formula::make(FormulaKind::And, std::move(f), parse_unary());
    return f;
  }

  FormulaPtr parse_unary() {
    skip_ws();
    if (eat('!')) return Formula::make(FormulaKind::Not, parse_unary());
    if (eat('(')) {
      FormulaPtr f = parse_implies();
      expect(')', ")");
      return f;
    }

    std::string_view word = peek_word();
    if (word == "AF" || word == "AG" || word == "AX" || word == "EF" || word == "EG" || word == "EX") {
      pos_ += 2;
      FormulaKind k = word == "AF"   ? FormulaKind::AF
                      : word == "AG" ? FormulaKind::AG
                      : word == "AX" ? FormulaKind::AX
                      : word == "EF" ? FormulaKind::EF
                      : word == "EG" ? FormulaKind::EG
                                     : FormulaKind::EX;
      return Formula::make(k, parse_unary());
    }
    if (word == "E" || word == "A") {
      pos_ += 1;
      FormulaKind k = word == "E" ? FormulaKind::EU : FormulaKind::AU;
      expect('[', "[");
      FormulaPtr a = parse_implies();
      if (!eat_word("U")) throw ParseError("expected 'U'", pos_);
      FormulaPtr b = parse_implies();
      expect(']', "]");
      return Formula::make(k, std::move(a), std::move(b));
    }
    if (eat_word("true")) return Formula::constant(true);
    if (eat_word("false")) return Formula::constant(false);
    if (eat_word("quiescent")) return Formula::make(Atom::quiescent());
    if (eat_word("leader")) {
      expect('(', "(");
      int idx = parse_index();
      expect(')', ")");
      return Formula::make(Atom::is_leader(idx));
    }
    if (eat_word("vid")) {
      expect('(', "(");
      int idx = parse_index();
      expect(')', ")");
      expect('=', "=");
      return Formula::make(Atom::vid_equals(idx, parse_int()));
    }
    if (eat_word("mode")) {
      expect('(', "(");
      int idx = parse_index();
      expect(')', ")");
      expect('=', "=");
      if (eat_word("active")) return Formula::make(Atom::mode_is(idx, Mode::Active));
      if (eat_word("relay")) return Formula::make(Atom::mode_is(idx, Mode::Relay));
      throw ParseError("expected 'active' or 'relay'", pos_);
    }
    throw ParseError("expected a formula", pos_);
  }

  std::string_view text_;
  int n_;
  size_t pos_ = 0;
};

}  // namespace

FormulaPtr parse_formula(std::string_view text, int n) {
  return Parser(text, n).parse();
}

std::vector<BuiltinProperty> builtin_properties(int n, int max_uid) {
  if (n < 1) throw EmptyRingError("ring must have at least one node");

  FormulaPtr any_leader;
  for (int i = 0; i < n; ++i) {
    FormulaPtr leaf = Formula::make(Atom::is_leader(i));
    any_leader = any_leader ? Formula::make(FormulaKind::Or, any_leader, leaf) : leaf;
  }

  FormulaPtr two_leaders;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      FormulaPtr pair = Formula::make(FormulaKind::And, Formula::make(Atom::is_leader(i)),
                                      Formula::make(Atom::is_leader(j)));
      two_leaders = two_leaders ? Formula::make(FormulaKind::Or, two_leaders, pair) : pair;
    }
  }
  if (!two_leaders) two_leaders = Formula::constant(false);  // n = 1: empty disjunction

  FormulaPtr leader_max;
  for (int i = 0; i < n; ++i) {
    FormulaPtr impl = Formula::make(FormulaKind::Implies, Formula::make(Atom::is_leader(i)),
                                    Formula::make(Atom::vid_equals(i, max_uid)));
    leader_max = leader_max ? Formula::make(FormulaKind::And, leader_max, impl) : impl;
  }

  return {
      {"P1-eventually-leader", Formula::make(FormulaKind::AF, any_leader), Fairness::RunningAll, true},
      {"P2-two-leaders-reachable", Formula::make(FormulaKind::EF, two_leaders), Fairness::None, false},
      {"P3-leader-has-max-uid", Formula::make(FormulaKind::AG, leader_max), Fairness::None, true},
  };
}

// ---------------------------------------------------------------------------
// Set-level engine

namespace {

struct ReverseCSR {
  std::vector<uint32_t> offsets;  // V+1
  std::vector<uint32_t> preds;    // one entry per edge, multi-edges kept
};

ReverseCSR build_reverse(const StateGraph& g) {
  const uint32_t V = g.num_states();
  const size_t E = static_cast<size_t>(V) * static_cast<size_t>(g.n);
  ReverseCSR r;
  r.offsets.assign(V + 1, 0);
  size_t present = 0;
  for (size_t e = 0; e < E; ++e) {
    if (g.edges[e] == kNoEdge) continue;
    ++r.offsets[g.edges[e] + 1];
    ++present;
  }
  for (uint32_t v = 0; v < V; ++v) r.offsets[v + 1] += r.offsets[v];
  r.preds.resize(present);
  std::vector<uint32_t> cursor(r.offsets.begin(), r.offsets.end() - 1);
  for (uint32_t v = 0; v < V; ++v) {
    for (int l = 0; l < g.n; ++l) {
      uint32_t t = g.target(v, l);
      if (t != kNoEdge) r.preds[cursor[t]++] = v;
    }
  }
  return r;
}

Bitset ex_impl(const StateGraph& g, const Bitset& s) {
  const uint32_t V = g.num_states();
  Bitset out(V);
  for (uint32_t v = 0; v < V; ++v) {
    for (int l = 0; l < g.n; ++l) {
      uint32_t t = g.target(v, l);
      if (t != kNoEdge && s.get(t)) {
        out.set(v);
        break;
      }
    }
  }
  return out;
}

Bitset eu_impl(const StateGraph& g, const ReverseCSR& r, const Bitset& a, const Bitset& b) {
  const uint32_t V = g.num_states();
  Bitset z(V);
  std::vector<uint32_t> work;
  for (uint32_t v = 0; v < V; ++v) {
    if (b.get(v)) {
      z.set(v);
      work.push_back(v);
    }
  }
  while (!work.empty()) {
    uint32_t t = work.back();
    work.pop_back();
    for (uint32_t k = r.offsets[t]; k < r.offsets[t + 1]; ++k) {
      uint32_t p = r.preds[k];
      if (!z.get(p) && a.get(p)) {
        z.set(p);
        work.push_back(p);
      }
    }
  }
  return z;
}

Bitset eg_impl(const StateGraph& g, const ReverseCSR& r, const Bitset& s) {
  const uint32_t V = g.num_states();
  Bitset z = s;
  std::vector<uint32_t> cnt(V, 0);
  std::vector<uint32_t> work;
  for (uint32_t v = 0; v < V; ++v) {
    if (!s.get(v)) continue;
    uint32_t c = 0;
    for (int l = 0; l < g.n; ++l) {
      uint32_t t = g.target(v, l);
      if (t != kNoEdge && s.get(t)) ++c;
    }
    cnt[v] = c;
    if (c == 0) {
      z.reset(v);
      work.push_back(v);
    }
  }
  while (!work.empty()) {
    uint32_t t = work.back();
    work.pop_back();
    for (uint32_t k = r.offsets[t]; k < r.offsets[t + 1]; ++k) {
      uint32_t p = r.preds[k];
      if (z.get(p) && --cnt[p] == 0) {
        z.reset(p);
        work.push_back(p);
      }
    }
  }
  return z;
}

struct SccResult {
  std::vector<uint32_t> comp;  // kNone32 outside the restriction
  uint32_t count = 0;
};

// Iterative Tarjan over the forward edges, optionally restricted to a set.
SccResult scc_decompose(const StateGraph& g, const Bitset* restrict_to) {
  const uint32_t V = g.num_states();
  SccResult out;
  out.comp.assign(V, kNone32);
  std::vector<uint32_t> index(V, kNone32);
  std::vector<uint32_t> low(V, 0);
  std::vector<uint8_t> on_stack(V, 0);
  std::vector<uint32_t> stack;
  struct Frame {
    uint32_t v;
    int edge;
  };
  std::vector<Frame> frames;
  uint32_t counter = 0;

  for (uint32_t root = 0; root < V; ++root) {
    if (index[root] != kNone32) continue;
    if (restrict_to && !restrict_to->get(root)) continue;
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    frames.push_back({root, 0});
    while (!frames.empty()) {
      uint32_t v = frames.back().v;
      if (frames.back().edge < g.n) {
        int l = frames.back().edge++;
        uint32_t w = g.target(v, l);
        if (w == kNoEdge) continue;
        if (restrict_to && !restrict_to->get(w)) continue;
        if (index[w] == kNone32) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        frames.pop_back();
        if (low[v] == index[v]) {
          while (true) {
            uint32_t w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            out.comp[w] = out.count;
            if (w == v) break;
          }
          ++out.count;
        }
        if (!frames.empty()) {
          uint32_t parent = frames.back().v;
          low[parent] = std::min(low[parent], low[v]);
        }
      }
    }
  }
  return out;
}

// States lying in SCCs that contain an internal edge for every process label.
Bitset fair_scc_states(const StateGraph& g, const SccResult& scc) {
  if (g.n > 64) throw std::invalid_argument("fairness supports at most 64 process labels");
  const uint32_t V = g.num_states();
  const uint64_t all = g.n == 64 ? ~uint64_t{0} : (uint64_t{1} << g.n) - 1;
  std::vector<uint64_t> mask(scc.count, 0);
  for (uint32_t v = 0; v < V; ++v) {
    uint32_t c = scc.comp[v];
    if (c == kNone32) continue;
    for (int l = 0; l < g.n; ++l) {
      uint32_t t = g.target(v, l);
      if (t != kNoEdge && scc.comp[t] == c) mask[c] |= uint64_t{1} << l;
    }
  }
  Bitset out(V);
  for (uint32_t v = 0; v < V; ++v) {
    uint32_t c = scc.comp[v];
    if (c != kNone32 && mask[c] == all) out.set(v);
  }
  return out;
}

// Backward closure of seeds over the reverse edges, restricted to a set.
Bitset backward_reach(const ReverseCSR& r, const Bitset& seeds, const Bitset* restrict_to) {
  Bitset z = seeds;
  std::vector<uint32_t> work;
  for (uint32_t v = 0; v < z.size(); ++v) {
    if (z.get(v)) work.push_back(v);
  }
  while (!work.empty()) {
    uint32_t t = work.back();
    work.pop_back();
    for (uint32_t k = r.offsets[t]; k < r.offsets[t + 1]; ++k) {
      uint32_t p = r.preds[k];
      if (z.get(p)) continue;
      if (restrict_to && !restrict_to->get(p)) continue;
      z.set(p);
      work.push_back(p);
    }
  }
  return z;
}

Bitset eg_fair_impl(const StateGraph& g, const ReverseCSR& r, const Bitset& s) {
  SccResult scc = scc_decompose(g, &s);
  Bitset seeds = fair_scc_states(g, scc);
  return backward_reach(r, seeds, &s);
}

}  // namespace

Bitset atom_set(const StateGraph& g, const Atom& a) {
  const uint32_t V = g.num_states();
  if (a.kind != Atom::Kind::Quiescent && (a.node < 0 || a.node >= g.n)) {
    throw IndexError("atom node index out of range");
  }
  Bitset out(V);
  for (uint32_t v = 0; v < V; ++v) {
    if (g.is_error_state(v)) {
      if (a.kind == Atom::Kind::Quiescent) out.set(v);  // absorbing sink only stutters
      continue;
    }
    switch (a.kind) {
      case Atom::Kind::IsLeader:
        if (record_is_leader(g.record(v), a.node)) out.set(v);
        break;
      case Atom::Kind::VidEquals:
        if (record_vid(g.record(v), a.node) == a.value) out.set(v);
        break;
      case Atom::Kind::ModeIs:
        if (record_mode(g.record(v), a.node) == a.mode) out.set(v);
        break;
      case Atom::Kind::Quiescent:
        if (atom_eval(g.variant, g.decode(v), Atom::quiescent())) out.set(v);
        break;
    }
  }
  return out;
}

Bitset ex_set(const StateGraph& g, const Bitset& s) { return ex_impl(g, s); }

Bitset eu_set(const StateGraph& g, const Bitset& a, const Bitset& b) {
  ReverseCSR r = build_reverse(g);
  return eu_impl(g, r, a, b);
}

Bitset eg_set(const StateGraph& g, const Bitset& s) {
  ReverseCSR r = build_reverse(g);
  return eg_impl(g, r, s);
}

Bitset eg_fair_set(const StateGraph& g, const Bitset& s) {
  ReverseCSR r = build_reverse(g);
  return eg_fair_impl(g, r, s);
}

Bitset fair_set(const StateGraph& g) {
  return eg_fair_set(g, Bitset(g.num_states(), true));
}

std::vector<uint32_t> fair_states(const StateGraph& g) {
  if (g.truncated) throw TruncatedGraphError("exploration was truncated");
  Bitset f = fair_set(g);
  std::vector<uint32_t> out;
  for (uint32_t v = 0; v < f.size(); ++v) {
    if (f.get(v)) out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Formula evaluation

namespace {

struct EvalCtx {
  const StateGraph& g;
  const ReverseCSR& rcsr;
  bool fair_mode;
  Bitset fair;  // populated iff fair_mode
};

Bitset eval(const Formula& f, EvalCtx& ctx) {
  const uint32_t V = ctx.g.num_states();
  switch (f.kind) {
    case FormulaKind::ConstTrue: return Bitset(V, true);
    case FormulaKind::ConstFalse: return Bitset(V);
    case FormulaKind::AtomRef: return atom_set(ctx.g, f.atom);
    case FormulaKind::Not: return ~eval(*f.lhs, ctx);
    case FormulaKind::And: return eval(*f.lhs, ctx) & eval(*f.rhs, ctx);
    case FormulaKind::Or: return eval(*f.lhs, ctx) | eval(*f.rhs, ctx);
    case FormulaKind::Implies: return ~eval(*f.lhs, ctx) | eval(*f.rhs, ctx);
    case FormulaKind::EX: {
      Bitset s = eval(*f.lhs, ctx);
      if (ctx.fair_mode) s &= ctx.fair;
      return ex_impl(ctx.g, s);
    }
    case FormulaKind::AX: {
      Bitset s = ~eval(*f.lhs, ctx);
      if (ctx.fair_mode) s &= ctx.fair;
      return ~ex_impl(ctx.g, s);
    }
    case FormulaKind::EF: {
      Bitset b = eval(*f.lhs, ctx);
      if (ctx.fair_mode) b &= ctx.fair;
      return eu_impl(ctx.g, ctx.rcsr, Bitset(V, true), b);
    }
    case FormulaKind::AG: {
      Bitset b = ~eval(*f.lhs, ctx);
      if (ctx.fair_mode) b &= ctx.fair;
      return ~eu_impl(ctx.g, ctx.rcsr, Bitset(V, true), b);
    }
    case FormulaKind::EU: {
      Bitset a = eval(*f.lhs, ctx);
      Bitset b = eval(*f.rhs, ctx);
      if (ctx.fair_mode) b &= ctx.fair;
      return eu_impl(ctx.g, ctx.rcsr, a, b);
    }
    case FormulaKind::EG: {
      Bitset s = eval(*f.lhs, ctx);
      return ctx.fair_mode ? eg_fair_impl(ctx.g, ctx.rcsr, s) : eg_impl(ctx.g, ctx.rcsr, s);
    }
    case FormulaKind::AF: {
      Bitset s = ~eval(*f.lhs, ctx);
      return ~(ctx.fair_mode ? eg_fair_impl(ctx.g, ctx.rcsr, s) : eg_impl(ctx.g, ctx.rcsr, s));
    }
    case FormulaKind::AU: {
      // A[a U b] == !(E[!b U !a & !b] | EG !b)
      Bitset na = ~eval(*f.lhs, ctx);
      Bitset nb = ~eval(*f.rhs, ctx);
      Bitset both = na & nb;
      if (ctx.fair_mode) both &= ctx.fair;
      Bitset t1 = eu_impl(ctx.g, ctx.rcsr, nb, both);
      Bitset t2 = ctx.fair_mode ? eg_fair_impl(ctx.g, ctx.rcsr, nb) : eg_impl(ctx.g, ctx.rcsr, nb);
      return ~(t1 | t2);
    }
  }
  return Bitset(V);
}

// Shortest path from state 0 to any state in `accept`; entries carry the label
// taken from each state, final entry labeled -1.
std::optional<Trace> bfs_path(const StateGraph& g, const Bitset& accept) {
  const uint32_t V = g.num_states();
  if (V == 0) return std::nullopt;
  std::vector<uint32_t> parent(V, kNone32);
  std::vector<int16_t> parent_label(V, -1);
  std::vector<uint8_t> visited(V, 0);
  std::deque<uint32_t> queue;
  visited[0] = 1;
  uint32_t found = kNone32;
  if (accept.get(0)) {
    found = 0;
  } else {
    queue.push_back(0);
    while (!queue.empty() && found == kNone32) {
      uint32_t s = queue.front();
      queue.pop_front();
      for (int l = 0; l < g.n && found == kNone32; ++l) {
        uint32_t t = g.target(s, l);
        if (t == kNoEdge || visited[t]) continue;
        visited[t] = 1;
        parent[t] = s;
        parent_label[t] = static_cast<int16_t>(l);
        if (accept.get(t)) {
          found = t;
        } else {
          queue.push_back(t);
        }
      }
    }
  }
  if (found == kNone32) return std::nullopt;
  Trace trace;
  std::vector<std::pair<uint32_t, int>> rev;
  rev.emplace_back(found, -1);
  for (uint32_t s = found; parent[s] != kNone32; s = parent[s]) {
    rev.emplace_back(parent[s], parent_label[s]);
  }
  trace.prefix.assign(rev.rbegin(), rev.rend());
  return trace;
}

// BFS within `allowed` from src to the first state satisfying `accept`;
// returns the edge entries leaving each state on the way (empty if src already
// satisfies) plus the arrival state. Requires a reachable accept state.
std::pair<std::vector<std::pair<uint32_t, int>>, uint32_t> bfs_segment(
    const StateGraph& g, const Bitset& allowed, uint32_t src,
    const std::function<bool(uint32_t)>& accept) {
  const uint32_t V = g.num_states();
  std::vector<uint32_t> parent(V, kNone32);
  std::vector<int16_t> parent_label(V, -1);
  std::vector<uint8_t> visited(V, 0);
  std::deque<uint32_t> queue;
  visited[src] = 1;
  uint32_t found = kNone32;
  if (accept(src)) {
    found = src;
  } else {
    queue.push_back(src);
    while (!queue.empty() && found == kNone32) {
      uint32_t s = queue.front();
      queue.pop_front();
      for (int l = 0; l < g.n && found == kNone32; ++l) {
        uint32_t t = g.target(s, l);
        if (t == kNoEdge || visited[t] || !allowed.get(t)) continue;
        visited[t] = 1;
        parent[t] = s;
        parent_label[t] = static_cast<int16_t>(l);
        if (accept(t)) {
          found = t;
        } else {
          queue.push_back(t);
        }
      }
    }
  }
  std::vector<std::pair<uint32_t, int>> entries;
  if (found == kNone32) return {entries, kNone32};
  std::vector<std::pair<uint32_t, int>> rev;
  for (uint32_t s = found; parent[s] != kNone32; s = parent[s]) {
    rev.emplace_back(parent[s], parent_label[s]);
  }
  entries.assign(rev.rbegin(), rev.rend());
  return {entries, found};
}

// Greedy walk through an (unfair) EG satisfaction set until a state repeats.
Trace greedy_lasso(const StateGraph& g, const Bitset& eg_states) {
  Trace trace;
  std::unordered_map<uint32_t, size_t> position;
  uint32_t cur = 0;
  while (position.find(cur) == position.end()) {
    position.emplace(cur, trace.prefix.size());
    int chosen = -1;
    for (int l = 0; l < g.n; ++l) {
      uint32_t t = g.target(cur, l);
      if (t != kNoEdge && eg_states.get(t)) {
        chosen = l;
        break;
      }
    }
    if (chosen < 0) throw std::logic_error("EG witness walk escaped the satisfaction set");
    trace.prefix.emplace_back(cur, chosen);
    cur = g.target(cur, chosen);
  }
  trace.loop_start = position.at(cur);
  return trace;
}

// Lasso whose loop covers every process label: path into a fair SCC of the
// S-induced subgraph, then a loop stitched from per-label internal edges.
std::optional<Trace> fair_lasso(const StateGraph& g, const Bitset& s) {
  SccResult scc = scc_decompose(g, &s);
  Bitset seeds = fair_scc_states(g, scc);
  if (!seeds.any() || !s.get(0)) return std::nullopt;

  auto [path, anchor] = bfs_segment(g, s, 0, [&](uint32_t v) { return seeds.get(v); });
  if (anchor == kNone32) return std::nullopt;
  const uint32_t comp = scc.comp[anchor];

  Bitset in_scc(g.num_states());
  for (uint32_t v = 0; v < g.num_states(); ++v) {
    if (scc.comp[v] == comp) in_scc.set(v);
  }

  Trace trace;
  trace.prefix = std::move(path);
  trace.loop_start = trace.prefix.size();

  uint32_t cur = anchor;
  for (int l = 0; l < g.n; ++l) {
    auto internal_edge = [&](uint32_t v) {
      uint32_t t = g.target(v, l);
      return t != kNoEdge && scc.comp[t] == comp;
    };
    auto [seg, u] = bfs_segment(g, in_scc, cur, internal_edge);
    if (u == kNone32) return std::nullopt;
    for (auto& e : seg) trace.prefix.push_back(e);
    trace.prefix.emplace_back(u, l);
    cur = g.target(u, l);
  }
  auto [closing, back] = bfs_segment(g, in_scc, cur, [&](uint32_t v) { return v == anchor; });
  if (back == kNone32) return std::nullopt;
  for (auto& e : closing) trace.prefix.push_back(e);

  // The closing segment's last edge must land on the anchor; when cur ==
  // anchor already, the final per-label edge closed the loop itself.
  return trace;
}

}  // namespace

Bitset eval_formula(const StateGraph& g, const Formula& f, Fairness fairness) {
  if (g.truncated) throw TruncatedGraphError("exploration was truncated; checking unavailable");
  ReverseCSR rcsr = build_reverse(g);
  EvalCtx ctx{g, rcsr, fairness == Fairness::RunningAll, {}};
  if (ctx.fair_mode) ctx.fair = eg_fair_impl(g, rcsr, Bitset(g.num_states(), true));
  return eval(f, ctx);
}

CheckResult check(const StateGraph& g, const Formula& f, Fairness fairness) {
  if (g.truncated) throw TruncatedGraphError("exploration was truncated; checking unavailable");
  const uint32_t V = g.num_states();
  if (V == 0) return {};

  ReverseCSR rcsr = build_reverse(g);
  EvalCtx ctx{g, rcsr, fairness == Fairness::RunningAll, {}};
  if (ctx.fair_mode) ctx.fair = eg_fair_impl(g, rcsr, Bitset(V, true));

  Bitset sat = eval(f, ctx);
  CheckResult result;
  result.holds = sat.get(0);
  result.sat_count = sat.count();

  switch (f.kind) {
    case FormulaKind::EF:
      if (result.holds) {
        Bitset target = eval(*f.lhs, ctx);
        if (ctx.fair_mode) target &= ctx.fair;
        result.evidence = bfs_path(g, target);
      }
      break;
    case FormulaKind::AG:
      if (!result.holds) {
        Bitset violation = ~eval(*f.lhs, ctx);
        if (ctx.fair_mode) violation &= ctx.fair;
        result.evidence = bfs_path(g, violation);
      }
      break;
    case FormulaKind::AF:
      if (!result.holds) {
        Bitset s = ~eval(*f.lhs, ctx);
        if (ctx.fair_mode) {
          result.evidence = fair_lasso(g, s);
        } else {
          result.evidence = greedy_lasso(g, eg_impl(g, rcsr, s));
        }
      }
      break;
    case FormulaKind::EG:
      if (result.holds) {
        Bitset s = eval(*f.lhs, ctx);
        if (ctx.fair_mode) {
          result.evidence = fair_lasso(g, s);
        } else {
          result.evidence = greedy_lasso(g, eg_impl(g, rcsr, s));
        }
      }
      break;
    default:
      break;
  }
  return result;
}

}  // namespace ringcheck
