#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ringcheck/bitset.hpp"
#include "ringcheck/protocol.hpp"
#include "ringcheck/statespace.hpp"

// CTL over explored state graphs: fixpoint labeling, weak-fairness
// relativization via fair SCCs, and witness/counterexample extraction.

namespace ringcheck {

enum class FormulaKind : uint8_t {
  ConstTrue,
  ConstFalse,
  AtomRef,
  Not,
  And,
  Or,
  Implies,
  EX,
  EG,
  EU,
  AX,
  AF,
  AG,
  EF,
  AU,
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FormulaKind kind = FormulaKind::ConstTrue;
  Atom atom{};
  FormulaPtr lhs;
  FormulaPtr rhs;

  static FormulaPtr constant(bool value);
  static FormulaPtr make(Atom a);
  static FormulaPtr make(FormulaKind k, FormulaPtr operand);
  static FormulaPtr make(FormulaKind k, FormulaPtr a, FormulaPtr b);
};

std::string to_string(const Formula& f);

struct ParseError : std::runtime_error {
  size_t position;
  ParseError(const std::string& msg, size_t pos) : std::runtime_error(msg), position(pos) {}
};

// Grammar: unary AF/AG/EF/EG/AX/EX and "!" bind tightest, then "&", then
// "|" ("/" accepted as alias), then "->" (right associative); E[ f U g ] and
// A[ f U g ] are bracketed. Atoms: leader(i), vid(i)=k, mode(i)=active|relay,
// quiescent, true, false. Whitespace-insensitive. Atom indices are validated
// against n (IndexError).
FormulaPtr parse_formula(std::string_view text, int n);

enum class Fairness { None, RunningAll };

struct BuiltinProperty {
  std::string name;
  FormulaPtr formula;
  Fairness fairness;
  bool expected;  // verdict the protocol is supposed to produce
};

// P1: a leader is eventually elected (checked under running fairness).
// P2: two simultaneous leaders are reachable (expected to be false).
// P3: an elected leader always carries the maximum initial uid.
std::vector<BuiltinProperty> builtin_properties(int n, int max_uid);

struct CheckResult {
  bool holds = false;
  std::optional<Trace> evidence;
  uint64_t sat_count = 0;
};

// Labels the graph bottom-up and reports whether state 0 satisfies f.
// Evidence: a finite witness path for a true EF root, a finite violation path
// for a false AG root, and a lasso for a false AF root (fair lasso when
// fairness is RunningAll, i.e. its loop covers every label; otherwise any
// cycle). Throws TruncatedGraphError on truncated graphs.
CheckResult check(const StateGraph& graph, const Formula& f, Fairness fairness);

// Set-level engine, exposed for tests and cross-validation against naive
// oracles. All operate on edge structure only.
Bitset atom_set(const StateGraph& graph, const Atom& a);
Bitset ex_set(const StateGraph& graph, const Bitset& s);
Bitset eu_set(const StateGraph& graph, const Bitset& a, const Bitset& b);
Bitset eg_set(const StateGraph& graph, const Bitset& s);
Bitset eg_fair_set(const StateGraph& graph, const Bitset& s);
Bitset fair_set(const StateGraph& graph);

// States from which some path visits every process label infinitely often.
std::vector<uint32_t> fair_states(const StateGraph& graph);

Bitset eval_formula(const StateGraph& graph, const Formula& f, Fairness fairness);

}  // namespace ringcheck
