#pragma once

#include <string>
#include <vector>

#include "ringcheck/protocol.hpp"

// Emits a textual SMV model (one node module, per-node process instances,
// per-instance fairness, and the three specs) for out-of-band cross-checking
// with an external SMV tool. Emission only; nothing here runs that tool.

namespace ringcheck {

struct SmvModel {
  std::string text;
  Variant variant;
  int n = 0;
  std::vector<int> uids;
};

SmvModel emit_smv(Variant variant, const std::vector<int>& uids);

// {variant}_{n}.smv
std::string smv_filename(Variant variant, int n);

// Structural well-formedness scan of emitted text: module inventory, section
// shapes, case/paren balance, and the per-instance FAIRNESS plus three SPEC
// declarations. Returns human-readable issues; empty means well-formed.
std::vector<std::string> check_smv_structure(const std::string& text, int n);

}  // namespace ringcheck
