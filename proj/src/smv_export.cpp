#include "ringcheck/smv_export.hpp"

#include <algorithm>
#include <sstream>

namespace ringcheck {

namespace {

std::string uid_list(const std::vector<int>& uids) {
  std::string s;
  for (size_t i = 0; i < uids.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(uids[i]);
  }
  return s;
}

void emit_specs(std::ostringstream& out, int n, int max_uid) {
  out << "DEFINE\n  LEAD_VAL := 6;\n\n";

  out << "SPEC AF (";
  for (int i = 0; i < n; ++i) {
    if (i) out << " | ";
    out << "node" << i << ".pc = LEAD_VAL";
  }
  out << ")\n";

  out << "SPEC EF (";
  if (n == 1) {
    out << "FALSE";
  } else {
    bool first = true;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (!first) out << " | ";
        first = false;
        out << "(node" << i << ".pc = LEAD_VAL & node" << j << ".pc = LEAD_VAL)";
      }
    }
  }
  out << ")\n";

  out << "SPEC AG (";
  for (int i = 0; i < n; ++i) {
    if (i) out << " & ";
    out << "(node" << i << ".pc = LEAD_VAL -> node" << i << ".vid = " << max_uid << ")";
  }
  out << ")\n\n";

  for (int i = 0; i < n; ++i) {
    out << "FAIRNESS node" << i << ".running\n";
  }
}

void emit_slot_node_module(std::ostringstream& out, Variant variant, int n) {
  const std::string empty = std::to_string(n);
  out << "MODULE node(uid, myinput, nextinput)\n";
  out << "VAR\n";
  out << "  vid : 0.." << n - 1 << ";\n";
  out << "  mode : {active, relay};\n";
  out << "  pc : 0..6;\n";
  out << "  id2 : 0.." << n << ";\n";
  if (variant == Variant::Modified) {
    out << "  id3 : 0.." << n << ";\n";
  }
  out << "DEFINE\n";
  out << "  LEAD_VAL := 6;\n";
  out << "  EMPTY := " << empty << ";\n";
  out << "  UNSET := " << empty << ";\n";
  if (variant == Variant::Modified) {
    out << "  adopt := id2 > vid & id2 > id3;\n";
  } else {
    out << "  adopt := id2 > vid & id2 > myinput;\n";
  }
  out << "ASSIGN\n";
  out << "  init(vid) := uid;\n";
  out << "  init(mode) := active;\n";
  out << "  init(pc) := 0;\n";
  out << "  init(id2) := UNSET;\n";
  if (variant == Variant::Modified) {
    out << "  init(id3) := UNSET;\n";
  }

  if (variant == Variant::Modified) {
    out << "  next(pc) :=\n"
           "    case\n"
           "      mode = relay & pc = 0 & myinput != EMPTY : 1;\n"
           "      mode = relay & pc = 1 & nextinput = EMPTY : 0;\n"
           "      mode = active & pc = 0 & nextinput = EMPTY : 2;\n"
           "      mode = active & pc = 2 & myinput != EMPTY : 3;\n"
           "      mode = active & pc = 3 & vid = id2 : LEAD_VAL;\n"
           "      mode = active & pc = 3 & !(vid = id2) & nextinput = EMPTY : 4;\n"
           "      mode = active & pc = 4 & myinput != EMPTY : 5;\n"
           "      mode = active & pc = 5 : 0;\n"
           "      TRUE : pc;\n"
           "    esac;\n";
    out << "  next(vid) :=\n"
           "    case\n"
           "      mode = relay & pc = 0 & myinput != EMPTY : myinput;\n"
           "      mode = active & pc = 5 & adopt : id2;\n"
           "      TRUE : vid;\n"
           "    esac;\n";
    out << "  next(mode) :=\n"
           "    case\n"
           "      mode = active & pc = 5 & !adopt : relay;\n"
           "      TRUE : mode;\n"
           "    esac;\n";
    out << "  next(id2) :=\n"
           "    case\n"
           "      mode = active & pc = 2 & myinput != EMPTY : myinput;\n"
           "      mode = active & pc = 5 : UNSET;\n"
           "      TRUE : id2;\n"
           "    esac;\n";
    out << "  next(id3) :=\n"
           "    case\n"
           "      mode = active & pc = 4 & myinput != EMPTY : myinput;\n"
           "      mode = active & pc = 5 : UNSET;\n"
           "      TRUE : id3;\n"
           "    esac;\n";
    out << "  next(myinput) :=\n"
           "    case\n"
           "      mode = relay & pc = 0 & myinput != EMPTY : EMPTY;\n"
           "      mode = active & pc = 2 & myinput != EMPTY : EMPTY;\n"
           "      mode = active & pc = 4 & myinput != EMPTY : EMPTY;\n"
           "      TRUE : myinput;\n"
           "    esac;\n";
    out << "  next(nextinput) :=\n"
           "    case\n"
           "      mode = relay & pc = 1 & nextinput = EMPTY : vid;\n"
           "      mode = active & pc = 0 & nextinput = EMPTY : vid;\n"
           "      mode = active & pc = 3 & !(vid = id2) & nextinput = EMPTY : id2;\n"
           "      TRUE : nextinput;\n"
           "    esac;\n";
  } else {
    out << "  next(pc) :=\n"
           "    case\n"
           "      mode = active & pc = 0 & nextinput = EMPTY : 2;\n"
           "      mode = active & pc = 2 & myinput != EMPTY : 3;\n"
           "      mode = active & pc = 3 & vid = id2 : LEAD_VAL;\n"
           "      mode = active & pc = 3 & !(vid = id2) & nextinput = EMPTY : 4;\n"
           "      mode = active & pc = 4 & myinput != EMPTY : 0;\n"
           "      TRUE : pc;\n"
           "    esac;\n";
    out << "  next(vid) :=\n"
           "    case\n"
           "      mode = active & pc = 4 & myinput != EMPTY & adopt : id2;\n"
           "      TRUE : vid;\n"
           "    esac;\n";
    out << "  next(mode) :=\n"
           "    case\n"
           "      mode = active & pc = 4 & myinput != EMPTY & !adopt : relay;\n"
           "      TRUE : mode;\n"
           "    esac;\n";
    out << "  next(id2) :=\n"
           "    case\n"
           "      mode = active & pc = 2 & myinput != EMPTY : myinput;\n"
           "      mode = active & pc = 4 & myinput != EMPTY : UNSET;\n"
           "      TRUE : id2;\n"
           "    esac;\n";
    out << "  next(myinput) :=\n"
           "    case\n"
           "      mode = relay & myinput != EMPTY & nextinput = EMPTY : EMPTY;\n"
           "      mode = active & pc = 2 & myinput != EMPTY : EMPTY;\n"
           "      mode = active & pc = 4 & myinput != EMPTY : EMPTY;\n"
           "      TRUE : myinput;\n"
           "    esac;\n";
    out << "  next(nextinput) :=\n"
           "    case\n"
           "      mode = relay & myinput != EMPTY & nextinput = EMPTY : myinput;\n"
           "      mode = active & pc = 0 & nextinput = EMPTY : vid;\n"
           "      mode = active & pc = 3 & !(vid = id2) & nextinput = EMPTY : id2;\n"
           "      TRUE : nextinput;\n"
           "    esac;\n";
  }
  out << "\n";
}

void emit_slot_main(std::ostringstream& out, int n, const std::vector<int>& uids) {
  out << "MODULE main\n";
  out << "VAR\n";
  for (int i = 0; i < n; ++i) {
    out << "  slot" << i << " : 0.." << n << ";\n";
  }
  for (int i = 0; i < n; ++i) {
    out << "  node" << i << " : process node(" << uids[static_cast<size_t>(i)] << ", slot" << i
        << ", slot" << (i + 1) % n << ");\n";
  }
  out << "ASSIGN\n";
  for (int i = 0; i < n; ++i) {
    out << "  init(slot" << i << ") := " << n << ";\n";
  }
  out << "\n";
}

void emit_general_node_module(std::ostringstream& out, int n) {
  const int two_n = 2 * n;
  out << "MODULE node(uid, mybuf, myrd, mywr, nextbuf, nextrd, nextwr, ovf)\n";
  out << "VAR\n";
  out << "  vid : 0.." << n - 1 << ";\n";
  out << "  mode : {active, relay};\n";
  out << "  pc : 0..6;\n";
  out << "  id2 : 0.." << n << ";\n";
  out << "  id3 : 0.." << n << ";\n";
  out << "DEFINE\n";
  out << "  LEAD_VAL := 6;\n";
  out << "  UNSET := " << n << ";\n";
  // Read/write indices range over 0..2n-1 so occupancy distinguishes a full
  // buffer (n) from an empty one (0); the cell index is the pointer mod n.
  out << "  myocc := (mywr + " << two_n << " - myrd) mod " << two_n << ";\n";
  out << "  nextocc := (nextwr + " << two_n << " - nextrd) mod " << two_n << ";\n";
  out << "  recv_val :=\n    case\n";
  for (int k = 0; k < n; ++k) {
    out << "      myrd mod " << n << " = " << k << " : mybuf[" << k << "];\n";
  }
  out << "    esac;\n";
  out << "  adopt := id2 > vid & id2 > id3;\n";
  out << "  push_now := (mode = relay & pc = 0 & myocc > 0 & nextocc < " << n
      << ") | (mode = active & pc = 0 & nextocc < " << n
      << ") | (mode = active & pc = 2 & !(vid = id2) & nextocc < " << n << ");\n";
  out << "  push_val :=\n"
         "    case\n"
         "      mode = relay : recv_val;\n"
         "      mode = active & pc = 0 : vid;\n"
         "      TRUE : id2;\n"
         "    esac;\n";
  out << "  pop_now := (mode = relay & pc = 0 & myocc > 0 & nextocc < " << n
      << ") | (mode = active & pc = 1 & myocc > 0) | (mode = active & pc = 3 & myocc > 0);\n";
  out << "  push_blocked := (mode = relay & pc = 0 & myocc > 0 & nextocc = " << n
      << ") | (mode = active & pc = 0 & nextocc = " << n
      << ") | (mode = active & pc = 2 & !(vid = id2) & nextocc = " << n << ");\n";
  out << "ASSIGN\n";
  out << "  init(vid) := uid;\n";
  out << "  init(mode) := active;\n";
  out << "  init(pc) := 0;\n";
  out << "  init(id2) := UNSET;\n";
  out << "  init(id3) := UNSET;\n";
  out << "  next(pc) :=\n"
         "    case\n"
         "      ovf : pc;\n"
         "      mode = active & pc = 0 & nextocc < " << n << " : 1;\n"
         "      mode = active & pc = 1 & myocc > 0 : 2;\n"
         "      mode = active & pc = 2 & vid = id2 : LEAD_VAL;\n"
         "      mode = active & pc = 2 & !(vid = id2) & nextocc < " << n << " : 3;\n"
         "      mode = active & pc = 3 & myocc > 0 : 4;\n"
         "      mode = active & pc = 4 : 0;\n"
         "      TRUE : pc;\n"
         "    esac;\n";
  out << "  next(vid) :=\n"
         "    case\n"
         "      ovf : vid;\n"
         "      mode = active & pc = 4 & adopt : id2;\n"
         "      TRUE : vid;\n"
         "    esac;\n";
  out << "  next(mode) :=\n"
         "    case\n"
         "      ovf : mode;\n"
         "      mode = active & pc = 4 & !adopt : relay;\n"
         "      TRUE : mode;\n"
         "    esac;\n";
  out << "  next(id2) :=\n"
         "    case\n"
         "      ovf : id2;\n"
         "      mode = active & pc = 1 & myocc > 0 : recv_val;\n"
         "      mode = active & pc = 4 : UNSET;\n"
         "      TRUE : id2;\n"
         "    esac;\n";
  out << "  next(id3) :=\n"
         "    case\n"
         "      ovf : id3;\n"
         "      mode = active & pc = 3 & myocc > 0 : recv_val;\n"
         "      mode = active & pc = 4 : UNSET;\n"
         "      TRUE : id3;\n"
         "    esac;\n";
  out << "  next(myrd) :=\n"
         "    case\n"
         "      ovf : myrd;\n"
         "      pop_now : (myrd + 1) mod " << two_n << ";\n"
         "      TRUE : myrd;\n"
         "    esac;\n";
  out << "  next(nextwr) :=\n"
         "    case\n"
         "      ovf : nextwr;\n"
         "      push_now : (nextwr + 1) mod " << two_n << ";\n"
         "      TRUE : nextwr;\n"
         "    esac;\n";
  for (int k = 0; k < n; ++k) {
    out << "  next(nextbuf[" << k << "]) :=\n"
        << "    case\n"
        << "      !ovf & push_now & nextwr mod " << n << " = " << k << " : push_val;\n"
        << "      TRUE : nextbuf[" << k << "];\n"
        << "    esac;\n";
  }
  out << "  next(ovf) :=\n"
         "    case\n"
         "      push_blocked : TRUE;\n"
         "      TRUE : ovf;\n"
         "    esac;\n";
  out << "\n";
}

void emit_general_main(std::ostringstream& out, int n, const std::vector<int>& uids) {
  out << "MODULE main\n";
  out << "VAR\n";
  out << "  ovf : boolean;\n";
  for (int i = 0; i < n; ++i) {
    out << "  buf" << i << " : array 0.." << n - 1 << " of 0.." << n - 1 << ";\n";
    out << "  rd" << i << " : 0.." << 2 * n - 1 << ";\n";
    out << "  wr" << i << " : 0.." << 2 * n - 1 << ";\n";
  }
  for (int i = 0; i < n; ++i) {
    const int s = (i + 1) % n;
    out << "  node" << i << " : process node(" << uids[static_cast<size_t>(i)] << ", buf" << i
        << ", rd" << i << ", wr" << i << ", buf" << s << ", rd" << s << ", wr" << s << ", ovf);\n";
  }
  out << "ASSIGN\n";
  out << "  init(ovf) := FALSE;\n";
  for (int i = 0; i < n; ++i) {
    out << "  init(rd" << i << ") := 0;\n";
    out << "  init(wr" << i << ") := 0;\n";
    for (int k = 0; k < n; ++k) {
      out << "  init(buf" << i << "[" << k << "]) := 0;\n";
    }
  }
  out << "\n";
}

}  // namespace

SmvModel emit_smv(Variant variant, const std::vector<int>& uids) {
  GlobalState init = initial_state(variant, uids);  // validates
  const int n = init.size();
  const int max_uid = *std::max_element(uids.begin(), uids.end());

  std::ostringstream out;
  out << "-- ring leader election, " << variant_name(variant) << " step table\n";
  out << "-- variant=" << variant_name(variant) << " n=" << n << " uids=" << uid_list(uids) << "\n\n";

  if (variant == Variant::General) {
    emit_general_node_module(out, n);
    emit_general_main(out, n, uids);
  } else {
    emit_slot_node_module(out, variant, n);
    emit_slot_main(out, n, uids);
  }
  emit_specs(out, n, max_uid);

  return SmvModel{out.str(), variant, n, uids};
}

std::string smv_filename(Variant variant, int n) {
  return std::string(variant_name(variant)) + "_" + std::to_string(n) + ".smv";
}

namespace {

std::string strip_comment(const std::string& line) {
  size_t pos = line.find("--");
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool starts_with(const std::string& s, const char* prefix) {
  return s.rfind(prefix, 0) == 0;
}

std::string trimmed(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> check_smv_structure(const std::string& text, int n) {
  std::vector<std::string> issues;

  int modules = 0;
  bool saw_main = false;
  bool saw_node = false;
  int spec_count = 0;
  int fairness_count = 0;
  int process_count = 0;
  int case_depth = 0;
  long paren_balance = 0;
  long bracket_balance = 0;
  std::string section;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trimmed(strip_comment(raw));
    if (line.empty()) continue;

    for (char c : line) {
      if (c == '(') ++paren_balance;
      if (c == ')') --paren_balance;
      if (c == '[') ++bracket_balance;
      if (c == ']') --bracket_balance;
    }
    if (paren_balance < 0 || bracket_balance < 0) {
      issues.push_back("line " + std::to_string(lineno) + ": unbalanced closing delimiter");
      return issues;
    }

    if (starts_with(line, "MODULE")) {
      ++modules;
      if (line.find("MODULE main") != std::string::npos) saw_main = true;
      if (line.find("MODULE node") != std::string::npos) saw_node = true;
      section = "MODULE";
      continue;
    }
    if (line == "VAR" || line == "ASSIGN" || line == "DEFINE") {
      if (case_depth != 0) {
        issues.push_back("line " + std::to_string(lineno) + ": section starts inside a case");
      }
      section = line;
      continue;
    }
    if (starts_with(line, "SPEC")) {
      ++spec_count;
      section = "SPEC";
      continue;
    }
    if (starts_with(line, "FAIRNESS")) {
      ++fairness_count;
      if (line.find("running") == std::string::npos) {
        issues.push_back("line " + std::to_string(lineno) + ": FAIRNESS without running condition");
      }
      continue;
    }

    if (line.find(": process node(") != std::string::npos) ++process_count;

    if (line == "case") {
      ++case_depth;
      continue;
    }
    if (line == "esac;" || line == "esac") {
      if (case_depth == 0) {
        issues.push_back("line " + std::to_string(lineno) + ": esac without case");
      } else {
        --case_depth;
      }
      continue;
    }

    if (section == "VAR" && case_depth == 0) {
      if (line.find(':') == std::string::npos || line.back() != ';') {
        issues.push_back("line " + std::to_string(lineno) + ": malformed VAR declaration");
      }
    } else if (section == "ASSIGN" && case_depth == 0) {
      bool is_assign_head = starts_with(line, "init(") || starts_with(line, "next(");
      if (is_assign_head) {
        if (line.find(":=") == std::string::npos) {
          issues.push_back("line " + std::to_string(lineno) + ": assignment without :=");
        }
      } else {
        issues.push_back("line " + std::to_string(lineno) + ": unexpected statement in ASSIGN");
      }
    } else if (section == "DEFINE" && case_depth == 0) {
      if (line.find(":=") == std::string::npos) {
        issues.push_back("line " + std::to_string(lineno) + ": DEFINE entry without :=");
      }
    } else if (case_depth > 0) {
      if (line.back() != ';' || line.find(':') == std::string::npos) {
        issues.push_back("line " + std::to_string(lineno) + ": malformed case branch");
      }
    }
  }

  if (modules != 2) issues.push_back("expected exactly 2 modules, found " + std::to_string(modules));
  if (!saw_main) issues.push_back("missing MODULE main");
  if (!saw_node) issues.push_back("missing MODULE node");
  if (spec_count != 3) issues.push_back("expected 3 SPEC blocks, found " + std::to_string(spec_count));
  if (fairness_count != n) {
    issues.push_back("expected " + std::to_string(n) + " FAIRNESS declarations, found " +
                     std::to_string(fairness_count));
  }
  if (process_count != n) {
    issues.push_back("expected " + std::to_string(n) + " process instances, found " +
                     std::to_string(process_count));
  }
  if (case_depth != 0) issues.push_back("unterminated case block");
  if (paren_balance != 0) issues.push_back("unbalanced parentheses");
  if (bracket_balance != 0) issues.push_back("unbalanced brackets");
  return issues;
}

}  // namespace ringcheck
