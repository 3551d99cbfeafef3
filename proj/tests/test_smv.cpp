#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "ringcheck/smv_export.hpp"

using namespace ringcheck;

namespace {

int count_occurrences(const std::string& text, const std::string& needle) {
  int count = 0;
  for (size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
    ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("emission is deterministic") {
  SmvModel a = emit_smv(Variant::Modified, {0, 1, 2});
  SmvModel b = emit_smv(Variant::Modified, {0, 1, 2});
  CHECK(a.text == b.text);
}

TEST_CASE("structural inventory: instances, specs, fairness") {
  SmvModel m = emit_smv(Variant::Modified, {0, 1, 2});
  CHECK(count_occurrences(m.text, ": process node(") == 3);
  CHECK(count_occurrences(m.text, "SPEC ") == 3);
  CHECK(count_occurrences(m.text, "FAIRNESS ") == 3);
  CHECK(m.text.find("node2 : process node(2, slot2, slot0);") != std::string::npos);
}

TEST_CASE("the third spec resolves MaxUID to the concrete maximum") {
  SmvModel m = emit_smv(Variant::Modified, {0, 1, 2});
  CHECK(m.text.find("-> node0.vid = 2)") != std::string::npos);
  CHECK(m.text.find("-> node1.vid = 2)") != std::string::npos);
  CHECK(m.text.find("-> node2.vid = 2)") != std::string::npos);

  SmvModel shuffled = emit_smv(Variant::General, {3, 1, 0, 2});
  CHECK(shuffled.text.find("-> node0.vid = 3)") != std::string::npos);
}

TEST_CASE("single-node model degenerates cleanly") {
  SmvModel m = emit_smv(Variant::ExtraModified, {0});
  CHECK(m.text.find("SPEC EF (FALSE)") != std::string::npos);
  CHECK(check_smv_structure(m.text, 1).empty());
}

TEST_CASE("grammar checker passes the full emission matrix") {
  for (Variant v : {Variant::General, Variant::Modified, Variant::ExtraModified}) {
    for (int n = 1; n <= 5; ++n) {
      CAPTURE(variant_name(v));
      CAPTURE(n);
      std::vector<int> uids(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) uids[static_cast<size_t>(i)] = (i + 1) % n;
      SmvModel m = emit_smv(v, uids);
      auto issues = check_smv_structure(m.text, n);
      for (const auto& issue : issues) {
        FAIL_CHECK(issue);
      }
      CHECK(issues.empty());
    }
  }
}

TEST_CASE("grammar checker flags broken models") {
  SmvModel m = emit_smv(Variant::Modified, {0, 1});
  std::string no_esac = m.text;
  size_t pos = no_esac.find("esac;");
  REQUIRE(pos != std::string::npos);
  no_esac.erase(pos, 5);
  CHECK_FALSE(check_smv_structure(no_esac, 2).empty());

  std::string no_fairness = m.text;
  pos = no_fairness.find("FAIRNESS node0.running\n");
  REQUIRE(pos != std::string::npos);
  no_fairness.erase(pos, std::string("FAIRNESS node0.running\n").size());
  CHECK_FALSE(check_smv_structure(no_fairness, 2).empty());
}

TEST_CASE("filenames follow {variant}_{n}.smv") {
  CHECK(smv_filename(Variant::General, 4) == "general_4.smv");
  CHECK(smv_filename(Variant::Modified, 3) == "modified_3.smv");
  CHECK(smv_filename(Variant::ExtraModified, 8) == "extra_8.smv");
}

TEST_CASE("golden: modified n=2 transition cases mirror the step table") {
  // Desk-checked against the per-process step table: relay receive/forward,
  // active send at S0, receive at S2, match-or-forward at S3, receive at S4,
  // decide at S5.
  SmvModel m = emit_smv(Variant::Modified, {0, 1});
  const std::string expected_pc =
      "  next(pc) :=\n"
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
  CHECK(m.text.find(expected_pc) != std::string::npos);

  const std::string expected_sends =
      "  next(nextinput) :=\n"
      "    case\n"
      "      mode = relay & pc = 1 & nextinput = EMPTY : vid;\n"
      "      mode = active & pc = 0 & nextinput = EMPTY : vid;\n"
      "      mode = active & pc = 3 & !(vid = id2) & nextinput = EMPTY : id2;\n"
      "      TRUE : nextinput;\n"
      "    esac;\n";
  CHECK(m.text.find(expected_sends) != std::string::npos);

  const std::string expected_decide =
      "  adopt := id2 > vid & id2 > id3;\n";
  CHECK(m.text.find(expected_decide) != std::string::npos);
}

TEST_CASE("shipped artifacts match fresh emission") {
  const std::string dir = std::string(RINGCHECK_SOURCE_DIR) + "/artifacts/smv/";
  for (Variant v : {Variant::General, Variant::Modified, Variant::ExtraModified}) {
    for (int n = 1; n <= 5; ++n) {
      CAPTURE(variant_name(v));
      CAPTURE(n);
      std::vector<int> uids(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) uids[static_cast<size_t>(i)] = i;
      std::ifstream f(dir + smv_filename(v, n), std::ios::binary);
      REQUIRE(f.good());
      std::stringstream buf;
      buf << f.rdbuf();
      CHECK(buf.str() == emit_smv(v, uids).text);
    }
  }
}
