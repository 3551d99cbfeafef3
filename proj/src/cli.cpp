#include "ringcheck/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ringcheck/ctl.hpp"
#include "ringcheck/protocol.hpp"
#include "ringcheck/simulate.hpp"
#include "ringcheck/smv_export.hpp"
#include "ringcheck/statespace.hpp"
#include "ringcheck/version.hpp"

namespace ringcheck {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitLimit = 3;

std::vector<int> parse_uid_list(const std::string& s) {
  std::vector<int> uids;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) throw std::invalid_argument("empty uid entry in '" + s + "'");
    uids.push_back(std::stoi(tok));
  }
  return uids;
}

std::vector<int> resolve_uids(int n, const std::string& uids_str, bool seed_set, uint64_t uid_seed) {
  if (!uids_str.empty()) {
    std::vector<int> uids = parse_uid_list(uids_str);
    if (static_cast<int>(uids.size()) != n) {
      throw std::invalid_argument("--uids must list exactly n entries");
    }
    return uids;
  }
  if (seed_set) return seeded_permutation(n, uid_seed);
  std::vector<int> uids(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) uids[static_cast<size_t>(i)] = i;
  return uids;
}

Variant resolve_variant(const std::string& name) {
  auto v = variant_from_name(name);
  if (!v) throw std::invalid_argument("unknown variant '" + name + "'");
  return *v;
}

void write_output(const std::string& out_path, const std::string& content, std::ostream& out) {
  if (out_path.empty()) {
    out << content;
    if (content.empty() || content.back() != '\n') out << "\n";
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + out_path);
  f << content;
}

ordered_json uids_json(const std::vector<int>& uids) {
  ordered_json arr = ordered_json::array();
  for (int u : uids) arr.push_back(u);
  return arr;
}

ordered_json stats_json(const ExploreStats& stats) {
  ordered_json j;
  j["reachable_states"] = stats.reachable_states;
  j["transitions"] = stats.transitions;
  j["self_loops"] = stats.self_loops;
  j["quiescent_nonleader"] = stats.quiescent_nonleader;
  j["peak_frontier"] = stats.peak_frontier;
  return j;
}

std::string fmt_opt_val(uint8_t v) {
  return v == kNone ? "nil" : std::to_string(static_cast<int>(v));
}

std::string fmt_fifo(const std::vector<uint8_t>& fifo) {
  std::string s = "[";
  for (size_t i = 0; i < fifo.size(); ++i) {
    if (i) s += " ";
    s += std::to_string(static_cast<int>(fifo[i]));
  }
  return s + "]";
}

std::string state_summary(const GlobalState& g) {
  std::string s;
  for (int i = 0; i < g.size(); ++i) {
    const LocalState& nd = g.nodes[static_cast<size_t>(i)];
    if (i) s += " ";
    s += "n" + std::to_string(i) + "(" + (nd.mode == Mode::Active ? "A" : "R") + "," +
         pc_name(nd.pc) + ",vid=" + std::to_string(static_cast<int>(nd.vid)) + ")";
  }
  return s;
}

std::string render_delta(const StateGraph& graph, uint32_t from, uint32_t to, int label) {
  if (label < 0) {
    if (graph.is_error_state(from)) return "state: overflow sink";
    return "state: " + state_summary(graph.decode(from));
  }
  if (graph.is_error_state(to)) return "p" + std::to_string(label) + ": send into full inbox";
  if (from == to) return "p" + std::to_string(label) + ": blocked (stutter)";

  GlobalState a = graph.decode(from);
  GlobalState b = graph.decode(to);
  std::string s = "p" + std::to_string(label) + ":";
  for (int k = 0; k < a.size(); ++k) {
    const LocalState& x = a.nodes[static_cast<size_t>(k)];
    const LocalState& y = b.nodes[static_cast<size_t>(k)];
    std::string node = " n" + std::to_string(k) + ".";
    if (x.pc != y.pc) s += node + "pc " + pc_name(x.pc) + "->" + pc_name(y.pc);
    if (x.mode != y.mode) s += node + "mode " + (y.mode == Mode::Relay ? "relay" : "active");
    if (x.vid != y.vid) s += node + "vid " + std::to_string(x.vid) + "->" + std::to_string(y.vid);
    if (x.id2 != y.id2) s += node + "id2 " + fmt_opt_val(x.id2) + "->" + fmt_opt_val(y.id2);
    if (x.id3 != y.id3) s += node + "id3 " + fmt_opt_val(x.id3) + "->" + fmt_opt_val(y.id3);
    if (x.slot != y.slot) s += node + "slot " + fmt_opt_val(x.slot) + "->" + fmt_opt_val(y.slot);
    if (x.fifo != y.fifo) s += node + "fifo " + fmt_fifo(x.fifo) + "->" + fmt_fifo(y.fifo);
  }
  return s;
}

ordered_json trace_json(const StateGraph& graph, const Trace& trace) {
  ordered_json steps = ordered_json::array();
  for (size_t i = 0; i < trace.prefix.size(); ++i) {
    auto [state, label] = trace.prefix[i];
    uint32_t next_state = state;
    if (label >= 0) {
      next_state = graph.target(state, label);
    }
    ordered_json entry;
    entry["step"] = i;
    if (label >= 0) {
      entry["process"] = label;
    } else {
      entry["process"] = nullptr;
    }
    entry["delta"] = render_delta(graph, state, next_state, label);
    steps.push_back(std::move(entry));
  }
  ordered_json j;
  j["steps"] = std::move(steps);
  if (trace.loop_start) j["loop_start"] = *trace.loop_start;
  return j;
}

struct PropertySpec {
  std::string name;
  FormulaPtr formula;
  Fairness fairness;
  bool expected;
};

std::vector<PropertySpec> load_property_file(const std::string& path, int n, Fairness fairness) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open property file " + path);
  std::vector<PropertySpec> props;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    std::string rest = line.substr(b);

    bool expected = true;
    if (rest.rfind("expect:false", 0) == 0) {
      expected = false;
      rest = rest.substr(12);
    } else if (rest.rfind("expect:true", 0) == 0) {
      rest = rest.substr(11);
    }
    size_t colon = rest.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("property file line " + std::to_string(lineno) +
                                  ": expected 'name: formula'");
    }
    std::string name = rest.substr(0, colon);
    size_t nb = name.find_first_not_of(" \t");
    size_t ne = name.find_last_not_of(" \t");
    if (nb == std::string::npos) {
      throw std::invalid_argument("property file line " + std::to_string(lineno) + ": empty name");
    }
    name = name.substr(nb, ne - nb + 1);
    props.push_back({name, parse_formula(rest.substr(colon + 1), n), fairness, expected});
  }
  if (props.empty()) throw std::invalid_argument("property file " + path + " declares no properties");
  return props;
}

struct CheckArgs {
  std::string variant = "modified";
  int n = 0;
  std::string uids_str;
  uint64_t uid_seed = 0;
  bool uid_seed_set = false;
  std::string props = "builtin";
  std::string fairness;  // "", "running", "off"
  uint64_t max_states = 10'000'000;
  int jobs = 1;
  std::string out_path;
  std::string format = "json";
};

int do_check(const CheckArgs& args, std::ostream& out) {
  auto t0 = std::chrono::steady_clock::now();
  Variant variant = resolve_variant(args.variant);
  std::vector<int> uids = resolve_uids(args.n, args.uids_str, args.uid_seed_set, args.uid_seed);

  auto [graph, stats] = explore(variant, uids, ExploreLimits{args.max_states, 1'000'000}, args.jobs);
  if (graph.truncated) {
    ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["variant"] = variant_name(variant);
    j["n"] = args.n;
    j["uids"] = uids_json(uids);
    j["error"] = "state limit exceeded";
    j["stats"] = stats_json(stats);
    write_output(args.out_path, j.dump(2), out);
    return kExitLimit;
  }

  std::vector<PropertySpec> props;
  if (args.props == "builtin") {
    int max_uid = *std::max_element(uids.begin(), uids.end());
    for (auto& p : builtin_properties(args.n, max_uid)) {
      Fairness fair = p.fairness;
      if (args.fairness == "running") fair = Fairness::RunningAll;
      if (args.fairness == "off") fair = Fairness::None;
      props.push_back({p.name, p.formula, fair, p.expected});
    }
  } else {
    Fairness fair = args.fairness == "running" ? Fairness::RunningAll : Fairness::None;
    props = load_property_file(args.props, args.n, fair);
  }

  bool all_match = true;
  ordered_json results = ordered_json::array();
  for (const auto& p : props) {
    CheckResult r = check(graph, *p.formula, p.fairness);
    all_match = all_match && (r.holds == p.expected);
    ordered_json pj;
    pj["name"] = p.name;
    pj["formula"] = to_string(*p.formula);
    pj["fairness"] = p.fairness == Fairness::RunningAll ? "running" : "off";
    pj["expected"] = p.expected;
    pj["holds"] = r.holds;
    pj["sat_count"] = r.sat_count;
    if (r.evidence) pj["evidence"] = trace_json(graph, *r.evidence);
    results.push_back(std::move(pj));
  }

  auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);

  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["variant"] = variant_name(variant);
  j["n"] = args.n;
  j["uids"] = uids_json(uids);
  j["properties"] = std::move(results);
  j["stats"] = stats_json(stats);
  j["elapsed_ms"] = elapsed.count();
  write_output(args.out_path, j.dump(2), out);
  return all_match ? kExitOk : kExitMismatch;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"explicit-state verification workbench for ring leader election"};
  app.require_subcommand(1);

  CheckArgs check_args;
  auto* cmd_check = app.add_subcommand("check", "model-check the CTL properties on the reachable graph");
  cmd_check->add_option("--variant", check_args.variant, "general|modified|extra (aliases alg2|alg3|alg4)");
  cmd_check->add_option("-n,--nodes", check_args.n, "ring size")->required();
  cmd_check->add_option("--uids", check_args.uids_str, "comma-separated uid permutation");
  auto* check_seed = cmd_check->add_option("--uid-seed", check_args.uid_seed, "seed for a random uid permutation");
  cmd_check->add_option("--props", check_args.props, "builtin or a property file path");
  cmd_check->add_option("--fairness", check_args.fairness, "running|off (default: per-property)")
      ->check(CLI::IsMember({"running", "off"}));
  cmd_check->add_option("--max-states", check_args.max_states, "exploration state limit");
  cmd_check->add_option("--jobs", check_args.jobs, "parallel exploration workers");
  cmd_check->add_option("--out", check_args.out_path, "write the JSON report to this path");
  cmd_check->add_option("--format", check_args.format, "json")->check(CLI::IsMember({"json"}));

  struct {
    std::string variant = "modified";
    int n = 0;
    std::string uids_str;
    uint64_t uid_seed = 0;
    uint64_t max_states = 10'000'000;
    int jobs = 1;
    std::string out_path;
    std::string format = "json";
  } explore_args;
  auto* cmd_explore = app.add_subcommand("explore", "enumerate the reachable state graph and print stats");
  cmd_explore->add_option("--variant", explore_args.variant, "general|modified|extra");
  cmd_explore->add_option("-n,--nodes", explore_args.n, "ring size")->required();
  cmd_explore->add_option("--uids", explore_args.uids_str, "comma-separated uid permutation");
  auto* explore_seed = cmd_explore->add_option("--uid-seed", explore_args.uid_seed, "seed for a random uid permutation");
  cmd_explore->add_option("--max-states", explore_args.max_states, "exploration state limit");
  cmd_explore->add_option("--jobs", explore_args.jobs, "parallel exploration workers");
  cmd_explore->add_option("--out", explore_args.out_path, "write the stats JSON to this path");
  cmd_explore->add_option("--format", explore_args.format, "json")->check(CLI::IsMember({"json"}));

  struct {
    std::string variant = "modified";
    int n = 0;
    std::string uids_str;
    uint64_t uid_seed = 0;
    uint64_t seed = 0;
    int runs = 1;
    uint64_t max_steps = 1'000'000;
    std::string format = "json";
    std::string out_path;
  } sim_args;
  auto* cmd_sim = app.add_subcommand("simulate", "run the asynchronous simulator");
  cmd_sim->add_option("--variant", sim_args.variant, "general|modified|extra");
  cmd_sim->add_option("-n,--nodes", sim_args.n, "ring size")->required();
  cmd_sim->add_option("--uids", sim_args.uids_str, "comma-separated uid permutation");
  auto* sim_seed_opt = cmd_sim->add_option("--uid-seed", sim_args.uid_seed, "seed for a random uid permutation");
  cmd_sim->add_option("--seed", sim_args.seed, "scheduler seed of the first run");
  cmd_sim->add_option("--runs", sim_args.runs, "number of runs (seeds seed, seed+1, ...)");
  cmd_sim->add_option("--max-steps", sim_args.max_steps, "per-run step budget");
  cmd_sim->add_option("--format", sim_args.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  cmd_sim->add_option("--out", sim_args.out_path, "write the report to this path");

  struct {
    std::string variant = "all";
    std::string n_range = "2..8";
    int runs = 10;
    uint64_t seed = 0;
    int jobs = 1;
    std::string format = "csv";
    std::string out_path;
  } sweep_args;
  auto* cmd_sweep = app.add_subcommand("sweep", "run seeded simulator sweeps across ring sizes");
  cmd_sweep->add_option("--variant", sweep_args.variant, "general|modified|extra|all");
  cmd_sweep->add_option("--n-range", sweep_args.n_range, "inclusive range a..b");
  cmd_sweep->add_option("--runs", sweep_args.runs, "runs per (variant, n) cell");
  cmd_sweep->add_option("--seed", sweep_args.seed, "base seed");
  cmd_sweep->add_option("--jobs", sweep_args.jobs, "parallel workers");
  cmd_sweep->add_option("--format", sweep_args.format, "csv|json")->check(CLI::IsMember({"json", "csv"}));
  cmd_sweep->add_option("--out", sweep_args.out_path, "write the table to this path");

  struct {
    std::string variant = "modified";
    int n = 0;
    std::string uids_str;
    uint64_t uid_seed = 0;
    std::string out_path;
  } smv_args;
  auto* cmd_smv = app.add_subcommand("export-smv", "emit the SMV model for external cross-checking");
  cmd_smv->add_option("--variant", smv_args.variant, "general|modified|extra");
  cmd_smv->add_option("-n,--nodes", smv_args.n, "ring size")->required();
  cmd_smv->add_option("--uids", smv_args.uids_str, "comma-separated uid permutation");
  auto* smv_seed_opt = cmd_smv->add_option("--uid-seed", smv_args.uid_seed, "seed for a random uid permutation");
  cmd_smv->add_option("--out", smv_args.out_path, "output file (default {variant}_{n}.smv)");

  std::vector<const char*> argv;
  argv.push_back(kToolName);
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (cmd_check->parsed()) {
      check_args.uid_seed_set = check_seed->count() > 0;
      return do_check(check_args, out);
    }

    if (cmd_explore->parsed()) {
      Variant variant = resolve_variant(explore_args.variant);
      std::vector<int> uids =
          resolve_uids(explore_args.n, explore_args.uids_str, explore_seed->count() > 0, explore_args.uid_seed);
      auto [graph, stats] = explore(variant, uids, ExploreLimits{explore_args.max_states, 1'000'000},
                                    explore_args.jobs);
      ordered_json j;
      j["variant"] = variant_name(variant);
      j["n"] = explore_args.n;
      j["uids"] = uids_json(uids);
      ordered_json sj = stats_json(stats);
      for (auto& [key, value] : sj.items()) j[key] = value;
      if (graph.truncated) j["truncated"] = true;
      write_output(explore_args.out_path, j.dump(2), out);
      return graph.truncated ? kExitLimit : kExitOk;
    }

    if (cmd_sim->parsed()) {
      Variant variant = resolve_variant(sim_args.variant);
      std::vector<int> uids =
          resolve_uids(sim_args.n, sim_args.uids_str, sim_seed_opt->count() > 0, sim_args.uid_seed);
      if (sim_args.runs < 1) throw std::invalid_argument("--runs must be positive");

      bool budget_hit = false;
      bool overflow = false;
      std::vector<std::pair<uint64_t, SimReport>> runs;
      for (int r = 0; r < sim_args.runs; ++r) {
        uint64_t seed = sim_args.seed + static_cast<uint64_t>(r);
        SimReport rep = run_async(variant, uids, Scheduler::uniform(seed), sim_args.max_steps);
        budget_hit = budget_hit || (!rep.terminated && !rep.overflow);
        overflow = overflow || rep.overflow;
        runs.emplace_back(seed, std::move(rep));
      }
      SyncPhaseReport oracle = sync_oracle(uids);

      if (sim_args.format == "csv") {
        std::string csv = sweep_csv_header() + "\n";
        for (auto& [seed, rep] : runs) {
          SweepRow row{variant, sim_args.n, seed, uids, rep, oracle.winner, oracle.phases};
          csv += sweep_row_csv(row) + "\n";
        }
        write_output(sim_args.out_path, csv, out);
      } else {
        ordered_json j;
        j["tool"] = kToolName;
        j["version"] = kToolVersion;
        j["variant"] = variant_name(variant);
        j["n"] = sim_args.n;
        j["uids"] = uids_json(uids);
        j["oracle_winner"] = oracle.winner;
        j["oracle_phases"] = oracle.phases;
        ordered_json arr = ordered_json::array();
        for (auto& [seed, rep] : runs) {
          ordered_json rj;
          rj["seed"] = seed;
          rj["terminated"] = rep.terminated;
          if (rep.elected) rj["elected"] = *rep.elected;
          if (rep.elected_vid) rj["elected_vid"] = *rep.elected_vid;
          rj["steps"] = rep.steps;
          rj["link_transmissions"] = rep.link_transmissions;
          if (rep.overflow) rj["overflow"] = true;
          arr.push_back(std::move(rj));
        }
        j["runs"] = std::move(arr);
        write_output(sim_args.out_path, j.dump(2), out);
      }
      if (overflow) return kExitMismatch;
      return budget_hit ? kExitLimit : kExitOk;
    }

    if (cmd_sweep->parsed()) {
      std::vector<Variant> variants;
      if (sweep_args.variant == "all") {
        variants = {Variant::General, Variant::Modified, Variant::ExtraModified};
      } else {
        variants = {resolve_variant(sweep_args.variant)};
      }
      size_t dots = sweep_args.n_range.find("..");
      if (dots == std::string::npos) throw std::invalid_argument("--n-range must look like a..b");
      int lo = std::stoi(sweep_args.n_range.substr(0, dots));
      int hi = std::stoi(sweep_args.n_range.substr(dots + 2));
      if (lo < 1 || hi < lo) throw std::invalid_argument("--n-range bounds out of order");
      std::vector<int> n_range;
      for (int n = lo; n <= hi; ++n) n_range.push_back(n);

      std::vector<SweepRow> rows =
          sweep(variants, n_range, sweep_args.runs, sweep_args.seed, sweep_args.jobs);
      bool budget_hit = false;
      for (const auto& row : rows) {
        budget_hit = budget_hit || (!row.report.terminated && !row.report.overflow);
      }

      if (sweep_args.format == "csv") {
        std::string csv = sweep_csv_header() + "\n";
        for (const auto& row : rows) csv += sweep_row_csv(row) + "\n";
        write_output(sweep_args.out_path, csv, out);
      } else {
        ordered_json arr = ordered_json::array();
        for (const auto& row : rows) {
          ordered_json rj;
          rj["variant"] = variant_name(row.variant);
          rj["n"] = row.n;
          rj["seed"] = row.seed;
          rj["uids"] = uids_json(row.uids);
          if (row.report.elected) rj["elected"] = *row.report.elected;
          if (row.report.elected_vid) rj["elected_vid"] = *row.report.elected_vid;
          rj["steps"] = row.report.steps;
          rj["link_transmissions"] = row.report.link_transmissions;
          rj["oracle_winner"] = row.oracle_winner;
          rj["phases"] = row.oracle_phases;
          arr.push_back(std::move(rj));
        }
        write_output(sweep_args.out_path, arr.dump(2), out);
      }
      return budget_hit ? kExitLimit : kExitOk;
    }

    if (cmd_smv->parsed()) {
      Variant variant = resolve_variant(smv_args.variant);
      std::vector<int> uids =
          resolve_uids(smv_args.n, smv_args.uids_str, smv_seed_opt->count() > 0, smv_args.uid_seed);
      SmvModel model = emit_smv(variant, uids);
      std::string path = smv_args.out_path.empty() ? smv_filename(variant, smv_args.n) : smv_args.out_path;
      std::ofstream f(path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot open output file " + path);
      f << model.text;
      out << "wrote " << path << "\n";
      return kExitOk;
    }
  } catch (const TruncatedGraphError& e) {
    err << "resource limit: " << e.what() << "\n";
    return kExitLimit;
  } catch (const ParseError& e) {
    err << "syntax error at position " << e.position << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ringcheck
