// Command line driver: simulate, analyze, predict, markov, debruijn, check.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "mg/acceptance.hpp"
#include "mg/debruijn.hpp"
#include "mg/experiment.hpp"
#include "mg/game.hpp"
#include "mg/levels.hpp"
#include "mg/markov.hpp"
#include "mg/stats.hpp"
#include "mg/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string default_out_dir() {
  if (const char* env = std::getenv("MG_OUT_DIR")) return env;
  return "mg-out";
}

// Game flags shared by simulate/analyze-style commands. Flags win over
// the config file.
struct GameFlags {
  std::string config_file;
  std::int64_t agents = -1;
  int memory = -1;
  int strategies = -1;
  std::string payoff;
  std::int64_t steps = -1;
  std::int64_t seed = -1;
  std::string assignment;
  std::string initial_history;
  std::string initial_utilities;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "key=value config file");
    cmd->add_option("--agents,-N", agents, "number of agents N");
    cmd->add_option("--memory,-m", memory, "memory length m");
    cmd->add_option("--strategies-per-agent,-S", strategies, "strategies per agent S");
    cmd->add_option("--payoff,-g", payoff, "payoff function: sgn, x, x-over-n");
    cmd->add_option("--steps,-T", steps, "number of steps");
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--assignment", assignment, "independent or distinct draws");
    cmd->add_option("--initial-history", initial_history,
                    "random or a history integer");
    cmd->add_option("--initial-utilities", initial_utilities,
                    "zero, perturbed, or a comma list of rationals");
  }

  mg::GameConfig resolve() const {
    mg::GameConfig cfg;
    if (!config_file.empty()) cfg = mg::load_config_file(config_file);
    std::ostringstream overrides;
    if (agents >= 0) overrides << "agents=" << agents << "\n";
    if (memory >= 0) overrides << "memory=" << memory << "\n";
    if (strategies >= 0) overrides << "strategies_per_agent=" << strategies << "\n";
    if (!payoff.empty()) overrides << "payoff=" << payoff << "\n";
    if (steps >= 0) overrides << "steps=" << steps << "\n";
    if (seed >= 0) overrides << "seed=" << seed << "\n";
    if (!assignment.empty()) overrides << "assignment=" << assignment << "\n";
    if (!initial_history.empty())
      overrides << "initial_history=" << initial_history << "\n";
    if (!initial_utilities.empty())
      overrides << "initial_utilities=" << initial_utilities << "\n";
    return mg::parse_config_text(overrides.str(), cfg);
  }
};

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path().empty() ? "." : p.parent_path());
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

json autocorr_json(const mg::AutocorrelationResult& ac) {
  json j;
  j["degenerate"] = ac.degenerate;
  j["r"] = ac.r;
  if (!ac.degenerate) j["argmax_positive_lag"] = ac.argmax_positive_lag();
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minority game simulator and analysis toolkit"};
  app.require_subcommand(1);

  // ---- simulate -----------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "run one game and write a trace CSV");
  GameFlags sim_flags;
  sim_flags.attach(sim);
  std::string sim_out = default_out_dir();
  bool sim_serial = false;
  sim->add_option("--out,-o", sim_out, "output directory");
  sim->add_flag("--serial", sim_serial, "use the serial reference engine");
  sim->callback([&]() {
    const mg::GameConfig cfg = sim_flags.resolve();
    const mg::Trace trace = mg::run_game(
        cfg, sim_serial ? mg::ExecMode::kSerialReference : mg::ExecMode::kParallel);
    fs::create_directories(sim_out);
    const fs::path path = fs::path(sim_out) / "trace.csv";
    mg::write_trace_csv(trace, path.string());
    std::cout << "wrote " << path.string() << " (" << trace.steps() << " steps, "
              << trace.columns() << " utility columns)\n";
  });

  // ---- analyze --------------------------------------------------------------
  auto* ana = app.add_subcommand("analyze", "run analyses against a trace CSV");
  std::string ana_trace;
  std::string ana_out = default_out_dir();
  std::vector<std::string> ana_list;
  double ana_threshold = -1.0;
  ana->add_option("--trace", ana_trace, "trace CSV produced by simulate")->required();
  ana->add_option("--analyses", ana_list,
                  "subset of: autocorr scatter levels peaks audit split euler")
      ->delimiter(',');
  ana->add_option("--peak-threshold", ana_threshold, "absolute demand threshold");
  ana->add_option("--out,-o", ana_out, "output directory");
  ana->callback([&]() {
    const mg::Trace trace = mg::read_trace_csv(ana_trace);
    const int period = 2 << trace.config.memory;
    fs::create_directories(ana_out);
    json out;
    if (ana_list.empty())
      ana_list = {"autocorr", "levels", "peaks", "audit"};
    for (const auto& a : ana_list) {
      if (a == "autocorr") {
        out["autocorr"] = autocorr_json(mg::autocorrelation(trace.demand, 4 * period));
      } else if (a == "scatter") {
        std::ostringstream os;
        os << "A_t,A_t_plus_lag\n";
        for (std::int64_t t = 0; t + period < trace.steps(); ++t)
          os << trace.demand[t] << "," << trace.demand[t + period] << "\n";
        write_text(fs::path(ana_out) / "scatter.csv", os.str());
        out["scatter"] = "scatter.csv";
      } else if (a == "levels") {
        const auto cc = mg::level_clustering(
            trace.demand, 5,
            std::max(1.0, static_cast<double>(trace.config.agents) / 100.0));
        out["levels"] = {{"centers", cc.centers}, {"occupancy", cc.occupancy}};
      } else if (a == "peaks") {
        const auto rep = mg::analyze_peaks(trace, ana_threshold);
        json p;
        p["count"] = rep.peak_times.size();
        p["frequency"] = rep.frequency;
        p["mean_abs_height"] = rep.mean_abs_height;
        p["threshold"] = rep.threshold;
        p["unique_history"] = rep.unique_history;
        p["modal_history_fraction"] = rep.modal_history_fraction;
        if (rep.critical_history) {
          p["critical_history"] = *rep.critical_history;
          p["critical_history_homogeneous"] = rep.critical_history_homogeneous;
        }
        p["sign_alternation_fraction"] = rep.sign_alternation_fraction;
        p["times"] = rep.peak_times;
        p["heights"] = rep.heights;
        out["peaks"] = std::move(p);
      } else if (a == "audit") {
        const auto rep = mg::utility_bound_audit(trace);
        out["audit"] = {{"max_abs_utility", rep.max_abs_utility},
                        {"bound", rep.bound},
                        {"bound_applies", rep.bound_applies},
                        {"pass", rep.pass},
                        {"attained", rep.attained}};
      } else if (a == "split") {
        const auto rep =
            mg::utility_split_check(trace, mg::analyze_peaks(trace, ana_threshold));
        out["split"] = {{"classifications", rep.classifications},
                        {"mean_gap", rep.mean_gap},
                        {"mean_intra_spread", rep.mean_intra_spread},
                        {"raw_gap_fraction", rep.raw_gap_fraction},
                        {"mean_center_separation", rep.mean_center_separation},
                        {"mean_group_sd", rep.mean_group_sd},
                        {"frac_all_good", rep.frac_all_good},
                        {"frac_mixed", rep.frac_mixed},
                        {"frac_all_bad", rep.frac_all_bad},
                        {"reward_symmetry_fraction", rep.reward_symmetry_fraction}};
      } else if (a == "euler") {
        out["euler_following_fraction"] = mg::verify_eulerian_following(trace);
      } else {
        throw std::invalid_argument("unknown analysis: " + a);
      }
    }
    const fs::path path = fs::path(ana_out) / "analysis.json";
    write_text(path, out.dump(2));
    std::cout << out.dump(2) << "\n";
  });

  // ---- predict ---------------------------------------------------------------
  auto* pred = app.add_subcommand("predict", "closed-form predictions as JSON");
  int pred_m = 2;
  int pred_S = 2;
  std::int64_t pred_N = 1601;
  pred->add_option("--memory,-m", pred_m, "memory length");
  pred->add_option("--strategies-per-agent,-S", pred_S, "strategies per agent");
  pred->add_option("--agents,-N", pred_N, "agents (for demand scale)");
  pred->callback([&]() {
    json j;
    const auto ladder = mg::level_list(pred_m);
    j["levels"] = ladder.levels;
    json counts = json::array();
    for (const auto& c : ladder.counts) counts.push_back(c.get_str());
    j["level_counts"] = counts;
    json probs = json::array();
    for (int l = 1; l <= (1 << pred_m) + 1; ++l)
      probs.push_back(mg::rat_str(mg::prob_active_at_level_step(pred_m, pred_S, l)));
    j["level_probabilities"] = probs;
    const auto st = mg::best_action_stats(pred_m, pred_S);
    j["p_max"] = mg::rat_str(st.p_max);
    j["p_min"] = mg::rat_str(st.p_min);
    j["p_best_action"] = mg::rat_str(st.p_best_action);
    j["extremal_expected_demand"] =
        mg::rat_str((2 * st.p_best_action - 1) * mg::Rat(static_cast<long>(pred_N)));
    j["peak_height"] = mg::rat_str(mg::expected_peak_height(pred_N, pred_S));
    j["peak_frequency"] = mg::rat_str(mg::expected_peak_frequency(pred_m));
    j["euler_period"] = 2 << pred_m;
    std::cout << j.dump(2) << "\n";
  });

  // ---- markov -----------------------------------------------------------------
  auto* mar = app.add_subcommand("markov", "exact chain enumeration or extraction");
  int mar_m = 1;
  int mar_S = 2;
  std::string mar_trace, mar_format = "json", mar_out;
  std::int64_t mar_N = 401;
  mar->add_option("--memory,-m", mar_m, "memory length (exact enumeration: <= 2)");
  mar->add_option("--strategies-per-agent,-S", mar_S, "strategies per agent");
  mar->add_option("--agents,-N", mar_N, "agents (scales expected demand)");
  mar->add_option("--from-trace", mar_trace, "extract the state graph of a trace");
  mar->add_option("--format", mar_format, "json or dot");
  mar->add_option("--out,-o", mar_out, "write to file instead of stdout");
  mar->callback([&]() {
    std::string text;
    if (!mar_trace.empty()) {
      const mg::Trace trace = mg::read_trace_csv(mar_trace);
      const auto graph = mg::extract_state_graph(trace);
      text = mar_format == "dot" ? mg::chain_to_dot(graph) : mg::chain_to_json(graph);
    } else {
      const auto chain = mg::enumerate_chain(mar_m, mar_S);
      if (mar_format == "dot") {
        text = mg::chain_to_dot(chain);
      } else if (mg::recurrent_classes(chain).size() == 1) {
        const auto dist = mg::stationary(chain);
        text = mg::chain_to_json(chain, &dist);
      } else {
        // reducible: emit the chain with its classes, no unique pi
        text = mg::chain_to_json(chain);
      }
    }
    if (mar_out.empty())
      std::cout << text << "\n";
    else
      write_text(mar_out, text);
  });

  // ---- debruijn ------------------------------------------------------------------
  auto* dbj = app.add_subcommand("debruijn", "de Bruijn graph and Euler trails");
  int dbj_m = 2;
  bool dbj_trails = false;
  std::string dbj_format = "edges";
  dbj->add_option("--memory,-m", dbj_m, "graph order");
  dbj->add_flag("--trails", dbj_trails, "enumerate Euler circuits (m <= 3)");
  dbj->add_option("--format", dbj_format, "edges or dot");
  dbj->callback([&]() {
    const auto g = mg::build_graph(dbj_m);
    if (dbj_format == "dot") {
      std::cout << "digraph debruijn {\n";
      for (int e = 0; e < g.num_edges(); ++e)
        std::cout << "  n" << g.edge_source(e) << " -> n" << g.edge_target(e)
                  << " [label=\"" << (e & 1) << "\"];\n";
      std::cout << "}\n";
    } else {
      std::cout << "nodes " << g.num_nodes() << " edges " << g.num_edges() << "\n";
      for (int e = 0; e < g.num_edges(); ++e)
        std::cout << "edge " << e << ": " << g.edge_source(e) << " -> "
                  << g.edge_target(e) << " (append " << (e & 1) << ")\n";
      const auto [h1, h2] = mg::homogeneous_nodes(g);
      std::cout << "homogeneous nodes: " << h1 << " " << h2 << "\n";
      std::cout << "euler circuits (up to rotation): " << mg::count_euler_trails(g)
                << "\n";
    }
    if (dbj_trails) {
      const auto trails = mg::euler_trails(g);
      for (const auto& t : trails) {
        std::cout << "trail edges:";
        for (int e : t.edges) std::cout << " " << e;
        std::cout << "  labels:";
        for (int e : t.edges) std::cout << (e & 1);
        std::cout << "\n";
      }
    }
  });

  // ---- run (experiment spec) --------------------------------------------------------
  auto* runcmd = app.add_subcommand("run", "batch experiment across seeds");
  GameFlags run_flags;
  run_flags.attach(runcmd);
  std::string run_out = default_out_dir();
  std::vector<std::string> run_analyses = {"autocorr", "levels", "audit"};
  std::vector<std::uint64_t> run_seeds;
  runcmd->add_option("--out,-o", run_out, "output directory");
  runcmd->add_option("--analyses", run_analyses, "analyses to run")->delimiter(',');
  runcmd->add_option("--seeds", run_seeds, "seed list")->delimiter(',');
  runcmd->callback([&]() {
    mg::ExperimentSpec spec;
    spec.game = run_flags.resolve();
    spec.analyses = run_analyses;
    spec.seeds = run_seeds.empty() ? std::vector<std::uint64_t>{1, 2, 3, 4, 5}
                                   : run_seeds;
    spec.output_dir = run_out;
    const auto report = mg::run_experiment(spec);
    std::cout << report.to_text();
    if (!report.all_pass()) std::exit(1);
  });

  // ---- check ---------------------------------------------------------------------
  auto* check = app.add_subcommand("check", "run the acceptance battery");
  bool check_quick = false;
  int check_only = 0;
  std::string check_out = default_out_dir();
  check->add_flag("--quick", check_quick, "smaller sweeps (smoke run)");
  check->add_option("--only", check_only, "run a single criterion (1-12)");
  check->add_option("--out,-o", check_out, "artifact directory");
  check->callback([&]() {
    mg::AcceptanceOptions opts;
    opts.quick = check_quick;
    opts.only = check_only;
    opts.out_dir = check_out;
    const auto report = mg::run_acceptance(opts, std::cout);
    if (!report.all_pass()) std::exit(1);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
