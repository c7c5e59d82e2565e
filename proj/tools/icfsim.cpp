// icfsim command line: single runs, parameter sweeps, ratings-file replay,
// self-verification and plot rendering.
//
// Exit codes: 0 success, 1 run failure, 2 configuration/usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "icfsim/config_json.hpp"
#include "icfsim/dynamics.hpp"
#include "icfsim/movielens.hpp"
#include "icfsim/plot.hpp"
#include "icfsim/sweep.hpp"

namespace {

using namespace icfsim;

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitConfigError = 2;

void apply_preset(const std::string& name, SweepSpec& spec) {
  WorldConfig& c = spec.base;
  if (name == "desk") {
    c.n_users = 500;
    c.n_items = 100;
    c.n_genres = 10;
    c.items_per_user = 7;
    c.updates_per_user = 20000;
    spec.instances = 10;
  } else if (name == "paper") {
    c.n_users = 2000;
    c.n_items = 100;
    c.n_genres = 10;
    c.items_per_user = 7;
    c.updates_per_user = 100000;
    spec.instances = 50;
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected desk or paper)");
  }
}

// --config and --preset apply before the remaining flags, so explicit flags
// always win; this scans argv ahead of CLI11.
std::string argv_value(int argc, char** argv, const std::string& flag) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == flag && i + 1 < argc) return argv[i + 1];
    if (arg.rfind(flag + "=", 0) == 0) return arg.substr(flag.size() + 1);
  }
  return {};
}

void load_spec_file(const std::string& path, SweepSpec& spec) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  // Accept either a bare run config or a full sweep spec document.
  if (doc.contains("base") || doc.contains("phi_grid") || doc.contains("instances"))
    spec = sweep_spec_from_json(doc, spec);
  else
    spec.base = world_config_from_json(doc, spec.base);
}

void add_world_options(CLI::App* cmd, WorldConfig& c) {
  cmd->add_option("-N,--users", c.n_users, "number of users");
  cmd->add_option("-M,--items", c.n_items, "number of items");
  cmd->add_option("-G,--genres", c.n_genres, "number of taste groups");
  cmd->add_option("-k,--degree", c.items_per_user, "items held per user");
  cmd->add_option("--phi", c.phi, "deliberate-selection frequency");
  cmd->add_option("--f1", c.f1, "taste-1 selection fraction (two-taste mode)");
  cmd->add_option("-T,--updates-per-user", c.updates_per_user, "updates per user");
  cmd->add_option("--burn-in", c.burn_in_fraction, "measurement window start fraction");
  cmd->add_option_function<std::string>(
         "--mode",
         [&c](const std::string& v) {
           if (v == "single_taste")
             c.mode = Mode::SingleTaste;
           else if (v == "two_taste")
             c.mode = Mode::TwoTaste;
           else
             throw CLI::ValidationError("--mode", "expected single_taste or two_taste");
         },
         "single_taste | two_taste")
      ->type_name("MODE");
  cmd->add_option_function<std::string>(
         "--init",
         [&c](const std::string& v) {
           if (v == "uniform")
             c.init = InitKind::Uniform;
           else if (v == "taste_matched")
             c.init = InitKind::TasteMatched;
           else
             throw CLI::ValidationError("--init", "expected uniform or taste_matched");
         },
         "initial collection draw: uniform | taste_matched")
      ->type_name("INIT");
  cmd->add_option_function<std::string>(
         "--similarity",
         [&c](const std::string& v) { c.recommender.similarity = similarity_from_string(v); },
         "cn | cosine")
      ->type_name("SIM");
  cmd->add_option("--bias-b", c.recommender.bias_b, "weight of selection edges (1 = off)");
  cmd->add_option_function<std::string>(
         "--bias-scope",
         [&c](const std::string& v) {
           if (v == "score_only")
             c.recommender.bias_scope = BiasScope::ScoreOnly;
           else if (v == "everywhere")
             c.recommender.bias_scope = BiasScope::Everywhere;
           else
             throw CLI::ValidationError("--bias-scope", "expected score_only or everywhere");
         },
         "score_only | everywhere")
      ->type_name("SCOPE");
  cmd->add_option("--seed", c.master_seed, "master seed");
  cmd->add_option("--instance", c.instance_index, "instance index");
  cmd->add_option("--auc-reps", c.auc_est_repetitions, "probe repetitions for auc_est");
  cmd->add_flag("--probe-reuse-similarity,!--probe-rebuild-similarity",
                c.probe_reuse_similarity,
                "rank probes against live similarities (default) or rebuild from training");
  cmd->add_option("--sparse-above", c.sparse_above,
                  "co-occurrence goes sparse when items exceed this");
  cmd->add_option_function<std::string>(
         "--omega-source",
         [&c](const std::string& v) {
           if (v == "events")
             c.omega_source = OmegaSource::Events;
           else if (v == "shadow")
             c.omega_source = OmegaSource::Shadow;
           else
             throw CLI::ValidationError("--omega-source", "expected events or shadow");
         },
         "omega from acquisition events or shadow probes")
      ->type_name("SRC");
  cmd->add_option("--shadow-samples", c.shadow_samples, "target shadow probes per run");
}

std::string default_out_path(const std::string& flag_value, const std::string& filename) {
  if (!flag_value.empty()) return flag_value;
  if (const char* dir = std::getenv("ICFSIM_OUT_DIR"); dir != nullptr && *dir != '\0')
    return (std::filesystem::path(dir) / filename).string();
  return filename;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void print_report(const MetricsReport& r) {
  std::cout << "similarity=" << r.config.similarity_name() << " phi=" << r.config.phi
            << " G=" << r.config.n_genres << " k=" << r.config.items_per_user
            << " b=" << r.config.recommender.bias_b << " instance=" << r.config.instance_index
            << "\n";
  if (r.omega_defined)
    std::cout << "omega      " << r.omega << "\n";
  else
    std::cout << "omega      undefined (no measured recommendation events)\n";
  if (r.omega1_defined) std::cout << "omega1     " << r.omega1 << "\n";
  std::cout << "auc_real   " << r.auc_real << "\n"
            << "auc_est    " << r.auc_est << "\n"
            << "rec_events " << r.rec_events << "  sel_events " << r.sel_events
            << "  shadow " << r.shadow_events << "  fallbacks " << r.fallback_events
            << "  skipped " << r.skipped_events << "\n";
}

std::vector<double> parse_double_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.empty()) return grid;
  if (text.find(':') != std::string::npos) {
    double lo, hi, step;
    char c1, c2;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
      throw ConfigError("bad grid '" + text + "' (expected lo:hi:step)");
    // index-based points: accumulation drift could push the last value past hi
    for (int i = 0;; ++i) {
      const double v = lo + i * step;
      if (v > hi + step * 1e-9) break;
      grid.push_back(std::min(v, hi));
    }
    return grid;
  }
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) grid.push_back(std::stod(tok));
  return grid;
}

std::vector<int> parse_int_grid(const std::string& text) {
  std::vector<int> grid;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) grid.push_back(std::stoi(tok));
  return grid;
}

int run_verify();

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"icfsim: users co-evolving with an item-based collaborative filter"};
  app.require_subcommand(1);

  SweepSpec spec;  // carries the base WorldConfig for every subcommand
  try {
    // replay accuracy is sampled by shadow probes unless overridden, so it
    // stays defined at phi = 1; config file and flags take precedence
    if (argc > 1 && std::string(argv[1]) == "movielens")
      spec.base.omega_source = OmegaSource::Shadow;
    if (const auto preset = argv_value(argc, argv, "--preset"); !preset.empty())
      apply_preset(preset, spec);
    if (const auto cfg_path = argv_value(argc, argv, "--config"); !cfg_path.empty())
      load_spec_file(cfg_path, spec);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  std::string preset_dummy, config_dummy;

  // --- simulate ---
  auto* sim = app.add_subcommand("simulate", "run one instance and print its report");
  add_world_options(sim, spec.base);
  sim->add_option("--preset", preset_dummy, "desk | paper (applied before other flags)");
  sim->add_option("--config", config_dummy, "JSON config file (applied before other flags)");
  std::string trace_path, snapshot_path, sim_csv_path, dump_scores_path;
  long dump_scores_step = -1;
  int dump_scores_user = 0;
  sim->add_option("--trace", trace_path, "per-event CSV trace (small runs only)");
  sim->add_option("--snapshot", snapshot_path, "write the final edge list CSV here");
  sim->add_option("--csv", sim_csv_path, "write a one-run result CSV here");
  sim->add_option("--dump-scores-step", dump_scores_step, "step at which to dump a score vector");
  sim->add_option("--dump-scores-user", dump_scores_user, "user whose scores are dumped");
  sim->add_option("--dump-scores-file", dump_scores_path, "score dump destination");

  // --- sweep ---
  auto* sw = app.add_subcommand("sweep", "run a parameter grid and emit CSV");
  add_world_options(sw, spec.base);
  sw->add_option("--preset", preset_dummy, "desk | paper (applied before other flags)");
  sw->add_option("--config", config_dummy, "JSON sweep/config file (applied before other flags)");
  std::string phi_grid_text, g_grid_text, k_grid_text, f1_grid_text, b_grid_text, sim_grid_text;
  std::string sweep_out;
  sw->add_option("--phi-grid", phi_grid_text, "comma list or lo:hi:step");
  sw->add_option("--g-grid", g_grid_text, "comma list of G values");
  sw->add_option("--k-grid", k_grid_text, "comma list of k values");
  sw->add_option("--f1-grid", f1_grid_text, "comma list or lo:hi:step");
  sw->add_option("--b-grid", b_grid_text, "comma list or lo:hi:step");
  sw->add_option("--similarity-grid", sim_grid_text, "comma list of cn,cosine");
  sw->add_option("--instances", spec.instances, "instances per grid point");
  sw->add_option("-j,--jobs", spec.parallelism, "worker threads (0 = hardware)");
  sw->add_option("-o,--out", sweep_out, "output CSV path (default $ICFSIM_OUT_DIR/sweep.csv)");

  // --- movielens ---
  auto* ml = app.add_subcommand("movielens", "replay dynamics over a ratings file");
  add_world_options(ml, spec.base);
  ml->add_option("--preset", preset_dummy, "desk | paper (applied before other flags)");
  ml->add_option("--config", config_dummy, "JSON config file (applied before other flags)");
  std::string ml_data, ml_phi_grid_text, ml_out;
  ml->add_option("--data", ml_data, "ratings file (user<TAB>item<TAB>rating<TAB>timestamp)");
  ml->add_flag("--exclude-ineligible-edges", spec.base.exclude_ineligible_edges,
               "drop ineligible users' edges from the adjacency");
  ml->add_option("--phi-grid", ml_phi_grid_text, "comma list or lo:hi:step");
  ml->add_option("--instances", spec.instances, "instances per grid point");
  ml->add_option("-j,--jobs", spec.parallelism, "worker threads (0 = hardware)");
  ml->add_option("-o,--out", ml_out, "output CSV path (default $ICFSIM_OUT_DIR/movielens.csv)");

  // --- verify ---
  app.add_subcommand("verify", "run the oracle and property self-checks");

  // --- plot ---
  auto* pl = app.add_subcommand("plot", "render an SVG from a sweep CSV");
  std::string plot_csv, plot_kind = "omega-phi", plot_out;
  pl->add_option("--csv", plot_csv, "input CSV produced by sweep/movielens")->required();
  pl->add_option("--kind", plot_kind, "omega-phi | auc-phi | omega1-f1");
  pl->add_option("-o,--out", plot_out, "output SVG path (default $ICFSIM_OUT_DIR/<kind>.svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (sim->parsed()) {
      RunHooks hooks;
      std::ofstream trace_out, dump_out;
      if (!trace_path.empty()) {
        trace_out.open(trace_path);
        if (!trace_out) throw std::runtime_error("cannot write " + trace_path);
        trace_out << "step,user,channel,item,genre,match\n";
        hooks.on_step = [&trace_out](long t, const StepOutcome& o) {
          trace_out << t << ',' << o.user << ','
                    << (o.channel == Channel::Selection ? "selection" : "recommendation") << ','
                    << o.item << ',' << o.genre << ',' << (o.match ? 1 : 0) << '\n';
        };
      }
      if (dump_scores_step >= 0) {
        const auto path = dump_scores_path.empty() ? std::string("scores.csv") : dump_scores_path;
        dump_out.open(path);
        if (!dump_out) throw std::runtime_error("cannot write " + path);
        hooks.dump_scores_step = dump_scores_step;
        hooks.dump_scores_user = dump_scores_user;
        hooks.dump_scores_out = &dump_out;
      }
      std::ofstream snapshot_out;
      if (!snapshot_path.empty()) {
        snapshot_out.open(snapshot_path);
        if (!snapshot_out) throw std::runtime_error("cannot write " + snapshot_path);
        hooks.on_finish = [&snapshot_out](const BipartiteState& s) {
          s.write_edges_csv(snapshot_out);
        };
      }
      validate(spec.base);
      const MetricsReport report = run(spec.base, &hooks);
      print_report(report);
      if (!sim_csv_path.empty()) {
        RunResult rr{report.config, report, ""};
        write_file(sim_csv_path,
                   results_csv({rr}, {"icfsim simulate result",
                                      "config: " + to_json(report.config).dump()}));
      }
      return kExitOk;
    }

    if (sw->parsed()) {
      if (!phi_grid_text.empty()) spec.phi_grid = parse_double_grid(phi_grid_text);
      if (!g_grid_text.empty()) spec.g_grid = parse_int_grid(g_grid_text);
      if (!k_grid_text.empty()) spec.k_grid = parse_int_grid(k_grid_text);
      if (!f1_grid_text.empty()) spec.f1_grid = parse_double_grid(f1_grid_text);
      if (!b_grid_text.empty()) spec.b_grid = parse_double_grid(b_grid_text);
      if (!sim_grid_text.empty()) {
        spec.similarity_grid.clear();
        std::istringstream in(sim_grid_text);
        std::string tok;
        while (std::getline(in, tok, ',')) spec.similarity_grid.push_back(similarity_from_string(tok));
      }
      const SweepOutput out = run_sweep(spec);
      const auto path = default_out_path(sweep_out, "sweep.csv");
      write_file(path, out.csv);
      std::cout << "wrote " << path << " (" << out.runs.size() << " runs, " << out.failures
                << " failed)\n";
      return out.failures == 0 ? kExitOk : kExitRunFailure;
    }

    if (ml->parsed()) {
      if (ml_data.empty()) {
        if (const char* env = std::getenv("ICFSIM_ML100K"); env != nullptr) ml_data = env;
      }
      if (ml_data.empty()) ml_data = "data/ml-100k/u.data";
      const RatingsTable table = parse_ratings(ml_data);
      spec.base.mode = Mode::Replay;
      if (!ml_phi_grid_text.empty()) spec.phi_grid = parse_double_grid(ml_phi_grid_text);
      const SweepOutput out = run_sweep(spec, &table);
      const auto path = default_out_path(ml_out, "movielens.csv");
      write_file(path, out.csv);
      std::cout << "wrote " << path << " (" << out.runs.size() << " runs over " << table.n_users
                << " users x " << table.n_items << " items, " << out.failures << " failed)\n";
      return out.failures == 0 ? kExitOk : kExitRunFailure;
    }

    if (app.get_subcommand("verify")->parsed()) return run_verify();

    if (pl->parsed()) {
      const FigureKind kind = figure_kind_from_name(plot_kind);
      const auto path = default_out_path(plot_out, plot_kind + ".svg");
      render_plot_file(plot_csv, kind, path);
      std::cout << "wrote " << path << "\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailure;
  }
  return kExitOk;
}

namespace {

int run_verify() {
  int failures = 0;
  auto check = [&failures](const char* name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };

  // 1. incremental co-occurrence vs brute force over random churn
  {
    WorldConfig cfg;
    cfg.n_users = 40;
    cfg.n_items = 30;
    cfg.n_genres = 5;
    cfg.items_per_user = 4;
    SplitMix64 rng(42);
    auto [state, tastes] = new_synthetic(cfg, rng);
    for (int i = 0; i < 20000; ++i) {
      const auto u = static_cast<int>(rng.uniform_index(cfg.n_users));
      const auto held = static_cast<int>(state.collection(u).size());
      const bool remove = held == cfg.n_items || (held > 0 && rng.bernoulli(0.5));
      if (remove) {
        state.remove_at(u, static_cast<int>(rng.uniform_index(held)));
      } else {
        int item;
        do {
          item = static_cast<int>(rng.uniform_index(cfg.n_items));
        } while (state.has_item(u, item));
        state.add_item(u, item, Provenance::ViaSelection);
      }
    }
    check("incremental counts equal brute-force recomputation", state.verify_against_oracle());
  }

  // 2. add/remove inverse identity
  {
    WorldConfig cfg;
    cfg.n_users = 12;
    cfg.n_items = 20;
    cfg.n_genres = 4;
    cfg.items_per_user = 5;
    SplitMix64 rng(7);
    auto [state, tastes] = new_synthetic(cfg, rng);
    const auto before = state.fingerprint();
    state.add_item(3, state.has_item(3, 0) ? (state.has_item(3, 1) ? 2 : 1) : 0,
                   Provenance::ViaRecommendation);
    state.remove_at(3, static_cast<int>(state.collection(3).size()) - 1);
    check("add then remove restores the state", state.fingerprint() == before);
  }

  // 3. rank formula vs pairwise Monte Carlo
  {
    SplitMix64 rng(99);
    bool ok = true;
    for (int trial = 0; trial < 5 && ok; ++trial) {
      std::vector<double> scores(50);
      for (auto& s : scores) s = static_cast<double>(rng.uniform_index(8));
      const int correct = static_cast<int>(rng.uniform_index(scores.size()));
      const double exact = auc_for_item(scores, correct);
      double mc = 0.0;
      const int samples = 100000;
      for (int i = 0; i < samples; ++i) {
        const auto g = static_cast<int>(rng.uniform_index(scores.size()));
        if (g == correct) continue;
        if (scores[g] < scores[correct])
          mc += 1.0;
        else if (scores[g] == scores[correct])
          mc += 0.5;
      }
      ok = std::abs(mc / samples - exact) < 0.01;
    }
    check("auc_for_item matches Monte-Carlo pairwise ranking", ok);
  }

  // 4. sweep determinism, serial vs parallel
  {
    SweepSpec s;
    s.base.n_users = 60;
    s.base.n_items = 40;
    s.base.n_genres = 4;
    s.base.items_per_user = 4;
    s.base.updates_per_user = 300;
    s.phi_grid = {0.2, 0.8};
    s.instances = 2;
    s.parallelism = 1;
    const auto serial = run_sweep(s);
    s.parallelism = 4;
    const auto parallel = run_sweep(s);
    check("serial and parallel sweeps are byte-identical", serial.csv == parallel.csv);
  }

  // 5. cosine similarity stays within [0, 1]
  {
    WorldConfig cfg;
    cfg.n_users = 30;
    cfg.n_items = 25;
    cfg.n_genres = 5;
    cfg.items_per_user = 6;
    cfg.recommender.similarity = Similarity::Cosine;
    SplitMix64 rng(5);
    auto [state, tastes] = new_synthetic(cfg, rng);
    bool ok = true;
    for (int a = 0; a < cfg.n_items && ok; ++a)
      for (int b = 0; b < cfg.n_items && ok; ++b) {
        if (a == b) continue;
        const double s = similarity(state, a, b, cfg.recommender);
        ok = s >= 0.0 && s <= 1.0 + 1e-12;
      }
    check("cosine similarity lies in [0, 1]", ok);
  }

  std::cout << (failures == 0 ? "verify: all checks passed\n" : "verify: checks FAILED\n");
  return failures == 0 ? kExitOk : kExitRunFailure;
}

}  // namespace
