#include "icfsim/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "icfsim/config_json.hpp"
#include "icfsim/dynamics.hpp"

namespace icfsim {

namespace {

std::string fmt_param(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Full-precision metric formatting so aggregate rows can be recomputed
// exactly from the instance rows.
std::string fmt_metric(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Aggregate {
  double mean = 0.0, stderr_ = 0.0;
  long n = 0;

  void feed(const std::vector<double>& xs) {
    n = static_cast<long>(xs.size());
    if (n == 0) return;
    double s = 0.0;
    for (const double x : xs) s += x;
    mean = s / static_cast<double>(n);
    if (n > 1) {
      double ss = 0.0;
      for (const double x : xs) ss += (x - mean) * (x - mean);
      stderr_ = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
    }
  }
};

}  // namespace

std::vector<WorldConfig> expand_grid(const SweepSpec& spec) {
  auto or_default = [](auto grid, auto fallback) {
    if (grid.empty()) grid.push_back(fallback);
    return grid;
  };
  const auto sims = or_default(spec.similarity_grid, spec.base.recommender.similarity);
  const auto gs = or_default(spec.g_grid, spec.base.n_genres);
  const auto ks = or_default(spec.k_grid, spec.base.items_per_user);
  const auto bs = or_default(spec.b_grid, spec.base.recommender.bias_b);
  const auto f1s = or_default(spec.f1_grid, spec.base.f1);
  const auto phis = or_default(spec.phi_grid, spec.base.phi);

  std::vector<WorldConfig> configs;
  for (const auto sim : sims)
    for (const int g : gs)
      for (const int k : ks)
        for (const double b : bs)
          for (const double f1 : f1s)
            for (const double phi : phis)
              for (int inst = 0; inst < spec.instances; ++inst) {
                WorldConfig c = spec.base;
                c.recommender.similarity = sim;
                c.n_genres = g;
                c.items_per_user = k;
                c.recommender.bias_b = b;
                c.f1 = f1;
                c.phi = phi;
                c.instance_index = static_cast<std::uint64_t>(inst);
                configs.push_back(c);
              }
  return configs;
}

std::vector<RunResult> run_many(const std::vector<WorldConfig>& configs, int parallelism,
                                const RatingsTable* table) {
  std::vector<RunResult> results(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) results[i].config = configs[i];

  if (parallelism <= 0) parallelism = static_cast<int>(std::thread::hardware_concurrency());
  parallelism = std::max(1, std::min<int>(parallelism, static_cast<int>(configs.size())));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      try {
        results[i].report =
            table != nullptr ? run_replay(configs[i], *table) : run(configs[i]);
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };
  if (parallelism == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(parallelism));
    for (int t = 0; t < parallelism; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

std::string results_csv(const std::vector<RunResult>& results,
                        const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += "phi,G,k,f1,b,similarity,instance,omega,omega1,auc_real,auc_est,fallbacks,error\n";

  auto params_prefix = [](const WorldConfig& c) {
    std::string row = fmt_param(c.phi) + "," + std::to_string(c.n_genres) + "," +
                      std::to_string(c.items_per_user) + ",";
    if (c.mode == Mode::TwoTaste) row += fmt_param(c.f1);
    row += "," + fmt_param(c.recommender.bias_b) + "," + c.similarity_name() + ",";
    return row;
  };
  auto same_point = [](const WorldConfig& a, const WorldConfig& b) {
    return a.phi == b.phi && a.n_genres == b.n_genres && a.items_per_user == b.items_per_user &&
           a.f1 == b.f1 && a.recommender.bias_b == b.recommender.bias_b &&
           a.recommender.similarity == b.recommender.similarity;
  };

  std::size_t i = 0;
  while (i < results.size()) {
    std::size_t j = i;
    while (j < results.size() && same_point(results[i].config, results[j].config)) ++j;

    std::vector<double> omegas, omega1s, reals, ests, fallbacks;
    long failed = 0;
    for (std::size_t r = i; r < j; ++r) {
      const auto& res = results[r];
      out += params_prefix(res.config) + std::to_string(res.config.instance_index) + ",";
      if (!res.error.empty()) {
        ++failed;
        std::string msg = res.error;
        for (auto& ch : msg)
          if (ch == ',' || ch == '\n') ch = ';';
        out += ",,,,," + msg + "\n";
        continue;
      }
      const auto& rep = res.report;
      if (rep.omega_defined) {
        out += fmt_metric(rep.omega);
        omegas.push_back(rep.omega);
      }
      out += ",";
      if (rep.omega1_defined) {
        out += fmt_metric(rep.omega1);
        omega1s.push_back(rep.omega1);
      }
      out += ",";
      if (!std::isnan(rep.auc_real)) {
        out += fmt_metric(rep.auc_real);
        reals.push_back(rep.auc_real);
      }
      out += ",";
      if (!std::isnan(rep.auc_est)) {
        out += fmt_metric(rep.auc_est);
        ests.push_back(rep.auc_est);
      }
      out += "," + std::to_string(rep.fallback_events) + ",\n";
      fallbacks.push_back(static_cast<double>(rep.fallback_events));
    }

    Aggregate om, om1, re, es, fb;
    om.feed(omegas);
    om1.feed(omega1s);
    re.feed(reals);
    es.feed(ests);
    fb.feed(fallbacks);
    auto agg_row = [&](const char* label, auto pick) {
      out += params_prefix(results[i].config) + label + ",";
      out += (om.n > 0 ? fmt_metric(pick(om)) : "") + std::string(",");
      out += (om1.n > 0 ? fmt_metric(pick(om1)) : "") + std::string(",");
      out += (re.n > 0 ? fmt_metric(pick(re)) : "") + std::string(",");
      out += (es.n > 0 ? fmt_metric(pick(es)) : "") + std::string(",");
      out += (fb.n > 0 ? fmt_metric(pick(fb)) : "") + std::string(",");
      out += failed > 0 ? std::to_string(failed) + " run(s) failed" : "";
      out += "\n";
    };
    agg_row("mean", [](const Aggregate& a) { return a.mean; });
    agg_row("stderr", [](const Aggregate& a) { return a.stderr_; });
    i = j;
  }
  return out;
}

SweepOutput run_sweep(const SweepSpec& spec, const RatingsTable* table) {
  SweepOutput out;
  const auto configs = expand_grid(spec);
  if (configs.empty()) throw ConfigError("sweep: empty grid");
  for (const auto& c : configs) validate(c);
  out.runs = run_many(configs, spec.parallelism, table);
  for (const auto& r : out.runs)
    if (!r.error.empty()) ++out.failures;
  out.csv = results_csv(out.runs, {"icfsim sweep results", "spec: " + to_json(spec).dump()});
  return out;
}

}  // namespace icfsim
