#pragma once
// Parameter sweeps: grid expansion, parallel instance execution and
// deterministic CSV emission with per-point mean / standard-error rows.

#include <ostream>
#include <string>
#include <vector>

#include "icfsim/config.hpp"
#include "icfsim/metrics.hpp"
#include "icfsim/movielens.hpp"

namespace icfsim {

struct SweepSpec {
  WorldConfig base;
  std::vector<double> phi_grid;        // empty grid = { base value }
  std::vector<int> g_grid;
  std::vector<int> k_grid;
  std::vector<double> f1_grid;
  std::vector<double> b_grid;
  std::vector<Similarity> similarity_grid;
  int instances = 1;
  int parallelism = 0;  // 0 = hardware concurrency
};

// Grid expansion order (outer to inner): similarity, G, k, b, f1, phi,
// instance. Row order in the CSV follows this expansion regardless of
// execution order.
std::vector<WorldConfig> expand_grid(const SweepSpec& spec);

struct RunResult {
  WorldConfig config;
  MetricsReport report;
  std::string error;  // non-empty = the run failed
};

// Executes the runs on a bounded worker pool; results keep input order.
// `table` switches every run to replay mode.
std::vector<RunResult> run_many(const std::vector<WorldConfig>& configs, int parallelism,
                                const RatingsTable* table = nullptr);

// CSV schema: phi,G,k,f1,b,similarity,instance,omega,omega1,auc_real,auc_est,
// fallbacks,error. Per grid point the instance rows are followed by
// instance=mean and instance=stderr aggregate rows. `comments` lines are
// echoed as leading `# ` lines.
std::string results_csv(const std::vector<RunResult>& results,
                        const std::vector<std::string>& comments);

struct SweepOutput {
  std::vector<RunResult> runs;
  std::string csv;
  int failures = 0;
};

SweepOutput run_sweep(const SweepSpec& spec, const RatingsTable* table = nullptr);

}  // namespace icfsim
