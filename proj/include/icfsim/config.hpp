#pragma once
// Run configuration for the user/recommender co-evolution model.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace icfsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Similarity { CommonNeighbor, Cosine };

// Eq-style bias on deliberately selected items. ScoreOnly weights only the
// user-profile term of the recommendation score; Everywhere also feeds the
// weights into the co-occurrence counts and item degrees.
enum class BiasScope { ScoreOnly, Everywhere };

enum class Mode { SingleTaste, TwoTaste, Replay };

enum class InitKind { Uniform, TasteMatched };

// How the accuracy omega is sampled. Events: fraction of actual
// recommendation acquisitions that match. Shadow: the recommender is queried
// on a fixed stride of steps without acquiring the result, so omega stays
// defined even when phi = 1 and no recommendation acquisitions occur.
enum class OmegaSource { Events, Shadow };

struct RecommenderConfig {
  Similarity similarity = Similarity::CommonNeighbor;
  double bias_b = 1.0;  // >= 1; 1 disables the bias
  // Everywhere by default: the bias rewrites the adjacency variable itself,
  // which similarity counts, degrees and the score sum all consume. ScoreOnly
  // keeps the counts binary and weights only the user-profile term.
  BiasScope bias_scope = BiasScope::Everywhere;
};

struct WorldConfig {
  int n_users = 500;
  int n_items = 100;
  int n_genres = 10;
  int items_per_user = 7;  // k; replay mode derives per-user degrees instead

  double phi = 0.5;  // frequency of deliberate selection
  double f1 = 0.5;   // two-taste mode: fraction of selections in taste 1

  long updates_per_user = 20000;   // T; a run executes n_users * T steps
  double burn_in_fraction = 0.5;   // omega measured over steps past this point

  Mode mode = Mode::SingleTaste;
  InitKind init = InitKind::Uniform;
  RecommenderConfig recommender;

  std::uint64_t master_seed = 1;
  std::uint64_t instance_index = 0;

  int auc_est_repetitions = 10;  // probe repetitions for the estimated AUC
  // Rank probes against the live similarities by default; false rebuilds the
  // similarity structures from the probe-depleted training adjacency, which
  // handicaps the probe by its own withheld co-occurrence contribution.
  bool probe_reuse_similarity = true;

  // Replay: drop ineligible users' edges from the adjacency instead of
  // keeping them as static co-occurrence evidence.
  bool exclude_ineligible_edges = false;

  int sparse_above = 4096;  // co-occurrence switches to sparse rows when M exceeds this

  OmegaSource omega_source = OmegaSource::Events;
  long shadow_samples = 20000;  // target number of shadow probes in the window

  const char* similarity_name() const {
    return recommender.similarity == Similarity::CommonNeighbor ? "cn" : "cosine";
  }
};

inline void validate(const WorldConfig& c) {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (c.n_users < 1) fail("n_users must be >= 1");
  if (c.n_genres < 1) fail("n_genres must be >= 1");
  if (c.mode != Mode::Replay) {
    if (c.n_items < c.n_genres) fail("n_items must be >= n_genres");
    if (c.items_per_user < 1) fail("items_per_user must be >= 1");
    if (c.items_per_user >= c.n_items) fail("items_per_user must be < n_items");
  }
  if (c.phi < 0.0 || c.phi > 1.0) fail("phi must lie in [0, 1]");
  if (c.f1 < 0.0 || c.f1 > 1.0) fail("f1 must lie in [0, 1]");
  if (c.burn_in_fraction < 0.0 || c.burn_in_fraction >= 1.0) fail("burn_in_fraction must lie in [0, 1)");
  if (c.updates_per_user < 1) fail("updates_per_user must be >= 1");
  if (c.mode == Mode::TwoTaste && c.n_genres < 2) fail("two-taste mode needs n_genres >= 2");
  if (c.recommender.bias_b < 1.0) fail("bias_b must be >= 1");
  if (c.auc_est_repetitions < 1) fail("auc_est_repetitions must be >= 1");
  if (c.sparse_above < 1) fail("sparse_above must be >= 1");
  if (c.shadow_samples < 1) fail("shadow_samples must be >= 1");
}

}  // namespace icfsim
