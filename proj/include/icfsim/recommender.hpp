#pragma once
// Item-item similarities, recommendation scores and top-item selection.
//
// Scoring works against a SimilarityStats view so the same code serves the
// live incremental state and the rebuilt training structures used by the
// probe-based accuracy estimate.

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "icfsim/config.hpp"
#include "icfsim/rng.hpp"
#include "icfsim/world.hpp"

namespace icfsim {

struct SimilarityStats {
  int n_items = 0;
  const PairCounts<std::int32_t>* cooc = nullptr;
  const double* inv_sqrt_degree = nullptr;
  // Bias-weighted variants; non-null only when BiasScope::Everywhere is live.
  const PairCounts<double>* weighted_cooc = nullptr;
  const double* weighted_inv_sqrt_degree = nullptr;
};

SimilarityStats stats_of(const BipartiteState& state);

// Reused accumulation buffers; one per run, never allocated in the loop.
struct ScoreScratch {
  std::vector<std::int32_t> acc_plain;
  std::vector<std::int32_t> acc_selection;
  std::vector<double> acc_real;
  std::vector<double> scores;
  std::vector<std::int32_t> candidates;
};

// Pairwise similarity of two distinct items (Eq. CN / cosine forms).
double similarity(const SimilarityStats& stats, int item_a, int item_b,
                  const RecommenderConfig& config);
double similarity(const BipartiteState& state, int item_a, int item_b,
                  const RecommenderConfig& config);

// Fills scratch.scores[alpha] with the recommendation score of every item for
// the given profile (held items receive garbage; callers mask them).
// A profile edge with ViaSelection provenance carries weight bias_b, all
// others weight 1.
void score_profile(const SimilarityStats& stats, std::span<const Edge> profile,
                   const RecommenderConfig& config, ScoreScratch& scratch);

// Score of a single un-collected candidate item for a user.
double score(const BipartiteState& state, int user, int item, const RecommenderConfig& config);

// Highest-scoring item the user does not hold; ties broken uniformly at
// random (exactly one tie-break index is drawn per call).
int recommend(const BipartiteState& state, int user, const RecommenderConfig& config,
              SplitMix64& rng, ScoreScratch& scratch);
int recommend(const BipartiteState& state, int user, const RecommenderConfig& config,
              SplitMix64& rng);

// Debug dump `item,score` of the full score vector of one user.
void write_scores_csv(const BipartiteState& state, int user, const RecommenderConfig& config,
                      std::ostream& out);

}  // namespace icfsim
