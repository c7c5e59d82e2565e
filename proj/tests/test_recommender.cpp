#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "icfsim/recommender.hpp"

using namespace icfsim;

namespace {

RecommenderConfig cn_config() { return RecommenderConfig{}; }

RecommenderConfig cosine_config() {
  RecommenderConfig c;
  c.similarity = Similarity::Cosine;
  return c;
}

// Independent scoring path used as the oracle: sum of pairwise similarities
// with explicit profile weights.
double brute_score(const BipartiteState& s, int user, int item, const RecommenderConfig& cfg) {
  double total = 0.0;
  for (const Edge& e : s.collection(user)) {
    const double w =
        (cfg.bias_b != 1.0 && e.prov == Provenance::ViaSelection) ? cfg.bias_b : 1.0;
    total += w * similarity(s, item, e.item, cfg);
  }
  return total;
}

// eps absorbs the last-ulp differences between summation orders (cosine).
std::set<int> brute_argmax_set(const BipartiteState& s, int user, const RecommenderConfig& cfg,
                               double eps = 0.0) {
  double best = -1.0;
  std::vector<double> vals(s.n_items(), -1.0);
  for (int a = 0; a < s.n_items(); ++a) {
    if (s.has_item(user, a)) continue;
    vals[a] = brute_score(s, user, a, cfg);
    best = std::max(best, vals[a]);
  }
  std::set<int> arg;
  for (int a = 0; a < s.n_items(); ++a)
    if (vals[a] >= 0.0 && vals[a] >= best - eps) arg.insert(a);
  return arg;
}

}  // namespace

TEST_CASE("common-neighbor similarity counts shared users") {
  BipartiteState s(3, 6);
  s.add_item(0, 2, Provenance::Initial);
  s.add_item(0, 4, Provenance::Initial);
  s.add_item(1, 2, Provenance::Initial);
  s.add_item(1, 4, Provenance::Initial);
  s.add_item(2, 5, Provenance::Initial);
  CHECK(similarity(s, 2, 4, cn_config()) == 2.0);
  CHECK(similarity(s, 2, 5, cn_config()) == 0.0);  // disjoint user sets
  CHECK(similarity(s, 2, 5, cosine_config()) == 0.0);
}

TEST_CASE("cosine similarity of a degree-1 pair sharing one user is 1") {
  BipartiteState s(2, 4);
  s.add_item(0, 1, Provenance::Initial);
  s.add_item(0, 3, Provenance::Initial);
  CHECK(similarity(s, 1, 3, cosine_config()) == 1.0);
  // degree-0 items carry no evidence
  CHECK(similarity(s, 1, 2, cosine_config()) == 0.0);
}

TEST_CASE("self-similarity is rejected") {
  BipartiteState s(1, 3);
  CHECK_THROWS_AS(similarity(s, 1, 1, cn_config()), std::logic_error);
}

TEST_CASE("score is the weighted sum over the collection") {
  BipartiteState s(4, 8);
  // user 0 is scored; users 1-3 create co-occurrence evidence
  s.add_item(0, 1, Provenance::ViaSelection);
  s.add_item(0, 2, Provenance::ViaRecommendation);
  for (int u = 1; u <= 3; ++u) {
    s.add_item(u, 5, Provenance::Initial);
    s.add_item(u, 1, Provenance::Initial);
  }
  s.add_item(1, 6, Provenance::Initial);

  SUBCASE("empty collection scores zero") {
    BipartiteState empty(1, 4);
    CHECK(score(empty, 0, 2, cn_config()) == 0.0);
  }
  SUBCASE("single-path score equals the co-occurrence count") {
    CHECK(score(s, 0, 5, cn_config()) == 3.0);  // cooc(5,1)=3, cooc(5,2)=0
  }
  SUBCASE("bias weighs selection edges in the profile term") {
    // give item 7 equal similarity to both collected items
    s.add_item(2, 7, Provenance::Initial);
    s.add_item(3, 7, Provenance::Initial);
    s.add_item(2, 2, Provenance::Initial);
    s.add_item(3, 2, Provenance::Initial);
    REQUIRE(s.cooc().get(7, 1) == s.cooc().get(7, 2));
    RecommenderConfig biased = cn_config();
    biased.bias_b = 2.0;
    biased.bias_scope = BiasScope::ScoreOnly;  // binary counts, weighted profile
    const double sim_each = static_cast<double>(s.cooc().get(7, 1));
    CHECK(score(s, 0, 7, biased) == 3.0 * sim_each);  // 2s + s
  }
  SUBCASE("everywhere bias weighs counts and profile") {
    BipartiteState w(3, 5, 4096, 2.0);
    w.add_item(0, 1, Provenance::ViaSelection);
    w.add_item(1, 1, Provenance::ViaSelection);
    w.add_item(1, 3, Provenance::ViaRecommendation);
    RecommenderConfig biased = cn_config();
    biased.bias_b = 2.0;
    REQUIRE(biased.bias_scope == BiasScope::Everywhere);
    // weighted cooc(3,1) = 2*1; user 0's profile edge is selection: weight 2
    CHECK(score(w, 0, 3, biased) == 4.0);
  }
  SUBCASE("scoring a collected item is a contract violation") {
    CHECK_THROWS_AS(score(s, 0, 1, cn_config()), std::logic_error);
  }
}

TEST_CASE("recommend returns the unique argmax deterministically") {
  BipartiteState s(3, 6);
  s.add_item(0, 1, Provenance::Initial);
  s.add_item(1, 1, Provenance::Initial);
  s.add_item(1, 4, Provenance::Initial);
  SplitMix64 rng(1);
  for (int trial = 0; trial < 20; ++trial) CHECK(recommend(s, 0, cn_config(), rng) == 4);
}

TEST_CASE("all-tie cold state recommends uniformly") {
  BipartiteState s(1, 12);
  s.add_item(0, 0, Provenance::Initial);
  s.add_item(0, 1, Provenance::Initial);
  SplitMix64 rng(123);
  const int draws = 20000;
  std::vector<int> hits(12, 0);
  for (int i = 0; i < draws; ++i) ++hits[recommend(s, 0, cn_config(), rng)];
  CHECK(hits[0] == 0);
  CHECK(hits[1] == 0);
  const double p = 1.0 / 10.0;
  const double sigma = std::sqrt(p * (1 - p) / draws);
  for (int a = 2; a < 12; ++a) {
    const double freq = static_cast<double>(hits[a]) / draws;
    CHECK(std::abs(freq - p) < 5.0 * sigma);
  }
}

TEST_CASE("recommend agrees with exhaustive enumeration") {
  WorldConfig cfg;
  cfg.n_users = 6;
  cfg.n_items = 9;
  cfg.n_genres = 3;
  cfg.items_per_user = 2;
  SplitMix64 rng = SplitMix64::derive(7, 0);
  auto [state, tastes] = new_synthetic(cfg, rng);

  for (const auto& rec_cfg : {cn_config(), cosine_config()}) {
    const double eps = rec_cfg.similarity == Similarity::Cosine ? 1e-12 : 0.0;
    for (int u = 0; u < cfg.n_users; ++u) {
      const auto arg = brute_argmax_set(state, u, rec_cfg, eps);
      for (int trial = 0; trial < 10; ++trial) CHECK(arg.contains(recommend(state, u, rec_cfg, rng)));
    }
  }
}

TEST_CASE("returned item maximizes the score over every candidate") {
  WorldConfig cfg;
  cfg.n_users = 10;
  cfg.n_items = 14;
  cfg.n_genres = 2;
  cfg.items_per_user = 4;
  SplitMix64 rng = SplitMix64::derive(19, 3);
  auto [state, tastes] = new_synthetic(cfg, rng);
  const auto rec_cfg = cn_config();
  for (int u = 0; u < cfg.n_users; ++u) {
    const int r = recommend(state, u, rec_cfg, rng);
    const double rs = score(state, u, r, rec_cfg);
    for (int a = 0; a < cfg.n_items; ++a)
      if (!state.has_item(u, a)) CHECK(rs >= score(state, u, a, rec_cfg));
  }
}

TEST_CASE("bias_b = 1 reproduces unbiased scores bit for bit") {
  BipartiteState s(4, 10);
  SplitMix64 rng(31);
  for (int u = 0; u < 4; ++u)
    for (int j = 0; j < 4; ++j) {
      int item;
      do {
        item = static_cast<int>(rng.uniform_index(10));
      } while (s.has_item(u, item));
      s.add_item(u, item, static_cast<Provenance>(rng.uniform_index(3)));
    }
  ScoreScratch a, b;
  for (const auto sim_kind : {Similarity::CommonNeighbor, Similarity::Cosine}) {
    RecommenderConfig plain;
    plain.similarity = sim_kind;
    RecommenderConfig unit_bias = plain;
    unit_bias.bias_b = 1.0;
    unit_bias.bias_scope = BiasScope::Everywhere;  // still inert at b = 1
    score_profile(stats_of(s), s.collection(0), plain, a);
    score_profile(stats_of(s), s.collection(0), unit_bias, b);
    CHECK(a.scores == b.scores);
  }
  // a biased profile without selection edges is also bit-identical
  RecommenderConfig biased;
  biased.bias_b = 2.0;
  biased.bias_scope = BiasScope::ScoreOnly;
  BipartiteState t(2, 6);
  t.add_item(0, 1, Provenance::Initial);
  t.add_item(0, 2, Provenance::ViaRecommendation);
  t.add_item(1, 1, Provenance::Initial);
  t.add_item(1, 4, Provenance::Initial);
  score_profile(stats_of(t), t.collection(0), RecommenderConfig{}, a);
  score_profile(stats_of(t), t.collection(0), biased, b);
  CHECK(a.scores == b.scores);
}

TEST_CASE("uniform user cloning preserves the argmax set under CN") {
  // cloning every user c times multiplies all CN similarities by c
  WorldConfig cfg;
  cfg.n_users = 5;
  cfg.n_items = 12;
  cfg.n_genres = 3;
  cfg.items_per_user = 3;
  SplitMix64 rng = SplitMix64::derive(4, 1);
  auto [base, tastes] = new_synthetic(cfg, rng);

  const int clones = 3;
  BipartiteState scaled(cfg.n_users * clones, cfg.n_items);
  for (int u = 0; u < cfg.n_users; ++u)
    for (int c = 0; c < clones; ++c)
      for (const Edge& e : base.collection(u)) scaled.add_item(u * clones + c, e.item, e.prov);

  for (int u = 0; u < cfg.n_users; ++u)
    CHECK(brute_argmax_set(base, u, cn_config()) ==
          brute_argmax_set(scaled, u * clones, cn_config()));
}

TEST_CASE("recommend fails when the user holds the whole catalog") {
  BipartiteState s(1, 3);
  for (int a = 0; a < 3; ++a) s.add_item(0, a, Provenance::Initial);
  SplitMix64 rng(2);
  CHECK_THROWS_AS(recommend(s, 0, cn_config(), rng), std::logic_error);
}

TEST_CASE("cosine scores stay within [0, 1] on random states") {
  WorldConfig cfg;
  cfg.n_users = 25;
  cfg.n_items = 18;
  cfg.n_genres = 3;
  cfg.items_per_user = 5;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    SplitMix64 rng = SplitMix64::derive(100, seed);
    auto [state, tastes] = new_synthetic(cfg, rng);
    for (int a = 0; a < cfg.n_items; ++a)
      for (int b = 0; b < cfg.n_items; ++b) {
        if (a == b) continue;
        const double v = similarity(state, a, b, cosine_config());
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
      }
  }
}
