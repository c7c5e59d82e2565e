#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <sstream>

#include "icfsim/world.hpp"

using namespace icfsim;

namespace {

// Test-side oracle: recompute co-occurrence and degrees from scratch.
struct BruteCounts {
  std::vector<std::vector<int>> cooc;
  std::vector<int> degree;

  explicit BruteCounts(const BipartiteState& s)
      : cooc(s.n_items(), std::vector<int>(s.n_items(), 0)), degree(s.n_items(), 0) {
    for (int u = 0; u < s.n_users(); ++u) {
      const auto coll = s.collection(u);
      for (std::size_t i = 0; i < coll.size(); ++i) {
        ++degree[coll[i].item];
        for (std::size_t j = i + 1; j < coll.size(); ++j) {
          ++cooc[coll[i].item][coll[j].item];
          ++cooc[coll[j].item][coll[i].item];
        }
      }
    }
  }

  bool matches(const BipartiteState& s) const {
    for (int a = 0; a < s.n_items(); ++a) {
      if (degree[a] != s.item_degree(a)) return false;
      for (int b = 0; b < s.n_items(); ++b)
        if (a != b && cooc[a][b] != s.cooc().get(a, b)) return false;
    }
    return true;
  }
};

WorldConfig small_config(int n, int m, int g, int k) {
  WorldConfig c;
  c.n_users = n;
  c.n_items = m;
  c.n_genres = g;
  c.items_per_user = k;
  return c;
}

// Random add/remove churn keeping collections inside [0, m].
void churn(BipartiteState& s, SplitMix64& rng, int events) {
  for (int e = 0; e < events; ++e) {
    const auto u = static_cast<int>(rng.uniform_index(s.n_users()));
    const auto held = static_cast<int>(s.collection(u).size());
    const bool remove = held == s.n_items() || (held > 0 && rng.bernoulli(0.5));
    if (remove) {
      s.remove_at(u, static_cast<int>(rng.uniform_index(held)));
    } else {
      int item;
      do {
        item = static_cast<int>(rng.uniform_index(s.n_items()));
      } while (s.has_item(u, item));
      const auto prov = static_cast<Provenance>(rng.uniform_index(3));
      s.add_item(u, item, prov);
    }
  }
}

}  // namespace

TEST_CASE("synthetic construction at reference scale") {
  WorldConfig cfg = small_config(2000, 100, 10, 7);
  SplitMix64 rng = SplitMix64::derive(1, 0);
  auto [state, tastes] = new_synthetic(cfg, rng);

  std::vector<int> genre_sizes(10, 0);
  for (int a = 0; a < 100; ++a) ++genre_sizes[tastes.item_genre(a)];
  for (const int sz : genre_sizes) CHECK(sz == 10);

  std::vector<int> taste_sizes(10, 0);
  for (int u = 0; u < 2000; ++u) {
    CHECK(state.collection(u).size() == 7);
    ++taste_sizes[tastes.user(u).taste1];
  }
  for (const int sz : taste_sizes) CHECK(sz == 200);

  long degree_sum = 0;
  for (int a = 0; a < 100; ++a) degree_sum += state.item_degree(a);
  CHECK(degree_sum == 2000L * 7);
  CHECK(state.verify_against_oracle());
}

TEST_CASE("single genre world") {
  WorldConfig cfg = small_config(5, 8, 1, 3);
  SplitMix64 rng(11);
  auto [state, tastes] = new_synthetic(cfg, rng);
  for (int a = 0; a < 8; ++a) CHECK(tastes.item_genre(a) == 0);
  for (int u = 0; u < 5; ++u) CHECK(tastes.user(u).taste1 == 0);
}

TEST_CASE("genre blocks are contiguous with near-equal sizes") {
  TasteMap tastes(1, 10, 3);
  std::vector<int> sizes(3, 0);
  int prev = 0;
  for (int a = 0; a < 10; ++a) {
    CHECK(tastes.item_genre(a) >= prev);  // non-decreasing => contiguous blocks
    prev = tastes.item_genre(a);
    ++sizes[tastes.item_genre(a)];
  }
  const auto [mn, mx] = std::minmax_element(sizes.begin(), sizes.end());
  CHECK(*mx - *mn <= 1);
  for (int g = 0; g < 3; ++g) CHECK(tastes.genre_end(g) - tastes.genre_begin(g) == sizes[g]);
}

TEST_CASE("small fixed-seed state matches the brute-force oracle") {
  WorldConfig cfg = small_config(4, 6, 3, 2);
  SplitMix64 rng = SplitMix64::derive(42, 0);
  auto [state, tastes] = new_synthetic(cfg, rng);
  CHECK(BruteCounts(state).matches(state));
  CHECK(state.verify_against_oracle());
}

TEST_CASE("construction rejects impossible parameters") {
  SplitMix64 rng(1);
  WorldConfig bad_k = small_config(4, 6, 3, 6);  // k == M
  CHECK_THROWS_AS(new_synthetic(bad_k, rng), ConfigError);
  WorldConfig bad_g = small_config(4, 6, 8, 2);  // G > M
  CHECK_THROWS_AS(new_synthetic(bad_g, rng), ConfigError);
}

TEST_CASE("add_item updates exactly the neighbor counts") {
  BipartiteState s(2, 10);
  s.add_item(0, 2, Provenance::Initial);
  s.add_item(0, 5, Provenance::Initial);
  s.add_item(0, 7, Provenance::ViaSelection);
  CHECK(s.cooc().get(7, 2) == 1);
  CHECK(s.cooc().get(2, 7) == 1);
  CHECK(s.cooc().get(7, 5) == 1);
  CHECK(s.item_degree(7) == 1);

  // empty collection: degree only, no co-occurrence
  s.add_item(1, 3, Provenance::ViaRecommendation);
  CHECK(s.item_degree(3) == 1);
  for (int b = 0; b < 10; ++b)
    if (b != 3) CHECK(s.cooc().get(3, b) == 0);
  CHECK(s.verify_against_oracle());
}

TEST_CASE("duplicate addition and absent removal are contract violations") {
  BipartiteState s(1, 5);
  s.add_item(0, 1, Provenance::Initial);
  CHECK_THROWS_AS(s.add_item(0, 1, Provenance::Initial), std::logic_error);
  CHECK_THROWS_AS(s.remove_item(0, 3), std::logic_error);
}

TEST_CASE("remove_item is the exact inverse of add_item") {
  WorldConfig cfg = small_config(6, 12, 3, 4);
  SplitMix64 rng(9);
  auto [state, tastes] = new_synthetic(cfg, rng);
  const auto before = state.fingerprint();
  int item = 0;
  while (state.has_item(2, item)) ++item;
  state.add_item(2, item, Provenance::ViaRecommendation);
  state.remove_item(2, item);
  CHECK(state.fingerprint() == before);
  CHECK(state.verify_against_oracle());
}

TEST_CASE("removal decrements the right counts") {
  BipartiteState s(1, 6);
  s.add_item(0, 1, Provenance::Initial);
  s.add_item(0, 2, Provenance::Initial);
  s.add_item(0, 3, Provenance::Initial);
  CHECK(s.cooc().get(2, 1) == 1);
  CHECK(s.cooc().get(2, 3) == 1);
  s.remove_item(0, 2);
  CHECK(s.cooc().get(2, 1) == 0);
  CHECK(s.cooc().get(2, 3) == 0);
  CHECK(s.cooc().get(1, 3) == 1);
  CHECK(s.item_degree(2) == 0);
}

TEST_CASE("randomized churn keeps incremental counts exact") {
  for (const bool dense : {true, false}) {
    CAPTURE(dense);
    BipartiteState s(12, dense ? 25 : 25, dense ? 4096 : 10);  // sparse_above 10 forces maps
    CHECK(s.cooc().is_dense() == dense);
    SplitMix64 rng(2024);
    churn(s, rng, 10000);
    CHECK(BruteCounts(s).matches(s));
    CHECK(s.verify_against_oracle());

    long degree_sum = 0, held_sum = 0;
    for (int a = 0; a < s.n_items(); ++a) degree_sum += s.item_degree(a);
    for (int u = 0; u < s.n_users(); ++u) held_sum += static_cast<long>(s.collection(u).size());
    CHECK(degree_sum == held_sum);
    for (int a = 0; a < s.n_items(); ++a)
      for (int b = a + 1; b < s.n_items(); ++b) {
        CHECK(s.cooc().get(a, b) == s.cooc().get(b, a));
        CHECK(s.cooc().get(a, b) <= std::min(s.item_degree(a), s.item_degree(b)));
      }
  }
}

TEST_CASE("dense and sparse backends agree") {
  BipartiteState dense(8, 15, 4096);
  BipartiteState sparse(8, 15, 4);
  SplitMix64 rng_a(77), rng_b(77);
  churn(dense, rng_a, 3000);
  churn(sparse, rng_b, 3000);
  for (int a = 0; a < 15; ++a) {
    CHECK(dense.item_degree(a) == sparse.item_degree(a));
    for (int b = 0; b < 15; ++b)
      if (a != b) CHECK(dense.cooc().get(a, b) == sparse.cooc().get(a, b));
  }
}

TEST_CASE("a corrupted count fails the oracle") {
  WorldConfig cfg = small_config(5, 10, 2, 3);
  SplitMix64 rng(3);
  auto [state, tastes] = new_synthetic(cfg, rng);
  REQUIRE(state.verify_against_oracle());
  state.cooc_mut().poke(1, 2, state.cooc().get(1, 2) + 1);
  CHECK_FALSE(state.verify_against_oracle());
}

TEST_CASE("two-taste assignment draws distinct pairs") {
  WorldConfig cfg = small_config(200, 20, 5, 3);
  cfg.mode = Mode::TwoTaste;
  SplitMix64 rng(8);
  auto [state, tastes] = new_synthetic(cfg, rng);
  for (int u = 0; u < 200; ++u) {
    const auto& t = tastes.user(u);
    CHECK(t.two());
    CHECK(t.taste1 != t.taste2);
    CHECK(t.taste1 >= 0);
    CHECK(t.taste1 < 5);
    CHECK(t.taste2 >= 0);
    CHECK(t.taste2 < 5);
  }
}

TEST_CASE("taste-matched start holds only matching items when the block is large enough") {
  WorldConfig cfg = small_config(30, 40, 4, 5);  // block size 10 >= k
  cfg.init = InitKind::TasteMatched;
  SplitMix64 rng(15);
  auto [state, tastes] = new_synthetic(cfg, rng);
  for (int u = 0; u < 30; ++u)
    for (const Edge& e : state.collection(u))
      CHECK(tastes.user(u).matches(tastes.item_genre(e.item)));
}

TEST_CASE("weighted counts track selection edges under churn") {
  BipartiteState s(6, 12, 4096, 2.0);
  REQUIRE(s.weighted());
  SplitMix64 rng(5);
  churn(s, rng, 4000);
  CHECK(s.verify_against_oracle());

  BipartiteState tiny(2, 4, 4096, 3.0);
  tiny.add_item(0, 0, Provenance::ViaSelection);
  tiny.add_item(0, 1, Provenance::ViaRecommendation);
  tiny.add_item(1, 0, Provenance::Initial);
  CHECK(tiny.weighted_degree(0) == 4.0);  // 3 (selection) + 1 (initial)
  CHECK(tiny.weighted_degree(1) == 1.0);
  CHECK(tiny.weighted_cooc().get(0, 1) == 3.0);
}

TEST_CASE("edge list snapshot round-trips") {
  BipartiteState s(2, 5);
  s.add_item(0, 3, Provenance::Initial);
  s.add_item(0, 1, Provenance::ViaSelection);
  s.add_item(1, 3, Provenance::ViaRecommendation);
  std::ostringstream out;
  s.write_edges_csv(out);
  CHECK(out.str() ==
        "user_id,item_id,provenance\n"
        "0,3,initial\n"
        "0,1,selection\n"
        "1,3,recommendation\n");
}
