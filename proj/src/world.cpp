#include "icfsim/world.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace icfsim {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Initial: return "initial";
    case Provenance::ViaSelection: return "selection";
    case Provenance::ViaRecommendation: return "recommendation";
  }
  return "?";
}

BipartiteState::BipartiteState(int n_users, int n_items, int sparse_above, double weighted_bias)
    : n_users_(n_users),
      n_items_(n_items),
      weighted_(weighted_bias != 1.0),
      bias_(weighted_bias),
      collections_(static_cast<std::size_t>(n_users)),
      membership_(static_cast<std::size_t>(n_users) * n_items, 0),
      item_degree_(static_cast<std::size_t>(n_items), 0),
      inv_sqrt_degree_(static_cast<std::size_t>(n_items), 0.0),
      cooc_(n_items, n_items <= sparse_above) {
  if (weighted_) {
    weighted_degree_.assign(static_cast<std::size_t>(n_items), 0.0);
    weighted_inv_sqrt_degree_.assign(static_cast<std::size_t>(n_items), 0.0);
    weighted_cooc_ = PairCounts<double>(n_items, n_items <= sparse_above);
  }
}

void BipartiteState::refresh_degree_caches(int item) {
  const auto d = item_degree_[item];
  inv_sqrt_degree_[item] = d > 0 ? 1.0 / std::sqrt(static_cast<double>(d)) : 0.0;
  if (weighted_) {
    const double w = weighted_degree_[item];
    weighted_inv_sqrt_degree_[item] = w > 0.0 ? 1.0 / std::sqrt(w) : 0.0;
  }
}

void BipartiteState::add_item(int user, int item, Provenance prov) {
  if (has_item(user, item))
    throw std::logic_error("add_item: item " + std::to_string(item) + " already held by user " +
                           std::to_string(user));
  auto& coll = collections_[user];
  const double w = edge_weight(prov);
  for (const Edge& e : coll) {
    cooc_.add(item, e.item, 1);
    if (weighted_) weighted_cooc_.add(item, e.item, w * edge_weight(e.prov));
  }
  coll.push_back(Edge{static_cast<std::int32_t>(item), prov});
  membership_[static_cast<std::size_t>(user) * n_items_ + item] = 1;
  ++item_degree_[item];
  if (weighted_) weighted_degree_[item] += w;
  refresh_degree_caches(item);
}

void BipartiteState::remove_at(int user, int idx) {
  auto& coll = collections_[user];
  const Edge removed = coll[idx];
  const double w = edge_weight(removed.prov);
  coll.erase(coll.begin() + idx);
  for (const Edge& e : coll) {
    cooc_.add(removed.item, e.item, -1);
    if (weighted_) weighted_cooc_.add(removed.item, e.item, -(w * edge_weight(e.prov)));
  }
  membership_[static_cast<std::size_t>(user) * n_items_ + removed.item] = 0;
  --item_degree_[removed.item];
  if (weighted_) weighted_degree_[removed.item] -= w;
  refresh_degree_caches(removed.item);
}

void BipartiteState::remove_item(int user, int item) {
  auto& coll = collections_[user];
  for (std::size_t i = 0; i < coll.size(); ++i) {
    if (coll[i].item == item) {
      remove_at(user, static_cast<int>(i));
      return;
    }
  }
  throw std::logic_error("remove_item: item " + std::to_string(item) + " not held by user " +
                         std::to_string(user));
}

bool BipartiteState::verify_against_oracle() const {
  PairCounts<std::int32_t> fresh(n_items_, cooc_.is_dense());
  std::vector<std::int32_t> degrees(static_cast<std::size_t>(n_items_), 0);
  for (const auto& coll : collections_) {
    for (std::size_t i = 0; i < coll.size(); ++i) {
      ++degrees[coll[i].item];
      for (std::size_t j = i + 1; j < coll.size(); ++j) fresh.add(coll[i].item, coll[j].item, 1);
    }
  }
  if (degrees != item_degree_) return false;
  if (!(fresh == cooc_)) return false;
  if (weighted_) {
    std::vector<double> wdeg(static_cast<std::size_t>(n_items_), 0.0);
    PairCounts<double> wfresh(n_items_, weighted_cooc_.is_dense());
    for (const auto& coll : collections_) {
      for (std::size_t i = 0; i < coll.size(); ++i) {
        const double wi = edge_weight(coll[i].prov);
        wdeg[coll[i].item] += wi;
        for (std::size_t j = i + 1; j < coll.size(); ++j)
          wfresh.add(coll[i].item, coll[j].item, wi * edge_weight(coll[j].prov));
      }
    }
    const double eps = 1e-9;
    for (int a = 0; a < n_items_; ++a) {
      if (std::abs(wdeg[a] - weighted_degree_[a]) > eps) return false;
      for (int b = 0; b < n_items_; ++b)
        if (a != b && std::abs(wfresh.get(a, b) - weighted_cooc_.get(a, b)) > eps) return false;
    }
  }
  return true;
}

std::uint64_t BipartiteState::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
  };
  for (const auto& coll : collections_) {
    mix(coll.size());
    for (const Edge& e : coll) {
      mix(static_cast<std::uint64_t>(e.item));
      mix(static_cast<std::uint64_t>(e.prov));
    }
  }
  for (int a = 0; a < n_items_; ++a) {
    mix(static_cast<std::uint64_t>(item_degree_[a]));
    for (int b = a + 1; b < n_items_; ++b) mix(static_cast<std::uint64_t>(cooc_.get(a, b)));
  }
  return h;
}

void BipartiteState::write_edges_csv(std::ostream& out) const {
  out << "user_id,item_id,provenance\n";
  for (int u = 0; u < n_users_; ++u)
    for (const Edge& e : collections_[u])
      out << u << ',' << e.item << ',' << provenance_name(e.prov) << '\n';
}

TasteMap::TasteMap(int n_users, int n_items, int n_genres) : n_genres_(n_genres) {
  item_genre_.resize(static_cast<std::size_t>(n_items));
  genre_start_.assign(static_cast<std::size_t>(n_genres) + 1, 0);
  for (int a = 0; a < n_items; ++a) {
    item_genre_[a] = static_cast<std::int32_t>(
        (static_cast<std::int64_t>(a) * n_genres) / n_items);
  }
  for (int g = 1; g <= n_genres; ++g) {
    genre_start_[g] = static_cast<std::int32_t>(
        std::lower_bound(item_genre_.begin(), item_genre_.end(), g) - item_genre_.begin());
  }
  user_tastes_.resize(static_cast<std::size_t>(n_users));
}

std::pair<BipartiteState, TasteMap> new_synthetic(const WorldConfig& config, SplitMix64& rng) {
  const int n = config.n_users;
  const int m = config.n_items;
  const int g = config.n_genres;
  const int k = config.items_per_user;
  if (k >= m) throw ConfigError("new_synthetic: items_per_user must be < n_items");
  if (g > m) throw ConfigError("new_synthetic: n_genres must be <= n_items");

  TasteMap tastes(n, m, g);
  if (config.mode == Mode::TwoTaste) {
    if (g < 2) throw ConfigError("new_synthetic: two-taste mode needs n_genres >= 2");
    for (int u = 0; u < n; ++u) {
      auto& t = tastes.user_mut(u);
      t.taste1 = static_cast<std::int32_t>(rng.uniform_index(g));
      do {
        t.taste2 = static_cast<std::int32_t>(rng.uniform_index(g));
      } while (t.taste2 == t.taste1);
    }
  } else {
    for (int u = 0; u < n; ++u) {
      tastes.user_mut(u).taste1 =
          static_cast<std::int32_t>((static_cast<std::int64_t>(u) * g) / n);
    }
  }

  const bool weighted =
      config.recommender.bias_scope == BiasScope::Everywhere && config.recommender.bias_b != 1.0;
  BipartiteState state(n, m, config.sparse_above, weighted ? config.recommender.bias_b : 1.0);

  // Draw k distinct items with a k-step partial Fisher-Yates over `pool`.
  std::vector<std::int32_t> pool(static_cast<std::size_t>(m));
  auto sample_prefix = [&rng](std::vector<std::int32_t>& v, int count) {
    for (int j = 0; j < count; ++j) {
      const auto r = j + static_cast<int>(rng.uniform_index(v.size() - j));
      std::swap(v[j], v[r]);
    }
  };

  for (int u = 0; u < n; ++u) {
    if (config.init == InitKind::Uniform) {
      pool.resize(static_cast<std::size_t>(m));
      std::iota(pool.begin(), pool.end(), 0);
      sample_prefix(pool, k);
    } else {
      // Taste-matched start: draw from the user's own genre block(s) first,
      // topping up from the rest of the catalog if the block is too small.
      const auto& t = tastes.user(u);
      pool.clear();
      for (int a = tastes.genre_begin(t.taste1); a < tastes.genre_end(t.taste1); ++a)
        pool.push_back(a);
      if (t.two())
        for (int a = tastes.genre_begin(t.taste2); a < tastes.genre_end(t.taste2); ++a)
          pool.push_back(a);
      if (static_cast<int>(pool.size()) >= k) {
        sample_prefix(pool, k);
      } else {
        std::vector<std::int32_t> rest;
        for (int a = 0; a < m; ++a)
          if (!tastes.user(u).matches(tastes.item_genre(a))) rest.push_back(a);
        sample_prefix(rest, k - static_cast<int>(pool.size()));
        pool.insert(pool.end(), rest.begin(), rest.begin() + (k - static_cast<int>(pool.size())));
      }
    }
    for (int j = 0; j < k; ++j) state.add_item(u, pool[j], Provenance::Initial);
  }
  return {std::move(state), std::move(tastes)};
}

}  // namespace icfsim
