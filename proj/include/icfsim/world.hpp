#pragma once
// Bipartite user-item state with per-edge acquisition provenance and
// incrementally maintained item-item co-occurrence counts. Every mutation is
// O(k) in the mutating user's collection size; nothing in the hot loop ever
// recomputes the full matrix.

#include <cstdint>
#include <ostream>
#include <span>
#include <unordered_map>
#include <vector>

#include "icfsim/config.hpp"
#include "icfsim/rng.hpp"

namespace icfsim {

enum class Provenance : std::uint8_t { Initial, ViaSelection, ViaRecommendation };

const char* provenance_name(Provenance p);

struct Edge {
  std::int32_t item;
  Provenance prov;
};

// Symmetric pair-count matrix, dense below a size threshold and hash-map rows
// above it. The diagonal is never read.
template <class T>
class PairCounts {
 public:
  PairCounts() = default;
  PairCounts(int n, bool dense) : n_(n), dense_(dense) {
    if (dense_)
      dense_store_.assign(static_cast<std::size_t>(n) * n, T{});
    else
      rows_.resize(static_cast<std::size_t>(n));
  }

  int size() const { return n_; }
  bool is_dense() const { return dense_; }

  T get(int a, int b) const {
    if (dense_) return dense_store_[static_cast<std::size_t>(a) * n_ + b];
    const auto& row = rows_[static_cast<std::size_t>(a)];
    auto it = row.find(b);
    return it == row.end() ? T{} : it->second;
  }

  // Symmetric update of (a, b) and (b, a).
  void add(int a, int b, T delta) {
    if (dense_) {
      dense_store_[static_cast<std::size_t>(a) * n_ + b] += delta;
      dense_store_[static_cast<std::size_t>(b) * n_ + a] += delta;
    } else {
      bump(a, b, delta);
      bump(b, a, delta);
    }
  }

  // Dense row pointer; valid only when is_dense().
  const T* row(int r) const { return dense_store_.data() + static_cast<std::size_t>(r) * n_; }

  template <class F>
  void for_each_in_row(int r, F&& f) const {
    if (dense_) {
      const T* p = row(r);
      for (int c = 0; c < n_; ++c)
        if (p[c] != T{}) f(c, p[c]);
    } else {
      for (const auto& [c, v] : rows_[static_cast<std::size_t>(r)]) f(c, v);
    }
  }

  bool operator==(const PairCounts& other) const = default;

  // Test hook: direct cell write (does not keep the matrix symmetric).
  void poke(int a, int b, T value) {
    if (dense_)
      dense_store_[static_cast<std::size_t>(a) * n_ + b] = value;
    else
      rows_[static_cast<std::size_t>(a)][b] = value;
  }

 private:
  void bump(int r, int c, T delta) {
    auto& row = rows_[static_cast<std::size_t>(r)];
    auto [it, inserted] = row.try_emplace(c, delta);
    if (!inserted) {
      it->second += delta;
      if (it->second == T{}) row.erase(it);
    }
  }

  int n_ = 0;
  bool dense_ = true;
  std::vector<T> dense_store_;
  std::vector<std::unordered_map<int, T>> rows_;
};

class BipartiteState {
 public:
  // weighted_bias > 1 additionally maintains bias-weighted co-occurrence and
  // degrees (selection edges carry weight b); used by BiasScope::Everywhere.
  BipartiteState(int n_users, int n_items, int sparse_above = 4096, double weighted_bias = 1.0);

  int n_users() const { return n_users_; }
  int n_items() const { return n_items_; }

  std::span<const Edge> collection(int user) const { return collections_[user]; }
  bool has_item(int user, int item) const {
    return membership_[static_cast<std::size_t>(user) * n_items_ + item] != 0;
  }
  const std::uint8_t* membership_row(int user) const {
    return membership_.data() + static_cast<std::size_t>(user) * n_items_;
  }

  // Appends `item` to the user's collection and updates degrees plus one
  // co-occurrence row pair per held item. Duplicate additions are a bug in
  // the caller and throw.
  void add_item(int user, int item, Provenance prov);

  // Exact inverse of add_item on all counts; the provenance flag is dropped.
  void remove_item(int user, int item);

  // Removal by position in the collection (O(k) without the lookup scan).
  void remove_at(int user, int idx);

  std::int32_t item_degree(int item) const { return item_degree_[item]; }
  double inv_sqrt_degree(int item) const { return inv_sqrt_degree_[item]; }
  const double* inv_sqrt_degree_data() const { return inv_sqrt_degree_.data(); }
  const PairCounts<std::int32_t>& cooc() const { return cooc_; }

  bool weighted() const { return weighted_; }
  double weighted_degree(int item) const { return weighted_degree_[item]; }
  double weighted_inv_sqrt_degree(int item) const { return weighted_inv_sqrt_degree_[item]; }
  const double* weighted_inv_sqrt_degree_data() const { return weighted_inv_sqrt_degree_.data(); }
  const PairCounts<double>& weighted_cooc() const { return weighted_cooc_; }

  // True iff co-occurrence and degrees equal brute-force recomputation from
  // the collections.
  bool verify_against_oracle() const;

  // Order-sensitive digest of the full state; equal states hash equal.
  std::uint64_t fingerprint() const;

  // Edge-list snapshot: `user_id,item_id,provenance` rows.
  void write_edges_csv(std::ostream& out) const;

  // Test hook for fault injection.
  PairCounts<std::int32_t>& cooc_mut() { return cooc_; }

 private:
  double edge_weight(Provenance p) const { return p == Provenance::ViaSelection ? bias_ : 1.0; }
  void refresh_degree_caches(int item);

  int n_users_ = 0;
  int n_items_ = 0;
  bool weighted_ = false;
  double bias_ = 1.0;

  std::vector<std::vector<Edge>> collections_;
  std::vector<std::uint8_t> membership_;  // n_users x n_items
  std::vector<std::int32_t> item_degree_;
  std::vector<double> inv_sqrt_degree_;  // 1/sqrt(degree), 0 for degree 0
  PairCounts<std::int32_t> cooc_;

  std::vector<double> weighted_degree_;
  std::vector<double> weighted_inv_sqrt_degree_;
  PairCounts<double> weighted_cooc_;
};

struct UserTastes {
  std::int32_t taste1 = 0;
  std::int32_t taste2 = -1;  // -1 in single-taste mode

  bool matches(int genre) const { return genre == taste1 || genre == taste2; }
  bool two() const { return taste2 >= 0; }
};

// User-taste and item-genre assignment. Item genres are contiguous id blocks
// of near-equal size, so genre g occupies [genre_begin(g), genre_end(g)).
class TasteMap {
 public:
  TasteMap() = default;
  TasteMap(int n_users, int n_items, int n_genres);

  int n_genres() const { return n_genres_; }
  int item_genre(int item) const { return item_genre_[item]; }
  int genre_begin(int g) const { return genre_start_[g]; }
  int genre_end(int g) const { return genre_start_[g + 1]; }

  const UserTastes& user(int u) const { return user_tastes_[u]; }
  UserTastes& user_mut(int u) { return user_tastes_[u]; }

 private:
  int n_genres_ = 0;
  std::vector<std::int32_t> item_genre_;
  std::vector<std::int32_t> genre_start_;  // size n_genres + 1
  std::vector<UserTastes> user_tastes_;
};

// Builds the synthetic starting state: genre blocks in id order, user tastes
// by near-equal partition (single-taste) or random distinct pairs (two-taste),
// and k-item initial collections with provenance Initial.
std::pair<BipartiteState, TasteMap> new_synthetic(const WorldConfig& config, SplitMix64& rng);

}  // namespace icfsim
