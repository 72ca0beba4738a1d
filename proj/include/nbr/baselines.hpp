#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "nbr/types.hpp"

namespace nbr {

// Type-erased per-user prediction; every model exposes
// `Recommendation recommend(UserId, std::size_t k) const`.
using RecommendFn = std::function<Recommendation(UserId, std::size_t)>;

std::vector<Recommendation> recommend_all(const RecommendFn& fn,
                                          std::span<const UserId> users,
                                          std::size_t k, std::size_t n_threads = 0);

// ---- frequency baselines ----

class TopFreqModels {
 public:
  explicit TopFreqModels(const Dataset& train);

  // G-TopFreq: the k globally most purchased items, same for every user.
  Recommendation global(UserId u, std::size_t k) const;
  // P-TopFreq: the user's own items by personal frequency; may under-fill.
  Recommendation personal(UserId u, std::size_t k) const;
  // GP-TopFreq: P-TopFreq prefix completed with G-TopFreq items.
  Recommendation combined(UserId u, std::size_t k) const;

  const std::vector<std::uint32_t>& popularity() const { return popularity_; }

 private:
  const Dataset* train_;
  std::vector<std::uint32_t> popularity_;
  std::vector<ItemId> global_rank_;  // (popularity desc, id asc)
};

// ---- TIFUKNN ----

struct SparseVec {
  std::vector<ItemId> idx;  // sorted
  std::vector<double> val;  // parallel
};

struct TifuknnParams {
  std::size_t k_neighbors = 300;
  std::size_t m_groups = 7;
  double r_b = 0.9;   // within-group time decay
  double r_g = 0.7;   // across-group time decay
  double alpha = 0.7; // fusion weight of the user's own vector
};

// PIF vectors and the full nearest-neighbor ordering for one
// (m_groups, r_b, r_g); shared across the (k_neighbors, alpha) grid.
class TifuknnIndex {
 public:
  TifuknnIndex(const Dataset& train, std::size_t m_groups, double r_b, double r_g,
               std::size_t max_neighbors, std::size_t n_threads = 0);

  const SparseVec& pif(UserId u) const { return pif_[u]; }
  // Nearest other users by Euclidean distance (ties by user id), length
  // min(k, stored order).
  std::span<const UserId> neighbors(UserId u, std::size_t k) const;
  std::size_t n_users() const { return pif_.size(); }
  std::size_t n_items() const { return n_items_; }

 private:
  std::size_t n_items_;
  std::vector<SparseVec> pif_;
  std::vector<std::vector<UserId>> neighbor_order_;
};

class Tifuknn {
 public:
  Tifuknn(const Dataset& train, std::shared_ptr<const TifuknnIndex> index,
          TifuknnParams params);
  // Convenience constructor that builds a dedicated index.
  Tifuknn(const Dataset& train, TifuknnParams params, std::size_t n_threads = 0);

  Recommendation recommend(UserId u, std::size_t k) const;
  const SparseVec& pif(UserId u) const { return index_->pif(u); }
  const TifuknnParams& params() const { return params_; }

 private:
  const Dataset* train_;
  std::shared_ptr<const TifuknnIndex> index_;
  TifuknnParams params_;
};

// ---- UP-CF@r ----

struct UpcfParams {
  double recency = std::numeric_limits<double>::infinity();  // r
  double locality = 100.0;                                   // q
  double asymmetry = 0.25;                                   // omega
};

// Distinct-item sets and pairwise overlap counts; shared across the whole
// UP-CF grid (recency/locality/asymmetry only rescale these).
class UpcfIndex {
 public:
  explicit UpcfIndex(const Dataset& train, std::size_t n_threads = 0);
  std::uint32_t overlap(UserId u, UserId v) const;
  std::uint32_t set_size(UserId u) const { return set_size_[u]; }
  std::size_t n_users() const { return set_size_.size(); }

 private:
  std::size_t n_;
  std::vector<std::uint32_t> set_size_;
  std::vector<std::uint32_t> tri_;  // upper-triangle overlap counts
};

class UpCf {
 public:
  UpCf(const Dataset& train, std::shared_ptr<const UpcfIndex> index, UpcfParams params);
  UpCf(const Dataset& train, UpcfParams params, std::size_t n_threads = 0);

  Recommendation recommend(UserId u, std::size_t k) const;
  // Asymmetric-cosine similarity on distinct-item sets: sim(u,u) == 1.
  double similarity(UserId u, UserId v) const;
  const SparseVec& uwp(UserId u) const { return uwp_[u]; }

 private:
  const Dataset* train_;
  std::shared_ptr<const UpcfIndex> index_;
  UpcfParams params_;
  std::vector<SparseVec> uwp_;  // user-wise popularity over the recency window
};

// Marks each slot repeat/explore by membership in the user's training-history
// repeat set (the baseline models are not repeat/explore aware themselves).
void label_provenance(Recommendation& rec, const Dataset& train);

// Best-scoring k items from a dense score scratch restricted to `touched`;
// ties broken by ascending item id, then zero-score items by ascending id
// until k items are emitted.
std::vector<ItemId> top_k_items(const std::vector<double>& scores,
                                std::vector<ItemId>& touched, std::size_t k,
                                std::size_t n_items);

}  // namespace nbr
