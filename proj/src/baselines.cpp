#include "nbr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nbr/corpus.hpp"
#include "nbr/parallel.hpp"

namespace nbr {

std::vector<Recommendation> recommend_all(const RecommendFn& fn,
                                          std::span<const UserId> users,
                                          std::size_t k, std::size_t n_threads) {
  std::vector<Recommendation> recs(users.size());
  parallel_for(users.size(), n_threads,
               [&](std::size_t idx) { recs[idx] = fn(users[idx], k); });
  return recs;
}

void label_provenance(Recommendation& rec, const Dataset& train) {
  std::vector<ItemId> rep;
  for (const Basket& b : train.users[rec.user].baskets) {
    rep.insert(rep.end(), b.begin(), b.end());
  }
  sort_unique(rep);
  rec.provenance.resize(rec.items.size());
  for (std::size_t j = 0; j < rec.items.size(); ++j) {
    rec.provenance[j] = contains_sorted(rep, rec.items[j]) ? Provenance::kRepeat
                                                           : Provenance::kExplore;
  }
}

std::vector<ItemId> top_k_items(const std::vector<double>& scores,
                                std::vector<ItemId>& touched, std::size_t k,
                                std::size_t n_items) {
  std::sort(touched.begin(), touched.end(), [&](ItemId a, ItemId b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  std::vector<ItemId> out;
  out.reserve(k);
  for (std::size_t n = 0; n < touched.size() && out.size() < k; ++n) {
    out.push_back(touched[n]);
  }
  if (out.size() < k) {
    // Everything untouched ties at zero; ascending id completes the ranking.
    std::vector<ItemId> taken = out;
    std::sort(taken.begin(), taken.end());
    for (ItemId i = 0; i < n_items && out.size() < k; ++i) {
      if (!contains_sorted(taken, i)) out.push_back(i);
    }
  }
  return out;
}

// ---- frequency baselines ----

TopFreqModels::TopFreqModels(const Dataset& train)
    : train_(&train), popularity_(item_popularity(train)) {
  global_rank_.resize(train.n_items());
  std::iota(global_rank_.begin(), global_rank_.end(), 0u);
  std::sort(global_rank_.begin(), global_rank_.end(), [&](ItemId a, ItemId b) {
    if (popularity_[a] != popularity_[b]) return popularity_[a] > popularity_[b];
    return a < b;
  });
}

Recommendation TopFreqModels::global(UserId u, std::size_t k) const {
  Recommendation rec;
  rec.user = u;
  const std::size_t n = std::min(k, global_rank_.size());
  rec.items.assign(global_rank_.begin(), global_rank_.begin() + static_cast<std::ptrdiff_t>(n));
  label_provenance(rec, *train_);
  return rec;
}

Recommendation TopFreqModels::personal(UserId u, std::size_t k) const {
  std::vector<ItemId> items;
  std::vector<std::uint32_t> counts;
  for (const Basket& b : train_->users[u].baskets) {
    for (ItemId i : b) {
      auto it = std::lower_bound(items.begin(), items.end(), i);
      if (it != items.end() && *it == i) {
        ++counts[static_cast<std::size_t>(it - items.begin())];
      } else {
        counts.insert(counts.begin() + (it - items.begin()), 1);
        items.insert(it, i);
      }
    }
  }
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return items[a] < items[b];
  });
  Recommendation rec;
  rec.user = u;
  for (std::size_t n = 0; n < order.size() && rec.items.size() < k; ++n) {
    rec.items.push_back(items[order[n]]);
  }
  rec.provenance.assign(rec.items.size(), Provenance::kRepeat);
  return rec;
}

Recommendation TopFreqModels::combined(UserId u, std::size_t k) const {
  Recommendation rec = personal(u, k);
  if (rec.items.size() < k) {
    std::vector<ItemId> present = rec.items;
    std::sort(present.begin(), present.end());
    for (ItemId i : global_rank_) {
      if (rec.items.size() == k) break;
      if (!contains_sorted(present, i)) {
        rec.items.push_back(i);
        rec.provenance.push_back(Provenance::kExplore);
      }
    }
  }
  return rec;
}

// ---- TIFUKNN ----

namespace {

// Hierarchical time-decayed frequency vector for one basket sequence.
// Baskets are split into m contiguous groups of near-equal size; when the
// count is indivisible the earliest groups are the smaller (possibly empty)
// ones, keeping full weight on recent baskets.
SparseVec hierarchical_pif(const std::vector<Basket>& baskets, std::size_t m_groups,
                           double r_b, double r_g, std::vector<double>& scratch,
                           std::size_t n_items) {
  scratch.assign(n_items, 0.0);
  std::vector<ItemId> touched;
  const std::size_t t_len = baskets.size();
  const std::size_t base = t_len / m_groups;
  const std::size_t rem = t_len % m_groups;

  std::size_t pos = 0;
  for (std::size_t g = 0; g < m_groups; ++g) {
    // groups with index >= m_groups - rem take the extra basket
    const std::size_t group_size = base + (g >= m_groups - rem ? 1 : 0);
    if (group_size == 0) continue;
    const double group_weight =
        std::pow(r_g, static_cast<double>(m_groups - 1 - g)) /
        static_cast<double>(m_groups);
    for (std::size_t p = 0; p < group_size; ++p, ++pos) {
      const double w = group_weight *
                       std::pow(r_b, static_cast<double>(group_size - 1 - p)) /
                       static_cast<double>(group_size);
      for (ItemId i : baskets[pos]) {
        if (scratch[i] == 0.0) touched.push_back(i);
        scratch[i] += w;
      }
    }
  }
  std::sort(touched.begin(), touched.end());
  SparseVec v;
  v.idx = std::move(touched);
  v.val.reserve(v.idx.size());
  for (ItemId i : v.idx) v.val.push_back(scratch[i]);
  return v;
}

double squared_norm(const SparseVec& v) {
  double s = 0.0;
  for (double x : v.val) s += x * x;
  return s;
}

}  // namespace

TifuknnIndex::TifuknnIndex(const Dataset& train, std::size_t m_groups, double r_b,
                           double r_g, std::size_t max_neighbors,
                           std::size_t n_threads)
    : n_items_(train.n_items()) {
  const std::size_t n = train.n_users();
  pif_.resize(n);
  {
    std::vector<double> scratch;
    for (UserId u = 0; u < n; ++u) {
      pif_[u] = hierarchical_pif(train.users[u].baskets, m_groups, r_b, r_g,
                                 scratch, n_items_);
    }
  }
  std::vector<double> norms(n);
  for (UserId u = 0; u < n; ++u) norms[u] = squared_norm(pif_[u]);

  const std::size_t keep = std::min(max_neighbors, n == 0 ? 0 : n - 1);
  neighbor_order_.assign(n, {});
  parallel_for(n, n_threads, [&](std::size_t u) {
    std::vector<double> dense(n_items_, 0.0);
    for (std::size_t t = 0; t < pif_[u].idx.size(); ++t) {
      dense[pif_[u].idx[t]] = pif_[u].val[t];
    }
    std::vector<std::pair<double, UserId>> dist;
    dist.reserve(n - 1);
    for (UserId v = 0; v < n; ++v) {
      if (v == u) continue;
      double dot = 0.0;
      for (std::size_t t = 0; t < pif_[v].idx.size(); ++t) {
        dot += pif_[v].val[t] * dense[pif_[v].idx[t]];
      }
      dist.emplace_back(norms[u] + norms[v] - 2.0 * dot, v);
    }
    std::partial_sort(dist.begin(),
                      dist.begin() + static_cast<std::ptrdiff_t>(std::min(keep, dist.size())),
                      dist.end());
    auto& order = neighbor_order_[u];
    order.reserve(keep);
    for (std::size_t t = 0; t < keep; ++t) order.push_back(dist[t].second);
  });
}

std::span<const UserId> TifuknnIndex::neighbors(UserId u, std::size_t k) const {
  const auto& order = neighbor_order_[u];
  return {order.data(), std::min(k, order.size())};
}

Tifuknn::Tifuknn(const Dataset& train, std::shared_ptr<const TifuknnIndex> index,
                 TifuknnParams params)
    : train_(&train), index_(std::move(index)), params_(params) {}

Tifuknn::Tifuknn(const Dataset& train, TifuknnParams params, std::size_t n_threads)
    : Tifuknn(train,
              std::make_shared<TifuknnIndex>(train, params.m_groups, params.r_b,
                                             params.r_g, params.k_neighbors,
                                             n_threads),
              params) {}

Recommendation Tifuknn::recommend(UserId u, std::size_t k) const {
  std::vector<double> scores(index_->n_items(), 0.0);
  std::vector<ItemId> touched;
  auto add = [&](const SparseVec& v, double w) {
    if (w == 0.0) return;
    for (std::size_t t = 0; t < v.idx.size(); ++t) {
      if (scores[v.idx[t]] == 0.0) touched.push_back(v.idx[t]);
      scores[v.idx[t]] += w * v.val[t];
    }
  };
  add(index_->pif(u), params_.alpha);
  auto nb = index_->neighbors(u, params_.k_neighbors);
  if (!nb.empty() && params_.alpha < 1.0) {
    const double w = (1.0 - params_.alpha) / static_cast<double>(nb.size());
    for (UserId v : nb) add(index_->pif(v), w);
  }
  Recommendation rec;
  rec.user = u;
  rec.items = top_k_items(scores, touched, k, index_->n_items());
  label_provenance(rec, *train_);
  return rec;
}

// ---- UP-CF@r ----

UpcfIndex::UpcfIndex(const Dataset& train, std::size_t n_threads) {
  n_ = train.n_users();
  std::vector<std::vector<ItemId>> sets(n_);
  set_size_.resize(n_);
  for (UserId u = 0; u < n_; ++u) {
    for (const Basket& b : train.users[u].baskets) {
      sets[u].insert(sets[u].end(), b.begin(), b.end());
    }
    sort_unique(sets[u]);
    set_size_[u] = static_cast<std::uint32_t>(sets[u].size());
  }
  tri_.assign(n_ * (n_ - 1) / 2, 0);
  parallel_for(n_, n_threads, [&](std::size_t u) {
    const std::size_t row = u * (2 * n_ - u - 1) / 2;
    for (UserId v = static_cast<UserId>(u) + 1; v < n_; ++v) {
      tri_[row + v - u - 1] =
          static_cast<std::uint32_t>(intersection_size(sets[u], sets[v]));
    }
  });
}

std::uint32_t UpcfIndex::overlap(UserId u, UserId v) const {
  if (u == v) return set_size_[u];
  if (u > v) std::swap(u, v);
  return tri_[u * (2 * n_ - u - 1) / 2 + v - u - 1];
}

UpCf::UpCf(const Dataset& train, std::shared_ptr<const UpcfIndex> index,
           UpcfParams params)
    : train_(&train), index_(std::move(index)), params_(params) {
  const std::size_t n = train.n_users();
  uwp_.resize(n);
  std::vector<double> scratch(train.n_items(), 0.0);
  for (UserId u = 0; u < n; ++u) {
    const auto& baskets = train.users[u].baskets;
    std::size_t window = baskets.size();
    if (!std::isinf(params_.recency)) {
      window = std::min(window, static_cast<std::size_t>(params_.recency));
    }
    std::vector<ItemId> touched;
    for (std::size_t t = baskets.size() - window; t < baskets.size(); ++t) {
      for (ItemId i : baskets[t]) {
        if (scratch[i] == 0.0) touched.push_back(i);
        scratch[i] += 1.0;
      }
    }
    std::sort(touched.begin(), touched.end());
    uwp_[u].idx = touched;
    for (ItemId i : touched) {
      uwp_[u].val.push_back(scratch[i] / static_cast<double>(window));
      scratch[i] = 0.0;
    }
  }
}

UpCf::UpCf(const Dataset& train, UpcfParams params, std::size_t n_threads)
    : UpCf(train, std::make_shared<UpcfIndex>(train, n_threads), params) {}

double UpCf::similarity(UserId u, UserId v) const {
  const double inter = index_->overlap(u, v);
  if (inter == 0.0) return 0.0;
  const double den = std::pow(index_->set_size(u), params_.asymmetry) *
                     std::pow(index_->set_size(v), 1.0 - params_.asymmetry);
  return inter / den;
}

Recommendation UpCf::recommend(UserId u, std::size_t k) const {
  std::vector<double> scores(train_->n_items(), 0.0);
  std::vector<ItemId> touched;
  const std::size_t n = index_->n_users();
  for (UserId v = 0; v < n; ++v) {
    const double sim = similarity(u, v);
    if (sim == 0.0) continue;
    const double w = std::pow(sim, params_.locality);
    if (w == 0.0) continue;
    const SparseVec& vec = uwp_[v];
    for (std::size_t t = 0; t < vec.idx.size(); ++t) {
      if (scores[vec.idx[t]] == 0.0) touched.push_back(vec.idx[t]);
      scores[vec.idx[t]] += w * vec.val[t];
    }
  }
  Recommendation rec;
  rec.user = u;
  rec.items = top_k_items(scores, touched, k, train_->n_items());
  label_provenance(rec, *train_);
  return rec;
}

}  // namespace nbr
