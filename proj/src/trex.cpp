#include "nbr/trex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nbr/corpus.hpp"
#include "nbr/rng.hpp"

namespace nbr {

RepetitionModel fit_repetition(const Dataset& train, double alpha, double beta,
                               bool rep_feature_enabled) {
  if (train.n_users() == 0) throw DataError("cannot fit on an empty corpus");
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha outside [0,1]");
  if (beta <= 0.0 || beta > 1.0) throw std::invalid_argument("beta outside (0,1]");

  RepetitionModel m;
  m.alpha = alpha;
  m.beta = beta;
  m.rep_feature_enabled = rep_feature_enabled;
  m.rep_feature.assign(train.n_items(), 0.0);
  m.n_buyers.assign(train.n_items(), 0);

  // sum over buyers of (basket occurrences - 1)^alpha, with 0^alpha := 0
  // for every alpha so single purchases never count as repurchases.
  std::vector<std::uint32_t> per_user_count(train.n_items(), 0);
  std::vector<ItemId> touched;
  for (const auto& u : train.users) {
    touched.clear();
    for (const Basket& b : u.baskets) {
      for (ItemId i : b) {
        if (per_user_count[i]++ == 0) touched.push_back(i);
      }
    }
    for (ItemId i : touched) {
      const std::uint32_t repurchases = per_user_count[i] - 1;
      if (repurchases > 0) {
        m.rep_feature[i] += std::pow(static_cast<double>(repurchases), alpha);
      }
      ++m.n_buyers[i];
      per_user_count[i] = 0;
    }
  }

  std::size_t with_buyers = 0;
  double total = 0.0;
  for (ItemId i = 0; i < train.n_items(); ++i) {
    if (m.n_buyers[i] == 0) continue;  // never purchased: excluded from the table
    m.rep_feature[i] /= static_cast<double>(m.n_buyers[i]);
    total += m.rep_feature[i];
    ++with_buyers;
  }
  m.mean_rep_f = with_buyers == 0 ? 0.0 : total / static_cast<double>(with_buyers);
  for (ItemId i = 0; i < train.n_items(); ++i) {
    if (m.n_buyers[i] > 0) {
      m.rep_feature[i] += m.mean_rep_f / static_cast<double>(m.n_buyers[i]);
    }
  }
  return m;
}

double user_interest(const std::vector<Basket>& history, double beta, ItemId item) {
  const std::size_t t_len = history.size();
  double e = 0.0;
  bool found = false;
  for (std::size_t pos = 1; pos <= t_len; ++pos) {
    if (contains_sorted(history[pos - 1], item)) {
      e += std::pow(beta, static_cast<double>(t_len - pos));
      found = true;
    }
  }
  if (!found) throw std::invalid_argument("item not present in history");
  return e;
}

RepetitionScores repetition_scores(const RepetitionModel& model,
                                   const std::vector<Basket>& history) {
  RepetitionScores rs;
  for (const Basket& b : history) rs.items.insert(rs.items.end(), b.begin(), b.end());
  sort_unique(rs.items);

  // Single pass over the history instead of per-item scans; the per-basket
  // weight matches user_interest() term for term.
  std::vector<double> interest(rs.items.size(), 0.0);
  const std::size_t t_len = history.size();
  for (std::size_t pos = 1; pos <= t_len; ++pos) {
    const double w = std::pow(model.beta, static_cast<double>(t_len - pos));
    for (ItemId i : history[pos - 1]) {
      const auto it = std::lower_bound(rs.items.begin(), rs.items.end(), i);
      interest[static_cast<std::size_t>(it - rs.items.begin())] += w;
    }
  }
  rs.scores.resize(rs.items.size());
  for (std::size_t n = 0; n < rs.items.size(); ++n) {
    rs.scores[n] = interest[n] * model.item_feature(rs.items[n]);
  }
  return rs;
}

ExplorationPolicy::Kind parse_policy_kind(const std::string& name) {
  if (name == "fairness") return ExplorationPolicy::Kind::kFairness;
  if (name == "diversity") return ExplorationPolicy::Kind::kDiversity;
  if (name == "none") return ExplorationPolicy::Kind::kNone;
  throw DataError("unknown exploration policy: " + name);
}

namespace {

// Candidates by (training popularity desc, item id asc).
std::vector<ItemId> popularity_order(const std::vector<ItemId>& candidates,
                                     const std::vector<std::uint32_t>& pop) {
  std::vector<ItemId> order = candidates;
  std::sort(order.begin(), order.end(), [&](ItemId a, ItemId b) {
    if (pop[a] != pop[b]) return pop[a] > pop[b];
    return a < b;
  });
  return order;
}

}  // namespace

std::vector<ItemId> explore_fairness(const std::vector<ItemId>& expl_candidates,
                                     const ExplorationPolicy& policy, UserId user,
                                     std::size_t m_slots) {
  std::vector<ItemId> chosen;
  if (m_slots == 0) return chosen;
  const auto& pop = *policy.popularity;

  std::vector<ItemId> pool;
  std::vector<double> weights;
  for (ItemId i : expl_candidates) {
    if (!policy.groups->is_popular[i] && pop[i] > 0) {
      pool.push_back(i);
      weights.push_back(static_cast<double>(pop[i]));
    }
  }
  Rng rng(mix_seed(policy.rng_seed, user));
  while (chosen.size() < m_slots && !pool.empty()) {
    const std::size_t idx = rng.pick_weighted(weights);
    chosen.push_back(pool[idx]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
    weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  if (chosen.size() < m_slots) {
    // Pool exhausted: fill by popularity over the remaining candidates.
    std::vector<ItemId> taken = chosen;
    std::sort(taken.begin(), taken.end());
    for (ItemId i : popularity_order(expl_candidates, pop)) {
      if (chosen.size() == m_slots) break;
      if (!contains_sorted(taken, i)) chosen.push_back(i);
    }
  }
  return chosen;
}

std::vector<ItemId> explore_diversity(const std::vector<ItemId>& expl_candidates,
                                      const ExplorationPolicy& policy,
                                      const std::vector<ItemId>& basket_so_far,
                                      std::size_t m_slots) {
  std::vector<ItemId> chosen;
  if (m_slots == 0) return chosen;
  const auto& cats = *policy.categories;

  std::size_t max_cat = 0;
  for (CategoryId c : cats) max_cat = std::max<std::size_t>(max_cat, c + 1);
  std::vector<bool> cat_present(max_cat, false);
  for (ItemId i : basket_so_far) cat_present[cats[i]] = true;

  const std::vector<ItemId> order = popularity_order(expl_candidates, *policy.popularity);
  std::vector<bool> used(order.size(), false);
  for (std::size_t n = 0; n < order.size() && chosen.size() < m_slots; ++n) {
    const CategoryId c = cats[order[n]];
    if (cat_present[c]) continue;
    cat_present[c] = true;
    used[n] = true;
    chosen.push_back(order[n]);
  }
  // Category space exhausted: ignore the novelty constraint.
  for (std::size_t n = 0; n < order.size() && chosen.size() < m_slots; ++n) {
    if (!used[n]) chosen.push_back(order[n]);
  }
  return chosen;
}

Recommendation generate_basket(const RepetitionScores& scores, double v,
                               std::size_t k,
                               const std::vector<ItemId>& expl_candidates,
                               const ExplorationPolicy& policy, UserId user,
                               bool fill_explore) {
  Recommendation rec;
  rec.user = user;
  rec.v = v;

  std::vector<std::size_t> survivors;
  for (std::size_t n = 0; n < scores.items.size(); ++n) {
    if (scores.scores[n] >= v) survivors.push_back(n);
  }
  std::sort(survivors.begin(), survivors.end(), [&](std::size_t a, std::size_t b) {
    if (scores.scores[a] != scores.scores[b]) return scores.scores[a] > scores.scores[b];
    return scores.items[a] < scores.items[b];
  });
  if (survivors.size() > k) survivors.resize(k);
  for (std::size_t n : survivors) {
    rec.items.push_back(scores.items[n]);
    rec.provenance.push_back(Provenance::kRepeat);
  }
  if (!fill_explore || rec.items.size() == k) return rec;

  const std::size_t m_slots = k - rec.items.size();
  std::vector<ItemId> filled;
  switch (policy.kind) {
    case ExplorationPolicy::Kind::kFairness:
      filled = explore_fairness(expl_candidates, policy, user, m_slots);
      break;
    case ExplorationPolicy::Kind::kDiversity:
      filled = explore_diversity(expl_candidates, policy, rec.items, m_slots);
      break;
    case ExplorationPolicy::Kind::kNone: {
      // Top-frequency fill over the exploration candidates, so every filled
      // slot is a genuine explore slot. With v = 0 this is exactly the
      // G-TopFreq completion of the personal ranking.
      for (ItemId i : popularity_order(expl_candidates, *policy.popularity)) {
        if (filled.size() == m_slots) break;
        filled.push_back(i);
      }
      break;
    }
  }
  for (ItemId i : filled) {
    rec.items.push_back(i);
    rec.provenance.push_back(Provenance::kExplore);
  }
  return rec;
}

TrexRecommender::TrexRecommender(const Dataset& train, RepetitionModel model,
                                 ExplorationPolicy policy, double v,
                                 bool fill_explore)
    : train_(&train),
      model_(std::move(model)),
      policy_(policy),
      v_(v),
      fill_explore_(fill_explore) {}

RepetitionScores TrexRecommender::scores(UserId u) const {
  return repetition_scores(model_, train_->users[u].baskets);
}

Recommendation TrexRecommender::recommend(UserId u, std::size_t k) const {
  const RepetitionScores rs = scores(u);
  RepeatExploreSets sets =
      repeat_explore_sets(train_->users[u].baskets, train_->n_items());
  return generate_basket(rs, v_, k, sets.expl, policy_, u, fill_explore_);
}

}  // namespace nbr
