#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nbr/metrics.hpp"
#include "nbr/types.hpp"

namespace nbr {

// Item-level repurchase features plus the user-interest decay, fitted once on
// the training corpus.
struct RepetitionModel {
  double alpha = 0.0;  // repurchase-frequency discount, in [0,1]
  double beta = 1.0;   // time decay, in (0,1]
  bool rep_feature_enabled = true;
  double mean_rep_f = 0.0;
  std::vector<double> rep_feature;      // per item; valid where n_buyers > 0
  std::vector<std::uint32_t> n_buyers;  // users who bought the item at least once

  // Feature used in scoring: 1 when the ablation switch is off, the corpus
  // mean for items seen in a history but absent from the feature table.
  double item_feature(ItemId i) const {
    if (!rep_feature_enabled) return 1.0;
    if (i < n_buyers.size() && n_buyers[i] > 0) return rep_feature[i];
    return mean_rep_f;
  }
};

RepetitionModel fit_repetition(const Dataset& train, double alpha, double beta,
                               bool rep_feature_enabled = true);

// Time-decayed interest: sum of beta^(T - l) over the 1-based basket
// positions l containing the item. Throws std::invalid_argument when the
// item never appears in the history.
double user_interest(const std::vector<Basket>& history, double beta, ItemId item);

// Scores over exactly the user's repeat set, sorted by item id.
struct RepetitionScores {
  std::vector<ItemId> items;
  std::vector<double> scores;  // parallel
};

RepetitionScores repetition_scores(const RepetitionModel& model,
                                   const std::vector<Basket>& history);

struct ExplorationPolicy {
  enum class Kind { kFairness, kDiversity, kNone };
  Kind kind = Kind::kNone;
  const GroupAssignment* groups = nullptr;              // fairness
  const std::vector<std::uint32_t>* popularity = nullptr;  // all kinds
  const std::vector<CategoryId>* categories = nullptr;  // diversity
  std::uint64_t rng_seed = 0;  // run seed; draws are re-seeded per user
};

ExplorationPolicy::Kind parse_policy_kind(const std::string& name);

// Samples m_slots distinct unpopular candidates with probability proportional
// to training purchase frequency; exhausted pools fall back to popularity
// order over the remaining candidates.
std::vector<ItemId> explore_fairness(const std::vector<ItemId>& expl_candidates,
                                     const ExplorationPolicy& policy, UserId user,
                                     std::size_t m_slots);

// Walks candidates by descending popularity and keeps those whose category is
// new to the basket; remaining slots fall back to plain popularity order.
std::vector<ItemId> explore_diversity(const std::vector<ItemId>& expl_candidates,
                                      const ExplorationPolicy& policy,
                                      const std::vector<ItemId>& basket_so_far,
                                      std::size_t m_slots);

// Repetition-greedy basket assembly with confidence threshold v: repeat
// candidates scoring below v are dropped and the freed slots go to the
// exploration policy. When fill_explore is false the basket may be
// under-filled (repetition-only variant).
Recommendation generate_basket(const RepetitionScores& scores, double v,
                               std::size_t k,
                               const std::vector<ItemId>& expl_candidates,
                               const ExplorationPolicy& policy, UserId user,
                               bool fill_explore = true);

// One fitted TREx configuration bound to its training data. The policy's
// popularity/groups/categories tables must outlive the recommender.
class TrexRecommender {
 public:
  TrexRecommender(const Dataset& train, RepetitionModel model,
                  ExplorationPolicy policy, double v, bool fill_explore = true);

  Recommendation recommend(UserId u, std::size_t k) const;
  RepetitionScores scores(UserId u) const;
  const RepetitionModel& model() const { return model_; }
  double threshold() const { return v_; }
  void set_threshold(double v) { v_ = v; }

 private:
  const Dataset* train_;
  RepetitionModel model_;
  ExplorationPolicy policy_;
  double v_;
  bool fill_explore_;
};

}  // namespace nbr
