#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nbr/types.hpp"

namespace nbr {

// ---- popularity groups ----

// Popular/unpopular split by training purchase frequency. G+ holds the
// ceil(popular_fraction * catalog) most purchased items, ties by item id.
struct GroupAssignment {
  std::vector<std::uint8_t> is_popular;  // per item
  std::size_t n_popular = 0;

  std::size_t n_items() const { return is_popular.size(); }
  std::size_t n_unpopular() const { return is_popular.size() - n_popular; }
};

GroupAssignment assign_groups(const std::vector<std::uint32_t>& train_popularity,
                              double popular_fraction = 0.2);

// ---- position weighting ----

enum class WeightingModel { kLogDiscount, kCascade };

struct ExposureParams {
  WeightingModel model = WeightingModel::kLogDiscount;
  double gamma = 0.8;  // cascade continuation probability
  double stop = 0.5;   // cascade stop probability on a relevant item
};

// Position weights a_P for a list of length `len`; `relevant[j]` marks list
// positions whose item is in the ground truth (cascade only).
std::vector<double> exposure_vector(std::size_t len, const std::vector<bool>& relevant,
                                    const ExposureParams& params);

// ---- accuracy ----

double recall_at_k(const std::vector<ItemId>& ranked, const Basket& target,
                   std::size_t k);
double ndcg_at_k(const std::vector<ItemId>& ranked, const Basket& target,
                 std::size_t k);
bool phr_hit(const std::vector<ItemId>& ranked, const Basket& target, std::size_t k);

// Repeat/explore decomposition of accuracy. A side is reported only when the
// corresponding target subset is non-empty.
struct FineGrainedAccuracy {
  bool has_rep = false;
  bool has_expl = false;
  double recall_rep = 0.0;
  double recall_expl = 0.0;
  double phr_rep = 0.0;
  double phr_expl = 0.0;
};

FineGrainedAccuracy fine_grained(const std::vector<ItemId>& ranked,
                                 const Basket& target,
                                 const std::vector<ItemId>& rep_set, std::size_t k);

// ---- fairness (pooled over users) ----

struct FairnessContext {
  std::span<const Recommendation> recs;
  const std::vector<Basket>* targets = nullptr;  // indexed by user id
  const GroupAssignment* groups = nullptr;
  ExposureParams weights;  // log discount by default
  double delta = 1e-6;
  bool per_item_normalization = false;  // divide group exposure by group size
  std::size_t k = 10;
};

double log_dp(const FairnessContext& ctx);
double log_eur(const FairnessContext& ctx);
double log_rur(const FairnessContext& ctx);

// Expected-exposure metrics under the cascade model, averaged per user.
struct ExpectedExposureResult {
  double eel = 0.0;
  double eed = 0.0;
  std::vector<double> eel_per_user;  // parallel to ctx.recs
  std::vector<double> eed_per_user;
};

ExpectedExposureResult expected_exposure(const FairnessContext& ctx);

// ---- diversity ----

struct DiversityValues {
  double ild = 0.0;
  double entropy = 0.0;
  double ds = 0.0;
};

DiversityValues diversity(const std::vector<ItemId>& list,
                          const std::vector<CategoryId>& item_category);

// ---- report ----

struct EvalConfig {
  std::size_t k = 10;
  ExposureParams ratio_weights{WeightingModel::kLogDiscount, 0.8, 0.5};
  ExposureParams ee_weights{WeightingModel::kCascade, 0.8, 0.5};
  double delta = 1e-6;
  double popular_fraction = 0.2;
  bool per_item_dp_normalization = false;
};

struct MetricReport {
  EvalConfig config;
  // Aggregates: means over included users; pooled log-ratio fairness.
  std::map<std::string, double> aggregate;
  // Per-user rows in recommendation order: user label -> metric -> value.
  std::vector<std::pair<std::string, std::map<std::string, double>>> per_user;
};

// Scores one recommendation list per user against the held-out targets.
// Repeat sets are derived from each user's training history.
MetricReport evaluate(const std::vector<Recommendation>& recs,
                      const SplitDataset& split, const GroupAssignment& groups,
                      const EvalConfig& config);

std::string report_to_json(const MetricReport& report, const std::string& method);
std::string report_to_csv(const MetricReport& report, const std::string& method);
std::string per_user_to_csv(const MetricReport& report);

}  // namespace nbr
