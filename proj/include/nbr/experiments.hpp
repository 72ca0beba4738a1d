#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "nbr/methods.hpp"
#include "nbr/metrics.hpp"
#include "nbr/trex.hpp"
#include "nbr/types.hpp"

namespace nbr {

// Tuning sees only the validation half: targets outside the view are empty,
// so no code path inside grid_search can touch test targets.
struct ValidationView {
  std::vector<UserId> users;
  std::vector<Basket> targets;  // indexed by user id, empty outside the view
};

ValidationView make_validation_view(const SplitDataset& split);

struct GridRow {
  nlohmann::json params;
  double value = 0.0;
};

struct GridResult {
  nlohmann::json best;        // first-in-grid argmax of the selection metric
  double best_value = 0.0;
  std::vector<GridRow> table;
};

// Exhaustive search over expand_grid(method, grid) evaluated on validation
// users. selection_metric is one of recall/ndcg/phr (at cfg.k). Entries in
// `fixed` are merged into every cell (e.g. ablation switches).
GridResult grid_search(MethodContext& ctx, const std::string& method,
                       const nlohmann::json& grid, const ValidationView& validation,
                       const EvalConfig& cfg,
                       const std::string& selection_metric = "recall",
                       const nlohmann::json& fixed = nlohmann::json::object());

struct FrontierPoint {
  double v = 0.0;
  std::map<std::string, double> metrics;  // full aggregate report at this v
};

// Pooled RepS quantiles over the evaluated users' repeat candidates;
// n_points evenly spaced quantiles from 0 to 1.
std::vector<double> default_v_grid(const Dataset& train, const RepetitionModel& model,
                                   std::span<const UserId> users,
                                   std::size_t n_points = 21);

// One frontier point per threshold, evaluated with the full metric suite.
std::vector<FrontierPoint> sweep_threshold(const RepetitionModel& model,
                                           const ExplorationPolicy& policy,
                                           const std::vector<double>& v_values,
                                           const SplitDataset& split,
                                           const GroupAssignment& groups,
                                           std::span<const UserId> users,
                                           const EvalConfig& cfg,
                                           std::size_t n_threads = 0);

struct AblationRow {
  std::string variant;  // "base", "+T", "+T+RF"
  nlohmann::json params;
  double validation_value = 0.0;  // selection metric on validation
  double recall = 0.0, ndcg = 0.0, phr = 0.0;  // on test users
};

// Figure-2-style ablation of the repetition module: base (no decay, no item
// feature), +T (tuned decay), +T+RF (tuned decay and item feature). Baskets
// are repetition-only, like the P-TopFreq baseline they extend. Tuning sees
// validation targets only; the reported accuracy uses the test users.
std::vector<AblationRow> ablation_rep(MethodContext& ctx, const SplitDataset& split,
                                      const EvalConfig& cfg);

struct SignificanceResult {
  std::string metric, method_a, method_b;
  double mean_difference = 0.0;
  double t_statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_users = 0;
  bool degenerate = false;  // zero variance of the differences
};

// Two-sided paired t-test over per-user values (same user set, n >= 2).
SignificanceResult paired_ttest(std::span<const double> a, std::span<const double> b);

// chi-squared upper-tail probability (survival function), used by the
// sampling-law checks.
double chi_squared_sf(double statistic, std::size_t dof);

}  // namespace nbr
