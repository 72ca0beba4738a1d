#include "nbr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "nbr/baselines.hpp"
#include "nbr/corpus.hpp"

using nlohmann::json;

namespace nbr {

ValidationView make_validation_view(const SplitDataset& split) {
  ValidationView v;
  v.users = split.validation_users;
  v.targets.resize(split.train.n_users());
  for (UserId u : v.users) v.targets[u] = split.targets[u];
  return v;
}

namespace {

double slice_metric(const std::vector<Recommendation>& recs,
                    const ValidationView& view, const std::string& metric,
                    std::size_t k) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const Recommendation& r : recs) {
    const Basket& target = view.targets[r.user];
    if (target.empty()) continue;
    ++n;
    if (metric == "recall") {
      sum += recall_at_k(r.items, target, k);
    } else if (metric == "ndcg") {
      sum += ndcg_at_k(r.items, target, k);
    } else if (metric == "phr") {
      sum += phr_hit(r.items, target, k) ? 1.0 : 0.0;
    } else {
      throw DataError("unsupported selection metric: " + metric);
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace

GridResult grid_search(MethodContext& ctx, const std::string& method,
                       const json& grid, const ValidationView& validation,
                       const EvalConfig& cfg, const std::string& selection_metric,
                       const json& fixed) {
  if (validation.users.empty()) throw DataError("validation set is empty");
  std::vector<json> cells = expand_grid(method, grid);
  if (cells.empty()) throw DataError("empty hyperparameter grid");
  for (json& cell : cells) {
    for (auto it = fixed.begin(); it != fixed.end(); ++it) cell[it.key()] = it.value();
  }

  // Prime the TIFUKNN neighbor cap so ascending k values reuse one index.
  if (method == "tifuknn") {
    std::size_t max_k = 0;
    for (const json& c : cells) {
      max_k = std::max(max_k,
                       static_cast<std::size_t>(param_number(c, "k_neighbors", 300)));
    }
    ctx.tifu_max_neighbors = std::max(ctx.tifu_max_neighbors, max_k);
  }
  // The repetition-only core decides accuracy for every TREx variant, so all
  // of them tune through it.
  const std::string tuned_method =
      method.rfind("trex", 0) == 0 ? std::string("trex_rep") : method;

  GridResult result;
  bool first = true;
  for (const json& cell : cells) {
    RecommendFn fn = make_method(ctx, tuned_method, cell);
    std::vector<Recommendation> recs =
        recommend_all(fn, validation.users, cfg.k, ctx.n_threads);
    const double value = slice_metric(recs, validation, selection_metric, cfg.k);
    result.table.push_back({cell, value});
    if (first || value > result.best_value) {
      first = false;
      result.best = cell;
      result.best_value = value;
    }
  }
  return result;
}

std::vector<double> default_v_grid(const Dataset& train, const RepetitionModel& model,
                                   std::span<const UserId> users,
                                   std::size_t n_points) {
  std::vector<double> pool;
  for (UserId u : users) {
    RepetitionScores rs = repetition_scores(model, train.users[u].baskets);
    pool.insert(pool.end(), rs.scores.begin(), rs.scores.end());
  }
  std::sort(pool.begin(), pool.end());
  std::vector<double> grid;
  if (pool.empty() || n_points == 0) return grid;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double q = n_points == 1
                         ? 0.0
                         : static_cast<double>(i) / static_cast<double>(n_points - 1);
    const auto idx = static_cast<std::size_t>(
        std::floor(q * static_cast<double>(pool.size() - 1) + 0.5));
    grid.push_back(pool[idx]);
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<FrontierPoint> sweep_threshold(const RepetitionModel& model,
                                           const ExplorationPolicy& policy,
                                           const std::vector<double>& v_values,
                                           const SplitDataset& split,
                                           const GroupAssignment& groups,
                                           std::span<const UserId> users,
                                           const EvalConfig& cfg,
                                           std::size_t n_threads) {
  std::vector<FrontierPoint> frontier;
  for (double v : v_values) {
    TrexRecommender rec(split.train, model, policy, v, /*fill_explore=*/true);
    std::vector<Recommendation> recs = recommend_all(
        [&rec](UserId u, std::size_t k) { return rec.recommend(u, k); }, users,
        cfg.k, n_threads);
    MetricReport report = evaluate(recs, split, groups, cfg);
    FrontierPoint p;
    p.v = v;
    p.metrics = report.aggregate;
    frontier.push_back(std::move(p));
  }
  return frontier;
}

std::vector<AblationRow> ablation_rep(MethodContext& ctx, const SplitDataset& split,
                                      const EvalConfig& cfg) {
  ValidationView validation = make_validation_view(split);

  auto test_row = [&](const std::string& variant, const json& params,
                      double validation_value) {
    RecommendFn fn = make_method(ctx, "trex_rep", params);
    std::vector<Recommendation> recs =
        recommend_all(fn, split.test_users, cfg.k, ctx.n_threads);
    MetricReport report = evaluate(recs, split, ctx.groups, cfg);
    AblationRow row;
    row.variant = variant;
    row.params = params;
    row.validation_value = validation_value;
    row.recall = report.aggregate.at("recall");
    row.ndcg = report.aggregate.at("ndcg");
    row.phr = report.aggregate.at("phr");
    return row;
  };

  std::vector<AblationRow> rows;

  // base: no time decay, no item feature (frequency ranking).
  json base_params = {{"alpha", 0.0}, {"beta", 1.0}, {"features", false}, {"v", 0.0}};
  {
    RecommendFn fn = make_method(ctx, "trex_rep", base_params);
    std::vector<Recommendation> recs =
        recommend_all(fn, validation.users, cfg.k, ctx.n_threads);
    rows.push_back(test_row("base", base_params,
                            slice_metric(recs, validation, "recall", cfg.k)));
  }

  // +T: tuned time decay, item feature off.
  {
    json grid = {{"alpha", json::array({0.0})},
                 {"beta", paper_grid("trex_rep").at("beta")}};
    GridResult tuned = grid_search(ctx, "trex_rep", grid, validation, cfg, "recall",
                                   {{"features", false}});
    json params = tuned.best;
    params["v"] = 0.0;
    rows.push_back(test_row("+T", params, tuned.best_value));
  }

  // +T+RF: tuned decay and discount with the item feature on.
  {
    GridResult tuned = grid_search(ctx, "trex_rep", paper_grid("trex_rep"),
                                   validation, cfg, "recall", {{"features", true}});
    json params = tuned.best;
    params["v"] = 0.0;
    rows.push_back(test_row("+T+RF", params, tuned.best_value));
  }
  return rows;
}

SignificanceResult paired_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("paired t-test needs aligned samples");
  }
  const std::size_t n = a.size();
  if (n < 2) throw std::invalid_argument("paired t-test needs n >= 2");

  SignificanceResult r;
  r.n_users = n;
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  const double var = ss / static_cast<double>(n - 1);
  r.mean_difference = mean;
  if (var == 0.0) {
    r.degenerate = true;
    r.t_statistic = 0.0;
    r.p_value = mean == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.t_statistic = mean / std::sqrt(var / static_cast<double>(n));
  boost::math::students_t dist(static_cast<double>(n - 1));
  r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t_statistic)));
  return r;
}

double chi_squared_sf(double statistic, std::size_t dof) {
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

}  // namespace nbr
