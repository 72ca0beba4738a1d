#include "nbr/methods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nbr/corpus.hpp"

using nlohmann::json;

namespace nbr {

MethodContext make_method_context(const Dataset& train, std::uint64_t run_seed,
                                  double popular_fraction, std::size_t n_threads) {
  MethodContext ctx;
  ctx.train = &train;
  ctx.popularity = item_popularity(train);
  ctx.groups = assign_groups(ctx.popularity, popular_fraction);
  ctx.run_seed = run_seed;
  ctx.n_threads = n_threads;
  return ctx;
}

bool is_known_method(const std::string& name) {
  static const char* names[] = {"g_topfreq",     "p_topfreq",      "gp_topfreq",
                                "tifuknn",       "upcf",           "trex_rep",
                                "trex_fairness", "trex_diversity", "trex_none"};
  return std::any_of(std::begin(names), std::end(names),
                     [&](const char* n) { return name == n; });
}

double param_number(const json& params, const std::string& key, double fallback) {
  if (!params.contains(key)) return fallback;
  const auto& v = params.at(key);
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw DataError("parameter '" + key + "': expected a number");
  }
  return v.get<double>();
}

namespace {

RecommendFn make_trex(MethodContext& ctx, const std::string& name, const json& params) {
  const double alpha = param_number(params, "alpha", 0.0);
  const double beta = param_number(params, "beta", 1.0);
  const double v = param_number(params, "v", 0.0);
  const bool features = params.value("features", true);

  ExplorationPolicy policy;
  policy.popularity = &ctx.popularity;
  policy.rng_seed = ctx.run_seed;
  bool fill = true;
  if (name == "trex_rep") {
    policy.kind = ExplorationPolicy::Kind::kNone;
    fill = false;  // repetition-only: baskets may be under-filled
  } else if (name == "trex_none") {
    policy.kind = ExplorationPolicy::Kind::kNone;
  } else if (name == "trex_fairness") {
    policy.kind = ExplorationPolicy::Kind::kFairness;
    policy.groups = &ctx.groups;
  } else {
    policy.kind = ExplorationPolicy::Kind::kDiversity;
    policy.categories = &ctx.train->item_category;
  }
  auto model = fit_repetition(*ctx.train, alpha, beta, features);
  auto rec = std::make_shared<TrexRecommender>(*ctx.train, std::move(model),
                                               policy, v, fill);
  return [rec](UserId u, std::size_t k) { return rec->recommend(u, k); };
}

RecommendFn make_tifuknn(MethodContext& ctx, const json& params) {
  TifuknnParams p;
  p.k_neighbors = static_cast<std::size_t>(param_number(params, "k_neighbors", 300));
  p.m_groups = static_cast<std::size_t>(param_number(params, "m_groups", 7));
  p.r_b = param_number(params, "r_b", 0.9);
  p.r_g = param_number(params, "r_g", 0.7);
  p.alpha = param_number(params, "alpha", 0.7);
  if (p.m_groups == 0) throw DataError("tifuknn: m_groups must be positive");

  const std::string key = std::to_string(p.m_groups) + "/" + std::to_string(p.r_b) +
                          "/" + std::to_string(p.r_g);
  if (ctx.tifu_index_key != key || !ctx.tifu_index ||
      ctx.tifu_max_neighbors < p.k_neighbors) {
    ctx.tifu_max_neighbors = std::max(ctx.tifu_max_neighbors, p.k_neighbors);
    ctx.tifu_index = std::make_shared<TifuknnIndex>(
        *ctx.train, p.m_groups, p.r_b, p.r_g, ctx.tifu_max_neighbors,
        ctx.n_threads);
    ctx.tifu_index_key = key;
  }
  auto model = std::make_shared<Tifuknn>(*ctx.train, ctx.tifu_index, p);
  return [model](UserId u, std::size_t k) { return model->recommend(u, k); };
}

RecommendFn make_upcf(MethodContext& ctx, const json& params) {
  UpcfParams p;
  p.recency = param_number(params, "recency", std::numeric_limits<double>::infinity());
  p.locality = param_number(params, "locality", 100.0);
  p.asymmetry = param_number(params, "asymmetry", 0.25);
  if (!ctx.upcf_index) {
    ctx.upcf_index = std::make_shared<UpcfIndex>(*ctx.train, ctx.n_threads);
  }
  auto model = std::make_shared<UpCf>(*ctx.train, ctx.upcf_index, p);
  return [model](UserId u, std::size_t k) { return model->recommend(u, k); };
}

}  // namespace

RecommendFn make_method(MethodContext& ctx, const std::string& name,
                        const json& params) {
  if (!is_known_method(name)) throw DataError("unknown method: " + name);
  if (name.rfind("trex", 0) == 0) return make_trex(ctx, name, params);
  if (name == "tifuknn") return make_tifuknn(ctx, params);
  if (name == "upcf") return make_upcf(ctx, params);
  if (!ctx.topfreq) ctx.topfreq = std::make_shared<TopFreqModels>(*ctx.train);
  auto model = ctx.topfreq;
  if (name == "g_topfreq") {
    return [model](UserId u, std::size_t k) { return model->global(u, k); };
  }
  if (name == "p_topfreq") {
    return [model](UserId u, std::size_t k) { return model->personal(u, k); };
  }
  return [model](UserId u, std::size_t k) { return model->combined(u, k); };
}

json paper_grid(const std::string& method) {
  auto seq = [](double lo, double hi, double step) {
    json a = json::array();
    for (double v = lo; v <= hi + 1e-9; v += step) a.push_back(std::round(v * 100) / 100);
    return a;
  };
  if (method.rfind("trex", 0) == 0) {
    return {{"alpha", seq(0.0, 1.0, 0.1)}, {"beta", seq(0.7, 1.0, 0.05)}};
  }
  if (method == "tifuknn") {
    return {{"m_groups", {3, 7, 11, 15, 19, 23}},
            {"r_b", seq(0.1, 1.0, 0.1)},
            {"r_g", seq(0.1, 1.0, 0.1)},
            {"k_neighbors", {100, 300, 500, 900, 1100, 1300}},
            {"alpha", seq(0.0, 1.0, 0.1)}};
  }
  if (method == "upcf") {
    return {{"recency", {1, 5, 10, 25, 100, "inf"}},
            {"locality", {1, 5, 10, 50, 100, 1000}},
            {"asymmetry", {0.0, 0.25, 0.5, 0.75, 1.0}}};
  }
  return json::object();  // frequency baselines have nothing to tune
}

json default_grid(const std::string& method) {
  if (method.rfind("trex", 0) == 0) return paper_grid(method);
  // Tractable subsets of the paper ranges for the heavier neighbor models.
  if (method == "tifuknn") {
    return {{"m_groups", {3, 7, 11}},
            {"r_b", {0.9}},
            {"r_g", {0.6, 0.7, 0.8}},
            {"k_neighbors", {300, 900}},
            {"alpha", {0.3, 0.5, 0.7, 0.9}}};
  }
  if (method == "upcf") {
    return {{"recency", {1, 5, 10, 100, "inf"}},
            {"locality", {1, 5, 10, 100, 1000}},
            {"asymmetry", {0.0, 0.25, 0.5}}};
  }
  return paper_grid(method);
}

std::vector<json> expand_grid(const std::string& method, const json& grid) {
  std::vector<std::string> order;
  if (method.rfind("trex", 0) == 0) {
    order = {"alpha", "beta"};
  } else if (method == "tifuknn") {
    order = {"m_groups", "r_b", "r_g", "k_neighbors", "alpha"};
  } else if (method == "upcf") {
    order = {"recency", "locality", "asymmetry"};
  } else {
    for (auto it = grid.begin(); it != grid.end(); ++it) order.push_back(it.key());
  }
  // Keys absent from the grid stay fixed; unknown keys are an error.
  for (auto it = grid.begin(); it != grid.end(); ++it) {
    if (std::find(order.begin(), order.end(), it.key()) == order.end()) {
      throw DataError("grid key '" + it.key() + "' not tunable for " + method);
    }
  }
  std::vector<json> cells{json::object()};
  for (const std::string& key : order) {
    if (!grid.contains(key)) continue;
    const json& values = grid.at(key);
    if (!values.is_array() || values.empty()) {
      throw DataError("grid for '" + key + "' must be a non-empty array");
    }
    std::vector<json> next;
    next.reserve(cells.size() * values.size());
    for (const json& cell : cells) {
      for (const json& v : values) {
        json c = cell;
        c[key] = v;
        next.push_back(std::move(c));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

}  // namespace nbr
