#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "nbr/baselines.hpp"
#include "nbr/metrics.hpp"
#include "nbr/trex.hpp"
#include "nbr/types.hpp"

namespace nbr {

// Shared fitted state for building methods against one training corpus.
// Holds no targets, so tuning code built on it cannot peek at held-out
// baskets. Heavy per-(m_groups, r_b, r_g) TIFUKNN indexes are cached one at
// a time, so grids must iterate those parameters in outer loops
// (expand_grid does).
struct MethodContext {
  const Dataset* train = nullptr;
  std::vector<std::uint32_t> popularity;
  GroupAssignment groups;
  std::uint64_t run_seed = 0;
  std::size_t n_threads = 0;

  std::shared_ptr<TopFreqModels> topfreq;
  std::shared_ptr<UpcfIndex> upcf_index;
  std::string tifu_index_key;
  std::shared_ptr<TifuknnIndex> tifu_index;
  std::size_t tifu_max_neighbors = 0;
};

MethodContext make_method_context(const Dataset& train, std::uint64_t run_seed,
                                  double popular_fraction = 0.2,
                                  std::size_t n_threads = 0);
inline MethodContext make_method_context(const SplitDataset& split,
                                         std::uint64_t run_seed,
                                         double popular_fraction = 0.2,
                                         std::size_t n_threads = 0) {
  return make_method_context(split.train, run_seed, popular_fraction, n_threads);
}

bool is_known_method(const std::string& name);

// Builds a per-user recommender closure; fitted state is owned by the
// closure (and the context caches). Unknown names/parameters -> DataError.
RecommendFn make_method(MethodContext& ctx, const std::string& name,
                        const nlohmann::json& params);

// Hyperparameter grids. "paper" grids are the full published search spaces;
// "default" grids are tractable desk-scale subsets of the same ranges.
nlohmann::json paper_grid(const std::string& method);
nlohmann::json default_grid(const std::string& method);

// Cartesian expansion in the method's canonical key order (slow-changing
// model-rebuild parameters first). Grid values may be numbers or "inf".
std::vector<nlohmann::json> expand_grid(const std::string& method,
                                        const nlohmann::json& grid);

double param_number(const nlohmann::json& params, const std::string& key,
                    double fallback);

}  // namespace nbr
