#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "json.hpp"

#include "nbr/corpus.hpp"
#include "nbr/metrics.hpp"

namespace nbr {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Fully resolved run configuration. Everything that affects outputs lives
// here; the manifest echoes it verbatim so runs can be replayed.
struct RunConfig {
  // dataset block
  std::string dataset_format = "canonical";  // canonical|instacart|dunnhumby|synthetic
  std::string dataset_path;                  // raw source directory
  std::string corpus_dir;                    // prepared canonical corpus directory
  PreprocessParams preprocessing;
  std::size_t sample_users = 0;
  std::uint64_t dataset_seed = 42;  // user sampling and validation/test split
  std::map<std::string, std::string> columns;
  SynthParams synth;

  // method block
  std::string method = "p_topfreq";
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json grid;  // null -> method's default grid

  // evaluation block
  EvalConfig eval;
  std::string selection_metric = "recall";

  // sweep block
  std::size_t sweep_points = 21;
  std::string sweep_policy = "diversity";

  // run block
  std::string output_dir = "out";
  std::uint64_t seed = 42;  // exploration sampling streams
  std::size_t threads = 0;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  // Accepts either a config file or a run manifest (its "config" object).
  static RunConfig load(const std::string& path);
};

}  // namespace nbr
