#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nbr/config.hpp"
#include "nbr/experiments.hpp"
#include "nbr/metrics.hpp"
#include "nbr/types.hpp"

namespace nbr::pipeline {

// Resolved location of the prepared corpus (output_dir/corpus by default).
std::string corpus_dir(const RunConfig& cfg);

nlohmann::json stats_to_json(const DatasetStats& st);

// Ingest/generate + preprocess + split; writes the canonical corpus files,
// split.json and stats.json under corpus_dir(cfg).
DatasetStats prepare(const RunConfig& cfg);

// Grid search on validation users; writes best_params.json,
// validation_table.csv and manifest.json under cfg.output_dir.
GridResult tune(const RunConfig& cfg);

struct RunResult {
  std::string predictions_path;
  std::string manifest_path;
  nlohmann::json resolved_params;
};

// Fits the configured method and predicts for all test users; writes
// predictions.jsonl and manifest.json. When cfg.params is empty and
// best_params.json exists in the output dir, the tuned parameters are used
// (and echoed into the manifest).
RunResult run(const RunConfig& cfg, std::optional<double> v_override = {});

// Scores a predictions file against a prepared corpus; writes report.json,
// report.csv and per_user.csv under out_dir.
MetricReport evaluate_predictions(const std::string& predictions_path,
                                  const std::string& corpus, const EvalConfig& eval,
                                  const std::string& method_label,
                                  const std::string& out_dir);

// Threshold sweep for the configured TREx policy over the test users; writes
// frontier_all.csv plus one frontier_<metric>.csv per beyond-accuracy metric.
std::vector<FrontierPoint> sweep(const RunConfig& cfg);

// Repetition-module ablation; writes ablation.csv.
std::vector<AblationRow> ablate(const RunConfig& cfg);

// Paired t-test between two per_user.csv files on one metric; writes
// significance.csv under out_dir.
SignificanceResult compare(const std::string& csv_a, const std::string& csv_b,
                           const std::string& metric, const std::string& out_dir);

}  // namespace nbr::pipeline
