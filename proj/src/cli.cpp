#include "nbr/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "nbr/config.hpp"
#include "nbr/corpus.hpp"
#include "nbr/io.hpp"
#include "nbr/pipeline.hpp"

using nlohmann::json;

namespace nbr::cli {

namespace {

RunConfig load_config(const std::string& path) { return RunConfig::load(path); }

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"next-basket recommendation toolkit"};
  app.require_subcommand(1);

  std::string config_path, corpus, predictions, out_dir, method_label = "external";
  std::string metric = "recall", csv_a, csv_b, policy;
  std::size_t k = 10;
  std::optional<double> v_override;

  auto* prepare = app.add_subcommand("prepare", "ingest, preprocess and split a corpus");
  prepare->add_option("--config", config_path, "run configuration file")->required();

  auto* stats = app.add_subcommand("stats", "print statistics of a prepared corpus");
  stats->add_option("--corpus", corpus, "prepared corpus directory")->required();

  auto* tune = app.add_subcommand("tune", "grid search on the validation users");
  tune->add_option("--config", config_path)->required();

  auto* run = app.add_subcommand("run", "fit the configured method and predict");
  run->add_option("--config", config_path)->required();
  double v_value = 0.0;
  auto* v_opt = run->add_option("--v", v_value, "repetition confidence threshold");

  auto* eval = app.add_subcommand("eval", "score a predictions file");
  eval->add_option("--predictions", predictions)->required();
  eval->add_option("--corpus", corpus)->required();
  auto* k_opt = eval->add_option("--k", k, "basket size (default 10)");
  eval->add_option("--method", method_label, "method label for the report");
  eval->add_option("--out", out_dir, "output directory (default: predictions dir)");
  eval->add_option("--config", config_path, "take the evaluation block from a config");

  auto* sweep = app.add_subcommand("sweep", "threshold sweep for a TREx policy");
  sweep->add_option("--config", config_path)->required();
  sweep->add_option("--policy", policy, "fairness|diversity");

  auto* ablate = app.add_subcommand("ablate", "repetition module ablation");
  ablate->add_option("--config", config_path)->required();

  auto* compare = app.add_subcommand("compare", "paired t-test between two runs");
  compare->add_option("--a", csv_a, "per_user.csv of method A")->required();
  compare->add_option("--b", csv_b, "per_user.csv of method B")->required();
  compare->add_option("--metric", metric, "per-user metric name");
  compare->add_option("--out", out_dir, "output directory (default: cwd)");

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  SynthParams sp;
  std::uint64_t split_seed = 42;
  synth->add_option("--users", sp.n_users);
  synth->add_option("--items", sp.n_items);
  synth->add_option("--categories", sp.n_categories);
  synth->add_option("--baskets", sp.baskets_per_user);
  synth->add_option("--basket-size", sp.basket_size);
  synth->add_option("--repeat-prob", sp.repeat_prob);
  synth->add_option("--skew", sp.popularity_skew);
  synth->add_option("--seed", sp.seed);
  synth->add_option("--split-seed", split_seed);
  synth->add_option("--out", out_dir, "corpus output directory")->required();

  std::vector<std::string> argv = args;
  std::reverse(argv.begin(), argv.end());  // CLI11 consumes right to left
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (prepare->parsed()) {
      DatasetStats st = pipeline::prepare(load_config(config_path));
      std::cout << pipeline::stats_to_json(st).dump(2) << "\n";
    } else if (stats->parsed()) {
      SplitDataset s = load_corpus_dir(corpus);
      std::cout << pipeline::stats_to_json(dataset_stats(s)).dump(2) << "\n";
    } else if (tune->parsed()) {
      GridResult r = pipeline::tune(load_config(config_path));
      std::cout << json{{"best", r.best}, {"value", r.best_value}}.dump(2) << "\n";
    } else if (run->parsed()) {
      if (*v_opt) v_override = v_value;
      pipeline::RunResult r = pipeline::run(load_config(config_path), v_override);
      std::cout << r.predictions_path << "\n";
    } else if (eval->parsed()) {
      EvalConfig eval_cfg;
      if (!config_path.empty()) eval_cfg = load_config(config_path).eval;
      if (*k_opt || config_path.empty()) eval_cfg.k = k;
      if (out_dir.empty()) {
        out_dir = std::filesystem::path(predictions).parent_path().string();
        if (out_dir.empty()) out_dir = ".";
      }
      MetricReport report =
          pipeline::evaluate_predictions(predictions, corpus, eval_cfg, method_label,
                                         out_dir);
      json agg = report.aggregate;
      std::cout << agg.dump(2) << "\n";
    } else if (sweep->parsed()) {
      RunConfig cfg = load_config(config_path);
      if (!policy.empty()) cfg.sweep_policy = policy;
      pipeline::sweep(cfg);
      std::cout << cfg.output_dir << "/frontier_all.csv\n";
    } else if (ablate->parsed()) {
      RunConfig cfg = load_config(config_path);
      auto rows = pipeline::ablate(cfg);
      for (const auto& r : rows) {
        std::cout << r.variant << " recall@" << cfg.eval.k << " = " << r.recall << "\n";
      }
    } else if (compare->parsed()) {
      if (out_dir.empty()) out_dir = ".";
      SignificanceResult r = pipeline::compare(csv_a, csv_b, metric, out_dir);
      std::cout << json{{"metric", r.metric},
                        {"mean_difference", r.mean_difference},
                        {"t", r.t_statistic},
                        {"p", r.p_value},
                        {"n", r.n_users}}
                       .dump(2)
                << "\n";
    } else if (synth->parsed()) {
      Dataset d = synth_generate(sp);
      SplitDataset s = split(d, split_seed);
      write_canonical(d, out_dir);
      write_split_assignment(s, out_dir);
      atomic_write_file(out_dir + "/stats.json",
                        pipeline::stats_to_json(dataset_stats(s)).dump(2) + "\n");
      std::cout << out_dir << "\n";
    }
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace nbr::cli
