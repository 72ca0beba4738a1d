#include "nbr/pipeline.hpp"

#include <chrono>
#include <map>
#include <set>

#include "nbr/baselines.hpp"
#include "nbr/corpus.hpp"
#include "nbr/io.hpp"

using nlohmann::json;

namespace nbr::pipeline {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::uint64_t corpus_file_hash(const std::string& dir) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* name : {"/baskets.jsonl", "/categories.jsonl", "/split.json"}) {
    h ^= fnv1a64(read_file(dir + name));
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_manifest(const RunConfig& cfg, const std::string& command,
                    const json& resolved_params, std::uint64_t corpus_hash_value,
                    const json& wall_clock) {
  json config = cfg.to_json();
  if (!resolved_params.is_null()) config["method"]["params"] = resolved_params;
  json m = {{"version", kToolkitVersion},
            {"command", command},
            {"config", std::move(config)},
            {"corpus_hash", hex64(corpus_hash_value)},
            {"wall_clock", wall_clock}};
  atomic_write_file(cfg.output_dir + "/manifest.json", m.dump(2) + "\n");
}

MethodContext load_context(const RunConfig& cfg, SplitDataset& split) {
  split = load_corpus_dir(corpus_dir(cfg));
  return make_method_context(split, cfg.seed, cfg.eval.popular_fraction, cfg.threads);
}

const std::vector<std::string>& beyond_accuracy_metrics() {
  static const std::vector<std::string> names = {
      "log_dp", "log_eur", "log_rur", "eel", "eed", "ild", "entropy", "ds"};
  return names;
}

}  // namespace

std::string corpus_dir(const RunConfig& cfg) {
  return cfg.corpus_dir.empty() ? cfg.output_dir + "/corpus" : cfg.corpus_dir;
}

json stats_to_json(const DatasetStats& st) {
  return json{{"n_items", st.n_items},
              {"n_users", st.n_users},
              {"avg_basket_size", st.avg_basket_size},
              {"avg_baskets_per_user", st.avg_baskets_per_user},
              {"repeat_ratio", st.repeat_ratio},
              {"explore_ratio", st.explore_ratio}};
}

DatasetStats prepare(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Dataset raw;
  if (cfg.dataset_format == "synthetic") {
    raw = synth_generate(cfg.synth);
  } else {
    IngestOptions opts;
    opts.format = parse_corpus_format(cfg.dataset_format);
    opts.path = cfg.dataset_path;
    opts.columns = cfg.columns;
    opts.sample_users = cfg.sample_users;
    opts.sample_seed = cfg.dataset_seed;
    raw = ingest(opts);
  }
  const double t_ingest = seconds_since(t0);

  Dataset processed = preprocess(raw, cfg.preprocessing);
  SplitDataset s = split(processed, cfg.dataset_seed);
  DatasetStats st = dataset_stats(s);

  const std::string dir = corpus_dir(cfg);
  write_canonical(processed, dir);
  write_split_assignment(s, dir);
  atomic_write_file(dir + "/stats.json", stats_to_json(st).dump(2) + "\n");

  RunConfig echoed = cfg;
  echoed.corpus_dir = dir;
  write_manifest(echoed, "prepare", json(),
                 corpus_file_hash(dir),
                 {{"ingest", t_ingest}, {"total", seconds_since(t0)}});
  return st;
}

GridResult tune(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SplitDataset s;
  MethodContext ctx = load_context(cfg, s);
  const json grid = cfg.grid.is_null() ? default_grid(cfg.method) : cfg.grid;
  if (grid.empty()) {
    throw DataError("method " + cfg.method + " has no tunable hyperparameters");
  }
  ValidationView validation = make_validation_view(s);
  GridResult result =
      grid_search(ctx, cfg.method, grid, validation, cfg.eval, cfg.selection_metric);

  ensure_dir(cfg.output_dir);
  json best = {{"method", cfg.method},
               {"selection_metric", cfg.selection_metric},
               {"k", cfg.eval.k},
               {"value", result.best_value},
               {"params", result.best}};
  atomic_write_file(cfg.output_dir + "/best_params.json", best.dump(2) + "\n");

  std::string table = "params," + cfg.selection_metric + "@" +
                      std::to_string(cfg.eval.k) + "\n";
  for (const GridRow& row : result.table) {
    table += csv_escape(row.params.dump()) + "," + json(row.value).dump() + "\n";
  }
  atomic_write_file(cfg.output_dir + "/validation_table.csv", table);
  write_manifest(cfg, "tune", json(), corpus_file_hash(corpus_dir(cfg)),
                 {{"total", seconds_since(t0)}});
  return result;
}

RunResult run(const RunConfig& cfg, std::optional<double> v_override) {
  const auto t0 = std::chrono::steady_clock::now();
  SplitDataset s;
  MethodContext ctx = load_context(cfg, s);
  const double t_load = seconds_since(t0);

  json params = cfg.params.is_null() ? json::object() : cfg.params;
  if (params.empty() && file_exists(cfg.output_dir + "/best_params.json")) {
    json best = json::parse(read_file(cfg.output_dir + "/best_params.json"));
    params = best["params"];
  }
  if (v_override) params["v"] = *v_override;

  RecommendFn fn = make_method(ctx, cfg.method, params);
  const double t_fit = seconds_since(t0) - t_load;
  std::vector<Recommendation> recs =
      recommend_all(fn, s.test_users, cfg.eval.k, cfg.threads);
  const double t_predict = seconds_since(t0) - t_load - t_fit;

  ensure_dir(cfg.output_dir);
  RunResult out;
  out.predictions_path = cfg.output_dir + "/predictions.jsonl";
  out.manifest_path = cfg.output_dir + "/manifest.json";
  out.resolved_params = params;
  write_recommendations_jsonl(out.predictions_path, recs, s.train);
  write_manifest(cfg, "run", params, corpus_file_hash(corpus_dir(cfg)),
                 {{"load", t_load},
                  {"fit", t_fit},
                  {"predict", t_predict},
                  {"total", seconds_since(t0)}});
  return out;
}

MetricReport evaluate_predictions(const std::string& predictions_path,
                                  const std::string& corpus, const EvalConfig& eval_cfg,
                                  const std::string& method_label,
                                  const std::string& out_dir) {
  SplitDataset s = load_corpus_dir(corpus);
  std::vector<Recommendation> recs =
      read_recommendations_jsonl(predictions_path, s.train);
  GroupAssignment groups =
      assign_groups(item_popularity(s.train), eval_cfg.popular_fraction);
  MetricReport report = evaluate(recs, s, groups, eval_cfg);

  ensure_dir(out_dir);
  atomic_write_file(out_dir + "/report.json", report_to_json(report, method_label));
  atomic_write_file(out_dir + "/report.csv", report_to_csv(report, method_label));
  atomic_write_file(out_dir + "/per_user.csv", per_user_to_csv(report));
  return report;
}

std::vector<FrontierPoint> sweep(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SplitDataset s;
  MethodContext ctx = load_context(cfg, s);

  json params = cfg.params.is_null() ? json::object() : cfg.params;
  if (params.empty() && file_exists(cfg.output_dir + "/best_params.json")) {
    params = json::parse(read_file(cfg.output_dir + "/best_params.json"))["params"];
  }
  RepetitionModel model = fit_repetition(
      s.train, param_number(params, "alpha", 0.0), param_number(params, "beta", 1.0),
      params.value("features", true));

  ExplorationPolicy policy;
  policy.kind = parse_policy_kind(cfg.sweep_policy);
  policy.popularity = &ctx.popularity;
  policy.groups = &ctx.groups;
  policy.categories = &s.train.item_category;
  policy.rng_seed = cfg.seed;

  const std::vector<double> v_grid =
      default_v_grid(s.train, model, s.test_users, cfg.sweep_points);
  std::vector<FrontierPoint> frontier = sweep_threshold(
      model, policy, v_grid, s, ctx.groups, s.test_users, cfg.eval, cfg.threads);

  ensure_dir(cfg.output_dir);
  // Plot-ready files: one per beyond-accuracy metric plus the full table.
  for (const std::string& metric : beyond_accuracy_metrics()) {
    std::string csv = "v,recall," + metric + "\n";
    for (const FrontierPoint& p : frontier) {
      csv += json(p.v).dump() + "," + json(p.metrics.at("recall")).dump() + "," +
             json(p.metrics.at(metric)).dump() + "\n";
    }
    atomic_write_file(cfg.output_dir + "/frontier_" + metric + ".csv", csv);
  }
  std::string all = "v";
  std::vector<std::string> cols;
  if (!frontier.empty()) {
    for (const auto& [name, value] : frontier.front().metrics) cols.push_back(name);
  }
  for (const std::string& c : cols) all += "," + c;
  all += "\n";
  for (const FrontierPoint& p : frontier) {
    all += json(p.v).dump();
    for (const std::string& c : cols) all += "," + json(p.metrics.at(c)).dump();
    all += "\n";
  }
  atomic_write_file(cfg.output_dir + "/frontier_all.csv", all);
  write_manifest(cfg, "sweep", params, corpus_file_hash(corpus_dir(cfg)),
                 {{"total", seconds_since(t0)}});
  return frontier;
}

std::vector<AblationRow> ablate(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SplitDataset s;
  MethodContext ctx = load_context(cfg, s);
  std::vector<AblationRow> rows = ablation_rep(ctx, s, cfg.eval);

  ensure_dir(cfg.output_dir);
  std::string csv = "variant,alpha,beta,features,validation_recall,recall,ndcg,phr\n";
  for (const AblationRow& r : rows) {
    csv += r.variant + "," + json(param_number(r.params, "alpha", 0.0)).dump() + "," +
           json(param_number(r.params, "beta", 1.0)).dump() + "," +
           (r.params.value("features", true) ? "true" : "false") + "," +
           json(r.validation_value).dump() + "," + json(r.recall).dump() + "," +
           json(r.ndcg).dump() + "," + json(r.phr).dump() + "\n";
  }
  atomic_write_file(cfg.output_dir + "/ablation.csv", csv);
  write_manifest(cfg, "ablate", json(), corpus_file_hash(corpus_dir(cfg)),
                 {{"total", seconds_since(t0)}});
  return rows;
}

namespace {

std::map<std::string, double> read_per_user_metric(const std::string& path,
                                                   const std::string& metric) {
  std::map<std::string, double> values;
  for_each_csv_row(path, [&](std::size_t line_no,
                             const std::vector<std::string>& header,
                             const std::vector<std::string>& fields) {
    if (header.size() < 3 || header[0] != "user") {
      throw DataError(path + ": expected a per_user.csv header");
    }
    if (fields[1] != metric) return;
    try {
      values[fields[0]] = std::stod(fields[2]);
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(line_no) + ": bad value");
    }
  });
  return values;
}

}  // namespace

SignificanceResult compare(const std::string& csv_a, const std::string& csv_b,
                           const std::string& metric, const std::string& out_dir) {
  const auto a = read_per_user_metric(csv_a, metric);
  const auto b = read_per_user_metric(csv_b, metric);
  if (a.empty() || b.empty()) {
    throw DataError("metric '" + metric + "' not present in both files");
  }
  std::vector<double> va, vb;
  for (const auto& [user, value] : a) {
    auto it = b.find(user);
    if (it == b.end()) throw DataError("user sets differ: " + user + " missing");
    va.push_back(value);
    vb.push_back(it->second);
  }
  if (a.size() != b.size()) throw DataError("user sets differ in size");

  SignificanceResult r = paired_ttest(va, vb);
  r.metric = metric;
  r.method_a = csv_a;
  r.method_b = csv_b;

  ensure_dir(out_dir);
  std::string csv =
      "metric,method_a,method_b,mean_difference,t_statistic,p_value,n_users,degenerate\n";
  csv += metric + "," + csv_escape(csv_a) + "," + csv_escape(csv_b) + "," +
         json(r.mean_difference).dump() + "," + json(r.t_statistic).dump() + "," +
         json(r.p_value).dump() + "," + std::to_string(r.n_users) + "," +
         (r.degenerate ? "true" : "false") + "\n";
  atomic_write_file(out_dir + "/significance.csv", csv);
  return r;
}

}  // namespace nbr::pipeline
