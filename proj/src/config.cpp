#include "nbr/config.hpp"

#include "nbr/io.hpp"

using nlohmann::json;

namespace nbr {

json RunConfig::to_json() const {
  json dataset = {
      {"format", dataset_format},
      {"path", dataset_path},
      {"corpus_dir", corpus_dir},
      {"min_baskets", preprocessing.min_baskets},
      {"min_item_count", preprocessing.min_item_count},
      {"basket_cap", preprocessing.basket_cap},
      {"sample_users", sample_users},
      {"seed", dataset_seed},
  };
  if (!columns.empty()) dataset["columns"] = columns;
  if (dataset_format == "synthetic") {
    dataset["synthetic"] = {
        {"users", synth.n_users},
        {"items", synth.n_items},
        {"categories", synth.n_categories},
        {"baskets_per_user", synth.baskets_per_user},
        {"basket_size", synth.basket_size},
        {"repeat_prob", synth.repeat_prob},
        {"popularity_skew", synth.popularity_skew},
        {"seed", synth.seed},
    };
  }
  json method_block = {{"name", method}, {"params", params}};
  if (!grid.is_null()) method_block["grid"] = grid;
  json evaluation = {
      {"k", eval.k},
      {"ratio_weighting",
       eval.ratio_weights.model == WeightingModel::kLogDiscount ? "log_discount"
                                                                : "cascade"},
      {"ee_weighting",
       eval.ee_weights.model == WeightingModel::kLogDiscount ? "log_discount"
                                                             : "cascade"},
      {"gamma", eval.ee_weights.gamma},
      {"stop", eval.ee_weights.stop},
      {"delta", eval.delta},
      {"popular_fraction", eval.popular_fraction},
      {"per_item_dp_normalization", eval.per_item_dp_normalization},
      {"selection_metric", selection_metric},
  };
  return json{{"dataset", dataset},
              {"method", method_block},
              {"evaluation", evaluation},
              {"sweep", {{"points", sweep_points}, {"policy", sweep_policy}}},
              {"output_dir", output_dir},
              {"seed", seed},
              {"threads", threads}};
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  const json dataset = j.value("dataset", json::object());
  c.dataset_format = dataset.value("format", c.dataset_format);
  c.dataset_path = dataset.value("path", c.dataset_path);
  c.corpus_dir = dataset.value("corpus_dir", c.corpus_dir);
  c.preprocessing.min_baskets = dataset.value("min_baskets", c.preprocessing.min_baskets);
  c.preprocessing.min_item_count =
      dataset.value("min_item_count", c.preprocessing.min_item_count);
  c.preprocessing.basket_cap = dataset.value("basket_cap", c.preprocessing.basket_cap);
  c.sample_users = dataset.value("sample_users", c.sample_users);
  c.dataset_seed = dataset.value("seed", c.dataset_seed);
  if (dataset.contains("columns")) {
    for (auto it = dataset["columns"].begin(); it != dataset["columns"].end(); ++it) {
      c.columns[it.key()] = it.value().get<std::string>();
    }
  }
  if (dataset.contains("synthetic")) {
    const json& s = dataset["synthetic"];
    c.synth.n_users = s.value("users", c.synth.n_users);
    c.synth.n_items = s.value("items", c.synth.n_items);
    c.synth.n_categories = s.value("categories", c.synth.n_categories);
    c.synth.baskets_per_user = s.value("baskets_per_user", c.synth.baskets_per_user);
    c.synth.basket_size = s.value("basket_size", c.synth.basket_size);
    c.synth.repeat_prob = s.value("repeat_prob", c.synth.repeat_prob);
    c.synth.popularity_skew = s.value("popularity_skew", c.synth.popularity_skew);
    c.synth.seed = s.value("seed", c.synth.seed);
  }

  const json method_block = j.value("method", json::object());
  c.method = method_block.value("name", c.method);
  c.params = method_block.value("params", json::object());
  if (method_block.contains("grid")) c.grid = method_block["grid"];

  const json evaluation = j.value("evaluation", json::object());
  c.eval.k = evaluation.value("k", c.eval.k);
  auto weighting = [](const std::string& name) {
    if (name == "log_discount") return WeightingModel::kLogDiscount;
    if (name == "cascade") return WeightingModel::kCascade;
    throw DataError("unknown weighting model: " + name);
  };
  if (evaluation.contains("ratio_weighting")) {
    c.eval.ratio_weights.model = weighting(evaluation["ratio_weighting"]);
  }
  if (evaluation.contains("ee_weighting")) {
    c.eval.ee_weights.model = weighting(evaluation["ee_weighting"]);
  }
  c.eval.ee_weights.gamma = evaluation.value("gamma", c.eval.ee_weights.gamma);
  c.eval.ee_weights.stop = evaluation.value("stop", c.eval.ee_weights.stop);
  c.eval.ratio_weights.gamma = c.eval.ee_weights.gamma;
  c.eval.ratio_weights.stop = c.eval.ee_weights.stop;
  c.eval.delta = evaluation.value("delta", c.eval.delta);
  c.eval.popular_fraction =
      evaluation.value("popular_fraction", c.eval.popular_fraction);
  c.eval.per_item_dp_normalization = evaluation.value(
      "per_item_dp_normalization", c.eval.per_item_dp_normalization);
  c.selection_metric = evaluation.value("selection_metric", c.selection_metric);

  const json sweep = j.value("sweep", json::object());
  c.sweep_points = sweep.value("points", c.sweep_points);
  c.sweep_policy = sweep.value("policy", c.sweep_policy);

  c.output_dir = j.value("output_dir", c.output_dir);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw DataError(path + ": malformed JSON");
  // A manifest wraps the original config under "config".
  if (j.contains("config") && j.contains("corpus_hash")) j = j["config"];
  return from_json(j);
}

}  // namespace nbr
