#include "nbr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "nbr/corpus.hpp"
#include "nbr/io.hpp"

using nlohmann::json;

namespace nbr {

GroupAssignment assign_groups(const std::vector<std::uint32_t>& train_popularity,
                              double popular_fraction) {
  const std::size_t n = train_popularity.size();
  GroupAssignment g;
  g.is_popular.assign(n, 0);
  g.n_popular = static_cast<std::size_t>(
      std::ceil(popular_fraction * static_cast<double>(n)));
  if (g.n_popular > n) g.n_popular = n;
  std::vector<ItemId> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](ItemId a, ItemId b) {
    if (train_popularity[a] != train_popularity[b])
      return train_popularity[a] > train_popularity[b];
    return a < b;
  });
  for (std::size_t r = 0; r < g.n_popular; ++r) g.is_popular[order[r]] = 1;
  return g;
}

std::vector<double> exposure_vector(std::size_t len, const std::vector<bool>& relevant,
                                    const ExposureParams& params) {
  std::vector<double> a(len, 0.0);
  if (params.model == WeightingModel::kLogDiscount) {
    for (std::size_t j = 0; j < len; ++j) {
      a[j] = 1.0 / std::log2(static_cast<double>(j) + 2.0);
    }
  } else {
    double carry = 1.0;  // gamma^{j-1} * prod_{l<j} (1 - s*rel_l)
    for (std::size_t j = 0; j < len; ++j) {
      a[j] = carry;
      carry *= params.gamma;
      if (j < relevant.size() && relevant[j]) carry *= 1.0 - params.stop;
    }
  }
  return a;
}

double recall_at_k(const std::vector<ItemId>& ranked, const Basket& target,
                   std::size_t k) {
  if (target.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t j = 0; j < ranked.size() && j < k; ++j) {
    if (contains_sorted(target, ranked[j])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(target.size());
}

double ndcg_at_k(const std::vector<ItemId>& ranked, const Basket& target,
                 std::size_t k) {
  if (target.empty()) return 0.0;
  double dcg = 0.0;
  for (std::size_t j = 0; j < ranked.size() && j < k; ++j) {
    if (contains_sorted(target, ranked[j])) {
      dcg += 1.0 / std::log2(static_cast<double>(j) + 2.0);
    }
  }
  double idcg = 0.0;
  const std::size_t ideal = std::min(target.size(), k);
  for (std::size_t j = 0; j < ideal; ++j) {
    idcg += 1.0 / std::log2(static_cast<double>(j) + 2.0);
  }
  return dcg / idcg;
}

bool phr_hit(const std::vector<ItemId>& ranked, const Basket& target, std::size_t k) {
  for (std::size_t j = 0; j < ranked.size() && j < k; ++j) {
    if (contains_sorted(target, ranked[j])) return true;
  }
  return false;
}

FineGrainedAccuracy fine_grained(const std::vector<ItemId>& ranked,
                                 const Basket& target,
                                 const std::vector<ItemId>& rep_set, std::size_t k) {
  Basket t_rep, t_expl;
  for (ItemId i : target) {
    (contains_sorted(rep_set, i) ? t_rep : t_expl).push_back(i);
  }
  std::size_t hit_rep = 0, hit_expl = 0;
  for (std::size_t j = 0; j < ranked.size() && j < k; ++j) {
    ItemId i = ranked[j];
    if (contains_sorted(rep_set, i)) {
      if (contains_sorted(t_rep, i)) ++hit_rep;
    } else if (contains_sorted(t_expl, i)) {
      ++hit_expl;
    }
  }
  FineGrainedAccuracy f;
  if (!t_rep.empty()) {
    f.has_rep = true;
    f.recall_rep = static_cast<double>(hit_rep) / static_cast<double>(t_rep.size());
    f.phr_rep = hit_rep > 0 ? 1.0 : 0.0;
  }
  if (!t_expl.empty()) {
    f.has_expl = true;
    f.recall_expl = static_cast<double>(hit_expl) / static_cast<double>(t_expl.size());
    f.phr_expl = hit_expl > 0 ? 1.0 : 0.0;
  }
  return f;
}

namespace {

struct GroupTotals {
  double exposure_pop = 0.0, exposure_unpop = 0.0;  // epsilon per group
  double utility_pop = 0.0, utility_unpop = 0.0;    // Y per group
  double hit_exposure_pop = 0.0, hit_exposure_unpop = 0.0;  // Gamma per group
};

GroupTotals pool_exposures(const FairnessContext& ctx) {
  GroupTotals t;
  for (const Recommendation& r : ctx.recs) {
    const Basket& target = (*ctx.targets)[r.user];
    const std::size_t len = std::min(r.items.size(), ctx.k);
    std::vector<bool> rel(len, false);
    for (std::size_t j = 0; j < len; ++j) rel[j] = contains_sorted(target, r.items[j]);
    std::vector<double> a = exposure_vector(len, rel, ctx.weights);
    for (std::size_t j = 0; j < len; ++j) {
      const bool pop = ctx.groups->is_popular[r.items[j]] != 0;
      (pop ? t.exposure_pop : t.exposure_unpop) += a[j];
      if (rel[j]) (pop ? t.hit_exposure_pop : t.hit_exposure_unpop) += a[j];
    }
    for (ItemId i : target) {
      (ctx.groups->is_popular[i] ? t.utility_pop : t.utility_unpop) += 1.0;
    }
  }
  if (ctx.per_item_normalization && ctx.groups->n_popular > 0 &&
      ctx.groups->n_unpopular() > 0) {
    t.exposure_pop /= static_cast<double>(ctx.groups->n_popular);
    t.exposure_unpop /= static_cast<double>(ctx.groups->n_unpopular());
    t.hit_exposure_pop /= static_cast<double>(ctx.groups->n_popular);
    t.hit_exposure_unpop /= static_cast<double>(ctx.groups->n_unpopular());
  }
  return t;
}

}  // namespace

double log_dp(const FairnessContext& ctx) {
  GroupTotals t = pool_exposures(ctx);
  return std::log((t.exposure_pop + ctx.delta) / (t.exposure_unpop + ctx.delta));
}

double log_eur(const FairnessContext& ctx) {
  GroupTotals t = pool_exposures(ctx);
  const double lhs = (t.exposure_pop + ctx.delta) / (t.utility_pop + ctx.delta);
  const double rhs = (t.exposure_unpop + ctx.delta) / (t.utility_unpop + ctx.delta);
  return std::log(lhs / rhs);
}

double log_rur(const FairnessContext& ctx) {
  GroupTotals t = pool_exposures(ctx);
  const double lhs = (t.hit_exposure_pop + ctx.delta) / (t.utility_pop + ctx.delta);
  const double rhs = (t.hit_exposure_unpop + ctx.delta) / (t.utility_unpop + ctx.delta);
  return std::log(lhs / rhs);
}

ExpectedExposureResult expected_exposure(const FairnessContext& ctx) {
  ExpectedExposureResult out;
  const double gamma = ctx.weights.gamma;
  const double stop = ctx.weights.stop;
  const std::size_t n_items = ctx.groups->n_items();

  for (const Recommendation& r : ctx.recs) {
    const Basket& target = (*ctx.targets)[r.user];
    const std::size_t len = std::min(r.items.size(), ctx.k);
    std::vector<bool> rel(len, false);
    for (std::size_t j = 0; j < len; ++j) rel[j] = contains_sorted(target, r.items[j]);
    std::vector<double> a = exposure_vector(len, rel, ctx.weights);
    double sys_pop = 0.0, sys_unpop = 0.0;
    for (std::size_t j = 0; j < len; ++j) {
      (ctx.groups->is_popular[r.items[j]] ? sys_pop : sys_unpop) += a[j];
    }

    // Target exposure: the ideal list ranks all of T_u first; equally graded
    // relevant items share the head exposure equally, and the ideal tail
    // exposure is spread over groups by their share of non-relevant items.
    const std::size_t m = std::min(target.size(), ctx.k);
    double head = 0.0;
    {
      double w = 1.0;  // (gamma * (1 - stop))^{j-1}
      for (std::size_t j = 0; j < m; ++j) {
        head += w;
        w *= gamma * (1.0 - stop);
      }
    }
    std::size_t target_pop = 0;
    for (ItemId i : target) {
      if (ctx.groups->is_popular[i]) ++target_pop;
    }
    double tgt_pop = 0.0, tgt_unpop = 0.0;
    if (!target.empty()) {
      const double share = head / static_cast<double>(target.size());
      tgt_pop = share * static_cast<double>(target_pop);
      tgt_unpop = share * static_cast<double>(target.size() - target_pop);
    }
    double tail = 0.0;
    {
      double w = std::pow(gamma, static_cast<double>(m)) *
                 std::pow(1.0 - stop, static_cast<double>(m));
      for (std::size_t j = m; j < ctx.k; ++j) {
        tail += w;
        w *= gamma;
      }
    }
    const std::size_t nonrel_total = n_items - std::min(target.size(), n_items);
    if (tail > 0.0 && nonrel_total > 0) {
      const std::size_t nonrel_pop = ctx.groups->n_popular - target_pop;
      tgt_pop += tail * static_cast<double>(nonrel_pop) /
                 static_cast<double>(nonrel_total);
      tgt_unpop += tail *
                   static_cast<double>(ctx.groups->n_unpopular() -
                                       (target.size() - target_pop)) /
                   static_cast<double>(nonrel_total);
    }

    const double dp = sys_pop - tgt_pop;
    const double du = sys_unpop - tgt_unpop;
    out.eel_per_user.push_back(dp * dp + du * du);
    out.eed_per_user.push_back(sys_pop * sys_pop + sys_unpop * sys_unpop);
  }
  const double n = static_cast<double>(out.eel_per_user.size());
  if (n > 0) {
    out.eel = std::accumulate(out.eel_per_user.begin(), out.eel_per_user.end(), 0.0) / n;
    out.eed = std::accumulate(out.eed_per_user.begin(), out.eed_per_user.end(), 0.0) / n;
  }
  return out;
}

DiversityValues diversity(const std::vector<ItemId>& list,
                          const std::vector<CategoryId>& item_category) {
  DiversityValues v;
  const std::size_t n = list.size();
  if (n == 0) return v;
  std::map<CategoryId, std::size_t> counts;
  for (ItemId i : list) ++counts[item_category[i]];

  // One-hot category embeddings: pair distance sqrt(2) iff categories differ.
  if (n >= 2) {
    std::size_t same = 0;
    for (const auto& [cat, c] : counts) same += c * (c - 1) / 2;
    const std::size_t pairs = n * (n - 1) / 2;
    v.ild = std::sqrt(2.0) * static_cast<double>(pairs - same) /
            static_cast<double>(pairs);
  }
  for (const auto& [cat, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    v.entropy -= p * std::log2(p);
  }
  v.ds = static_cast<double>(counts.size()) / static_cast<double>(n);
  return v;
}

MetricReport evaluate(const std::vector<Recommendation>& recs,
                      const SplitDataset& split, const GroupAssignment& groups,
                      const EvalConfig& config) {
  MetricReport report;
  report.config = config;

  double sum_recall = 0, sum_ndcg = 0, sum_phr = 0;
  double sum_ild = 0, sum_entropy = 0, sum_ds = 0;
  double sum_rep_slots = 0, sum_expl_slots = 0;
  double sum_recall_rep = 0, sum_phr_rep = 0;
  double sum_recall_expl = 0, sum_phr_expl = 0;
  std::size_t n_acc = 0, n_rep = 0, n_expl = 0, n_div = 0;

  for (const Recommendation& r : recs) {
    const Basket& target = split.targets[r.user];
    RepeatExploreSets sets =
        repeat_explore_sets(split.train.users[r.user].baskets, split.train.n_items());
    std::map<std::string, double> row;

    std::vector<ItemId> ranked = r.items;
    if (ranked.size() > config.k) ranked.resize(config.k);

    if (!target.empty()) {
      ++n_acc;
      row["recall"] = recall_at_k(ranked, target, config.k);
      row["ndcg"] = ndcg_at_k(ranked, target, config.k);
      row["phr"] = phr_hit(ranked, target, config.k) ? 1.0 : 0.0;
      sum_recall += row["recall"];
      sum_ndcg += row["ndcg"];
      sum_phr += row["phr"];

      FineGrainedAccuracy f = fine_grained(ranked, target, sets.rep, config.k);
      if (f.has_rep) {
        ++n_rep;
        row["recall_rep"] = f.recall_rep;
        row["phr_rep"] = f.phr_rep;
        sum_recall_rep += f.recall_rep;
        sum_phr_rep += f.phr_rep;
      }
      if (f.has_expl) {
        ++n_expl;
        row["recall_expl"] = f.recall_expl;
        row["phr_expl"] = f.phr_expl;
        sum_recall_expl += f.recall_expl;
        sum_phr_expl += f.phr_expl;
      }
    }

    if (!ranked.empty()) {
      ++n_div;
      DiversityValues d = diversity(ranked, split.train.item_category);
      row["ild"] = d.ild;
      row["entropy"] = d.entropy;
      row["ds"] = d.ds;
      sum_ild += d.ild;
      sum_entropy += d.entropy;
      sum_ds += d.ds;
    }

    std::size_t rep_slots = 0;
    for (std::size_t j = 0; j < ranked.size(); ++j) {
      if (contains_sorted(sets.rep, ranked[j])) ++rep_slots;
    }
    row["repeat_slots"] = static_cast<double>(rep_slots);
    row["explore_slots"] = static_cast<double>(ranked.size() - rep_slots);
    sum_rep_slots += row["repeat_slots"];
    sum_expl_slots += row["explore_slots"];

    report.per_user.emplace_back(split.train.user_labels[r.user], std::move(row));
  }

  FairnessContext ctx;
  ctx.recs = recs;
  ctx.targets = &split.targets;
  ctx.groups = &groups;
  ctx.weights = config.ratio_weights;
  ctx.delta = config.delta;
  ctx.per_item_normalization = config.per_item_dp_normalization;
  ctx.k = config.k;
  report.aggregate["log_dp"] = log_dp(ctx);
  report.aggregate["log_eur"] = log_eur(ctx);
  report.aggregate["log_rur"] = log_rur(ctx);

  ctx.weights = config.ee_weights;
  ExpectedExposureResult ee = expected_exposure(ctx);
  report.aggregate["eel"] = ee.eel;
  report.aggregate["eed"] = ee.eed;
  for (std::size_t idx = 0; idx < recs.size(); ++idx) {
    report.per_user[idx].second["eel"] = ee.eel_per_user[idx];
    report.per_user[idx].second["eed"] = ee.eed_per_user[idx];
  }

  auto mean = [](double s, std::size_t n) {
    return n == 0 ? 0.0 : s / static_cast<double>(n);
  };
  report.aggregate["recall"] = mean(sum_recall, n_acc);
  report.aggregate["ndcg"] = mean(sum_ndcg, n_acc);
  report.aggregate["phr"] = mean(sum_phr, n_acc);
  report.aggregate["recall_rep"] = mean(sum_recall_rep, n_rep);
  report.aggregate["phr_rep"] = mean(sum_phr_rep, n_rep);
  report.aggregate["recall_expl"] = mean(sum_recall_expl, n_expl);
  report.aggregate["phr_expl"] = mean(sum_phr_expl, n_expl);
  report.aggregate["ild"] = mean(sum_ild, n_div);
  report.aggregate["entropy"] = mean(sum_entropy, n_div);
  report.aggregate["ds"] = mean(sum_ds, n_div);
  report.aggregate["repeat_slots"] = mean(sum_rep_slots, recs.size());
  report.aggregate["explore_slots"] = mean(sum_expl_slots, recs.size());
  return report;
}

std::string report_to_json(const MetricReport& report, const std::string& method) {
  json j;
  j["method"] = method;
  j["k"] = report.config.k;
  j["delta"] = report.config.delta;
  j["weighting"] = {
      {"ratios", report.config.ratio_weights.model == WeightingModel::kLogDiscount
                     ? "log_discount"
                     : "cascade"},
      {"expected_exposure",
       report.config.ee_weights.model == WeightingModel::kLogDiscount ? "log_discount"
                                                                      : "cascade"},
      {"gamma", report.config.ee_weights.gamma},
      {"stop", report.config.ee_weights.stop},
  };
  j["aggregate"] = report.aggregate;
  json per_user = json::object();
  for (const auto& [user, row] : report.per_user) per_user[user] = row;
  j["per_user"] = std::move(per_user);
  return j.dump(2) + "\n";
}

std::string report_to_csv(const MetricReport& report, const std::string& method) {
  std::string out = "method,metric,k,value\n";
  for (const auto& [name, value] : report.aggregate) {
    out += csv_escape(method) + "," + name + "," + std::to_string(report.config.k) +
           "," + json(value).dump() + "\n";
  }
  return out;
}

std::string per_user_to_csv(const MetricReport& report) {
  std::string out = "user,metric,value\n";
  for (const auto& [user, row] : report.per_user) {
    for (const auto& [name, value] : row) {
      out += csv_escape(user) + "," + name + "," + json(value).dump() + "\n";
    }
  }
  return out;
}

}  // namespace nbr
