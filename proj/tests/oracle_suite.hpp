// Seeded random-instance comparison between the production metrics and the
// direct-definition oracle. Shared by the unit tests and the acceptance
// suite.
#pragma once

#include <cmath>
#include <cstdint>

#include "nbr/metrics.hpp"
#include "nbr/rng.hpp"

#include "oracles.hpp"

namespace oracle_suite {

struct Result {
  std::size_t instances = 0;
  std::size_t comparisons = 0;
  double max_abs_err = 0.0;
};

inline oracle::Instance random_instance(nbr::Rng& rng) {
  oracle::Instance inst;
  inst.n_items = 2 + static_cast<int>(rng.below(11));  // 2..12
  inst.k = 1 + static_cast<int>(rng.below(5));         // 1..5
  inst.delta = 1e-6;
  inst.gamma = 0.8;
  inst.stop = 0.5;
  for (int i = 0; i < inst.n_items; ++i) {
    inst.category[i] = static_cast<int>(rng.below(4));
    if (rng.real01() < 0.3) inst.popular.insert(i);
  }
  const int n_users = 1 + static_cast<int>(rng.below(5));
  for (int u = 0; u < n_users; ++u) {
    oracle::User user;
    // ranked list: distinct items, usually k long, sometimes shorter
    std::vector<int> order(inst.n_items);
    for (int i = 0; i < inst.n_items; ++i) order[i] = i;
    rng.shuffle(order);
    int len = std::min(inst.k, inst.n_items);
    if (rng.real01() < 0.2) len = static_cast<int>(rng.below(len + 1));
    user.list.assign(order.begin(), order.begin() + len);
    // non-empty target
    while (user.target.empty()) {
      for (int i = 0; i < inst.n_items; ++i) {
        if (rng.real01() < 0.3) user.target.insert(i);
      }
    }
    for (int i = 0; i < inst.n_items; ++i) {
      if (rng.real01() < 0.4) user.rep.insert(i);
    }
    inst.users.push_back(std::move(user));
  }
  return inst;
}

inline Result run(std::size_t n_instances, std::uint64_t seed) {
  nbr::Rng rng(seed);
  Result res;
  auto track = [&res](double got, double want) {
    res.max_abs_err = std::max(res.max_abs_err, std::abs(got - want));
    ++res.comparisons;
  };

  for (std::size_t n = 0; n < n_instances; ++n) {
    oracle::Instance inst = random_instance(rng);
    ++res.instances;

    // marshal into the production types
    std::vector<nbr::Recommendation> recs;
    std::vector<nbr::Basket> targets(inst.users.size());
    std::vector<nbr::CategoryId> categories(inst.n_items);
    for (const auto& [item, cat] : inst.category) {
      categories[static_cast<std::size_t>(item)] = static_cast<nbr::CategoryId>(cat);
    }
    nbr::GroupAssignment groups;
    groups.is_popular.assign(inst.n_items, 0);
    for (int i : inst.popular) groups.is_popular[static_cast<std::size_t>(i)] = 1;
    groups.n_popular = inst.popular.size();

    for (std::size_t u = 0; u < inst.users.size(); ++u) {
      nbr::Recommendation r;
      r.user = static_cast<nbr::UserId>(u);
      for (int i : inst.users[u].list) r.items.push_back(static_cast<nbr::ItemId>(i));
      recs.push_back(std::move(r));
      for (int i : inst.users[u].target) {
        targets[u].push_back(static_cast<nbr::ItemId>(i));
      }
      std::sort(targets[u].begin(), targets[u].end());
    }

    for (std::size_t u = 0; u < inst.users.size(); ++u) {
      const oracle::User& ou = inst.users[u];
      const auto& list = recs[u].items;
      track(nbr::recall_at_k(list, targets[u], inst.k), oracle::recall(ou, inst.k));
      track(nbr::ndcg_at_k(list, targets[u], inst.k), oracle::ndcg(ou, inst.k));
      track(nbr::phr_hit(list, targets[u], inst.k) ? 1.0 : 0.0,
            oracle::phr(ou, inst.k));

      std::vector<nbr::ItemId> rep(ou.rep.begin(), ou.rep.end());
      nbr::FineGrainedAccuracy got = nbr::fine_grained(list, targets[u], rep, inst.k);
      oracle::FineGrained want = oracle::fine_grained(ou, inst.k);
      track(got.has_rep ? 1.0 : 0.0, want.has_rep ? 1.0 : 0.0);
      track(got.has_expl ? 1.0 : 0.0, want.has_expl ? 1.0 : 0.0);
      if (want.has_rep) {
        track(got.recall_rep, want.recall_rep);
        track(got.phr_rep, want.phr_rep);
      }
      if (want.has_expl) {
        track(got.recall_expl, want.recall_expl);
        track(got.phr_expl, want.phr_expl);
      }

      std::vector<nbr::ItemId> head = list;
      if (head.size() > static_cast<std::size_t>(inst.k)) head.resize(inst.k);
      nbr::DiversityValues dv = nbr::diversity(head, categories);
      oracle::Diversity od = oracle::diversity(inst, ou, inst.k);
      track(dv.ild, od.ild);
      track(dv.entropy, od.entropy);
      track(dv.ds, od.ds);
    }

    nbr::FairnessContext ctx;
    ctx.recs = recs;
    ctx.targets = &targets;
    ctx.groups = &groups;
    ctx.weights = {nbr::WeightingModel::kLogDiscount, inst.gamma, inst.stop};
    ctx.delta = inst.delta;
    ctx.k = static_cast<std::size_t>(inst.k);
    track(nbr::log_dp(ctx), oracle::log_dp(inst));
    track(nbr::log_eur(ctx), oracle::log_eur(inst));
    track(nbr::log_rur(ctx), oracle::log_rur(inst));

    ctx.weights = {nbr::WeightingModel::kCascade, inst.gamma, inst.stop};
    nbr::ExpectedExposureResult ee = nbr::expected_exposure(ctx);
    oracle::ExpectedExposure oe = oracle::expected_exposure(inst);
    track(ee.eel, oe.eel);
    track(ee.eed, oe.eed);

    // Aggregation rules: run the full report against a split whose training
    // histories reproduce the instance's repeat sets, and compare with the
    // oracle's user-exclusion means.
    nbr::SplitDataset split;
    split.train.item_category = categories;
    for (int i = 0; i < inst.n_items; ++i) {
      split.train.item_labels.push_back("i" + std::to_string(i));
    }
    for (int c = 0; c < 4; ++c) {
      split.train.category_labels.push_back("c" + std::to_string(c));
    }
    for (std::size_t u = 0; u < inst.users.size(); ++u) {
      nbr::UserRecord rec;
      if (!inst.users[u].rep.empty()) {
        nbr::Basket history(inst.users[u].rep.begin(), inst.users[u].rep.end());
        std::sort(history.begin(), history.end());
        rec.baskets.push_back(std::move(history));
      }
      split.train.users.push_back(std::move(rec));
      split.train.user_labels.push_back("u" + std::to_string(u));
    }
    split.targets = targets;

    nbr::EvalConfig cfg;
    cfg.k = static_cast<std::size_t>(inst.k);
    cfg.ee_weights = {nbr::WeightingModel::kCascade, inst.gamma, inst.stop};
    cfg.delta = inst.delta;
    nbr::MetricReport report = nbr::evaluate(recs, split, groups, cfg);

    double recall = 0, ndcg = 0, phr = 0;
    double rec_rep = 0, phr_rep = 0, rec_expl = 0, phr_expl = 0;
    double ild = 0, entropy = 0, ds = 0, rep_slots = 0, expl_slots = 0;
    std::size_t n_rep = 0, n_expl = 0, n_div = 0;
    for (const oracle::User& u : inst.users) {
      recall += oracle::recall(u, inst.k);
      ndcg += oracle::ndcg(u, inst.k);
      phr += oracle::phr(u, inst.k);
      oracle::FineGrained f = oracle::fine_grained(u, inst.k);
      if (f.has_rep) {
        ++n_rep;
        rec_rep += f.recall_rep;
        phr_rep += f.phr_rep;
      }
      if (f.has_expl) {
        ++n_expl;
        rec_expl += f.recall_expl;
        phr_expl += f.phr_expl;
      }
      const int len = std::min<int>(static_cast<int>(u.list.size()), inst.k);
      if (len > 0) {
        ++n_div;
        oracle::Diversity d = oracle::diversity(inst, u, inst.k);
        ild += d.ild;
        entropy += d.entropy;
        ds += d.ds;
      }
      for (int j = 0; j < len; ++j) {
        (u.rep.count(u.list[j]) ? rep_slots : expl_slots) += 1.0;
      }
    }
    const double n_users_d = static_cast<double>(inst.users.size());
    auto mean = [](double s, std::size_t n) {
      return n == 0 ? 0.0 : s / static_cast<double>(n);
    };
    track(report.aggregate.at("recall"), mean(recall, inst.users.size()));
    track(report.aggregate.at("ndcg"), mean(ndcg, inst.users.size()));
    track(report.aggregate.at("phr"), mean(phr, inst.users.size()));
    track(report.aggregate.at("recall_rep"), mean(rec_rep, n_rep));
    track(report.aggregate.at("phr_rep"), mean(phr_rep, n_rep));
    track(report.aggregate.at("recall_expl"), mean(rec_expl, n_expl));
    track(report.aggregate.at("phr_expl"), mean(phr_expl, n_expl));
    track(report.aggregate.at("ild"), mean(ild, n_div));
    track(report.aggregate.at("entropy"), mean(entropy, n_div));
    track(report.aggregate.at("ds"), mean(ds, n_div));
    track(report.aggregate.at("repeat_slots"), rep_slots / n_users_d);
    track(report.aggregate.at("explore_slots"), expl_slots / n_users_d);
    track(report.aggregate.at("log_dp"), oracle::log_dp(inst));
    track(report.aggregate.at("log_eur"), oracle::log_eur(inst));
    track(report.aggregate.at("log_rur"), oracle::log_rur(inst));
    track(report.aggregate.at("eel"), oe.eel);
    track(report.aggregate.at("eed"), oe.eed);
  }
  return res;
}

}  // namespace oracle_suite
