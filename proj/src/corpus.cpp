#include "nbr/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <unordered_map>

#include "json.hpp"

#include "nbr/io.hpp"
#include "nbr/rng.hpp"

using nlohmann::json;

namespace nbr {

void Dataset::validate() const {
  if (users.size() != user_labels.size()) throw DataError("user table size mismatch");
  if (item_labels.size() != item_category.size())
    throw DataError("item/category table size mismatch");
  for (CategoryId c : item_category) {
    if (c >= category_labels.size()) throw DataError("category id out of range");
  }
  for (std::size_t u = 0; u < users.size(); ++u) {
    for (const Basket& b : users[u].baskets) {
      if (b.empty()) throw DataError("empty basket for user " + user_labels[u]);
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i] >= item_labels.size()) throw DataError("item id out of range");
        if (i > 0 && b[i] <= b[i - 1]) throw DataError("basket not a sorted set");
      }
    }
  }
}

CorpusFormat parse_corpus_format(const std::string& name) {
  if (name == "canonical") return CorpusFormat::kCanonical;
  if (name == "instacart") return CorpusFormat::kInstacart;
  if (name == "dunnhumby") return CorpusFormat::kDunnhumby;
  throw DataError("unknown corpus format: " + name);
}

namespace {

// Incremental dense-id assignment keyed by source label.
struct Interner {
  std::unordered_map<std::string, std::uint32_t> ids;
  std::vector<std::string> labels;

  std::uint32_t intern(const std::string& label) {
    auto [it, fresh] = ids.emplace(label, static_cast<std::uint32_t>(labels.size()));
    if (fresh) labels.push_back(label);
    return it->second;
  }
  const std::uint32_t* find(const std::string& label) const {
    auto it = ids.find(label);
    return it == ids.end() ? nullptr : &it->second;
  }
};

std::string column(const IngestOptions& opts, const std::string& role,
                   const std::string& fallback) {
  auto it = opts.columns.find(role);
  return it == opts.columns.end() ? fallback : it->second;
}

std::size_t field_index(const std::vector<std::string>& header,
                        const std::string& name, const std::string& path) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw DataError(path + ": missing column '" + name + "'");
}

long long parse_ll(const std::string& s, const std::string& path, std::size_t line) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(path + ":" + std::to_string(line) + ": not an integer: '" + s + "'");
  }
}

Dataset ingest_canonical(const IngestOptions& opts) {
  const std::string baskets_path = opts.path + "/baskets.jsonl";
  const std::string cats_path = opts.path + "/categories.jsonl";
  if (!file_exists(baskets_path)) throw DataError("missing file " + baskets_path);
  if (!file_exists(cats_path)) throw DataError("missing file " + cats_path);

  Dataset d;
  Interner items, cats, users;

  // The category sidecar defines the catalog; basket items must appear in it.
  for_each_jsonl(cats_path, [&](std::size_t line_no, const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("item") || !j.contains("category")) {
      throw DataError(cats_path + ":" + std::to_string(line_no) + ": malformed row");
    }
    ItemId i = items.intern(j["item"].get<std::string>());
    CategoryId c = cats.intern(j["category"].get<std::string>());
    if (i < d.item_category.size()) {
      throw DataError(cats_path + ":" + std::to_string(line_no) + ": duplicate item " +
                      j["item"].get<std::string>());
    }
    d.item_category.push_back(c);
  });

  for_each_jsonl(baskets_path, [&](std::size_t line_no, const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("user") || !j.contains("baskets") ||
        !j["baskets"].is_array()) {
      throw DataError(baskets_path + ":" + std::to_string(line_no) + ": malformed row");
    }
    UserId u = users.intern(j["user"].get<std::string>());
    if (u < d.users.size()) {
      throw DataError(baskets_path + ":" + std::to_string(line_no) +
                      ": duplicate user " + j["user"].get<std::string>());
    }
    UserRecord rec;
    for (const auto& jb : j["baskets"]) {
      Basket b;
      for (const auto& ji : jb) {
        const std::string label = ji.get<std::string>();
        const std::uint32_t* id = items.find(label);
        if (!id) {
          throw DataError(baskets_path + ":" + std::to_string(line_no) +
                          ": item without category: " + label);
        }
        b.push_back(*id);
      }
      sort_unique(b);
      if (b.empty()) {
        throw DataError(baskets_path + ": empty basket at line " +
                        std::to_string(line_no));
      }
      rec.baskets.push_back(std::move(b));
    }
    if (rec.baskets.empty()) {
      throw DataError(baskets_path + ":" + std::to_string(line_no) +
                      ": user with no baskets");
    }
    d.users.push_back(std::move(rec));
  });

  d.user_labels = std::move(users.labels);
  d.item_labels = std::move(items.labels);
  d.category_labels = std::move(cats.labels);
  return d;
}

Dataset ingest_instacart(const IngestOptions& opts) {
  const std::string orders_path = opts.path + "/orders.csv";
  const std::string products_path = opts.path + "/products.csv";
  const std::string col_order_id = column(opts, "order_id", "order_id");
  const std::string col_user = column(opts, "user", "user_id");
  const std::string col_order = column(opts, "order", "order_number");
  const std::string col_item = column(opts, "item", "product_id");
  const std::string col_category = column(opts, "category", "aisle_id");

  Interner users, items, cats;
  std::vector<CategoryId> item_category;

  // products.csv gives the taxonomy.
  {
    std::size_t i_item = 0, i_cat = 0;
    for_each_csv_row(products_path, [&](std::size_t line_no,
                                        const std::vector<std::string>& header,
                                        const std::vector<std::string>& fields) {
      if (line_no == 2) {
        i_item = field_index(header, col_item, products_path);
        i_cat = field_index(header, col_category, products_path);
      }
      ItemId i = items.intern(fields[i_item]);
      CategoryId c = cats.intern(fields[i_cat]);
      if (i >= item_category.size()) item_category.push_back(c);
    });
  }

  // orders.csv: order -> (user, sequence position).
  struct OrderInfo {
    UserId user;
    long long number;
  };
  std::unordered_map<std::string, OrderInfo> orders;
  {
    std::size_t i_oid = 0, i_user = 0, i_num = 0;
    for_each_csv_row(orders_path, [&](std::size_t line_no,
                                      const std::vector<std::string>& header,
                                      const std::vector<std::string>& fields) {
      if (line_no == 2) {
        i_oid = field_index(header, col_order_id, orders_path);
        i_user = field_index(header, col_user, orders_path);
        i_num = field_index(header, col_order, orders_path);
      }
      orders[fields[i_oid]] = {users.intern(fields[i_user]),
                               parse_ll(fields[i_num], orders_path, line_no)};
    });
  }

  // Baskets come from both prior and train product files.
  struct OrderItems {
    long long number = 0;
    std::size_t first_row = 0;
    std::vector<ItemId> item_list;
  };
  std::vector<std::map<std::string, OrderItems>> per_user(users.labels.size());
  std::size_t global_row = 0;
  for (const char* base : {"/order_products__prior.csv", "/order_products__train.csv"}) {
    const std::string path = opts.path + base;
    if (!file_exists(path)) throw DataError("missing file " + path);
    std::size_t i_oid = 0, i_item = 0;
    for_each_csv_row(path, [&](std::size_t line_no,
                               const std::vector<std::string>& header,
                               const std::vector<std::string>& fields) {
      if (line_no == 2) {
        i_oid = field_index(header, col_order_id, path);
        i_item = field_index(header, col_item, path);
      }
      auto oit = orders.find(fields[i_oid]);
      if (oit == orders.end()) {
        throw DataError(path + ":" + std::to_string(line_no) + ": unknown order " +
                        fields[i_oid]);
      }
      const std::uint32_t* item = items.find(fields[i_item]);
      if (!item) {
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": item without category: " + fields[i_item]);
      }
      auto& oi = per_user[oit->second.user][fields[i_oid]];
      if (oi.item_list.empty()) {
        oi.number = oit->second.number;
        oi.first_row = ++global_row;
      }
      oi.item_list.push_back(*item);
    });
  }

  Dataset d;
  d.item_labels = std::move(items.labels);
  d.item_category = std::move(item_category);
  d.category_labels = std::move(cats.labels);
  for (UserId u = 0; u < per_user.size(); ++u) {
    std::vector<const OrderItems*> seq;
    for (const auto& [oid, oi] : per_user[u]) seq.push_back(&oi);
    if (seq.empty()) continue;  // user had orders but no product rows (test-only)
    std::stable_sort(seq.begin(), seq.end(), [](const OrderItems* a, const OrderItems* b) {
      if (a->number != b->number) return a->number < b->number;
      return a->first_row < b->first_row;
    });
    UserRecord rec;
    for (const OrderItems* oi : seq) {
      Basket b = oi->item_list;
      sort_unique(b);
      rec.baskets.push_back(std::move(b));
    }
    d.users.push_back(std::move(rec));
    d.user_labels.push_back(users.labels[u]);
  }
  return d;
}

Dataset ingest_dunnhumby(const IngestOptions& opts) {
  const std::string tx_path = opts.path + "/transaction_data.csv";
  const std::string products_path = opts.path + "/product.csv";
  const std::string col_user = column(opts, "user", "household_key");
  const std::string col_basket = column(opts, "basket", "BASKET_ID");
  const std::string col_order = column(opts, "order", "DAY");
  const std::string col_item = column(opts, "item", "PRODUCT_ID");
  const std::string col_category = column(opts, "category", "COMMODITY_DESC");

  Interner users, items, cats;
  std::vector<CategoryId> item_category;
  std::unordered_map<std::string, ItemId> product_ids;

  {
    std::size_t i_item = 0, i_cat = 0;
    for_each_csv_row(products_path, [&](std::size_t line_no,
                                        const std::vector<std::string>& header,
                                        const std::vector<std::string>& fields) {
      if (line_no == 2) {
        i_item = field_index(header, col_item, products_path);
        i_cat = field_index(header, col_category, products_path);
      }
      ItemId i = items.intern(fields[i_item]);
      CategoryId c = cats.intern(fields[i_cat]);
      if (i >= item_category.size()) item_category.push_back(c);
    });
  }

  struct BasketRows {
    long long day = 0;
    std::size_t first_row = 0;
    std::vector<ItemId> item_list;
  };
  std::vector<std::map<std::string, BasketRows>> per_user;
  std::size_t global_row = 0;
  std::size_t i_user = 0, i_basket = 0, i_day = 0, i_item = 0;
  for_each_csv_row(tx_path, [&](std::size_t line_no,
                                const std::vector<std::string>& header,
                                const std::vector<std::string>& fields) {
    if (line_no == 2) {
      i_user = field_index(header, col_user, tx_path);
      i_basket = field_index(header, col_basket, tx_path);
      i_day = field_index(header, col_order, tx_path);
      i_item = field_index(header, col_item, tx_path);
    }
    const std::uint32_t* item = items.find(fields[i_item]);
    if (!item) {
      throw DataError(tx_path + ":" + std::to_string(line_no) +
                      ": item without category: " + fields[i_item]);
    }
    UserId u = users.intern(fields[i_user]);
    if (u >= per_user.size()) per_user.resize(u + 1);
    auto& br = per_user[u][fields[i_basket]];
    if (br.item_list.empty()) {
      br.day = parse_ll(fields[i_day], tx_path, line_no);
      br.first_row = ++global_row;
    }
    br.item_list.push_back(*item);
  });

  Dataset d;
  d.user_labels = std::move(users.labels);
  d.item_labels = std::move(items.labels);
  d.item_category = std::move(item_category);
  d.category_labels = std::move(cats.labels);
  d.users.resize(per_user.size());
  for (UserId u = 0; u < per_user.size(); ++u) {
    std::vector<const BasketRows*> seq;
    for (const auto& [bid, br] : per_user[u]) seq.push_back(&br);
    std::stable_sort(seq.begin(), seq.end(), [](const BasketRows* a, const BasketRows* b) {
      if (a->day != b->day) return a->day < b->day;
      return a->first_row < b->first_row;
    });
    for (const BasketRows* br : seq) {
      Basket b = br->item_list;
      sort_unique(b);
      d.users[u].baskets.push_back(std::move(b));
    }
  }
  return d;
}

Dataset sample_users(Dataset d, std::size_t n, std::uint64_t seed) {
  if (n == 0 || n >= d.n_users()) return d;
  std::vector<UserId> order(d.n_users());
  std::iota(order.begin(), order.end(), 0u);
  Rng rng(mix_seed(seed, 0x5a3));
  rng.shuffle(order);
  order.resize(n);
  std::sort(order.begin(), order.end());
  Dataset out;
  out.item_labels = std::move(d.item_labels);
  out.item_category = std::move(d.item_category);
  out.category_labels = std::move(d.category_labels);
  for (UserId u : order) {
    out.users.push_back(std::move(d.users[u]));
    out.user_labels.push_back(std::move(d.user_labels[u]));
  }
  return out;
}

}  // namespace

Dataset ingest(const IngestOptions& opts) {
  Dataset d;
  switch (opts.format) {
    case CorpusFormat::kCanonical: d = ingest_canonical(opts); break;
    case CorpusFormat::kInstacart: d = ingest_instacart(opts); break;
    case CorpusFormat::kDunnhumby: d = ingest_dunnhumby(opts); break;
  }
  d = sample_users(std::move(d), opts.sample_users, opts.sample_seed);
  d.validate();
  return d;
}

Dataset preprocess(const Dataset& d, const PreprocessParams& p) {
  // Corpus-wide basket occurrences, counted on the input as given.
  std::vector<std::uint32_t> count(d.n_items(), 0);
  for (const auto& u : d.users) {
    for (const auto& b : u.baskets) {
      for (ItemId i : b) ++count[i];
    }
  }

  std::vector<UserId> kept_users;
  std::vector<std::vector<Basket>> kept_baskets;
  for (UserId u = 0; u < d.n_users(); ++u) {
    std::vector<Basket> baskets;
    for (const Basket& b : d.users[u].baskets) {
      Basket f;
      for (ItemId i : b) {
        if (count[i] >= p.min_item_count) f.push_back(i);
      }
      if (!f.empty()) baskets.push_back(std::move(f));
    }
    if (baskets.size() < p.min_baskets) continue;
    if (baskets.size() > p.basket_cap) {
      baskets.erase(baskets.begin(),
                    baskets.begin() + static_cast<std::ptrdiff_t>(baskets.size() - p.basket_cap));
    }
    kept_users.push_back(u);
    kept_baskets.push_back(std::move(baskets));
  }
  if (kept_users.empty()) throw DataError("empty corpus after preprocessing");

  // Compact the item vocabulary to items that still occur.
  std::vector<ItemId> remap(d.n_items(), 0);
  std::vector<bool> occurs(d.n_items(), false);
  for (const auto& baskets : kept_baskets) {
    for (const auto& b : baskets) {
      for (ItemId i : b) occurs[i] = true;
    }
  }
  Dataset out;
  std::vector<CategoryId> cat_remap(d.category_labels.size(), 0);
  std::vector<bool> cat_used(d.category_labels.size(), false);
  for (ItemId i = 0; i < d.n_items(); ++i) {
    if (!occurs[i]) continue;
    remap[i] = static_cast<ItemId>(out.item_labels.size());
    out.item_labels.push_back(d.item_labels[i]);
    cat_used[d.item_category[i]] = true;
  }
  for (CategoryId c = 0; c < d.category_labels.size(); ++c) {
    if (!cat_used[c]) continue;
    cat_remap[c] = static_cast<CategoryId>(out.category_labels.size());
    out.category_labels.push_back(d.category_labels[c]);
  }
  for (ItemId i = 0; i < d.n_items(); ++i) {
    if (occurs[i]) out.item_category.push_back(cat_remap[d.item_category[i]]);
  }
  for (std::size_t n = 0; n < kept_users.size(); ++n) {
    out.user_labels.push_back(d.user_labels[kept_users[n]]);
    UserRecord rec;
    for (Basket& b : kept_baskets[n]) {
      for (ItemId& i : b) i = remap[i];
      std::sort(b.begin(), b.end());
      rec.baskets.push_back(std::move(b));
    }
    out.users.push_back(std::move(rec));
  }
  return out;
}

SplitDataset split(const Dataset& d, std::uint64_t seed) {
  for (UserId u = 0; u < d.n_users(); ++u) {
    if (d.users[u].baskets.size() < 2) {
      throw DataError("user " + d.user_labels[u] + " has fewer than 2 baskets");
    }
  }
  SplitDataset s;
  s.seed = seed;
  s.train = d;
  s.targets.resize(d.n_users());
  for (UserId u = 0; u < d.n_users(); ++u) {
    s.targets[u] = s.train.users[u].baskets.back();
    s.train.users[u].baskets.pop_back();
  }
  std::vector<UserId> order(d.n_users());
  std::iota(order.begin(), order.end(), 0u);
  Rng rng(seed);
  rng.shuffle(order);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    (pos % 2 == 0 ? s.validation_users : s.test_users).push_back(order[pos]);
  }
  std::sort(s.validation_users.begin(), s.validation_users.end());
  std::sort(s.test_users.begin(), s.test_users.end());
  return s;
}

RepeatExploreSets repeat_explore_sets(const std::vector<Basket>& history,
                                      std::size_t catalog_size) {
  RepeatExploreSets r;
  for (const Basket& b : history) r.rep.insert(r.rep.end(), b.begin(), b.end());
  sort_unique(r.rep);
  r.expl.reserve(catalog_size - r.rep.size());
  std::size_t j = 0;
  for (ItemId i = 0; i < catalog_size; ++i) {
    if (j < r.rep.size() && r.rep[j] == i) {
      ++j;
    } else {
      r.expl.push_back(i);
    }
  }
  return r;
}

DatasetStats dataset_stats(const SplitDataset& s) {
  DatasetStats st;
  st.n_users = s.train.n_users();
  st.n_items = s.train.n_items();
  std::size_t baskets = 0, occurrences = 0;
  for (UserId u = 0; u < s.train.n_users(); ++u) {
    baskets += s.train.users[u].baskets.size() + 1;
    for (const Basket& b : s.train.users[u].baskets) occurrences += b.size();
    occurrences += s.targets[u].size();
  }
  st.avg_basket_size = static_cast<double>(occurrences) / static_cast<double>(baskets);
  st.avg_baskets_per_user =
      static_cast<double>(baskets) / static_cast<double>(st.n_users);

  std::size_t target_items = 0, repeat_items = 0;
  for (UserId u = 0; u < s.train.n_users(); ++u) {
    std::vector<ItemId> rep;
    for (const Basket& b : s.train.users[u].baskets)
      rep.insert(rep.end(), b.begin(), b.end());
    sort_unique(rep);
    target_items += s.targets[u].size();
    repeat_items += intersection_size(s.targets[u], rep);
  }
  st.repeat_ratio = target_items == 0
                        ? 0.0
                        : static_cast<double>(repeat_items) /
                              static_cast<double>(target_items);
  st.explore_ratio = 1.0 - st.repeat_ratio;
  return st;
}

std::vector<std::uint32_t> item_popularity(const Dataset& train) {
  std::vector<std::uint32_t> pop(train.n_items(), 0);
  for (const auto& u : train.users) {
    for (const auto& b : u.baskets) {
      for (ItemId i : b) ++pop[i];
    }
  }
  return pop;
}

Dataset synth_generate(const SynthParams& p) {
  if (p.n_users == 0 || p.n_items == 0 || p.n_categories == 0 ||
      p.baskets_per_user == 0 || p.basket_size == 0) {
    throw DataError("synth parameters must be positive");
  }
  if (p.basket_size > p.n_items) throw DataError("basket_size exceeds n_items");
  if (p.repeat_prob < 0.0 || p.repeat_prob > 1.0)
    throw DataError("repeat_prob outside [0,1]");
  if (p.popularity_skew <= 0.0) throw DataError("popularity_skew must be > 0");

  Dataset d;
  char buf[32];
  for (std::size_t i = 0; i < p.n_items; ++i) {
    std::snprintf(buf, sizeof(buf), "i%05zu", i);
    d.item_labels.push_back(buf);
    d.item_category.push_back(static_cast<CategoryId>(i % p.n_categories));
  }
  for (std::size_t c = 0; c < p.n_categories; ++c) {
    std::snprintf(buf, sizeof(buf), "c%03zu", c);
    d.category_labels.push_back(buf);
  }
  std::vector<double> zipf(p.n_items);
  for (std::size_t i = 0; i < p.n_items; ++i) {
    zipf[i] = std::pow(static_cast<double>(i + 1), -p.popularity_skew);
  }

  std::vector<double> weights;
  std::vector<ItemId> pool;
  for (std::size_t u = 0; u < p.n_users; ++u) {
    std::snprintf(buf, sizeof(buf), "u%05zu", u);
    d.user_labels.push_back(buf);
    Rng rng(mix_seed(p.seed, 0x757365720000ULL + u));
    std::vector<std::uint32_t> counts(p.n_items, 0);
    std::vector<bool> seen(p.n_items, false);
    UserRecord rec;
    for (std::size_t t = 0; t < p.baskets_per_user; ++t) {
      std::vector<bool> in_basket(p.n_items, false);
      Basket basket;
      for (std::size_t slot = 0; slot < p.basket_size; ++slot) {
        bool want_repeat = rng.real01() < p.repeat_prob;
        auto gather = [&](bool repeat_pool) {
          pool.clear();
          weights.clear();
          for (ItemId i = 0; i < p.n_items; ++i) {
            if (in_basket[i] || seen[i] != repeat_pool) continue;
            pool.push_back(i);
            weights.push_back(repeat_pool ? static_cast<double>(counts[i]) : zipf[i]);
          }
        };
        gather(want_repeat);
        if (pool.empty()) gather(!want_repeat);  // exhausted source, fall back
        ItemId chosen = pool[rng.pick_weighted(weights)];
        in_basket[chosen] = true;
        basket.push_back(chosen);
      }
      std::sort(basket.begin(), basket.end());
      for (ItemId i : basket) {
        ++counts[i];
        seen[i] = true;
      }
      rec.baskets.push_back(std::move(basket));
    }
    d.users.push_back(std::move(rec));
  }
  return d;
}

void write_canonical(const Dataset& d, const std::string& dir) {
  ensure_dir(dir);
  std::string cats;
  for (ItemId i = 0; i < d.n_items(); ++i) {
    json j;
    j["item"] = d.item_labels[i];
    j["category"] = d.category_labels[d.item_category[i]];
    cats += j.dump();
    cats.push_back('\n');
  }
  atomic_write_file(dir + "/categories.jsonl", cats);

  std::string rows;
  for (UserId u = 0; u < d.n_users(); ++u) {
    json baskets = json::array();
    for (const Basket& b : d.users[u].baskets) {
      json jb = json::array();
      for (ItemId i : b) jb.push_back(d.item_labels[i]);
      baskets.push_back(std::move(jb));
    }
    json j;
    j["user"] = d.user_labels[u];
    j["baskets"] = std::move(baskets);
    rows += j.dump();
    rows.push_back('\n');
  }
  atomic_write_file(dir + "/baskets.jsonl", rows);
}

void write_split_assignment(const SplitDataset& s, const std::string& dir) {
  json j;
  j["seed"] = s.seed;
  json val = json::array(), test = json::array();
  for (UserId u : s.validation_users) val.push_back(s.train.user_labels[u]);
  for (UserId u : s.test_users) test.push_back(s.train.user_labels[u]);
  j["validation"] = std::move(val);
  j["test"] = std::move(test);
  atomic_write_file(dir + "/split.json", j.dump(2) + "\n");
}

SplitDataset load_corpus_dir(const std::string& dir) {
  IngestOptions opts;
  opts.format = CorpusFormat::kCanonical;
  opts.path = dir;
  Dataset full = ingest(opts);

  const std::string split_path = dir + "/split.json";
  if (!file_exists(split_path)) throw DataError("missing file " + split_path);
  json j = json::parse(read_file(split_path), nullptr, false);
  if (j.is_discarded()) throw DataError(split_path + ": malformed JSON");

  SplitDataset s = split(full, j.value("seed", std::uint64_t{0}));
  // The stored assignment overrides the seed-derived one.
  std::map<std::string, UserId> by_label;
  for (UserId u = 0; u < full.n_users(); ++u) by_label[full.user_labels[u]] = u;
  auto resolve = [&](const json& arr, std::vector<UserId>& out) {
    out.clear();
    for (const auto& l : arr) {
      auto it = by_label.find(l.get<std::string>());
      if (it == by_label.end()) {
        throw DataError(split_path + ": unknown user " + l.get<std::string>());
      }
      out.push_back(it->second);
    }
    std::sort(out.begin(), out.end());
  };
  resolve(j["validation"], s.validation_users);
  resolve(j["test"], s.test_users);
  if (s.validation_users.size() + s.test_users.size() != full.n_users()) {
    throw DataError(split_path + ": split does not cover all users");
  }
  std::vector<UserId> merged;
  std::merge(s.validation_users.begin(), s.validation_users.end(),
             s.test_users.begin(), s.test_users.end(), std::back_inserter(merged));
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (merged[i] != i) throw DataError(split_path + ": split is not a partition");
  }
  return s;
}

}  // namespace nbr
