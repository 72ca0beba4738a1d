#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"

#include "nbr/corpus.hpp"
#include "nbr/io.hpp"
#include "nbr/rng.hpp"

using namespace nbr;
namespace fs = std::filesystem;

namespace {

std::string fixture_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "nbr_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  out << content;
}

Dataset tiny_canonical() {
  const std::string dir = fixture_dir("canonical");
  write_file(dir + "/categories.jsonl",
             R"({"item":"a","category":"dairy"})" "\n"
             R"({"item":"b","category":"dairy"})" "\n"
             R"({"item":"c","category":"bakery"})" "\n"
             R"({"item":"d","category":"produce"})" "\n");
  write_file(dir + "/baskets.jsonl",
             R"({"user":"u1","baskets":[["a","b"],["b","c"],["a"]]})" "\n"
             R"({"user":"u2","baskets":[["c"],["d","a"],["b","d"]]})" "\n");
  IngestOptions opts;
  opts.format = CorpusFormat::kCanonical;
  opts.path = dir;
  return ingest(opts);
}

}  // namespace

TEST_CASE("canonical ingestion") {
  Dataset d = tiny_canonical();
  CHECK(d.n_users() == 2);
  CHECK(d.n_items() == 4);
  CHECK(d.n_categories() == 3);
  CHECK(d.users[0].baskets.size() == 3);
  // basket items are sorted, deduplicated sets
  CHECK(d.users[0].baskets[0] == Basket{0, 1});

  SUBCASE("empty basket is a named error") {
    const std::string dir = fixture_dir("canonical_bad");
    write_file(dir + "/categories.jsonl", R"({"item":"a","category":"x"})" "\n");
    write_file(dir + "/baskets.jsonl",
               R"({"user":"u1","baskets":[["a"],[]]})" "\n");
    IngestOptions opts;
    opts.format = CorpusFormat::kCanonical;
    opts.path = dir;
    CHECK_THROWS_WITH_AS(ingest(opts),
                         doctest::Contains("empty basket at line 1"), DataError);
  }
  SUBCASE("item missing from the category sidecar is an error") {
    const std::string dir = fixture_dir("canonical_nocat");
    write_file(dir + "/categories.jsonl", R"({"item":"a","category":"x"})" "\n");
    write_file(dir + "/baskets.jsonl",
               R"({"user":"u1","baskets":[["a","zz"]]})" "\n");
    IngestOptions opts;
    opts.format = CorpusFormat::kCanonical;
    opts.path = dir;
    CHECK_THROWS_WITH_AS(ingest(opts), doctest::Contains("item without category"),
                         DataError);
  }
  SUBCASE("missing file is an error naming the file") {
    IngestOptions opts;
    opts.format = CorpusFormat::kCanonical;
    opts.path = fixture_dir("canonical_missing");
    CHECK_THROWS_WITH_AS(ingest(opts), doctest::Contains("baskets.jsonl"), DataError);
  }
}

TEST_CASE("instacart adapter") {
  const std::string dir = fixture_dir("instacart");
  write_file(dir + "/products.csv",
             "product_id,product_name,aisle_id,department_id\n"
             "1,\"Milk, Whole\",10,1\n"
             "2,Bread,20,2\n"
             "3,Eggs,10,1\n");
  write_file(dir + "/orders.csv",
             "order_id,user_id,eval_set,order_number\n"
             "100,7,prior,2\n"
             "101,7,prior,1\n"
             "102,8,prior,1\n"
             "103,8,train,2\n");
  write_file(dir + "/order_products__prior.csv",
             "order_id,product_id,add_to_cart_order,reordered\n"
             "100,1,1,0\n"
             "100,2,2,0\n"
             "101,3,1,0\n"
             "102,2,1,0\n");
  write_file(dir + "/order_products__train.csv",
             "order_id,product_id,add_to_cart_order,reordered\n"
             "103,1,1,0\n");
  IngestOptions opts;
  opts.format = CorpusFormat::kInstacart;
  opts.path = dir;
  Dataset d = ingest(opts);

  CHECK(d.n_users() == 2);
  CHECK(d.n_items() == 3);
  // baskets follow order_number, not file order
  const UserId u7 = d.user_labels[0] == "7" ? 0 : 1;
  CHECK(d.users[u7].baskets.size() == 2);
  CHECK(d.users[u7].baskets[0] == Basket{2});     // order 101 came first
  CHECK(d.users[u7].baskets[1] == Basket{0, 1});  // order 100
  // categories come from the aisle column
  CHECK(d.category_labels[d.item_category[0]] == "10");
  CHECK(d.category_labels[d.item_category[1]] == "20");

  SUBCASE("unknown product is an item-without-category error") {
    write_file(dir + "/order_products__train.csv",
               "order_id,product_id,add_to_cart_order,reordered\n"
               "103,99,1,0\n");
    CHECK_THROWS_WITH_AS(ingest(opts), doctest::Contains("item without category"),
                         DataError);
  }
  SUBCASE("malformed row names file and line") {
    write_file(dir + "/orders.csv",
               "order_id,user_id,eval_set,order_number\n"
               "100,7,prior\n");
    CHECK_THROWS_WITH_AS(ingest(opts), doctest::Contains("orders.csv:2"), DataError);
  }
  SUBCASE("seeded user sampling keeps the requested count") {
    opts.sample_users = 1;
    opts.sample_seed = 3;
    Dataset sampled = ingest(opts);
    CHECK(sampled.n_users() == 1);
    Dataset again = ingest(opts);
    CHECK(again.user_labels == sampled.user_labels);
  }
}

TEST_CASE("dunnhumby adapter") {
  const std::string dir = fixture_dir("dunnhumby");
  write_file(dir + "/product.csv",
             "PRODUCT_ID,MANUFACTURER,DEPARTMENT,BRAND,COMMODITY_DESC,SUB_COMMODITY_DESC\n"
             "11,1,GROCERY,Private,FLUID MILK,WHITE MILK\n"
             "12,2,GROCERY,National,BREAD,LOAF\n");
  write_file(dir + "/transaction_data.csv",
             "household_key,BASKET_ID,DAY,PRODUCT_ID,QUANTITY\n"
             "1,200,5,11,1\n"
             "1,200,5,12,2\n"
             "1,150,2,12,1\n"
             "2,300,1,11,1\n"
             "1,400,9,11,1\n");
  IngestOptions opts;
  opts.format = CorpusFormat::kDunnhumby;
  opts.path = dir;
  Dataset d = ingest(opts);

  CHECK(d.n_users() == 2);
  const UserId h1 = d.user_labels[0] == "1" ? 0 : 1;
  REQUIRE(d.users[h1].baskets.size() == 3);
  // ordered by DAY: basket 150 (day 2), basket 200 (day 5), basket 400 (day 9)
  CHECK(d.users[h1].baskets[0] == Basket{1});
  CHECK(d.users[h1].baskets[1] == Basket{0, 1});
  CHECK(d.users[h1].baskets[2] == Basket{0});
  CHECK(d.category_labels[d.item_category[0]] == "FLUID MILK");
}

TEST_CASE("preprocess applies the filter chain in order") {
  SUBCASE("user below the basket minimum is dropped") {
    Dataset d = tiny_canonical();  // both users have 3 baskets
    PreprocessParams p;
    p.min_baskets = 3;
    p.min_item_count = 1;
    Dataset out = preprocess(d, p);
    CHECK(out.n_users() == 2);
    p.min_baskets = 4;
    CHECK_THROWS_AS(preprocess(d, p), DataError);  // nobody left
  }
  SUBCASE("items under the count threshold disappear") {
    Dataset d = tiny_canonical();
    PreprocessParams p;
    p.min_baskets = 1;
    p.min_item_count = 3;  // only items a (3 baskets) and b (3 baskets) survive
    Dataset out = preprocess(d, p);
    CHECK(out.n_items() == 2);
    std::set<std::string> labels(out.item_labels.begin(), out.item_labels.end());
    CHECK(labels == std::set<std::string>{"a", "b"});
    // basket {c} became empty and was dropped
    for (const auto& u : out.users) {
      for (const auto& b : u.baskets) CHECK_FALSE(b.empty());
    }
  }
  SUBCASE("truncation keeps the most recent baskets") {
    Dataset d = tiny_canonical();
    PreprocessParams p;
    p.min_baskets = 2;
    p.min_item_count = 1;
    p.basket_cap = 2;
    Dataset out = preprocess(d, p);
    for (const auto& u : out.users) CHECK(u.baskets.size() == 2);
    // u1's kept baskets are the last two
    CHECK(out.users[0].baskets[1] == Basket{0});  // remapped "a"
  }
  SUBCASE("idempotent on corpora where no user drops out") {
    SynthParams sp;
    sp.n_users = 60;
    sp.n_items = 40;
    sp.baskets_per_user = 6;
    sp.basket_size = 5;
    sp.seed = 11;
    Dataset d = synth_generate(sp);
    Dataset once = preprocess(d);
    Dataset twice = preprocess(once);
    CHECK(once == twice);
  }
}

TEST_CASE("split holds out the last basket and halves the users") {
  SynthParams sp;
  sp.n_users = 5;
  sp.n_items = 30;
  sp.baskets_per_user = 4;
  sp.basket_size = 3;
  Dataset d = synth_generate(sp);

  SplitDataset s = split(d, 99);
  SUBCASE("odd counts favour validation") {
    CHECK(s.validation_users.size() == 3);
    CHECK(s.test_users.size() == 2);
  }
  SUBCASE("even counts split exactly in half") {
    sp.n_users = 4;
    SplitDataset s4 = split(synth_generate(sp), 99);
    CHECK(s4.validation_users.size() == 2);
    CHECK(s4.test_users.size() == 2);
  }
  SUBCASE("deterministic for a fixed seed") {
    SplitDataset again = split(d, 99);
    CHECK(again.validation_users == s.validation_users);
    CHECK(again.test_users == s.test_users);
  }
  SUBCASE("partition covers every user exactly once") {
    std::set<UserId> all(s.validation_users.begin(), s.validation_users.end());
    for (UserId u : s.test_users) {
      CHECK(all.insert(u).second);  // no overlap
    }
    CHECK(all.size() == d.n_users());
  }
  SUBCASE("targets are the chronological last baskets, absent from train") {
    for (UserId u = 0; u < d.n_users(); ++u) {
      CHECK(s.targets[u] == d.users[u].baskets.back());
      CHECK(s.train.users[u].baskets.size() == d.users[u].baskets.size() - 1);
    }
  }
  SUBCASE("single-basket user violates the precondition") {
    Dataset bad = d;
    bad.users[0].baskets.resize(1);
    CHECK_THROWS_AS(split(bad, 1), DataError);
  }
}

TEST_CASE("repeat/explore sets") {
  SUBCASE("empty history means everything is explore") {
    RepeatExploreSets r = repeat_explore_sets({}, 4);
    CHECK(r.rep.empty());
    CHECK(r.expl == std::vector<ItemId>{0, 1, 2, 3});
  }
  SUBCASE("union of history, complement as explore") {
    std::vector<Basket> history{{0, 1}, {1, 2}};
    RepeatExploreSets r = repeat_explore_sets(history, 4);
    CHECK(r.rep == std::vector<ItemId>{0, 1, 2});
    CHECK(r.expl == std::vector<ItemId>{3});
  }
  SUBCASE("appending a basket never shrinks the repeat set") {
    SynthParams sp;
    sp.n_users = 10;
    sp.n_items = 25;
    sp.baskets_per_user = 6;
    sp.basket_size = 4;
    Dataset d = synth_generate(sp);
    for (const auto& u : d.users) {
      std::vector<Basket> prefix;
      std::vector<ItemId> prev;
      for (const Basket& b : u.baskets) {
        prefix.push_back(b);
        RepeatExploreSets r = repeat_explore_sets(prefix, sp.n_items);
        CHECK(std::includes(r.rep.begin(), r.rep.end(), prev.begin(), prev.end()));
        // rep and expl partition the catalog
        CHECK(r.rep.size() + r.expl.size() == sp.n_items);
        prev = r.rep;
      }
    }
  }
}

TEST_CASE("dataset statistics") {
  SynthParams sp;
  sp.n_users = 40;
  sp.n_items = 60;
  sp.baskets_per_user = 5;
  sp.basket_size = 4;
  sp.repeat_prob = 1.0;
  Dataset d = synth_generate(sp);
  SplitDataset s = split(d, 5);
  DatasetStats st = dataset_stats(s);

  SUBCASE("repeat-everything corpora have repeat ratio 1") {
    CHECK(st.repeat_ratio == doctest::Approx(1.0));
    CHECK(st.explore_ratio == doctest::Approx(0.0));
  }
  SUBCASE("basket size identity") {
    std::size_t occurrences = 0, baskets = 0;
    for (UserId u = 0; u < d.n_users(); ++u) {
      baskets += d.users[u].baskets.size();
      for (const Basket& b : d.users[u].baskets) occurrences += b.size();
    }
    CHECK(st.avg_basket_size ==
          doctest::Approx(static_cast<double>(occurrences) / baskets).epsilon(1e-9));
    CHECK(st.avg_baskets_per_user == doctest::Approx(5.0));
    CHECK(st.n_users == 40);
  }
}

TEST_CASE("synthetic generator") {
  SUBCASE("repeat_prob 0 never re-draws an item") {
    SynthParams sp;
    sp.n_users = 20;
    sp.n_items = 100;
    sp.baskets_per_user = 4;
    sp.basket_size = 4;
    sp.repeat_prob = 0.0;
    Dataset d = synth_generate(sp);
    for (const auto& u : d.users) {
      std::set<ItemId> seen;
      for (const Basket& b : u.baskets) {
        for (ItemId i : b) CHECK(seen.insert(i).second);
      }
    }
  }
  SUBCASE("repeat_prob 1 keeps every later basket inside the first") {
    SynthParams sp;
    sp.n_users = 20;
    sp.n_items = 50;
    sp.baskets_per_user = 5;
    sp.basket_size = 4;
    sp.repeat_prob = 1.0;
    Dataset d = synth_generate(sp);
    for (const auto& u : d.users) {
      std::set<ItemId> seen(u.baskets[0].begin(), u.baskets[0].end());
      for (std::size_t t = 1; t < u.baskets.size(); ++t) {
        for (ItemId i : u.baskets[t]) CHECK(seen.count(i) == 1);
      }
    }
  }
  SUBCASE("measured repeat ratio tracks repeat_prob") {
    SynthParams sp;
    sp.n_users = 500;
    sp.n_items = 200;
    sp.baskets_per_user = 6;
    sp.basket_size = 5;
    sp.repeat_prob = 0.5;
    sp.popularity_skew = 1.2;
    sp.seed = 21;
    DatasetStats st = dataset_stats(split(synth_generate(sp), 1));
    CHECK(st.repeat_ratio == doctest::Approx(0.5).epsilon(0.1));
    CHECK(std::abs(st.repeat_ratio - 0.5) <= 0.05);
  }
  SUBCASE("deterministic per seed") {
    SynthParams sp;
    sp.seed = 77;
    Dataset a = synth_generate(sp);
    Dataset b = synth_generate(sp);
    CHECK(a == b);
    sp.seed = 78;
    CHECK_FALSE(synth_generate(sp) == a);
  }
  SUBCASE("parameter validation") {
    SynthParams sp;
    sp.basket_size = 100;
    sp.n_items = 10;
    CHECK_THROWS_AS(synth_generate(sp), DataError);
  }
}

TEST_CASE("canonical round trip through a corpus directory") {
  SynthParams sp;
  sp.n_users = 12;
  sp.n_items = 30;
  sp.baskets_per_user = 4;
  sp.basket_size = 3;
  Dataset d = synth_generate(sp);
  SplitDataset s = split(d, 123);

  const std::string dir = fixture_dir("roundtrip");
  write_canonical(d, dir);
  write_split_assignment(s, dir);

  SplitDataset loaded = load_corpus_dir(dir);
  CHECK(loaded.train == s.train);
  CHECK(loaded.targets == s.targets);
  CHECK(loaded.validation_users == s.validation_users);
  CHECK(loaded.test_users == s.test_users);
}
