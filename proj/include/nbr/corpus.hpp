#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nbr/types.hpp"

namespace nbr {

enum class CorpusFormat { kCanonical, kInstacart, kDunnhumby };

CorpusFormat parse_corpus_format(const std::string& name);

struct IngestOptions {
  CorpusFormat format = CorpusFormat::kCanonical;
  std::string path;  // directory containing the source files
  // Column-name overrides for the CSV adapters, keyed by role
  // ("user", "basket", "order", "item", "category", ...).
  std::map<std::string, std::string> columns;
  // Instacart-style user sampling: keep `sample_users` users drawn uniformly
  // with `sample_seed`. 0 keeps everyone.
  std::size_t sample_users = 0;
  std::uint64_t sample_seed = 0;
};

// Loads a raw corpus. Baskets are ordered by the source order/timestamp
// column, ties broken by source row order.
Dataset ingest(const IngestOptions& opts);

struct PreprocessParams {
  std::size_t min_baskets = 3;
  std::size_t min_item_count = 5;  // basket occurrences, corpus-wide
  std::size_t basket_cap = 50;     // keep each user's most recent baskets
};

// Filter order: rare-item removal -> empty-basket drop -> short-user drop ->
// truncation to the most recent basket_cap baskets. Item and user
// vocabularies are compacted afterwards.
Dataset preprocess(const Dataset& d, const PreprocessParams& params = {});

// Holds out each user's last basket as the target and shuffles users into
// validation/test halves (validation gets the extra user when odd).
SplitDataset split(const Dataset& d, std::uint64_t seed);

// rep = union of the historical baskets, expl = catalog \ rep.
RepeatExploreSets repeat_explore_sets(const std::vector<Basket>& history,
                                      std::size_t catalog_size);

DatasetStats dataset_stats(const SplitDataset& s);

// Per-item count of training baskets containing the item.
std::vector<std::uint32_t> item_popularity(const Dataset& train);

struct SynthParams {
  std::size_t n_users = 100;
  std::size_t n_items = 50;
  std::size_t n_categories = 10;
  std::size_t baskets_per_user = 5;
  std::size_t basket_size = 4;
  double repeat_prob = 0.5;      // per-slot probability of a repeat draw
  double popularity_skew = 1.0;  // Zipf exponent of the catalog distribution
  std::uint64_t seed = 1;
};

// Synthetic desk-scale corpus. Repeat draws are frequency-proportional over
// the user's history; explore draws follow the Zipf catalog distribution.
Dataset synth_generate(const SynthParams& params);

// Canonical corpus directory: baskets.jsonl + categories.jsonl, and for
// prepared corpora additionally split.json (+ stats.json).
void write_canonical(const Dataset& d, const std::string& dir);
void write_split_assignment(const SplitDataset& s, const std::string& dir);
SplitDataset load_corpus_dir(const std::string& dir);

}  // namespace nbr
