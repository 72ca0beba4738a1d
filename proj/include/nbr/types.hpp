#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nbr {

using ItemId = std::uint32_t;
using UserId = std::uint32_t;
using CategoryId = std::uint32_t;

// A basket is a set of distinct items, stored sorted ascending.
using Basket = std::vector<ItemId>;

// Data-level failure (bad input file, empty corpus, ...). The CLI maps this
// to exit code 2, as opposed to usage errors (exit 1).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct UserRecord {
  std::vector<Basket> baskets;  // oldest first

  bool operator==(const UserRecord&) const = default;
};

// Item/user/category ids are dense indices into the label tables, assigned
// at ingestion time. The catalog is the half-open range [0, n_items()).
struct Dataset {
  std::vector<UserRecord> users;          // index == dense user id
  std::vector<std::string> user_labels;   // dense user id -> source id
  std::vector<std::string> item_labels;   // dense item id -> source id
  std::vector<CategoryId> item_category;  // per item, exactly one category
  std::vector<std::string> category_labels;

  std::size_t n_users() const { return users.size(); }
  std::size_t n_items() const { return item_labels.size(); }
  std::size_t n_categories() const { return category_labels.size(); }

  // Throws DataError if structural invariants are broken (id out of range,
  // duplicate item inside a basket, item without a category).
  void validate() const;

  bool operator==(const Dataset&) const = default;
};

struct SplitDataset {
  Dataset train;                          // per user: all baskets except the last
  std::vector<Basket> targets;            // per user: the held-out last basket
  std::vector<UserId> validation_users;   // sorted
  std::vector<UserId> test_users;         // sorted
  std::uint64_t seed = 0;
};

struct RepeatExploreSets {
  std::vector<ItemId> rep;   // sorted
  std::vector<ItemId> expl;  // sorted, complement of rep within the catalog
};

struct DatasetStats {
  std::size_t n_items = 0;
  std::size_t n_users = 0;
  double avg_basket_size = 0.0;
  double avg_baskets_per_user = 0.0;
  double repeat_ratio = 0.0;
  double explore_ratio = 0.0;
};

enum class Provenance : std::uint8_t { kRepeat, kExplore };

// A fixed-size ranked basket with per-slot provenance. Repeat slots always
// form a prefix (repetition-greedy order).
struct Recommendation {
  UserId user = 0;
  std::vector<ItemId> items;
  std::vector<Provenance> provenance;  // parallel to items
  double v = 0.0;                      // repetition confidence threshold used
};

// ---- small sorted-set helpers used across modules ----

inline bool contains_sorted(const std::vector<ItemId>& sorted, ItemId x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

inline std::size_t intersection_size(const std::vector<ItemId>& a,
                                     const std::vector<ItemId>& b) {
  std::size_t n = 0, i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++n, ++i, ++j;
    }
  }
  return n;
}

inline void sort_unique(std::vector<ItemId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace nbr
