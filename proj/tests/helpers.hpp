#pragma once

#include <string>
#include <vector>

#include "nbr/types.hpp"

namespace test_helpers {

// Builds a Dataset straight from basket lists; categories default to
// item % n_categories.
inline nbr::Dataset make_dataset(std::vector<std::vector<nbr::Basket>> users,
                                 std::size_t n_items, std::size_t n_categories = 1,
                                 std::vector<nbr::CategoryId> categories = {}) {
  nbr::Dataset d;
  for (std::size_t u = 0; u < users.size(); ++u) {
    d.users.push_back({std::move(users[u])});
    d.user_labels.push_back("u" + std::to_string(u));
  }
  for (std::size_t i = 0; i < n_items; ++i) {
    d.item_labels.push_back("i" + std::to_string(i));
    d.item_category.push_back(categories.empty()
                                  ? static_cast<nbr::CategoryId>(i % n_categories)
                                  : categories[i]);
  }
  for (std::size_t c = 0; c < n_categories; ++c) {
    d.category_labels.push_back("c" + std::to_string(c));
  }
  d.validate();
  return d;
}

}  // namespace test_helpers
