#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nbr/types.hpp"

namespace nbr {

// ---- CSV ----

// RFC-4180-ish row parser: quoted fields, doubled quotes, no embedded
// newlines (the supported sources do not use them).
std::vector<std::string> parse_csv_row(const std::string& line);

std::string csv_escape(const std::string& field);

// Streams a CSV file with a header row. Calls `row` with 1-based line
// numbers. Throws DataError naming file and line on malformed rows.
void for_each_csv_row(
    const std::string& path,
    const std::function<void(std::size_t line_no,
                             const std::vector<std::string>& header,
                             const std::vector<std::string>& fields)>& row);

// ---- JSON lines ----

void for_each_jsonl(const std::string& path,
                    const std::function<void(std::size_t line_no,
                                             const std::string& line)>& fn);

// ---- files ----

bool file_exists(const std::string& path);
std::string read_file(const std::string& path);
// Write-temp-then-rename so partially written outputs are never observed.
void atomic_write_file(const std::string& path, const std::string& content);
void ensure_dir(const std::string& dir);

// ---- hashing ----

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

// Content hash of a corpus (stable across runs and platforms).
std::uint64_t corpus_hash(const Dataset& d);

// ---- recommendations wire format ----
// One JSON object per line:
//   {"user": str, "items": [str...], "provenance": ["repeat"|"explore"...], "v": real}

void write_recommendations_jsonl(const std::string& path,
                                 const std::vector<Recommendation>& recs,
                                 const Dataset& vocab);
// Resolves labels against `vocab`; unknown users/items raise DataError.
std::vector<Recommendation> read_recommendations_jsonl(const std::string& path,
                                                       const Dataset& vocab);

}  // namespace nbr
