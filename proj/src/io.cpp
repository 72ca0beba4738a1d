#include "nbr/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace nbr {

std::vector<std::string> parse_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\r') {
      // tolerate CRLF
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void for_each_csv_row(
    const std::string& path,
    const std::function<void(std::size_t, const std::vector<std::string>&,
                             const std::vector<std::string>&)>& row) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = parse_csv_row(line);
    if (line_no == 1) {
      header = std::move(fields);
      continue;
    }
    if (fields.size() != header.size()) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected " + std::to_string(header.size()) +
                      " fields, got " + std::to_string(fields.size()));
    }
    row(line_no, header, fields);
  }
  if (header.empty()) throw DataError(path + ": empty file");
}

void for_each_jsonl(const std::string& path,
                    const std::function<void(std::size_t, const std::string&)>& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(line_no, line);
  }
}

bool file_exists(const std::string& path) { return fs::exists(path); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write_file(const std::string& path, const std::string& content) {
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t corpus_hash(const Dataset& d) {
  std::string buf;
  buf.reserve(1 << 16);
  auto feed = [&](const std::string& s) {
    buf += s;
    buf.push_back('\x1f');
  };
  for (const auto& l : d.user_labels) feed(l);
  for (const auto& l : d.item_labels) feed(l);
  for (const auto& l : d.category_labels) feed(l);
  for (CategoryId c : d.item_category) feed(std::to_string(c));
  for (const auto& u : d.users) {
    buf.push_back('\x1e');
    for (const auto& b : u.baskets) {
      buf.push_back('\x1d');
      for (ItemId i : b) feed(std::to_string(i));
    }
  }
  return fnv1a64(buf);
}

void write_recommendations_jsonl(const std::string& path,
                                 const std::vector<Recommendation>& recs,
                                 const Dataset& vocab) {
  std::string out;
  out.reserve(recs.size() * 128);
  for (const auto& r : recs) {
    json j;
    j["user"] = vocab.user_labels.at(r.user);
    json items = json::array();
    json prov = json::array();
    for (std::size_t s = 0; s < r.items.size(); ++s) {
      items.push_back(vocab.item_labels.at(r.items[s]));
      prov.push_back(r.provenance[s] == Provenance::kRepeat ? "repeat" : "explore");
    }
    j["items"] = std::move(items);
    j["provenance"] = std::move(prov);
    j["v"] = r.v;
    out += j.dump();
    out.push_back('\n');
  }
  atomic_write_file(path, out);
}

std::vector<Recommendation> read_recommendations_jsonl(const std::string& path,
                                                       const Dataset& vocab) {
  std::map<std::string, UserId> users;
  for (UserId u = 0; u < vocab.n_users(); ++u) users[vocab.user_labels[u]] = u;
  std::map<std::string, ItemId> items;
  for (ItemId i = 0; i < vocab.n_items(); ++i) items[vocab.item_labels[i]] = i;

  std::vector<Recommendation> recs;
  for_each_jsonl(path, [&](std::size_t line_no, const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("user") || !j.contains("items")) {
      throw DataError(path + ":" + std::to_string(line_no) + ": malformed record");
    }
    Recommendation r;
    auto uit = users.find(j["user"].get<std::string>());
    if (uit == users.end()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": unknown user " +
                      j["user"].get<std::string>());
    }
    r.user = uit->second;
    for (const auto& s : j["items"]) {
      auto iit = items.find(s.get<std::string>());
      if (iit == items.end()) {
        throw DataError(path + ":" + std::to_string(line_no) + ": unknown item " +
                        s.get<std::string>());
      }
      r.items.push_back(iit->second);
    }
    if (j.contains("provenance")) {
      for (const auto& s : j["provenance"]) {
        r.provenance.push_back(s.get<std::string>() == "repeat"
                                   ? Provenance::kRepeat
                                   : Provenance::kExplore);
      }
      if (r.provenance.size() != r.items.size()) {
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": provenance length mismatch");
      }
    }
    if (j.contains("v")) r.v = j["v"].get<double>();
    recs.push_back(std::move(r));
  });
  return recs;
}

}  // namespace nbr
