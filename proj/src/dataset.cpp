/*
 * Copyright 2026 The recaudit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "recaudit/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "recaudit/rng.hpp"

namespace recaudit {

namespace {

// Strips a trailing '\r' so CRLF input parses like LF input.
void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string> split_on(const std::string& line, const std::string& sep) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t next = line.find(sep, pos);
    if (next == std::string::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + sep.size();
  }
}

// Minimal RFC-4180 field splitter: quoted fields may contain commas and
// doubled quotes. Catalog titles need this; rating rows never do.
std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  fields.push_back(std::move(field));
  return fields;
}

std::int64_t parse_int(const std::string& s, const char* what, std::size_t line_no) {
  std::int64_t value = 0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || s.empty()) {
    throw ParseError(std::string("invalid ") + what + " '" + s + "'", line_no);
  }
  return value;
}

double parse_double(const std::string& s, const char* what, std::size_t line_no) {
  if (s.empty()) throw ParseError(std::string("empty ") + what, line_no);
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    throw ParseError(std::string("invalid ") + what + " '" + s + "'", line_no);
  }
  return value;
}

// Shortest decimal form that round-trips the stored value for rating data
// (integers print without a decimal point).
std::string format_rating(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  if (std::strtod(buf, nullptr) == v) {
    for (int prec = 1; prec < 17; ++prec) {
      char shorter[32];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
      if (std::strtod(shorter, nullptr) == v) return shorter;
    }
  }
  return buf;
}

}  // namespace

TableFormat parse_table_format(const std::string& name) {
  if (name == "movielens-dat") return TableFormat::kMovieLensDat;
  if (name == "csv") return TableFormat::kCsv;
  throw ConfigError("unknown format '" + name + "' (expected movielens-dat or csv)");
}

std::string to_string(TableFormat format) {
  return format == TableFormat::kMovieLensDat ? "movielens-dat" : "csv";
}

RatingsTable RatingsTable::from_ratings(std::vector<Rating> ratings) {
  RatingsTable table;
  table.ratings_ = std::move(ratings);
  table.user_index_.reserve(table.ratings_.size() / 4 + 1);
  table.item_index_.reserve(table.ratings_.size() / 4 + 1);

  for (const Rating& r : table.ratings_) {
    auto [uit, user_new] = table.user_index_.try_emplace(
        r.user, static_cast<std::uint32_t>(table.users_.size()));
    if (user_new) {
      table.users_.push_back(r.user);
      table.by_user_.emplace_back();
    }
    auto [iit, item_new] = table.item_index_.try_emplace(
        r.item, static_cast<std::uint32_t>(table.items_.size()));
    if (item_new) {
      table.items_.push_back(r.item);
      table.by_item_.emplace_back();
    }
    table.by_user_[uit->second].push_back({iit->second, r.value});
    table.by_item_[iit->second].push_back({uit->second, r.value});
    if (r.timestamp != kNoTimestamp) table.has_timestamps_ = true;
  }

  // Duplicate detection: a user profile longer than its distinct item set.
  for (std::uint32_t u = 0; u < table.by_user_.size(); ++u) {
    auto items = table.by_user_[u];
    std::sort(items.begin(), items.end(),
              [](const IndexedRating& a, const IndexedRating& b) { return a.index < b.index; });
    for (std::size_t i = 1; i < items.size(); ++i) {
      if (items[i].index == items[i - 1].index) {
        throw DataError("duplicate rating for user " + std::to_string(table.users_[u]) +
                        ", item " + std::to_string(table.items_[items[i].index]));
      }
    }
  }

  double total = 0.0;
  table.user_means_.resize(table.users_.size(), 0.0);
  table.item_means_.resize(table.items_.size(), 0.0);
  for (std::uint32_t u = 0; u < table.by_user_.size(); ++u) {
    double sum = 0.0;
    for (const auto& ir : table.by_user_[u]) sum += ir.value;
    table.user_means_[u] = sum / static_cast<double>(table.by_user_[u].size());
    total += sum;
  }
  for (std::uint32_t i = 0; i < table.by_item_.size(); ++i) {
    double sum = 0.0;
    for (const auto& ir : table.by_item_[i]) sum += ir.value;
    table.item_means_[i] = sum / static_cast<double>(table.by_item_[i].size());
  }
  table.global_mean_ = table.ratings_.empty() ? 0.0 : total / static_cast<double>(table.ratings_.size());
  return table;
}

std::optional<std::uint32_t> RatingsTable::user_index(UserId user) const {
  auto it = user_index_.find(user);
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> RatingsTable::item_index(ItemId item) const {
  auto it = item_index_.find(item);
  if (it == item_index_.end()) return std::nullopt;
  return it->second;
}

ItemCatalog ItemCatalog::from_entries(const std::vector<Entry>& entries) {
  ItemCatalog catalog;
  for (const Entry& entry : entries) {
    auto [it, inserted] = catalog.item_index_.try_emplace(
        entry.item, static_cast<std::uint32_t>(catalog.item_ids_.size()));
    if (!inserted) {
      throw DataError("duplicate catalog entry for item " + std::to_string(entry.item));
    }
    catalog.item_ids_.push_back(entry.item);
    std::vector<std::uint16_t> cats;
    const std::vector<std::string> labels =
        entry.categories.empty() ? std::vector<std::string>{kUnknownCategory} : entry.categories;
    for (const std::string& label : labels) {
      auto [cit, cat_new] = catalog.category_index_.try_emplace(
          label, static_cast<std::uint16_t>(catalog.categories_.size()));
      if (cat_new) catalog.categories_.push_back(label);
      cats.push_back(cit->second);
    }
    catalog.item_cats_.push_back(std::move(cats));
  }
  return catalog;
}

ItemCatalog ItemCatalog::with_unknown_items(std::span<const ItemId> items) const {
  ItemCatalog out = *this;
  for (const ItemId item : items) {
    auto [it, inserted] =
        out.item_index_.try_emplace(item, static_cast<std::uint32_t>(out.item_ids_.size()));
    if (!inserted) continue;
    out.item_ids_.push_back(item);
    auto [cit, cat_new] = out.category_index_.try_emplace(
        kUnknownCategory, static_cast<std::uint16_t>(out.categories_.size()));
    if (cat_new) out.categories_.push_back(kUnknownCategory);
    out.item_cats_.push_back({cit->second});
  }
  return out;
}

std::span<const std::uint16_t> ItemCatalog::item_categories(ItemId item) const {
  auto it = item_index_.find(item);
  if (it == item_index_.end()) {
    throw ArgumentError("item " + std::to_string(item) + " is not in the catalog");
  }
  return item_cats_[it->second];
}

RatingsTable parse_ratings(std::istream& in, TableFormat format, const RatingScale& scale) {
  std::vector<Rating> ratings;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  bool header_has_timestamp = false;

  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;

    Rating r;
    if (format == TableFormat::kMovieLensDat) {
      const auto fields = split_on(line, "::");
      if (fields.size() != 4) {
        throw ParseError("expected UserID::MovieID::Rating::Timestamp", line_no);
      }
      r.user = parse_int(fields[0], "user id", line_no);
      r.item = parse_int(fields[1], "item id", line_no);
      r.value = parse_double(fields[2], "rating", line_no);
      r.timestamp = parse_int(fields[3], "timestamp", line_no);
    } else {
      const auto fields = split_csv(line, line_no);
      if (!header_seen) {
        if (fields.size() < 3 || fields[0] != "user_id" || fields[1] != "item_id" ||
            fields[2] != "rating" || (fields.size() == 4 && fields[3] != "timestamp") ||
            fields.size() > 4) {
          throw ParseError("expected header user_id,item_id,rating[,timestamp]", line_no);
        }
        header_seen = true;
        header_has_timestamp = fields.size() == 4;
        continue;
      }
      if (fields.size() != (header_has_timestamp ? 4u : 3u)) {
        throw ParseError("wrong number of fields", line_no);
      }
      r.user = parse_int(fields[0], "user id", line_no);
      r.item = parse_int(fields[1], "item id", line_no);
      r.value = parse_double(fields[2], "rating", line_no);
      if (header_has_timestamp && !fields[3].empty()) {
        r.timestamp = parse_int(fields[3], "timestamp", line_no);
      }
    }
    if (!scale.contains(r.value)) {
      throw DataError("line " + std::to_string(line_no) + ": rating " + format_rating(r.value) +
                      " outside declared scale [" + format_rating(scale.min) + ", " +
                      format_rating(scale.max) + "]");
    }
    ratings.push_back(r);
  }
  return RatingsTable::from_ratings(std::move(ratings));
}

ItemCatalog parse_catalog(std::istream& in, TableFormat format) {
  std::vector<ItemCatalog::Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;

    ItemId item = 0;
    std::string genres;
    if (format == TableFormat::kMovieLensDat) {
      const auto fields = split_on(line, "::");
      if (fields.size() != 3) throw ParseError("expected MovieID::Title::Genres", line_no);
      item = parse_int(fields[0], "item id", line_no);
      genres = fields[2];
    } else {
      const auto fields = split_csv(line, line_no);
      if (!header_seen) {
        if (fields.size() != 3 || fields[0] != "item_id" || fields[1] != "title" ||
            fields[2] != "genres") {
          throw ParseError("expected header item_id,title,genres", line_no);
        }
        header_seen = true;
        continue;
      }
      if (fields.size() != 3) throw ParseError("wrong number of fields", line_no);
      item = parse_int(fields[0], "item id", line_no);
      genres = fields[2];
    }

    ItemCatalog::Entry entry;
    entry.item = item;
    for (const std::string& label : split_on(genres, "|")) {
      if (!label.empty()) entry.categories.push_back(label);
    }
    entries.push_back(std::move(entry));
  }
  return ItemCatalog::from_entries(entries);
}

Split split_ratings(const RatingsTable& table, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ArgumentError("split fraction must be in (0, 1), got " + format_rating(fraction));
  }
  const std::size_t n = table.size();
  const auto train_count =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<bool> in_train(n, false);
  for (std::size_t i = 0; i < train_count; ++i) in_train[order[i]] = true;

  std::vector<Rating> train_ratings;
  std::vector<Rating> test_ratings;
  train_ratings.reserve(train_count);
  test_ratings.reserve(n - train_count);
  for (std::size_t i = 0; i < n; ++i) {
    (in_train[i] ? train_ratings : test_ratings).push_back(table.ratings()[i]);
  }

  Split split;
  split.train = RatingsTable::from_ratings(std::move(train_ratings));
  split.test = RatingsTable::from_ratings(std::move(test_ratings));
  split.seed = seed;
  split.fraction = fraction;
  return split;
}

PopularityIndex popularity(const RatingsTable& train) {
  if (train.empty()) throw ArgumentError("popularity requires a non-empty training table");
  PopularityIndex index;
  const auto n_users = static_cast<double>(train.n_users());
  index.theta_.reserve(train.n_items());
  for (std::uint32_t i = 0; i < train.n_items(); ++i) {
    index.theta_.emplace(train.item_id(i),
                         static_cast<double>(train.item_raters(i).size()) / n_users);
  }
  return index;
}

void write_ratings_csv(std::ostream& out, const RatingsTable& table) {
  const bool timestamps = table.has_timestamps();
  out << (timestamps ? "user_id,item_id,rating,timestamp\n" : "user_id,item_id,rating\n");
  for (const Rating& r : table.ratings()) {
    out << r.user << ',' << r.item << ',' << format_rating(r.value);
    if (timestamps) {
      out << ',';
      if (r.timestamp != kNoTimestamp) out << r.timestamp;
    }
    out << '\n';
  }
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

}  // namespace

RatingsTable load_ratings(const std::string& path, TableFormat format, const RatingScale& scale) {
  auto in = open_input(path);
  return parse_ratings(in, format, scale);
}

ItemCatalog load_catalog(const std::string& path, TableFormat format) {
  auto in = open_input(path);
  return parse_catalog(in, format);
}

void save_ratings_csv(const std::string& path, const RatingsTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  write_ratings_csv(out, table);
  if (!out.flush()) throw IoError("failed writing " + path);
}

std::string hash_bytes(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[48];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string hash_file(const std::string& path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return hash_bytes(ss.str());
}

}  // namespace recaudit
