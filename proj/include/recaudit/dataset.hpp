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

#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "recaudit/error.hpp"

namespace recaudit {

using UserId = std::int64_t;
using ItemId = std::int64_t;

// Sentinel for ratings without a timestamp. Timestamps are carried through
// parsing and serialization but never used by any computation.
inline constexpr std::int64_t kNoTimestamp = -1;

struct Rating {
  UserId user = 0;
  ItemId item = 0;
  double value = 0.0;
  std::int64_t timestamp = kNoTimestamp;

  friend bool operator==(const Rating&, const Rating&) = default;
};

// Inclusive rating bounds declared per dataset (never inferred).
struct RatingScale {
  double min = 1.0;
  double max = 5.0;

  bool contains(double v) const { return v >= min && v <= max; }
};

enum class TableFormat { kMovieLensDat, kCsv };

TableFormat parse_table_format(const std::string& name);
std::string to_string(TableFormat format);

// One rating of a profile/rater adjacency list: the dense index of the
// counterpart (item for user profiles, user for item rater lists) plus the
// rating value, in input order.
struct IndexedRating {
  std::uint32_t index;
  double value;
};

// Immutable user/item/rating triple store with dense first-seen indices and
// both adjacency directions. Safe for concurrent reads.
class RatingsTable {
 public:
  RatingsTable() = default;

  // Throws DataError on duplicate (user, item) pairs.
  static RatingsTable from_ratings(std::vector<Rating> ratings);

  std::size_t size() const { return ratings_.size(); }
  bool empty() const { return ratings_.empty(); }
  std::size_t n_users() const { return users_.size(); }
  std::size_t n_items() const { return items_.size(); }

  const std::vector<Rating>& ratings() const { return ratings_; }
  const std::vector<UserId>& users() const { return users_; }
  const std::vector<ItemId>& items() const { return items_; }

  std::optional<std::uint32_t> user_index(UserId user) const;
  std::optional<std::uint32_t> item_index(ItemId item) const;
  UserId user_id(std::uint32_t index) const { return users_[index]; }
  ItemId item_id(std::uint32_t index) const { return items_[index]; }

  // Items rated by a user / users who rated an item, in input order.
  const std::vector<IndexedRating>& user_profile(std::uint32_t user_index) const {
    return by_user_[user_index];
  }
  const std::vector<IndexedRating>& item_raters(std::uint32_t item_index) const {
    return by_item_[item_index];
  }

  double user_mean(std::uint32_t user_index) const { return user_means_[user_index]; }
  double item_mean(std::uint32_t item_index) const { return item_means_[item_index]; }
  double global_mean() const { return global_mean_; }

  bool has_timestamps() const { return has_timestamps_; }

  friend bool operator==(const RatingsTable& a, const RatingsTable& b) {
    return a.ratings_ == b.ratings_;
  }

 private:
  std::vector<Rating> ratings_;
  std::vector<UserId> users_;
  std::vector<ItemId> items_;
  std::unordered_map<UserId, std::uint32_t> user_index_;
  std::unordered_map<ItemId, std::uint32_t> item_index_;
  std::vector<std::vector<IndexedRating>> by_user_;
  std::vector<std::vector<IndexedRating>> by_item_;
  std::vector<double> user_means_;
  std::vector<double> item_means_;
  double global_mean_ = 0.0;
  bool has_timestamps_ = false;
};

// Item -> category set map over an ordered category universe C
// (first-seen order). Items with no declared category carry the sentinel.
class ItemCatalog {
 public:
  static constexpr const char* kUnknownCategory = "Unknown";

  struct Entry {
    ItemId item;
    std::vector<std::string> categories;  // empty means Unknown
  };

  ItemCatalog() = default;

  // Throws DataError on duplicate item ids.
  static ItemCatalog from_entries(const std::vector<Entry>& entries);

  // Copy of this catalog with `items` added under the Unknown category
  // (ids already present are left untouched).
  ItemCatalog with_unknown_items(std::span<const ItemId> items) const;

  std::size_t n_items() const { return item_ids_.size(); }
  std::size_t n_categories() const { return categories_.size(); }
  const std::vector<std::string>& categories() const { return categories_; }
  const std::vector<ItemId>& item_ids() const { return item_ids_; }

  bool contains(ItemId item) const { return item_index_.count(item) > 0; }

  // Category indices (into categories()) for an item; throws ArgumentError
  // if the item is not in the catalog.
  std::span<const std::uint16_t> item_categories(ItemId item) const;

 private:
  std::vector<ItemId> item_ids_;                        // first-seen order
  std::unordered_map<ItemId, std::uint32_t> item_index_;
  std::vector<std::vector<std::uint16_t>> item_cats_;   // aligned with item_ids_
  std::vector<std::string> categories_;                 // C, first-seen order
  std::unordered_map<std::string, std::uint16_t> category_index_;
};

// theta(i) = |training raters of i| / |training users|, in [0, 1].
// Items absent from the training table have theta 0.
class PopularityIndex {
 public:
  PopularityIndex() = default;

  double theta(ItemId item) const {
    auto it = theta_.find(item);
    return it == theta_.end() ? 0.0 : it->second;
  }

  const std::unordered_map<ItemId, double>& values() const { return theta_; }

 private:
  friend PopularityIndex popularity(const RatingsTable& train);
  std::unordered_map<ItemId, double> theta_;
};

struct Split {
  RatingsTable train;
  RatingsTable test;
  std::uint64_t seed = 0;
  double fraction = 0.0;
};

// --- Operations ---------------------------------------------------------

// Parses rating triples. movielens-dat lines are
// `UserID::MovieID::Rating::Timestamp`; csv expects a
// `user_id,item_id,rating[,timestamp]` header. Duplicate (user, item) pairs
// and out-of-scale values are data errors; malformed lines are parse errors
// carrying the line number.
RatingsTable parse_ratings(std::istream& in, TableFormat format,
                           const RatingScale& scale = RatingScale{});

// Parses an item catalog. movielens-dat lines are `MovieID::Title::Genres`
// with pipe-separated genres (Latin-1 titles tolerated); csv expects an
// `item_id,title,genres` header. Items with an empty genre field are
// assigned the Unknown sentinel category.
ItemCatalog parse_catalog(std::istream& in, TableFormat format);

// Global record-level split: a seeded uniform shuffle of rating positions,
// the first round(fraction * n) records (by original input order) forming
// the training table. Identical (table, fraction, seed) inputs produce
// identical splits.
Split split_ratings(const RatingsTable& table, double fraction, std::uint64_t seed);

// Item popularity over the training table. Throws ArgumentError when the
// table is empty.
PopularityIndex popularity(const RatingsTable& train);

// Canonical CSV serialization; parse_ratings(write_ratings_csv(t)) == t.
void write_ratings_csv(std::ostream& out, const RatingsTable& table);

// File-path conveniences. Throw IoError when the file cannot be opened.
RatingsTable load_ratings(const std::string& path, TableFormat format,
                          const RatingScale& scale = RatingScale{});
ItemCatalog load_catalog(const std::string& path, TableFormat format);
void save_ratings_csv(const std::string& path, const RatingsTable& table);

// FNV-1a 64-bit content hash, as `fnv1a64:<16 hex digits>`.
std::string hash_bytes(std::string_view bytes);
std::string hash_file(const std::string& path);

}  // namespace recaudit
