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
#include <string>
#include <vector>

#include "recaudit/rng.hpp"

// Deterministic generator behind the synthetic fixture committed under
// data/fixtures/. 50 users, 30 items, 6 genres, with a planted popularity
// skew: head items are mostly Action/SciFi and heavily rated by the
// "mainstream" half of the users, tail items are mostly Documentary/Drama
// and rated by the "niche" half. A drift-guard test asserts the committed
// files equal this generator's output byte for byte.
namespace fixture {

struct Item {
  std::int64_t id;
  const char* title;
  const char* genres;   // pipe-separated
  int niche_weight;     // sampling weight for niche users
  int mainstream_weight;
};

inline const std::vector<Item>& items() {
  static const std::vector<Item> kItems = {
      // head: blockbusters, Action/SciFi heavy
      {1, "Meteor Strike (1998)", "Action|SciFi", 2, 30},
      {2, "Starfall (1999)", "Action|SciFi", 2, 28},
      {3, "Iron Vortex (1997)", "Action", 1, 26},
      {4, "Laugh Lines (1996)", "Comedy", 2, 24},
      {5, "Crash Course (1999)", "Action|Comedy", 1, 22},
      // mid list
      {6, "Paper Hearts (1995)", "Romance|Comedy", 3, 10},
      {7, "The Last Toast (1997)", "Comedy", 3, 10},
      {8, "Glass Harbor (1996)", "Drama", 4, 8},
      {9, "Second Sunrise (1998)", "Drama|Romance", 4, 8},
      {10, "Static (1999)", "SciFi", 3, 7},
      {11, "Borrowed Time (1995)", "Drama", 4, 7},
      {12, "Kitchen Wars (1998)", "Comedy", 3, 6},
      {13, "North of Nowhere (1996)", "Drama", 4, 6},
      {14, "Signal Lost (1999)", "SciFi|Drama", 3, 5},
      {15, "Velvet Evening (1997)", "Romance", 3, 5},
      // long tail: niche documentaries and dramas
      {16, "Long, Quiet Rivers (1994)", "Documentary", 9, 1},
      {17, "Chalk Dust (1993)", "Documentary", 9, 1},
      {18, "The Beekeeper's Year (1995)", "Documentary", 8, 1},
      {19, "Winter Orchard (1992)", "Drama", 8, 1},
      {20, "Tin Roof Ballad (1994)", "Drama|Documentary", 8, 1},
      {21, "Salt Flats (1996)", "Documentary", 7, 1},
      {22, "Milk and Rust (1991)", "Documentary|Drama", 7, 1},
      {23, "Harbor Lights Home (1993)", "Romance", 7, 1},
      {24, "The Cartographer (1995)", "Drama", 6, 1},
      {25, "Sixth Street Choir (1997)", "Documentary", 6, 1},
      {26, "Fallow Fields (1990)", "Drama", 6, 1},
      {27, "Night Shift Poets (1992)", "Documentary", 5, 1},
      {28, "Copper Kettle (1994)", "Documentary|Comedy", 5, 1},
      {29, "A Small Tide (1996)", "Drama|Romance", 5, 1},
      {30, "Quarry Stones (1991)", "Documentary", 5, 1},
  };
  return kItems;
}

inline constexpr int kUsers = 50;
inline constexpr std::uint64_t kSeed = 20250607;

struct GeneratedRating {
  std::int64_t user;
  std::int64_t item;
  int value;
  std::int64_t timestamp;
};

inline std::vector<GeneratedRating> ratings() {
  recaudit::Rng rng(kSeed);
  std::vector<GeneratedRating> out;
  std::int64_t timestamp = 978300000;

  for (int user = 1; user <= kUsers; ++user) {
    const bool niche = user % 2 == 1;
    // 6..9 ratings; small enough that mainstream users never exhaust the
    // head+mid items, keeping their top-10 recommendations in-genre
    const std::size_t target = 6 + rng.below(4);

    std::vector<bool> taken(items().size(), false);
    for (std::size_t drawn = 0; drawn < target; ++drawn) {
      std::uint64_t total = 0;
      for (std::size_t k = 0; k < items().size(); ++k) {
        if (taken[k]) continue;
        total += niche ? items()[k].niche_weight : items()[k].mainstream_weight;
      }
      std::uint64_t pick = rng.below(total);
      std::size_t chosen = 0;
      for (std::size_t k = 0; k < items().size(); ++k) {
        if (taken[k]) continue;
        const std::uint64_t w = niche ? items()[k].niche_weight : items()[k].mainstream_weight;
        if (pick < w) {
          chosen = k;
          break;
        }
        pick -= w;
      }
      taken[chosen] = true;
      out.push_back({user, items()[chosen].id, static_cast<int>(1 + rng.below(5)),
                     timestamp++});
    }
  }
  return out;
}

inline std::string ratings_csv() {
  std::string text = "user_id,item_id,rating,timestamp\n";
  for (const GeneratedRating& r : ratings()) {
    text += std::to_string(r.user) + ',' + std::to_string(r.item) + ',' +
            std::to_string(r.value) + ',' + std::to_string(r.timestamp) + '\n';
  }
  return text;
}

inline std::string movies_csv() {
  std::string text = "item_id,title,genres\n";
  for (const Item& item : items()) {
    const std::string title(item.title);
    const bool needs_quotes = title.find(',') != std::string::npos;
    text += std::to_string(item.id) + ',';
    if (needs_quotes) {
      text += '"' + title + '"';
    } else {
      text += title;
    }
    text += ',' + std::string(item.genres) + '\n';
  }
  return text;
}

}  // namespace fixture
