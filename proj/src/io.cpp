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

#include "recaudit/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace recaudit {

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

void finish(std::ofstream& out, const std::string& path) {
  if (!out.flush()) throw IoError("failed writing " + path);
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t next = line.find(sep, pos);
    if (next == std::string::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
}

std::int64_t field_int(const std::string& s, const char* what, std::size_t row) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ValidationError(std::string("invalid ") + what + " '" + s + "'", row);
  }
  return value;
}

double field_double(const std::string& s, const char* what, std::size_t row) {
  if (s.empty()) throw ValidationError(std::string("empty ") + what, row);
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    throw ValidationError(std::string("invalid ") + what + " '" + s + "'", row);
  }
  return value;
}

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::string format_metric(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void write_recommendations_tsv(const std::string& path, const RecommendationSet& set) {
  auto out = open_output(path);
  for (std::size_t slot = 0; slot < set.users.size(); ++slot) {
    const auto& list = set.lists[slot];
    for (std::size_t rank = 0; rank < list.size(); ++rank) {
      out << set.users[slot] << '\t' << list[rank].item << '\t' << rank + 1 << '\t'
          << format_metric(list[rank].score) << '\n';
    }
  }
  finish(out, path);
}

std::vector<UserRecList> read_recommendations_tsv(const std::string& path, int max_list_size) {
  auto in = open_input(path);
  std::vector<UserRecList> lists;
  std::string line;
  std::size_t row = 0;
  bool have_user = false;
  UserId last_user = 0;
  std::int64_t last_rank = 0;
  std::unordered_set<ItemId> block_items;

  while (std::getline(in, line)) {
    ++row;
    chomp(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line, '\t');
    if (fields.size() != 4) {
      throw ValidationError("expected user_id<TAB>item_id<TAB>rank<TAB>score", row);
    }
    const UserId user = field_int(fields[0], "user id", row);
    const ItemId item = field_int(fields[1], "item id", row);
    const std::int64_t rank = field_int(fields[2], "rank", row);
    field_double(fields[3], "score", row);

    if (!have_user || user != last_user) {
      if (have_user && user < last_user) {
        throw ValidationError("user blocks must be sorted ascending", row);
      }
      if (rank != 1) throw ValidationError("first rank of a user block must be 1", row);
      lists.push_back({user, {}});
      have_user = true;
      last_user = user;
      last_rank = 1;
      block_items.clear();
    } else {
      if (rank != last_rank + 1) {
        throw ValidationError("ranks must be contiguous within a user block", row);
      }
      last_rank = rank;
    }
    if (last_rank > max_list_size) {
      throw ValidationError("list longer than the configured size " +
                                std::to_string(max_list_size),
                            row);
    }
    if (!block_items.insert(item).second) {
      throw ValidationError("item " + std::to_string(item) + " repeats in the user's list", row);
    }
    lists.back().items.push_back(item);
  }
  return lists;
}

void write_audit_csv(const std::string& path, std::span<const UserAudit> audits) {
  auto out = open_output(path);
  out << "user_id,profile_gap,rec_gap,mc,precision,n_profile,n_recs\n";
  for (const UserAudit& audit : audits) {
    out << audit.user << ',' << format_metric(audit.profile_gap) << ','
        << format_metric(audit.rec_gap) << ',' << format_metric(audit.mc) << ',';
    if (audit.precision) out << format_metric(*audit.precision);
    out << ',' << audit.n_profile << ',' << audit.n_recs << '\n';
  }
  finish(out, path);
}

std::vector<AuditRow> read_audit_csv(const std::string& path) {
  auto in = open_input(path);
  std::vector<AuditRow> rows;
  std::string line;
  std::size_t row_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row_no;
    chomp(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line, ',');
    if (!header_seen) {
      if (fields.size() != 7 || fields[0] != "user_id") {
        throw ValidationError("expected header user_id,profile_gap,rec_gap,mc,precision,"
                              "n_profile,n_recs",
                              row_no);
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 7) throw ValidationError("wrong number of fields", row_no);
    AuditRow row;
    row.user = field_int(fields[0], "user id", row_no);
    row.profile_gap = field_double(fields[1], "profile_gap", row_no);
    row.rec_gap = field_double(fields[2], "rec_gap", row_no);
    row.mc = field_double(fields[3], "mc", row_no);
    if (!fields[4].empty()) row.precision = field_double(fields[4], "precision", row_no);
    row.n_profile = static_cast<std::uint32_t>(field_int(fields[5], "n_profile", row_no));
    row.n_recs = static_cast<std::uint32_t>(field_int(fields[6], "n_recs", row_no));
    rows.push_back(row);
  }
  if (!header_seen) throw ValidationError("empty audit file: " + path);
  return rows;
}

void write_cohort_report_csv(const std::string& path, std::span<const CohortMetrics> rows) {
  auto out = open_output(path);
  out << "algorithm,cohort,n,gap_p,gap_q,pl,mc_mean,precision_mean\n";
  for (const CohortMetrics& row : rows) {
    out << row.algorithm << ',' << row.cohort << ',' << row.n << ',' << format_metric(row.gap_p)
        << ',' << format_metric(row.gap_q) << ',' << format_metric(row.pl) << ','
        << format_metric(row.mc_mean) << ',';
    if (row.precision_mean) out << format_metric(*row.precision_mean);
    out << '\n';
  }
  finish(out, path);
}

void write_significance_csv(const std::string& path, std::span<const SignificanceRow> rows) {
  auto out = open_output(path);
  out << "algorithm,metric,g_low,g_high,welch_p,mannwhitney_p,significant_at_0.05\n";
  for (const SignificanceRow& row : rows) {
    out << row.algorithm << ',' << row.metric << ',' << row.g_low << ',' << row.g_high << ','
        << format_metric(row.welch_p) << ',' << format_metric(row.mannwhitney_p) << ','
        << (row.significant ? 1 : 0) << '\n';
  }
  finish(out, path);
}

void write_genre_frequency_csv(const std::string& path,
                               std::span<const GenreFrequencyProfile> profiles,
                               const ItemCatalog& catalog) {
  auto out = open_output(path);
  out << "source,genre,proportion,count\n";
  for (const GenreFrequencyProfile& profile : profiles) {
    for (std::size_t c = 0; c < catalog.n_categories(); ++c) {
      out << profile.source << ',' << catalog.categories()[c] << ','
          << format_metric(profile.freq[c]) << ',' << profile.raw_count[c] << '\n';
    }
  }
  finish(out, path);
}

void write_amplification_csv(const std::string& path,
                             std::span<const AmplificationBlock> blocks) {
  auto out = open_output(path);
  out << "algorithm,genre,rating_freq,rec_freq,lift,defined\n";
  for (const AmplificationBlock& block : blocks) {
    for (const GenreLift& lift : block.lifts) {
      out << block.algorithm << ',' << lift.genre << ',' << format_metric(lift.rating_freq) << ','
          << format_metric(lift.rec_freq) << ',';
      if (lift.defined) out << format_metric(lift.lift);
      out << ',' << (lift.defined ? 1 : 0) << '\n';
    }
  }
  finish(out, path);
}

}  // namespace recaudit
