// Copyright 2026 The recflow Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RECFLOW_RATINGS_HPP
#define RECFLOW_RATINGS_HPP

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "recflow/common.hpp"

namespace recflow {

struct RatingTriple {
  std::int64_t user = 0;
  std::int64_t item = 0;
  double rating = 0.0;
  std::int64_t timestamp = -1;  // optional, ignored downstream
};

enum class RatingFormat { double_colon, comma, tab };

/// A parsed rating set with a dense reindexing of the observed ids.
/// `by_user` / `by_item` adjacency is in dense-id space, each list sorted
/// by the opposite endpoint. Immutable after construction.
class RatingDataset {
 public:
  std::vector<RatingTriple> triples;           // original ids
  std::vector<std::int64_t> user_ids;          // dense -> original
  std::vector<std::int64_t> item_ids;
  std::unordered_map<std::int64_t, int> user_index;  // original -> dense
  std::unordered_map<std::int64_t, int> item_index;
  std::pair<double, double> scale{1.0, 5.0};
  std::size_t duplicate_count = 0;

  std::vector<std::vector<std::pair<int, double>>> by_user;
  std::vector<std::vector<std::pair<int, double>>> by_item;

  int user_count() const { return static_cast<int>(user_ids.size()); }
  int item_count() const { return static_cast<int>(item_ids.size()); }

  bool rated(int user, int item) const {
    const auto& row = by_user[static_cast<std::size_t>(user)];
    auto it = std::lower_bound(row.begin(), row.end(), item,
                               [](const std::pair<int, double>& entry, int key) {
                                 return entry.first < key;
                               });
    return it != row.end() && it->first == item;
  }

  // Rebuilds the dense index and adjacency from `triples`.
  void reindex() {
    user_ids.clear();
    item_ids.clear();
    user_index.clear();
    item_index.clear();
    for (const RatingTriple& t : triples) {
      if (user_index.emplace(t.user, static_cast<int>(user_ids.size())).second) {
        user_ids.push_back(t.user);
      }
      if (item_index.emplace(t.item, static_cast<int>(item_ids.size())).second) {
        item_ids.push_back(t.item);
      }
    }
    rebuild_adjacency();
  }

  // Recomputes adjacency while keeping an externally supplied id space
  // (used by fold splits, which must stay aligned with their parent).
  void rebuild_adjacency() {
    by_user.assign(user_ids.size(), {});
    by_item.assign(item_ids.size(), {});
    for (const RatingTriple& t : triples) {
      const int u = user_index.at(t.user);
      const int i = item_index.at(t.item);
      by_user[static_cast<std::size_t>(u)].emplace_back(i, t.rating);
      by_item[static_cast<std::size_t>(i)].emplace_back(u, t.rating);
    }
    for (auto& row : by_user) std::sort(row.begin(), row.end());
    for (auto& row : by_item) std::sort(row.begin(), row.end());
  }
};

/// One train/test split of a k-fold partition. `train` shares the parent
/// dataset's dense id space so downstream indices stay comparable across
/// folds; items or users absent from `train.triples` keep their ids.
struct FoldSplit {
  int fold = 0;
  int fold_count = 0;
  RatingDataset train;
  std::vector<std::pair<int, int>> test_pairs;     // dense (user, item), all held out
  std::vector<std::pair<int, int>> test_relevant;  // rating >= threshold, sorted
};

namespace detail {

inline bool split_fields(const std::string& line, RatingFormat format,
                         std::vector<std::string>& fields) {
  fields.clear();
  if (format == RatingFormat::double_colon) {
    std::size_t pos = 0;
    while (true) {
      const std::size_t next = line.find("::", pos);
      if (next == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, next - pos));
      pos = next + 2;
    }
  } else {
    const char delim = format == RatingFormat::comma ? ',' : '\t';
    std::size_t pos = 0;
    while (true) {
      const std::size_t next = line.find(delim, pos);
      if (next == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, next - pos));
      pos = next + 1;
    }
  }
  return fields.size() >= 3;
}

inline bool parse_int64(const std::string& text, std::int64_t& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtoll(text.c_str(), &end, 10);
  return end == text.c_str() + text.size();
}

inline bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size();
}

// Fisher-Yates with explicit draws; std::shuffle is not portable
// across standard library implementations.
template <typename T, typename Rng>
void deterministic_shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace detail

/// Parses one rating per line. A duplicate (user, item) pair keeps the
/// last occurrence and bumps `duplicate_count`.
inline RatingDataset parse_ratings(std::istream& in, RatingFormat format,
                                   std::pair<double, double> scale = {1.0, 5.0}) {
  RatingDataset ds;
  ds.scale = scale;
  std::unordered_map<std::int64_t, std::unordered_map<std::int64_t, std::size_t>> seen;
  std::string line;
  std::vector<std::string> fields;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    RatingTriple t;
    if (!detail::split_fields(line, format, fields) ||
        !detail::parse_int64(fields[0], t.user) ||
        !detail::parse_int64(fields[1], t.item) ||
        !detail::parse_double(fields[2], t.rating)) {
      throw DataError("malformed rating at line " + std::to_string(line_number) +
                      ": '" + line + "'");
    }
    if (fields.size() >= 4 && !fields[3].empty()) {
      std::int64_t ts = -1;
      if (detail::parse_int64(fields[3], ts)) t.timestamp = ts;
    }
    if (t.rating < scale.first || t.rating > scale.second) {
      throw DataError("rating out of scale at line " + std::to_string(line_number));
    }
    auto [it, inserted] = seen[t.user].emplace(t.item, ds.triples.size());
    if (inserted) {
      ds.triples.push_back(t);
    } else {
      ds.triples[it->second] = t;  // keep last occurrence
      ++ds.duplicate_count;
    }
  }
  if (ds.triples.empty()) throw DataError("empty rating input");
  ds.reindex();
  return ds;
}

/// Iteratively drops users/items below the given support thresholds until
/// both hold simultaneously, then reindexes densely.
inline RatingDataset prefilter(const RatingDataset& ds, int min_user_ratings,
                               int min_item_ratings) {
  if (min_user_ratings < 0 || min_item_ratings < 0) {
    throw DataError("prefilter thresholds must be nonnegative");
  }
  std::vector<RatingTriple> kept = ds.triples;
  while (true) {
    std::unordered_map<std::int64_t, int> user_support;
    std::unordered_map<std::int64_t, int> item_support;
    for (const RatingTriple& t : kept) {
      ++user_support[t.user];
      ++item_support[t.item];
    }
    std::vector<RatingTriple> next;
    next.reserve(kept.size());
    for (const RatingTriple& t : kept) {
      if (user_support[t.user] >= min_user_ratings &&
          item_support[t.item] >= min_item_ratings) {
        next.push_back(t);
      }
    }
    const bool stable = next.size() == kept.size();
    kept = std::move(next);
    if (stable) break;
  }
  if (kept.empty()) {
    throw DataError("prefilter removed every rating (thresholds " +
                    std::to_string(min_user_ratings) + "/" +
                    std::to_string(min_item_ratings) + ")");
  }
  RatingDataset out;
  out.scale = ds.scale;
  out.triples = std::move(kept);
  out.reindex();
  return out;
}

namespace detail {

// fold id per triple index; per-user seeded shuffle then round-robin.
inline std::vector<int> assign_folds(const RatingDataset& ds, int k,
                                     std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> per_user(ds.user_ids.size());
  for (std::size_t idx = 0; idx < ds.triples.size(); ++idx) {
    per_user[static_cast<std::size_t>(ds.user_index.at(ds.triples[idx].user))]
        .push_back(idx);
  }
  std::vector<int> fold_of(ds.triples.size(), 0);
  for (std::size_t u = 0; u < per_user.size(); ++u) {
    auto& indices = per_user[u];
    if (static_cast<int>(indices.size()) < k) {
      throw DataError("user " + std::to_string(ds.user_ids[u]) + " has only " +
                      std::to_string(indices.size()) + " ratings; needs >= " +
                      std::to_string(k) + " (prefilter first)");
    }
    std::mt19937_64 rng(mix_seed(seed, u));
    deterministic_shuffle(indices, rng);
    for (std::size_t pos = 0; pos < indices.size(); ++pos) {
      fold_of[indices[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
    }
  }
  return fold_of;
}

}  // namespace detail

/// Materializes one fold of the k-fold split. Deterministic given seed.
inline FoldSplit make_fold(const RatingDataset& ds, int k,
                           double relevance_threshold, std::uint64_t seed,
                           int fold) {
  if (k < 2) throw DataError("fold count must be >= 2");
  if (fold < 0 || fold >= k) throw DataError("fold index out of range");
  const std::vector<int> fold_of = detail::assign_folds(ds, k, seed);
  FoldSplit split;
  split.fold = fold;
  split.fold_count = k;
  split.train.scale = ds.scale;
  split.train.user_ids = ds.user_ids;
  split.train.item_ids = ds.item_ids;
  split.train.user_index = ds.user_index;
  split.train.item_index = ds.item_index;
  for (std::size_t idx = 0; idx < ds.triples.size(); ++idx) {
    const RatingTriple& t = ds.triples[idx];
    if (fold_of[idx] == fold) {
      const int u = ds.user_index.at(t.user);
      const int i = ds.item_index.at(t.item);
      split.test_pairs.emplace_back(u, i);
      if (t.rating >= relevance_threshold) split.test_relevant.emplace_back(u, i);
    } else {
      split.train.triples.push_back(t);
    }
  }
  std::sort(split.test_pairs.begin(), split.test_pairs.end());
  std::sort(split.test_relevant.begin(), split.test_relevant.end());
  split.train.rebuild_adjacency();
  return split;
}

/// All k folds; fold i's test set holds every user's i-th shuffled chunk.
inline std::vector<FoldSplit> make_folds(const RatingDataset& ds, int k,
                                         double relevance_threshold,
                                         std::uint64_t seed) {
  std::vector<FoldSplit> folds;
  folds.reserve(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    folds.push_back(make_fold(ds, k, relevance_threshold, seed, f));
  }
  return folds;
}

/// Canonical TSV re-emission with dense ids: "user\titem\trating".
inline void write_canonical_tsv(const RatingDataset& ds, std::ostream& out) {
  for (const RatingTriple& t : ds.triples) {
    out << ds.user_index.at(t.user) << '\t' << ds.item_index.at(t.item) << '\t'
        << format_double(t.rating) << '\n';
  }
}

}  // namespace recflow

#endif  // RECFLOW_RATINGS_HPP
