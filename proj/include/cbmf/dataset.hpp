#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cbmf/common.hpp"

namespace cbmf {

struct Rating {
  Index user;
  Index item;
  double value;

  friend bool operator==(const Rating&, const Rating&) = default;
};

/// Sparse explicit-feedback table over dense 0-based user/item indices.
///
/// Besides the triplets, keeps CSR-style per-user and per-item lists of
/// triplet positions (T_u. and T_.i). Both lists are in triplet order, so a
/// sum over by_user(u) visits ratings in the same order as a full pass
/// over ratings() restricted to u.
class RatingsDataset {
 public:
  RatingsDataset() = default;

  // Throws InputError on out-of-range indices, duplicate (u,i) pairs, or
  // ratings outside [rating_min, rating_max].
  RatingsDataset(std::size_t n_users, std::size_t n_items, std::vector<Rating> ratings,
                 double rating_min, double rating_max);

  std::size_t n_users() const { return n_users_; }
  std::size_t n_items() const { return n_items_; }
  std::size_t size() const { return ratings_.size(); }
  bool empty() const { return ratings_.empty(); }

  double rating_min() const { return rating_min_; }
  double rating_max() const { return rating_max_; }

  std::span<const Rating> ratings() const { return ratings_; }
  const Rating& operator[](std::size_t t) const { return ratings_[t]; }

  // Positions into ratings() for user u / item i.
  std::span<const std::uint32_t> by_user(Index u) const;
  std::span<const std::uint32_t> by_item(Index i) const;

  // Original identifiers (as read from disk) per dense index. Empty when the
  // dataset was built in memory.
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  // Human-readable item names (movie titles for ML-100K); defaults to item_ids.
  std::vector<std::string> item_labels;

  // Same dimensions and metadata, different triplets.
  RatingsDataset with_ratings(std::vector<Rating> ratings) const;
  RatingsDataset with_ratings(std::vector<Rating> ratings, double rating_min, double rating_max) const;

  // Index of an item by original id or label; nullopt if unknown.
  std::optional<Index> find_item(const std::string& id_or_label) const;

  // 64-bit FNV-1a over dimensions and triplets; identifies a dataset in model files.
  std::uint64_t fingerprint() const;

 private:
  std::size_t n_users_ = 0;
  std::size_t n_items_ = 0;
  double rating_min_ = 0.0;
  double rating_max_ = 0.0;
  std::vector<Rating> ratings_;
  std::vector<std::uint32_t> user_offsets_, user_entries_;
  std::vector<std::uint32_t> item_offsets_, item_entries_;
};

/// Binary M x D item-attribute incidence.
struct AttributeMatrix {
  Matrix incidence;  // entries are exactly 0.0 or 1.0
  std::vector<std::string> labels;

  std::size_t n_items() const { return static_cast<std::size_t>(incidence.rows()); }
  std::size_t n_attrs() const { return static_cast<std::size_t>(incidence.cols()); }

  // Throws InputError when entries are not binary or labels are not unique / wrong count.
  void validate() const;
};

struct DatasetSummary {
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::size_t n_attrs = 0;
  std::size_t n_ratings = 0;
  double density = 0.0;
};

struct MovieLensData {
  RatingsDataset ratings;
  AttributeMatrix attributes;
};

// ML-100K directory: u.data (user \t item \t rating \t timestamp) and u.item
// (pipe-separated, last 19 fields are genre flags). Ratings on [1, 5].
MovieLensData parse_movielens(const std::filesystem::path& directory);

// "user, item, rating" lines, comma or tab separated; '#' comments and blank
// lines are skipped, as is a leading header line whose rating field is not numeric.
RatingsDataset parse_triplets(const std::filesystem::path& file, double rating_min, double rating_max);
RatingsDataset parse_triplets(std::istream& in, double rating_min, double rating_max);

// Either "item_id, attr_label" incidence lines or a dense 0/1 grid whose
// header row is "item_id, label_1, ..., label_D". Rows are aligned to the
// item indexing of `ratings`; items absent from the file get zero rows.
AttributeMatrix parse_attributes(const std::filesystem::path& file, const RatingsDataset& ratings);
AttributeMatrix parse_attributes(std::istream& in, const RatingsDataset& ratings);

// Canonical TSV: "user \t item \t rating" with 0-based indices, 17 significant digits.
void write_triplets(std::ostream& out, const RatingsDataset& ds);

struct HoldoutSplit {
  RatingsDataset train;
  RatingsDataset validation;
};

// round(fraction * |T|) pairs (ties to even) drawn uniformly without
// replacement go to validation; both halves keep the full N x M shape and
// preserve the original triplet order.
HoldoutSplit split_holdout(const RatingsDataset& ds, double fraction, std::uint64_t seed);

DatasetSummary summarize(const RatingsDataset& ds, const AttributeMatrix* attrs = nullptr);

struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t n_users = 1706;
  std::size_t n_items = 1040;
  std::size_t n_attrs = 1057;
  double density = 0.037;
  std::size_t attrs_per_item = 8;
};

struct SynthData {
  RatingsDataset ratings;
  AttributeMatrix attributes;
};

// Planted rank-5 + main-effects table on the integer scale [0, 5] with
// sparse binary attributes; item factors load partly on attributes.
SynthData synth_recipes(const SynthConfig& config);

}  // namespace cbmf
