#include "cbmf/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace cbmf {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Tab wins if present; otherwise comma.
std::vector<std::string> split_auto(std::string_view line) {
  return split(line, line.find('\t') != std::string_view::npos ? '\t' : ',');
}

std::optional<double> to_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> to_integer(const std::string& s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool blank_or_comment(const std::string& line) {
  std::string t = trim(line);
  return t.empty() || t.front() == '#';
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

[[noreturn]] void fail_at(const std::string& where, std::size_t line_no, const std::string& what) {
  throw InputError(where + ":" + std::to_string(line_no) + ": " + what);
}

// Dense reindexing: numeric ids sort numerically, otherwise lexicographically.
std::vector<std::string> ordered_ids(const std::set<std::string>& ids) {
  std::vector<std::string> out(ids.begin(), ids.end());
  bool numeric = std::all_of(out.begin(), out.end(), [](const std::string& s) { return to_integer(s).has_value(); });
  if (numeric) {
    std::sort(out.begin(), out.end(),
              [](const std::string& a, const std::string& b) { return *to_integer(a) < *to_integer(b); });
  }
  return out;
}

std::unordered_map<std::string, Index> index_of(const std::vector<std::string>& ids) {
  std::unordered_map<std::string, Index> map;
  map.reserve(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) map.emplace(ids[k], static_cast<Index>(k));
  return map;
}

void build_csr(std::size_t n, const std::vector<Rating>& ratings, bool by_user, std::vector<std::uint32_t>& offsets,
               std::vector<std::uint32_t>& entries) {
  offsets.assign(n + 1, 0);
  for (const auto& r : ratings) ++offsets[(by_user ? r.user : r.item) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  entries.assign(ratings.size(), 0);
  std::vector<std::uint32_t> fill(offsets.begin(), offsets.end() - 1);
  for (std::size_t t = 0; t < ratings.size(); ++t) {
    const auto& r = ratings[t];
    entries[fill[by_user ? r.user : r.item]++] = static_cast<std::uint32_t>(t);
  }
}

const std::vector<std::string> kMovieLensGenres = {
    "unknown", "Action",    "Adventure", "Animation", "Children's", "Comedy",  "Crime",
    "Documentary", "Drama", "Fantasy",   "Film-Noir", "Horror",     "Musical", "Mystery",
    "Romance",  "Sci-Fi",   "Thriller",  "War",       "Western"};

}  // namespace

// ---------------------------------------------------------------------------
// RatingsDataset

RatingsDataset::RatingsDataset(std::size_t n_users, std::size_t n_items, std::vector<Rating> ratings,
                               double rating_min, double rating_max)
    : n_users_(n_users), n_items_(n_items), rating_min_(rating_min), rating_max_(rating_max),
      ratings_(std::move(ratings)) {
  if (!(rating_min <= rating_max)) throw InputError("rating range is empty");
  std::vector<std::uint64_t> keys;
  keys.reserve(ratings_.size());
  for (const auto& r : ratings_) {
    if (r.user >= n_users_ || r.item >= n_items_) {
      throw InputError("rating (" + std::to_string(r.user) + ", " + std::to_string(r.item) +
                       ") outside " + std::to_string(n_users_) + " x " + std::to_string(n_items_));
    }
    if (!(r.value >= rating_min_ && r.value <= rating_max_)) {
      throw InputError("rating value out of range for (" + std::to_string(r.user) + ", " +
                       std::to_string(r.item) + ")");
    }
    keys.push_back(static_cast<std::uint64_t>(r.user) * n_items_ + r.item);
  }
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) throw InputError("duplicate (user, item) pair");

  build_csr(n_users_, ratings_, true, user_offsets_, user_entries_);
  build_csr(n_items_, ratings_, false, item_offsets_, item_entries_);
}

std::span<const std::uint32_t> RatingsDataset::by_user(Index u) const {
  if (u >= n_users_) throw InputError("user index out of range");
  return std::span(user_entries_).subspan(user_offsets_[u], user_offsets_[u + 1] - user_offsets_[u]);
}

std::span<const std::uint32_t> RatingsDataset::by_item(Index i) const {
  if (i >= n_items_) throw InputError("item index out of range");
  return std::span(item_entries_).subspan(item_offsets_[i], item_offsets_[i + 1] - item_offsets_[i]);
}

RatingsDataset RatingsDataset::with_ratings(std::vector<Rating> ratings) const {
  return with_ratings(std::move(ratings), rating_min_, rating_max_);
}

RatingsDataset RatingsDataset::with_ratings(std::vector<Rating> ratings, double rating_min, double rating_max) const {
  RatingsDataset out(n_users_, n_items_, std::move(ratings), rating_min, rating_max);
  out.user_ids = user_ids;
  out.item_ids = item_ids;
  out.item_labels = item_labels;
  return out;
}

std::optional<Index> RatingsDataset::find_item(const std::string& id_or_label) const {
  for (const auto* names : {&item_labels, &item_ids}) {
    auto it = std::find(names->begin(), names->end(), id_or_label);
    if (it != names->end()) return static_cast<Index>(it - names->begin());
  }
  if (item_ids.empty()) {
    if (auto k = to_integer(id_or_label); k && *k >= 0 && static_cast<std::size_t>(*k) < n_items_) {
      return static_cast<Index>(*k);
    }
  }
  return std::nullopt;
}

std::uint64_t RatingsDataset::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  feed(n_users_);
  feed(n_items_);
  for (const auto& r : ratings_) {
    feed(r.user);
    feed(r.item);
    feed(std::bit_cast<std::uint64_t>(r.value));
  }
  return h;
}

void AttributeMatrix::validate() const {
  if (labels.size() != n_attrs()) throw InputError("attribute label count does not match D");
  if (std::set<std::string>(labels.begin(), labels.end()).size() != labels.size()) {
    throw InputError("attribute labels are not unique");
  }
  for (Eigen::Index i = 0; i < incidence.rows(); ++i)
    for (Eigen::Index d = 0; d < incidence.cols(); ++d)
      if (incidence(i, d) != 0.0 && incidence(i, d) != 1.0) throw InputError("attribute matrix is not binary");
}

// ---------------------------------------------------------------------------
// MovieLens 100K

MovieLensData parse_movielens(const std::filesystem::path& directory) {
  const auto data_path = directory / "u.data";
  const auto item_path = directory / "u.item";
  if (!std::filesystem::is_regular_file(data_path)) throw InputError("missing ratings file: " + data_path.string());
  if (!std::filesystem::is_regular_file(item_path)) throw InputError("missing attribute file: " + item_path.string());

  std::vector<std::string> genres = kMovieLensGenres;
  if (std::ifstream gin(directory / "u.genre"); gin) {
    std::vector<std::string> read;
    std::string line;
    while (std::getline(gin, line)) {
      line = strip_cr(line);
      if (trim(line).empty()) continue;
      read.push_back(split(line, '|').front());
    }
    if (!read.empty()) genres = read;
  }
  const std::size_t n_genres = genres.size();

  // Items: the item file defines the item universe.
  struct ItemRow {
    long long id;
    std::string title;
    std::vector<double> flags;
  };
  std::vector<ItemRow> items;
  {
    std::ifstream in(item_path, std::ios::binary);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      line = strip_cr(line);
      if (trim(line).empty()) continue;
      auto fields = split(line, '|');
      if (fields.size() < n_genres + 2) fail_at(item_path.string(), line_no, "expected at least " +
                                                    std::to_string(n_genres + 2) + " fields");
      auto id = to_integer(fields[0]);
      if (!id) fail_at(item_path.string(), line_no, "non-numeric item id '" + fields[0] + "'");
      ItemRow row{*id, fields[1], {}};
      for (std::size_t g = fields.size() - n_genres; g < fields.size(); ++g) {
        if (fields[g] == "0") row.flags.push_back(0.0);
        else if (fields[g] == "1") row.flags.push_back(1.0);
        else fail_at(item_path.string(), line_no, "genre flag '" + fields[g] + "' is not 0 or 1");
      }
      items.push_back(std::move(row));
    }
  }
  std::sort(items.begin(), items.end(), [](const ItemRow& a, const ItemRow& b) { return a.id < b.id; });
  for (std::size_t k = 1; k < items.size(); ++k)
    if (items[k].id == items[k - 1].id) throw InputError("duplicate item id " + std::to_string(items[k].id) + " in u.item");

  std::unordered_map<long long, Index> item_index;
  for (std::size_t k = 0; k < items.size(); ++k) item_index.emplace(items[k].id, static_cast<Index>(k));

  struct RawRating {
    long long user, item;
    double value;
  };
  std::vector<RawRating> raw;
  std::set<long long> user_set;
  {
    std::ifstream in(data_path, std::ios::binary);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      line = strip_cr(line);
      if (trim(line).empty()) continue;
      auto fields = split(line, '\t');
      if (fields.size() != 4) fail_at(data_path.string(), line_no, "expected 4 tab-separated fields");
      auto u = to_integer(fields[0]);
      auto i = to_integer(fields[1]);
      auto r = to_double(fields[2]);
      if (!u || !i || !r) fail_at(data_path.string(), line_no, "non-numeric field");
      if (*r < 1.0 || *r > 5.0) fail_at(data_path.string(), line_no, "rating " + fields[2] + " outside [1, 5]");
      if (!item_index.contains(*i)) fail_at(data_path.string(), line_no, "item " + fields[1] + " not in u.item");
      raw.push_back({*u, *i, *r});
      user_set.insert(*u);
    }
  }
  if (raw.empty()) throw InputError("no ratings in " + data_path.string());

  std::unordered_map<long long, Index> user_index;
  std::vector<std::string> user_ids;
  for (long long u : user_set) {
    user_index.emplace(u, static_cast<Index>(user_ids.size()));
    user_ids.push_back(std::to_string(u));
  }

  std::vector<Rating> ratings;
  ratings.reserve(raw.size());
  for (const auto& r : raw) ratings.push_back({user_index.at(r.user), item_index.at(r.item), r.value});

  MovieLensData out{RatingsDataset(user_ids.size(), items.size(), std::move(ratings), 1.0, 5.0), {}};
  out.ratings.user_ids = std::move(user_ids);
  out.attributes.incidence = Matrix::Zero(static_cast<Eigen::Index>(items.size()), static_cast<Eigen::Index>(n_genres));
  for (std::size_t k = 0; k < items.size(); ++k) {
    out.ratings.item_ids.push_back(std::to_string(items[k].id));
    out.ratings.item_labels.push_back(items[k].title);
    for (std::size_t g = 0; g < n_genres; ++g)
      out.attributes.incidence(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(g)) = items[k].flags[g];
  }
  out.attributes.labels = genres;
  out.attributes.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Generic triplets

RatingsDataset parse_triplets(const std::filesystem::path& file, double rating_min, double rating_max) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot open ratings file: " + file.string());
  return parse_triplets(in, rating_min, rating_max);
}

RatingsDataset parse_triplets(std::istream& in, double rating_min, double rating_max) {
  struct Raw {
    std::string user, item;
    double value;
    std::size_t line_no;
  };
  std::vector<Raw> raw;
  std::optional<std::pair<std::size_t, std::size_t>> dims;  // from "# cbmf-triplets N M"
  std::string line;
  std::size_t line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (blank_or_comment(line)) {
      std::istringstream hs(trim(line));
      std::string hash, tag;
      std::size_t n = 0, m = 0;
      if (hs >> hash >> tag >> n >> m && hash == "#" && tag == "cbmf-triplets") dims = {n, m};
      continue;
    }
    auto fields = split_auto(line);
    if (fields.size() != 3) fail_at("ratings", line_no, "expected 3 fields (user, item, rating)");
    auto value = to_double(fields[2]);
    if (!value) {
      if (!seen_data && raw.empty()) {  // header row
        seen_data = true;
        continue;
      }
      fail_at("ratings", line_no, "non-numeric rating '" + fields[2] + "'");
    }
    seen_data = true;
    if (*value < rating_min || *value > rating_max) {
      fail_at("ratings", line_no, "rating " + fields[2] + " outside declared range");
    }
    raw.push_back({fields[0], fields[1], *value, line_no});
  }
  if (raw.empty()) throw InputError("no ratings");

  std::vector<std::string> user_ids, item_ids;
  std::unordered_map<std::string, Index> user_index, item_index;
  if (dims) {
    for (std::size_t k = 0; k < dims->first; ++k) user_ids.push_back(std::to_string(k));
    for (std::size_t k = 0; k < dims->second; ++k) item_ids.push_back(std::to_string(k));
    for (const auto& r : raw) {
      auto u = to_integer(r.user), i = to_integer(r.item);
      if (!u || !i || *u < 0 || *i < 0 || static_cast<std::size_t>(*u) >= dims->first ||
          static_cast<std::size_t>(*i) >= dims->second) {
        fail_at("ratings", r.line_no, "index outside declared dimensions");
      }
    }
  } else {
    std::set<std::string> us, is;
    for (const auto& r : raw) {
      us.insert(r.user);
      is.insert(r.item);
    }
    user_ids = ordered_ids(us);
    item_ids = ordered_ids(is);
  }
  user_index = index_of(user_ids);
  item_index = index_of(item_ids);

  std::vector<Rating> ratings;
  ratings.reserve(raw.size());
  std::set<std::pair<Index, Index>> seen;
  for (const auto& r : raw) {
    Rating t{user_index.at(r.user), item_index.at(r.item), r.value};
    if (!seen.emplace(t.user, t.item).second) {
      fail_at("ratings", r.line_no, "duplicate (user, item) pair (" + r.user + ", " + r.item + ")");
    }
    ratings.push_back(t);
  }
  RatingsDataset ds(user_ids.size(), item_ids.size(), std::move(ratings), rating_min, rating_max);
  ds.user_ids = std::move(user_ids);
  ds.item_labels = item_ids;
  ds.item_ids = std::move(item_ids);
  return ds;
}

void write_triplets(std::ostream& out, const RatingsDataset& ds) {
  out << "# cbmf-triplets " << ds.n_users() << ' ' << ds.n_items() << '\n';
  out << std::setprecision(17);
  for (const auto& r : ds.ratings()) out << r.user << '\t' << r.item << '\t' << r.value << '\n';
}

// ---------------------------------------------------------------------------
// Attributes

AttributeMatrix parse_attributes(const std::filesystem::path& file, const RatingsDataset& ratings) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot open attribute file: " + file.string());
  return parse_attributes(in, ratings);
}

AttributeMatrix parse_attributes(std::istream& in, const RatingsDataset& ratings) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (blank_or_comment(line)) continue;
    rows.emplace_back(line_no, split_auto(line));
  }

  auto item_of = [&](const std::string& id, std::size_t at) -> Index {
    std::optional<Index> k;
    if (!ratings.item_ids.empty()) {
      auto it = std::find(ratings.item_ids.begin(), ratings.item_ids.end(), id);
      if (it != ratings.item_ids.end()) k = static_cast<Index>(it - ratings.item_ids.begin());
    } else {
      k = ratings.find_item(id);
    }
    if (!k) fail_at("attributes", at, "unknown item id '" + id + "'");
    return *k;
  };
  auto is_known_item = [&](const std::string& id) {
    if (!ratings.item_ids.empty()) return std::find(ratings.item_ids.begin(), ratings.item_ids.end(), id) != ratings.item_ids.end();
    return ratings.find_item(id).has_value();
  };

  AttributeMatrix out;
  const auto M = static_cast<Eigen::Index>(ratings.n_items());

  // A header row names the item column; grid headers also carry the labels.
  auto looks_like_header = [&](const std::vector<std::string>& fields) {
    std::string first = fields.front();
    std::transform(first.begin(), first.end(), first.begin(), [](unsigned char ch) { return std::tolower(ch); });
    static const std::set<std::string> names = {"item", "item_id", "itemid", "item id", "id",
                                                "recipe", "recipe_id", "movie", "movie_id"};
    return !is_known_item(fields.front()) && (names.contains(first) || fields.size() > 2);
  };
  bool header = !rows.empty() && looks_like_header(rows.front().second);
  bool grid = false;
  if (header && rows.size() >= 2) {
    const auto& next = rows[1].second;
    grid = next.size() == rows.front().second.size() &&
           std::all_of(next.begin() + 1, next.end(), [](const std::string& s) { return to_double(s).has_value(); });
  } else if (header && rows.front().second.size() > 2) {
    grid = true;  // header-only grid: no incidences
  }

  if (grid) {
    const auto& head = rows.front().second;
    out.labels.assign(head.begin() + 1, head.end());
    out.incidence = Matrix::Zero(M, static_cast<Eigen::Index>(out.labels.size()));
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& [at, fields] = rows[r];
      if (fields.size() != head.size()) fail_at("attributes", at, "row width does not match header");
      Index i = item_of(fields[0], at);
      for (std::size_t d = 1; d < fields.size(); ++d) {
        if (fields[d] == "1") out.incidence(i, static_cast<Eigen::Index>(d - 1)) = 1.0;
        else if (fields[d] != "0") fail_at("attributes", at, "non-binary cell '" + fields[d] + "'");
      }
    }
  } else {
    std::vector<std::pair<Index, std::size_t>> hits;
    std::unordered_map<std::string, std::size_t> label_index;
    for (std::size_t r = header ? 1 : 0; r < rows.size(); ++r) {
      const auto& [at, fields] = rows[r];
      if (fields.size() != 2) fail_at("attributes", at, "expected 2 fields (item, attribute)");
      Index i = item_of(fields[0], at);
      auto [it, inserted] = label_index.emplace(fields[1], out.labels.size());
      if (inserted) out.labels.push_back(fields[1]);
      hits.emplace_back(i, it->second);
    }
    out.incidence = Matrix::Zero(M, static_cast<Eigen::Index>(out.labels.size()));
    for (auto [i, d] : hits) out.incidence(i, static_cast<Eigen::Index>(d)) = 1.0;
  }
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Splitting and summaries

HoldoutSplit split_holdout(const RatingsDataset& ds, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InputError("holdout fraction must lie strictly between 0 and 1");
  const std::size_t total = ds.size();
  // nearbyint under the default rounding mode: ties to even.
  const auto n_val = static_cast<std::size_t>(std::nearbyint(fraction * static_cast<double>(total)));

  std::vector<std::uint32_t> order(total);
  std::iota(order.begin(), order.end(), 0U);
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < n_val; ++k) {  // partial Fisher-Yates
    std::uniform_int_distribution<std::size_t> pick(k, total - 1);
    std::swap(order[k], order[pick(rng)]);
  }
  std::vector<char> in_val(total, 0);
  for (std::size_t k = 0; k < n_val; ++k) in_val[order[k]] = 1;

  std::vector<Rating> train, val;
  train.reserve(total - n_val);
  val.reserve(n_val);
  for (std::size_t t = 0; t < total; ++t) (in_val[t] ? val : train).push_back(ds[t]);
  return {ds.with_ratings(std::move(train)), ds.with_ratings(std::move(val))};
}

DatasetSummary summarize(const RatingsDataset& ds, const AttributeMatrix* attrs) {
  if (attrs && attrs->n_items() != ds.n_items()) throw InputError("attribute rows do not match item count");
  DatasetSummary s;
  s.n_users = ds.n_users();
  s.n_items = ds.n_items();
  s.n_attrs = attrs ? attrs->n_attrs() : 0;
  s.n_ratings = ds.size();
  s.density = static_cast<double>(ds.size()) / (static_cast<double>(ds.n_users()) * static_cast<double>(ds.n_items()));
  return s;
}

// ---------------------------------------------------------------------------
// Synthetic Recipes-shaped data

SynthData synth_recipes(const SynthConfig& cfg) {
  if (cfg.n_users == 0 || cfg.n_items == 0 || cfg.n_attrs == 0 || cfg.attrs_per_item == 0) {
    throw InputError("synthetic dimensions must be positive");
  }
  if (!(cfg.density > 0.0 && cfg.density < 1.0)) throw InputError("density must lie in (0, 1)");
  if (cfg.attrs_per_item > cfg.n_attrs) throw InputError("attrs_per_item exceeds the number of attributes");

  constexpr int kRank = 5;
  const std::size_t cells = cfg.n_users * cfg.n_items;
  const auto n_obs = static_cast<std::size_t>(std::nearbyint(cfg.density * static_cast<double>(cells)));
  if (n_obs == 0) throw InputError("density yields zero ratings");

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto N = static_cast<Eigen::Index>(cfg.n_users);
  const auto M = static_cast<Eigen::Index>(cfg.n_items);
  const auto D = static_cast<Eigen::Index>(cfg.n_attrs);

  SynthData out;
  out.attributes.incidence = Matrix::Zero(M, D);
  for (Eigen::Index i = 0; i < M; ++i) {
    std::vector<std::size_t> pool(cfg.n_attrs);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t k = 0; k < cfg.attrs_per_item; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
      std::swap(pool[k], pool[pick(rng)]);
      out.attributes.incidence(i, static_cast<Eigen::Index>(pool[k])) = 1.0;
    }
  }
  for (Eigen::Index d = 0; d < D; ++d) out.attributes.labels.push_back("attr" + std::to_string(d));

  auto gaussian = [&](Eigen::Index rows, Eigen::Index cols, double sd) {
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = sd * normal(rng);
    return m;
  };
  const double mu = 3.6;
  Vector alpha = gaussian(N, 1, 0.5).col(0);
  Vector beta = gaussian(M, 1, 0.4).col(0);
  Matrix P = gaussian(N, kRank, 0.45);
  Matrix attr_factors = gaussian(D, kRank, 1.0 / std::sqrt(static_cast<double>(cfg.attrs_per_item)));
  Matrix Q = 0.35 * (out.attributes.incidence * attr_factors) + gaussian(M, kRank, 0.25);

  std::vector<std::uint32_t> cell(cells);
  std::iota(cell.begin(), cell.end(), 0U);
  for (std::size_t k = 0; k < n_obs; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, cells - 1);
    std::swap(cell[k], cell[pick(rng)]);
  }
  cell.resize(n_obs);
  std::sort(cell.begin(), cell.end());

  std::vector<Rating> ratings;
  ratings.reserve(n_obs);
  for (std::uint32_t c : cell) {
    const auto u = static_cast<Eigen::Index>(c / cfg.n_items);
    const auto i = static_cast<Eigen::Index>(c % cfg.n_items);
    double r = mu + alpha(u) + beta(i) + P.row(u).dot(Q.row(i)) + 0.6 * normal(rng);
    r = std::clamp(std::nearbyint(r), 0.0, 5.0);
    ratings.push_back({static_cast<Index>(u), static_cast<Index>(i), r});
  }

  out.ratings = RatingsDataset(cfg.n_users, cfg.n_items, std::move(ratings), 0.0, 5.0);
  for (std::size_t u = 0; u < cfg.n_users; ++u) out.ratings.user_ids.push_back(std::to_string(u));
  for (std::size_t i = 0; i < cfg.n_items; ++i) out.ratings.item_ids.push_back(std::to_string(i));
  out.ratings.item_labels = out.ratings.item_ids;
  return out;
}

}  // namespace cbmf
