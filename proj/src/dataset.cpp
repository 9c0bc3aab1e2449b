#include "mfair/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "mfair/random.hpp"

namespace mfair {

DatasetFormat format_from_string(const std::string& name) {
  if (name == "movielens_dat" || name == "movielens") return DatasetFormat::movielens_dat;
  if (name == "bookcrossing_csv" || name == "bookcrossing")
    return DatasetFormat::bookcrossing_csv;
  if (name == "generic_tsv" || name == "tsv") return DatasetFormat::generic_tsv;
  throw std::invalid_argument("unknown dataset format: '" + name + "'");
}

const char* to_string(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::movielens_dat: return "movielens_dat";
    case DatasetFormat::bookcrossing_csv: return "bookcrossing_csv";
    case DatasetFormat::generic_tsv: return "generic_tsv";
  }
  throw std::logic_error("invalid dataset format value");
}

namespace {

bool parse_rating(const std::string& field, double* out) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos != field.size() || !std::isfinite(v)) return false;
    *out = v;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

std::vector<std::string> split_on(const std::string& line, const std::string& sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + sep.size();
  }
  return fields;
}

std::string strip_quotes(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

// Returns false for malformed lines; sets *implicit for rating-0 book rows.
bool parse_line(const std::string& line, DatasetFormat format, Interaction* out,
                bool* implicit) {
  *implicit = false;
  switch (format) {
    case DatasetFormat::movielens_dat: {
      const auto f = split_on(line, "::");
      if (f.size() < 3 || f[0].empty() || f[1].empty()) return false;
      double r;
      if (!parse_rating(f[2], &r) || r < 1.0 || r > 5.0) return false;
      *out = {f[0], f[1], r};
      return true;
    }
    case DatasetFormat::bookcrossing_csv: {
      const auto f = split_on(line, ";");
      if (f.size() < 3) return false;
      const std::string user = strip_quotes(f[0]);
      const std::string item = strip_quotes(f[1]);
      if (user.empty() || item.empty()) return false;
      double r;
      if (!parse_rating(strip_quotes(f[2]), &r)) return false;
      if (r == 0.0) {  // implicit-feedback record, outside the 1-10 scale
        *implicit = true;
        return false;
      }
      if (r < 1.0 || r > 10.0) return false;
      *out = {user, item, r};
      return true;
    }
    case DatasetFormat::generic_tsv: {
      const auto f = split_on(line, "\t");
      if (f.size() < 3 || f[0].empty() || f[1].empty()) return false;
      double r;
      if (!parse_rating(f[2], &r)) return false;
      *out = {f[0], f[1], r};
      return true;
    }
  }
  return false;
}

bool looks_like_bx_header(const std::string& line) {
  return line.find("User-ID") != std::string::npos &&
         line.find("Rating") != std::string::npos;
}

}  // namespace

InteractionSet parse_interactions(const std::string& path, DatasetFormat format,
                                  ParseStats* stats) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rating file: " + path);

  ParseStats local;
  InteractionSet set;
  set.split = Split::all;

  std::unordered_set<std::string> seen_pairs;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && format == DatasetFormat::bookcrossing_csv && looks_like_bx_header(line)) {
      first = false;
      continue;
    }
    first = false;
    Interaction rec;
    bool implicit = false;
    if (parse_line(line, format, &rec, &implicit)) {
      // (user, item) must be unique; repeated pairs count as malformed
      if (!seen_pairs.insert(rec.user + '\x1f' + rec.item).second) {
        ++local.malformed;
        continue;
      }
      set.interactions.push_back(std::move(rec));
      ++local.accepted;
    } else if (implicit) {
      ++local.implicit_skipped;
    } else {
      ++local.malformed;
    }
  }
  if (stats) *stats = local;
  if (set.interactions.empty())
    throw std::runtime_error("no valid records in " + path);
  return set;
}

InteractionSet filter_min_activity(const InteractionSet& set, std::size_t min_ratings,
                                   FilterStats* stats) {
  if (min_ratings < 1) throw std::invalid_argument("min_ratings must be >= 1");

  std::unordered_map<std::string, std::size_t> user_counts, item_counts;
  for (const auto& r : set.interactions) {
    ++user_counts[r.user];
    ++item_counts[r.item];
  }

  InteractionSet out;
  out.split = set.split;
  for (const auto& r : set.interactions) {
    if (user_counts[r.user] >= min_ratings && item_counts[r.item] >= min_ratings)
      out.interactions.push_back(r);
  }
  if (out.interactions.empty())
    throw std::runtime_error("min-activity filter removed every interaction");

  if (stats) {
    stats->users_kept = out.user_count();
    stats->items_kept = out.item_count();
    stats->interactions_kept = out.size();
  }
  return out;
}

std::pair<InteractionSet, InteractionSet> split_train_test(const InteractionSet& set,
                                                           double train_fraction,
                                                           std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train_fraction must lie in (0, 1)");

  // Group interaction indexes per user, users in id order so the result is
  // independent of input ordering quirks.
  std::map<std::string, std::vector<std::size_t>, IdLess> by_user;
  for (std::size_t i = 0; i < set.interactions.size(); ++i)
    by_user[set.interactions[i].user].push_back(i);

  InteractionSet train, test;
  train.split = Split::train;
  test.split = Split::test;

  for (auto& [user, idx] : by_user) {
    Rng rng(seed, user);
    rng.shuffle(idx);
    const auto n = idx.size();
    const auto n_train =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(train_fraction * n)));
    for (std::size_t j = 0; j < n; ++j) {
      (j < n_train ? train : test).interactions.push_back(set.interactions[idx[j]]);
    }
  }
  return {std::move(train), std::move(test)};
}

std::map<std::string, ContinentSet, IdLess> load_continent_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open continent file: " + path);

  std::map<std::string, ContinentSet, IdLess> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      throw std::runtime_error("bad continent line " + std::to_string(lineno) + " in " + path);
    const std::string item = line.substr(0, tab);
    ContinentSet cs;
    for (const auto& code : split_on(line.substr(tab + 1), ",")) {
      cs.insert(continent_from_string(code));  // throws on unknown code
    }
    auto [it, inserted] = out.emplace(item, cs);
    if (!inserted && !(it->second == cs))
      throw std::runtime_error("conflicting continent sets for item '" + item + "'");
  }
  return out;
}

ItemCatalog::ItemCatalog(std::vector<CatalogEntry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const CatalogEntry& a, const CatalogEntry& b) { return id_less(a.item, b.item); });
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.continents.empty())
      throw std::invalid_argument("catalog entry without continents: " + e.item);
    if (!index_.emplace(e.item, i).second)
      throw std::invalid_argument("duplicate catalog item: " + e.item);
    for (Continent c : e.continents.values())
      ++continent_counts_[static_cast<std::size_t>(c)];
    ++group_sizes_[static_cast<std::size_t>(e.group)];
  }
  for (Continent c : kAllContinents) {
    if (continent_counts_[static_cast<std::size_t>(c)] > 0) active_.push_back(c);
  }
}

bool ItemCatalog::contains(const std::string& item) const {
  return index_.count(item) != 0;
}

const CatalogEntry& ItemCatalog::at(const std::string& item) const {
  const auto it = index_.find(item);
  if (it == index_.end()) throw std::out_of_range("item not in catalog: " + item);
  return entries_[it->second];
}

ItemCatalog build_catalog(const InteractionSet& train,
                          const std::map<std::string, ContinentSet, IdLess>& continents,
                          CatalogStats* stats) {
  if (train.empty()) throw std::invalid_argument("cannot build catalog from empty training data");

  std::map<std::string, std::uint32_t, IdLess> counts;
  for (const auto& r : train.interactions) ++counts[r.item];

  std::vector<CatalogEntry> entries;
  entries.reserve(counts.size());
  std::size_t dropped = 0;
  for (const auto& [item, count] : counts) {
    const auto it = continents.find(item);
    if (it == continents.end() || it->second.empty()) {
      ++dropped;
      continue;
    }
    entries.push_back({item, it->second, count, PopGroup::g3});
  }
  if (stats) stats->dropped_no_continent = dropped;
  if (entries.empty())
    throw std::runtime_error("no training item has continent data; catalog is empty");

  // Rank by (popularity desc, item id asc); the top 10% is g1, the next
  // 10% g2, the rest g3, with ceil boundaries.
  std::sort(entries.begin(), entries.end(), [](const CatalogEntry& a, const CatalogEntry& b) {
    if (a.popularity != b.popularity) return a.popularity > b.popularity;
    return id_less(a.item, b.item);
  });
  const std::size_t m = entries.size();
  const auto cut = static_cast<std::size_t>(std::ceil(0.10 * static_cast<double>(m)));
  for (std::size_t i = 0; i < m; ++i) {
    entries[i].group = i < cut            ? PopGroup::g1
                       : i < 2 * cut      ? PopGroup::g2
                                          : PopGroup::g3;
  }
  return ItemCatalog(std::move(entries));
}

std::array<double, kNumPopGroups> target_popularity(const ItemCatalog& catalog) {
  std::array<double, kNumPopGroups> pop_sum{};
  const auto& sizes = catalog.group_sizes();
  for (std::size_t g = 0; g < kNumPopGroups; ++g) {
    if (sizes[g] == 0)
      throw std::runtime_error(std::string("empty popularity group ") +
                               to_string(static_cast<PopGroup>(g)));
  }
  for (const auto& e : catalog.entries())
    pop_sum[static_cast<std::size_t>(e.group)] += e.popularity;

  std::array<double, kNumPopGroups> avg{};
  double total = 0.0;
  for (std::size_t g = 0; g < kNumPopGroups; ++g) {
    avg[g] = pop_sum[g] / static_cast<double>(sizes[g]);
    total += avg[g];
  }
  for (auto& v : avg) v /= total;
  return avg;
}

std::array<double, kNumContinents> target_continent(const InteractionSet& train,
                                                    const ItemCatalog& catalog,
                                                    TargetMode mode) {
  if (catalog.empty()) throw std::invalid_argument("catalog is empty");

  std::array<double, kNumContinents> counts{};
  if (mode == TargetMode::item_based) {
    for (std::size_t c = 0; c < kNumContinents; ++c)
      counts[c] = static_cast<double>(catalog.continent_item_counts()[c]);
  } else {
    for (const auto& r : train.interactions) {
      if (!catalog.contains(r.item)) continue;
      for (Continent c : catalog.at(r.item).continents.values())
        counts[static_cast<std::size_t>(c)] += 1.0;
    }
  }
  double total = 0.0;
  for (double v : counts) total += v;
  if (total <= 0.0) throw std::runtime_error("no continent evidence for target distribution");
  for (auto& v : counts) v /= total;
  return counts;
}

TargetDistribution make_targets(const InteractionSet& train, const ItemCatalog& catalog,
                                TargetMode mode) {
  TargetDistribution t;
  t.mode = mode;
  t.continent = target_continent(train, catalog, mode);
  t.popgroup = target_popularity(catalog);
  t.validate();
  return t;
}

}  // namespace mfair
