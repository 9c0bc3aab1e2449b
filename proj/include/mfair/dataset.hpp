#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mfair/types.hpp"

namespace mfair {

enum class DatasetFormat : std::uint8_t {
  movielens_dat,     // UserID::MovieID::Rating::Timestamp, ratings 1-5
  bookcrossing_csv,  // "User-ID";"ISBN";"Book-Rating", ratings 1-10, 0 = implicit
  generic_tsv,       // user<TAB>item<TAB>rating
};

DatasetFormat format_from_string(const std::string& name);
const char* to_string(DatasetFormat format);

struct ParseStats {
  std::size_t accepted = 0;
  std::size_t malformed = 0;
  std::size_t implicit_skipped = 0;  // Book-Crossing rating-0 rows
};

// Reads a rating file into an InteractionSet. Malformed lines are counted,
// not fatal; an unreadable file or zero valid records throws.
InteractionSet parse_interactions(const std::string& path, DatasetFormat format,
                                  ParseStats* stats = nullptr);

struct FilterStats {
  std::size_t users_kept = 0;
  std::size_t items_kept = 0;
  std::size_t interactions_kept = 0;
};

// Single simultaneous pass: drops every user and every item whose count in
// the INPUT is below min_ratings. Not iterated to a k-core.
InteractionSet filter_min_activity(const InteractionSet& set, std::size_t min_ratings,
                                   FilterStats* stats = nullptr);

// Per-user random split, deterministic for a fixed seed. A user's single
// interaction always lands in train.
std::pair<InteractionSet, InteractionSet> split_train_test(const InteractionSet& set,
                                                           double train_fraction,
                                                           std::uint64_t seed);

// Continent sidecar: `item_id<TAB>CODE[,CODE...]`. Unknown codes and
// conflicting duplicate ids throw.
std::map<std::string, ContinentSet, IdLess> load_continent_map(const std::string& path);

struct CatalogEntry {
  std::string item;
  ContinentSet continents;
  std::uint32_t popularity = 0;  // rating count in the training data
  PopGroup group = PopGroup::g3;
};

struct CatalogStats {
  std::size_t dropped_no_continent = 0;
};

// Item catalog: continents, training popularity and popularity group per item.
class ItemCatalog {
 public:
  ItemCatalog() = default;
  explicit ItemCatalog(std::vector<CatalogEntry> entries);

  const std::vector<CatalogEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool contains(const std::string& item) const;
  const CatalogEntry& at(const std::string& item) const;  // throws if absent

  // Continents with at least one catalog item, in enum order.
  const std::vector<Continent>& active_continents() const { return active_; }
  // Number of items per continent (multi-continent items count once per
  // continent).
  const std::array<std::size_t, kNumContinents>& continent_item_counts() const {
    return continent_counts_;
  }
  // |Phi^g|: catalog items per popularity group.
  const std::array<std::size_t, kNumPopGroups>& group_sizes() const {
    return group_sizes_;
  }

 private:
  std::vector<CatalogEntry> entries_;  // sorted by item id
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Continent> active_;
  std::array<std::size_t, kNumContinents> continent_counts_{};
  std::array<std::size_t, kNumPopGroups> group_sizes_{};
};

// Builds the catalog from training data: popularity = train rating count,
// items without continent data dropped, then items ranked by
// (popularity desc, item id asc) and cut into g1/g2/g3 with
// |g1| = |g2| = ceil(0.10 * m).
ItemCatalog build_catalog(const InteractionSet& train,
                          const std::map<std::string, ContinentSet, IdLess>& continents,
                          CatalogStats* stats = nullptr);

// Popularity target: average popularity per group, normalized to sum to 1.
std::array<double, kNumPopGroups> target_popularity(const ItemCatalog& catalog);

// Continent target: item share (item_based) or training-rating share
// (rating_based) per continent. Multi-continent items contribute one unit
// to each of their continents; the denominator is the sum over continents.
std::array<double, kNumContinents> target_continent(const InteractionSet& train,
                                                    const ItemCatalog& catalog,
                                                    TargetMode mode);

// Convenience: both maps in one TargetDistribution.
TargetDistribution make_targets(const InteractionSet& train, const ItemCatalog& catalog,
                                TargetMode mode);

}  // namespace mfair
