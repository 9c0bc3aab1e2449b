#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfair {

// Production continents, the geographic granularity of the toolkit.
enum class Continent : std::uint8_t { AF = 0, AS, EU, NA, OC, SA };

inline constexpr std::size_t kNumContinents = 6;
inline constexpr std::array<Continent, kNumContinents> kAllContinents = {
    Continent::AF, Continent::AS, Continent::EU,
    Continent::NA, Continent::OC, Continent::SA};

const char* to_string(Continent c);
Continent continent_from_string(const std::string& code);  // throws on unknown code

// Popularity buckets: g1 = top 10% by rating count, g2 = next 10%, g3 = long tail.
enum class PopGroup : std::uint8_t { g1 = 0, g2, g3 };

inline constexpr std::size_t kNumPopGroups = 3;

const char* to_string(PopGroup g);
PopGroup popgroup_from_string(const std::string& name);

// Set of continents an item belongs to, packed into a bitmask.
class ContinentSet {
 public:
  ContinentSet() = default;

  void insert(Continent c) { mask_ |= bit(c); }
  bool contains(Continent c) const { return (mask_ & bit(c)) != 0; }
  bool empty() const { return mask_ == 0; }
  std::size_t size() const;
  std::uint8_t mask() const { return mask_; }

  std::vector<Continent> values() const;

  bool operator==(const ContinentSet&) const = default;

 private:
  static std::uint8_t bit(Continent c) {
    return static_cast<std::uint8_t>(1u << static_cast<std::uint8_t>(c));
  }
  std::uint8_t mask_ = 0;
};

// Ordering for opaque user/item ids: all-digit ids compare numerically
// (shorter-then-lexicographic, which matches numeric order), and sort
// before non-numeric ids; everything else is plain lexicographic.
// Gives "item id asc" a single deterministic meaning for both integer
// ids and ISBN-style strings.
bool id_less(const std::string& a, const std::string& b);

struct IdLess {
  bool operator()(const std::string& a, const std::string& b) const {
    return id_less(a, b);
  }
};

// One (user, item, rating) record.
struct Interaction {
  std::string user;
  std::string item;
  double rating = 0.0;
};

enum class Split : std::uint8_t { train, test, all };

// Bag of interactions with a split tag. (user,item) pairs are unique
// within a split.
struct InteractionSet {
  std::vector<Interaction> interactions;
  Split split = Split::all;

  std::size_t size() const { return interactions.size(); }
  bool empty() const { return interactions.empty(); }

  std::size_t user_count() const;
  std::size_t item_count() const;
};

// A single scored recommendation entry.
struct ScoredItem {
  std::string item;
  double score = 0.0;
};

// Ordered recommendations for one user; positions are 1-based.
struct RecommendationList {
  std::string user;
  std::vector<ScoredItem> entries;

  std::size_t size() const { return entries.size(); }
};

enum class TargetMode : std::uint8_t { item_based, rating_based };

// Target share per continent and per popularity group, each summing to 1.
struct TargetDistribution {
  std::array<double, kNumContinents> continent{};
  std::array<double, kNumPopGroups> popgroup{};
  TargetMode mode = TargetMode::item_based;

  double continent_share(Continent c) const {
    return continent[static_cast<std::size_t>(c)];
  }
  double popgroup_share(PopGroup g) const {
    return popgroup[static_cast<std::size_t>(g)];
  }
  void validate() const;  // throws if a map has negatives or does not sum to 1
};

}  // namespace mfair
