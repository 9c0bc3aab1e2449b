#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mfair/dataset.hpp"
#include "mfair/types.hpp"

namespace mfair {

enum class BiasKind : std::uint8_t { visibility, exposure };

const char* to_string(BiasKind kind);

// Rank discount used by exposure and NDCG: 1/log2(1 + position), positions
// 1-based, so position 1 weighs 1.0 and position 3 weighs 0.5.
double position_discount(std::size_t position);

// Actual share of each continent in the top-k. Per user the counts
// (visibility) or discounted sums (exposure) are normalized across that
// user's continents, then averaged over users; `pooled` sums numerators and
// denominators globally instead. Multi-continent items count once per
// continent. Throws if any list is shorter than k.
std::array<double, kNumContinents> continent_shares(
    const std::vector<RecommendationList>& lists, const ItemCatalog& catalog,
    std::size_t k, BiasKind kind, bool pooled = false);

// Actual share of each popularity group: per-group visibility/exposure mass
// over all users is divided by the group's catalog size, then the three
// values are normalized to sum to 1.
std::array<double, kNumPopGroups> popgroup_shares(
    const std::vector<RecommendationList>& lists, const ItemCatalog& catalog,
    std::size_t k, BiasKind kind);

// Signed bias of one group: actual share minus target share. Positive means
// over-representation.
struct BiasValue {
  std::string group;
  double value = 0.0;
};

std::vector<BiasValue> visibility_bias_continent(const std::vector<RecommendationList>& lists,
                                                 const ItemCatalog& catalog,
                                                 const TargetDistribution& target,
                                                 std::size_t k, bool pooled = false);
std::vector<BiasValue> visibility_bias_popgroup(const std::vector<RecommendationList>& lists,
                                                const ItemCatalog& catalog,
                                                const TargetDistribution& target,
                                                std::size_t k);
std::vector<BiasValue> exposure_bias_continent(const std::vector<RecommendationList>& lists,
                                               const ItemCatalog& catalog,
                                               const TargetDistribution& target,
                                               std::size_t k, bool pooled = false);
std::vector<BiasValue> exposure_bias_popgroup(const std::vector<RecommendationList>& lists,
                                              const ItemCatalog& catalog,
                                              const TargetDistribution& target,
                                              std::size_t k);

// Sum of absolute bias values across the groups of one metric family.
double total_bs(const std::vector<BiasValue>& values);

// NDCG@k with binary relevance (item present in the user's test set),
// averaged over users with a non-empty test set. IDCG fills
// min(k, |test_u|) top slots.
double ndcg(const std::vector<RecommendationList>& lists, const InteractionSet& test,
            std::size_t k);

// All bias families plus NDCG at one cutoff.
struct BiasReport {
  std::size_t k = 0;
  std::vector<BiasValue> continent_vb;
  std::vector<BiasValue> continent_eb;
  std::vector<BiasValue> pop_vb;
  std::vector<BiasValue> pop_eb;
  double ndcg = 0.0;

  double total(BiasKind kind, bool popularity) const;
};

BiasReport measure(const std::vector<RecommendationList>& lists, const ItemCatalog& catalog,
                   const TargetDistribution& target, const InteractionSet& test,
                   std::size_t k);

}  // namespace mfair
