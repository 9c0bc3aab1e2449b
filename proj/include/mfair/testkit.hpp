#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mfair/dataset.hpp"
#include "mfair/types.hpp"

namespace mfair {

// Recipe for a synthetic interaction set with controlled continent mix and
// popularity skew.
struct SynthSpec {
  std::size_t n_users = 50;
  std::size_t n_items = 100;
  std::map<Continent, double> continent_weights;  // must sum to 1
  double popularity_skew = 1.0;  // power-law exponent; 0 = uniform item draw
  std::uint64_t seed = 0;
  std::size_t ratings_per_user = 10;
};

struct SynthData {
  InteractionSet interactions;
  std::map<std::string, ContinentSet, IdLess> continents;
};

// Items get one continent sampled from the weights; rating counts follow
// rank^(-skew). Deterministic per seed.
SynthData synth_dataset(const SynthSpec& spec);

// Eight-item toy scenario: one user's six-entry list whose top-4 holds
// three NA items and one EU item. The 5th entry is an under-represented
// continent item from a popularity-neutral group and the 6th an
// under-represented continent item from an under-represented popularity
// group, with only a slight score gap between them, so the greedy promotes
// the 5th at eps=0 and the 6th at eps=1. Calibrated for strict demotion
// guarding (MitigationConfig::strict_demote); golden data, do not edit.
struct ToyFixture {
  ItemCatalog catalog;
  TargetDistribution targets;
  RecommendationList vanilla;
  std::size_t k = 4;
};

ToyFixture toy_fixture();

// Total continent deviation of one user's top-k against the target:
// sum over continents of |share - target|.
double topk_continent_deviation(const RecommendationList& list, const ItemCatalog& catalog,
                                const TargetDistribution& targets, std::size_t k);

// Exhaustive re-ranking oracle over all C(n, k) top-k subsets of a single
// list: minimum achievable continent deviation, and among the minimizers
// the maximum total relevance. Only for tiny instances (n <= 12, k <= 5).
struct BruteForceResult {
  std::vector<std::string> best_set;  // item ids, sorted
  double min_deviation = 0.0;
  double min_loss = 0.0;  // vanilla top-k relevance minus best relevance
};

BruteForceResult brute_force_rerank(const RecommendationList& list, const ItemCatalog& catalog,
                                    const TargetDistribution& targets, std::size_t k);

}  // namespace mfair
