#pragma once

// Constructed fixture suites shared by the unit tests and the acceptance
// runner. All generators are deterministic per seed.

#include <string>
#include <vector>

#include "mfair/dataset.hpp"
#include "mfair/random.hpp"
#include "mfair/recommend.hpp"
#include "mfair/testkit.hpp"
#include "mfair/types.hpp"

namespace mfair::test {

// Fig.-3-shaped scenario with popularity-group spread among the promotion
// candidates: top-k is saturated with popular items of the dominant
// continent; just beyond the cutoff sit two under-represented-continent
// items with nearly equal scores, one popular (g1) and one long-tail (g2).
// The continent target is reachable with a single promotion per user, so
// eps decides which of the two gets in.
struct PenaltyFixture {
  ItemCatalog catalog;
  TargetDistribution targets;
  std::vector<RecommendationList> lists;
  std::size_t k = 4;
};

inline PenaltyFixture make_penalty_fixture(std::uint64_t seed) {
  Rng rng(seed, "penalty");
  PenaltyFixture fx;

  ContinentSet na, eu;
  na.insert(Continent::NA);
  eu.insert(Continent::EU);

  std::vector<CatalogEntry> entries;
  for (int i = 1; i <= 6; ++i) {
    const auto pop = static_cast<std::uint32_t>(40 - 4 * i + rng.below(3));
    entries.push_back({"n" + std::to_string(i), na, pop,
                       i <= 4 ? PopGroup::g1 : (i == 5 ? PopGroup::g2 : PopGroup::g3)});
  }
  entries.push_back({"e1", eu, 35 + static_cast<std::uint32_t>(rng.below(4)), PopGroup::g1});
  entries.push_back({"e2", eu, 2 + static_cast<std::uint32_t>(rng.below(3)), PopGroup::g2});
  fx.catalog = ItemCatalog(std::move(entries));

  fx.targets.mode = TargetMode::item_based;
  fx.targets.continent[static_cast<std::size_t>(Continent::NA)] = 0.8;
  fx.targets.continent[static_cast<std::size_t>(Continent::EU)] = 0.2;
  fx.targets.popgroup = {0.30, 0.40, 0.30};

  const std::size_t n_users = 1 + rng.below(3);
  for (std::size_t u = 0; u < n_users; ++u) {
    RecommendationList list;
    list.user = std::to_string(u + 1);
    const double jitter = 0.002 * rng.uniform();
    // raw losses: promoting e1 costs (s4 - s5) = 0.05, promoting e2 costs
    // (s3 - s6) = 0.12; the latter stays under three times the former so
    // subtracting the mean absolute loss flips the order at eps = 1.
    const double s4 = 0.60 + jitter;
    list.entries = {{"n1", 0.90 + jitter}, {"n2", 0.80 + jitter},
                    {"n3", 0.64 + jitter}, {"n4", s4},
                    {"e1", s4 - 0.05},     {"e2", s4 - 0.08},
                    {"n5", 0.40 + jitter}, {"n6", 0.30 + jitter}};
    fx.lists.push_back(std::move(list));
  }
  return fx;
}

// Tiny biased instance for the exhaustive-oracle comparison: one user,
// n <= 12 single-continent items over up to 4 continents, scores lifted
// for the dominant continent so its items crowd the top of the list.
struct TinyInstance {
  ItemCatalog catalog;
  TargetDistribution targets;
  RecommendationList list;
  std::size_t k = 3;
};

inline TinyInstance make_tiny_instance(std::uint64_t seed) {
  Rng rng(seed, "tiny");
  TinyInstance inst;

  const std::array<Continent, 4> codes = {Continent::NA, Continent::EU, Continent::AF,
                                          Continent::SA};
  inst.k = 3 + rng.below(2);                      // 3 or 4
  const std::size_t n_items = 9 + rng.below(4);   // 9..12
  const std::size_t n_minor = 1 + rng.below(2);   // 1 or 2 under-represented continents

  // Every minority needs a target share above 1/(2k) (one promotion must
  // pay off) and at most 1/k (one promotion suffices); the dominant
  // continent keeps at least k items so the vanilla top-k is pure.
  const std::size_t lo = n_items / (2 * inst.k) + 1;
  std::array<std::size_t, 4> counts{};
  std::size_t budget = n_items - inst.k;
  for (std::size_t m = 1; m <= n_minor; ++m) {
    const std::size_t reserve = lo * (n_minor - m);
    const std::size_t hi = std::min(n_items / inst.k, budget - reserve);
    counts[m] = lo + rng.below(hi - lo + 1);
    budget -= counts[m];
  }
  counts[0] = n_items - counts[1] - counts[2] - counts[3];

  std::vector<CatalogEntry> entries;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t j = 0; j < counts[c]; ++j) {
      ContinentSet cset;
      cset.insert(codes[c]);
      const auto group =
          static_cast<PopGroup>(assigned < 2 ? assigned : rng.below(kNumPopGroups));
      entries.push_back({"t" + std::to_string(++assigned), cset,
                         static_cast<std::uint32_t>(1 + rng.below(30)), group});
    }
  }
  inst.catalog = ItemCatalog(std::move(entries));

  inst.targets.mode = TargetMode::item_based;
  for (std::size_t c = 0; c < 4; ++c) {
    inst.targets.continent[static_cast<std::size_t>(codes[c])] =
        static_cast<double>(counts[c]) / static_cast<double>(n_items);
  }
  inst.targets.popgroup = {0.4, 0.35, 0.25};

  // dominant items strictly outscore the rest, so the vanilla top-k holds
  // dominant items only
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& e : inst.catalog.entries()) {
    const bool dominant = e.continents.contains(codes[0]);
    scored.push_back({e.item, rng.uniform() + (dominant ? 1.0 : 0.0)});
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return id_less(a.first, b.first);
  });
  inst.list.user = "1";
  for (const auto& [item, score] : scored) inst.list.entries.push_back({item, score});
  return inst;
}

// Multi-user synthetic world where popularity and the dominant continent
// correlate, so a popularity recommender produces both geographic and
// popularity bias. Continents are assigned by popularity rank, not
// sampled, to pin the correlation.
struct BiasedWorld {
  InteractionSet train;
  InteractionSet test;
  ItemCatalog catalog;
  TargetDistribution targets;
  std::vector<RecommendationList> lists;  // most_popular top-n
  // n is deep enough that every list reaches past the popular NA block
  // into promotable under-represented items
  std::size_t n = 30;
  std::size_t k = 5;
};

inline BiasedWorld make_biased_world(std::uint64_t seed,
                                     TargetMode mode = TargetMode::item_based) {
  SynthSpec spec;
  spec.n_users = 40;
  spec.n_items = 100;
  spec.continent_weights[Continent::NA] = 1.0;  // overwritten below
  spec.popularity_skew = 1.0;
  spec.seed = seed;
  spec.ratings_per_user = 6;
  SynthData data = synth_dataset(spec);

  // item "1" is the most-drawn item; hand the popular block to NA. Light
  // per-user saturation keeps the popular items recommendable despite the
  // seen-item exclusion.
  data.continents.clear();
  for (std::size_t i = 1; i <= spec.n_items; ++i) {
    ContinentSet cset;
    if (i <= 40) cset.insert(Continent::NA);
    else if (i <= 70) cset.insert(Continent::EU);
    else if (i <= 85) cset.insert(Continent::AF);
    else cset.insert(Continent::SA);
    data.continents.emplace(std::to_string(i), cset);
  }

  BiasedWorld world;
  auto split = split_train_test(data.interactions, 0.8, seed);
  world.train = std::move(split.first);
  world.test = std::move(split.second);
  world.catalog = build_catalog(world.train, data.continents);
  world.targets = make_targets(world.train, world.catalog, mode);
  world.lists = most_popular(world.train, world.catalog, world.n);
  return world;
}

}  // namespace mfair::test
