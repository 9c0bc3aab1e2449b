#include "mfair/testkit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "mfair/random.hpp"

namespace mfair {

SynthData synth_dataset(const SynthSpec& spec) {
  if (spec.n_users < 1 || spec.n_items < 10)
    throw std::invalid_argument("need at least 1 user and 10 items");
  if (spec.ratings_per_user < 1 || spec.ratings_per_user > spec.n_items)
    throw std::invalid_argument("ratings_per_user must lie in [1, n_items]");
  double wsum = 0.0;
  for (const auto& [c, w] : spec.continent_weights) {
    if (w < 0.0) throw std::invalid_argument("negative continent weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("continent weights must sum to 1");

  SynthData data;
  data.interactions.split = Split::all;

  // Continent per item, sampled from the weights.
  Rng cont_rng(spec.seed, "continents");
  std::vector<std::string> items(spec.n_items);
  for (std::size_t j = 0; j < spec.n_items; ++j) {
    items[j] = std::to_string(j + 1);
    const double u = cont_rng.uniform();
    double acc = 0.0;
    Continent chosen = spec.continent_weights.rbegin()->first;
    for (const auto& [c, w] : spec.continent_weights) {
      acc += w;
      if (u < acc) {
        chosen = c;
        break;
      }
    }
    ContinentSet cs;
    cs.insert(chosen);
    data.continents.emplace(items[j], cs);
  }

  // Item draw weights: rank^(-skew) over the item index order.
  std::vector<double> weight(spec.n_items);
  double wtotal = 0.0;
  for (std::size_t j = 0; j < spec.n_items; ++j) {
    weight[j] = std::pow(static_cast<double>(j + 1), -spec.popularity_skew);
    wtotal += weight[j];
  }

  Rng rate_rng(spec.seed, "ratings");
  for (std::size_t u = 0; u < spec.n_users; ++u) {
    const std::string user = std::to_string(u + 1);
    std::set<std::size_t> chosen;
    while (chosen.size() < spec.ratings_per_user) {
      const double x = rate_rng.uniform() * wtotal;
      double acc = 0.0;
      std::size_t pick = spec.n_items - 1;
      for (std::size_t j = 0; j < spec.n_items; ++j) {
        acc += weight[j];
        if (x < acc) {
          pick = j;
          break;
        }
      }
      chosen.insert(pick);
    }
    for (std::size_t j : chosen) {
      const double rating = 1.0 + static_cast<double>(rate_rng.below(5));
      data.interactions.interactions.push_back({user, items[j], rating});
    }
  }
  return data;
}

ToyFixture toy_fixture() {
  ToyFixture toy;

  ContinentSet na, eu, af, sa, as;
  na.insert(Continent::NA);
  eu.insert(Continent::EU);
  af.insert(Continent::AF);
  sa.insert(Continent::SA);
  as.insert(Continent::AS);

  // Continent mix: NA x3, EU x2, AF/SA/AS x1 each. Groups are pinned by
  // hand (this scenario predates the 10% rule on purpose): the promotable
  // 5th entry sits in the saturated group g1, the 6th in the
  // under-represented g2.
  std::vector<CatalogEntry> entries = {
      {"I1", na, 20, PopGroup::g1}, {"I2", na, 1, PopGroup::g3},
      {"I3", eu, 9, PopGroup::g2},  {"I4", af, 5, PopGroup::g2},
      {"I5", sa, 4, PopGroup::g2},  {"I6", na, 16, PopGroup::g1},
      {"I7", eu, 12, PopGroup::g1}, {"I8", as, 3, PopGroup::g2},
  };
  toy.catalog = ItemCatalog(std::move(entries));

  toy.targets.mode = TargetMode::rating_based;
  toy.targets.continent[static_cast<std::size_t>(Continent::NA)] = 0.45;
  toy.targets.continent[static_cast<std::size_t>(Continent::EU)] = 0.37;
  toy.targets.continent[static_cast<std::size_t>(Continent::SA)] = 0.12;
  toy.targets.continent[static_cast<std::size_t>(Continent::AF)] = 0.04;
  toy.targets.continent[static_cast<std::size_t>(Continent::AS)] = 0.02;
  toy.targets.popgroup = {0.30, 0.35, 0.35};
  toy.targets.validate();

  toy.vanilla.user = "4";
  toy.vanilla.entries = {{"I2", 0.90}, {"I6", 0.84}, {"I3", 0.83},
                         {"I1", 0.82}, {"I7", 0.79}, {"I5", 0.78}};
  toy.k = 4;
  return toy;
}

double topk_continent_deviation(const RecommendationList& list, const ItemCatalog& catalog,
                                const TargetDistribution& targets, std::size_t k) {
  if (list.entries.size() < k) throw std::invalid_argument("list shorter than k");
  std::array<double, kNumContinents> mass{};
  double total = 0.0;
  for (std::size_t pos = 0; pos < k; ++pos) {
    for (Continent c : catalog.at(list.entries[pos].item).continents.values()) {
      mass[static_cast<std::size_t>(c)] += 1.0;
      total += 1.0;
    }
  }
  double dev = 0.0;
  for (std::size_t c = 0; c < kNumContinents; ++c)
    dev += std::abs(mass[c] / total - targets.continent[c]);
  return dev;
}

namespace {

struct SubsetScore {
  double deviation = 0.0;
  double relevance = 0.0;
  std::vector<std::string> items;  // sorted by id
};

SubsetScore score_subset(const RecommendationList& list, const std::vector<std::size_t>& picks,
                         const ItemCatalog& catalog, const TargetDistribution& targets) {
  SubsetScore s;
  s.items.reserve(picks.size());
  for (std::size_t idx : picks) s.items.push_back(list.entries[idx].item);
  std::sort(s.items.begin(), s.items.end(), id_less);

  // Accumulate in id-sorted order so the result is independent of the
  // candidate enumeration order.
  std::array<double, kNumContinents> mass{};
  double total = 0.0;
  for (const auto& item : s.items) {
    for (Continent c : catalog.at(item).continents.values()) {
      mass[static_cast<std::size_t>(c)] += 1.0;
      total += 1.0;
    }
    for (std::size_t idx : picks) {
      if (list.entries[idx].item == item) {
        s.relevance += list.entries[idx].score;
        break;
      }
    }
  }
  for (std::size_t c = 0; c < kNumContinents; ++c)
    s.deviation += std::abs(mass[c] / total - targets.continent[c]);
  return s;
}

}  // namespace

BruteForceResult brute_force_rerank(const RecommendationList& list, const ItemCatalog& catalog,
                                    const TargetDistribution& targets, std::size_t k) {
  const std::size_t n = list.entries.size();
  if (k < 1 || k > n) throw std::invalid_argument("need 1 <= k <= list length");
  if (n > 12 || k > 5)
    throw std::invalid_argument("instance too large for exhaustive enumeration");

  // Vanilla top-k relevance, in id-sorted order for exact reproducibility.
  std::vector<std::size_t> vanilla(k);
  for (std::size_t i = 0; i < k; ++i) vanilla[i] = i;
  const SubsetScore vanilla_score = score_subset(list, vanilla, catalog, targets);

  BruteForceResult best;
  bool first = true;
  double best_relevance = 0.0;

  std::vector<std::size_t> picks(k);
  for (std::size_t i = 0; i < k; ++i) picks[i] = i;
  for (;;) {
    const SubsetScore s = score_subset(list, picks, catalog, targets);
    const bool better =
        first || s.deviation < best.min_deviation ||
        (s.deviation == best.min_deviation &&
         (s.relevance > best_relevance ||
          (s.relevance == best_relevance &&
           std::lexicographical_compare(s.items.begin(), s.items.end(), best.best_set.begin(),
                                        best.best_set.end(), id_less))));
    if (better) {
      best.min_deviation = s.deviation;
      best_relevance = s.relevance;
      best.best_set = s.items;
      first = false;
    }
    // next k-combination of {0..n-1}
    std::size_t i = k;
    while (i > 0 && picks[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++picks[i - 1];
    for (std::size_t j = i; j < k; ++j) picks[j] = picks[j - 1] + 1;
  }

  best.min_loss = vanilla_score.relevance - best_relevance;
  return best;
}

}  // namespace mfair
