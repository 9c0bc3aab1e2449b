#include "mfair/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace mfair {

const char* to_string(BiasKind kind) {
  return kind == BiasKind::visibility ? "visibility" : "exposure";
}

double position_discount(std::size_t position) {
  return 1.0 / std::log2(static_cast<double>(position) + 1.0);
}

namespace {

void check_lists(const std::vector<RecommendationList>& lists, std::size_t k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (lists.empty()) throw std::invalid_argument("no recommendation lists");
  for (const auto& list : lists) {
    if (list.entries.size() < k)
      throw std::invalid_argument("list for user '" + list.user + "' has fewer than k=" +
                                  std::to_string(k) + " entries");
  }
}

double item_weight(BiasKind kind, std::size_t position) {
  return kind == BiasKind::visibility ? 1.0 : position_discount(position);
}

}  // namespace

std::array<double, kNumContinents> continent_shares(
    const std::vector<RecommendationList>& lists, const ItemCatalog& catalog,
    std::size_t k, BiasKind kind, bool pooled) {
  check_lists(lists, k);

  std::array<double, kNumContinents> aggregate{};
  std::array<double, kNumContinents> pooled_sum{};
  double pooled_total = 0.0;

  for (const auto& list : lists) {
    std::array<double, kNumContinents> mass{};
    double user_total = 0.0;
    for (std::size_t pos = 1; pos <= k; ++pos) {
      const auto& entry = catalog.at(list.entries[pos - 1].item);
      const double w = item_weight(kind, pos);
      for (Continent c : entry.continents.values()) {
        mass[static_cast<std::size_t>(c)] += w;
        user_total += w;
      }
    }
    if (pooled) {
      for (std::size_t c = 0; c < kNumContinents; ++c) pooled_sum[c] += mass[c];
      pooled_total += user_total;
    } else {
      for (std::size_t c = 0; c < kNumContinents; ++c) aggregate[c] += mass[c] / user_total;
    }
  }

  if (pooled) {
    for (std::size_t c = 0; c < kNumContinents; ++c) aggregate[c] = pooled_sum[c] / pooled_total;
  } else {
    for (auto& v : aggregate) v /= static_cast<double>(lists.size());
  }
  return aggregate;
}

std::array<double, kNumPopGroups> popgroup_shares(
    const std::vector<RecommendationList>& lists, const ItemCatalog& catalog,
    std::size_t k, BiasKind kind) {
  check_lists(lists, k);
  const auto& sizes = catalog.group_sizes();
  for (std::size_t g = 0; g < kNumPopGroups; ++g) {
    if (sizes[g] == 0)
      throw std::runtime_error(std::string("empty popularity group ") +
                               to_string(static_cast<PopGroup>(g)));
  }

  std::array<double, kNumPopGroups> mass{};
  for (const auto& list : lists) {
    for (std::size_t pos = 1; pos <= k; ++pos) {
      const auto& entry = catalog.at(list.entries[pos - 1].item);
      mass[static_cast<std::size_t>(entry.group)] += item_weight(kind, pos);
    }
  }
  std::array<double, kNumPopGroups> shares{};
  double total = 0.0;
  for (std::size_t g = 0; g < kNumPopGroups; ++g) {
    shares[g] = mass[g] / static_cast<double>(sizes[g]);
    total += shares[g];
  }
  if (total <= 0.0) throw std::runtime_error("no popularity-group mass in top-k");
  for (auto& v : shares) v /= total;
  return shares;
}

namespace {

std::vector<BiasValue> continent_bias(const std::vector<RecommendationList>& lists,
                                      const ItemCatalog& catalog,
                                      const TargetDistribution& target, std::size_t k,
                                      BiasKind kind, bool pooled) {
  const auto actual = continent_shares(lists, catalog, k, kind, pooled);
  std::vector<BiasValue> out;
  out.reserve(catalog.active_continents().size());
  for (Continent c : catalog.active_continents()) {
    const auto i = static_cast<std::size_t>(c);
    out.push_back({to_string(c), actual[i] - target.continent[i]});
  }
  return out;
}

std::vector<BiasValue> popgroup_bias(const std::vector<RecommendationList>& lists,
                                     const ItemCatalog& catalog,
                                     const TargetDistribution& target, std::size_t k,
                                     BiasKind kind) {
  const auto actual = popgroup_shares(lists, catalog, k, kind);
  std::vector<BiasValue> out;
  out.reserve(kNumPopGroups);
  for (std::size_t g = 0; g < kNumPopGroups; ++g) {
    out.push_back({to_string(static_cast<PopGroup>(g)), actual[g] - target.popgroup[g]});
  }
  return out;
}

}  // namespace

std::vector<BiasValue> visibility_bias_continent(const std::vector<RecommendationList>& lists,
                                                 const ItemCatalog& catalog,
                                                 const TargetDistribution& target,
                                                 std::size_t k, bool pooled) {
  return continent_bias(lists, catalog, target, k, BiasKind::visibility, pooled);
}

std::vector<BiasValue> visibility_bias_popgroup(const std::vector<RecommendationList>& lists,
                                                const ItemCatalog& catalog,
                                                const TargetDistribution& target,
                                                std::size_t k) {
  return popgroup_bias(lists, catalog, target, k, BiasKind::visibility);
}

std::vector<BiasValue> exposure_bias_continent(const std::vector<RecommendationList>& lists,
                                               const ItemCatalog& catalog,
                                               const TargetDistribution& target,
                                               std::size_t k, bool pooled) {
  return continent_bias(lists, catalog, target, k, BiasKind::exposure, pooled);
}

std::vector<BiasValue> exposure_bias_popgroup(const std::vector<RecommendationList>& lists,
                                              const ItemCatalog& catalog,
                                              const TargetDistribution& target,
                                              std::size_t k) {
  return popgroup_bias(lists, catalog, target, k, BiasKind::exposure);
}

double total_bs(const std::vector<BiasValue>& values) {
  double total = 0.0;
  for (const auto& v : values) total += std::abs(v.value);
  return total;
}

double ndcg(const std::vector<RecommendationList>& lists, const InteractionSet& test,
            std::size_t k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");

  std::unordered_map<std::string, std::unordered_set<std::string>> relevant;
  for (const auto& r : test.interactions) relevant[r.user].insert(r.item);

  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& list : lists) {
    const auto it = relevant.find(list.user);
    if (it == relevant.end() || it->second.empty()) continue;

    const std::size_t depth = std::min(k, list.entries.size());
    double dcg = 0.0;
    for (std::size_t pos = 1; pos <= depth; ++pos) {
      if (it->second.count(list.entries[pos - 1].item)) dcg += position_discount(pos);
    }
    const std::size_t ideal = std::min(k, it->second.size());
    double idcg = 0.0;
    for (std::size_t pos = 1; pos <= ideal; ++pos) idcg += position_discount(pos);

    sum += dcg / idcg;
    ++counted;
  }
  if (counted == 0) throw std::runtime_error("no user has test items; NDCG undefined");
  return sum / static_cast<double>(counted);
}

double BiasReport::total(BiasKind kind, bool popularity) const {
  if (kind == BiasKind::visibility) return total_bs(popularity ? pop_vb : continent_vb);
  return total_bs(popularity ? pop_eb : continent_eb);
}

BiasReport measure(const std::vector<RecommendationList>& lists, const ItemCatalog& catalog,
                   const TargetDistribution& target, const InteractionSet& test,
                   std::size_t k) {
  BiasReport report;
  report.k = k;
  report.continent_vb = visibility_bias_continent(lists, catalog, target, k);
  report.continent_eb = exposure_bias_continent(lists, catalog, target, k);
  report.pop_vb = visibility_bias_popgroup(lists, catalog, target, k);
  report.pop_eb = exposure_bias_popgroup(lists, catalog, target, k);
  report.ndcg = ndcg(lists, test, k);
  return report;
}

}  // namespace mfair
