#include "mfair/mitigate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfair {

namespace {

// Keeps target-minus-actual deltas current across swaps. Per-user share
// vectors are cached; after a swap only the touched user is recomputed and
// the ordered reduction over users is redone, which is arithmetically
// identical to a from-scratch pass.
class DeltaTracker {
 public:
  DeltaTracker(const std::vector<RecommendationList>& lists, const ItemCatalog& catalog,
               const TargetDistribution& target, BiasKind kind, std::size_t k, bool pooled)
      : catalog_(catalog),
        target_(target),
        k_(k),
        pooled_(pooled),
        user_cont_(lists.size()),
        user_cont_total_(lists.size(), 0.0),
        user_pop_(lists.size()) {
    deltas_.bias_type = kind;
    for (std::size_t u = 0; u < lists.size(); ++u) compute_user(u, lists[u]);
    aggregate();
  }

  void refresh_user(std::size_t user_index, const RecommendationList& list) {
    compute_user(user_index, list);
    aggregate();
  }

  const GroupDeltas& deltas() const { return deltas_; }

  bool any_continent_under() const {
    for (double d : deltas_.continent) {
      if (d > 0.0) return true;
    }
    return false;
  }

 private:
  void compute_user(std::size_t u, const RecommendationList& list) {
    auto& mass = user_cont_[u];
    auto& pop = user_pop_[u];
    mass.fill(0.0);
    pop.fill(0.0);
    double total = 0.0;
    for (std::size_t pos = 1; pos <= k_; ++pos) {
      const auto& entry = catalog_.at(list.entries[pos - 1].item);
      const double w = deltas_.bias_type == BiasKind::visibility ? 1.0
                                                                 : position_discount(pos);
      for (Continent c : entry.continents.values()) {
        mass[static_cast<std::size_t>(c)] += w;
        total += w;
      }
      pop[static_cast<std::size_t>(entry.group)] += w;
    }
    user_cont_total_[u] = total;
  }

  void aggregate() {
    std::array<double, kNumContinents> cont{};
    double cont_norm = 0.0;
    std::array<double, kNumPopGroups> pop{};
    const std::size_t n_users = user_cont_.size();
    for (std::size_t u = 0; u < n_users; ++u) {
      if (pooled_) {
        for (std::size_t c = 0; c < kNumContinents; ++c) cont[c] += user_cont_[u][c];
        cont_norm += user_cont_total_[u];
      } else {
        for (std::size_t c = 0; c < kNumContinents; ++c)
          cont[c] += user_cont_[u][c] / user_cont_total_[u];
      }
      for (std::size_t g = 0; g < kNumPopGroups; ++g) pop[g] += user_pop_[u][g];
    }
    if (!pooled_) cont_norm = static_cast<double>(n_users);
    for (std::size_t c = 0; c < kNumContinents; ++c)
      deltas_.continent[c] = target_.continent[c] - cont[c] / cont_norm;

    std::array<double, kNumPopGroups> share{};
    double pop_total = 0.0;
    for (std::size_t g = 0; g < kNumPopGroups; ++g) {
      share[g] = pop[g] / static_cast<double>(catalog_.group_sizes()[g]);
      pop_total += share[g];
    }
    for (std::size_t g = 0; g < kNumPopGroups; ++g)
      deltas_.popgroup[g] = target_.popgroup[g] - share[g] / pop_total;
  }

  const ItemCatalog& catalog_;
  const TargetDistribution& target_;
  std::size_t k_;
  bool pooled_;
  std::vector<std::array<double, kNumContinents>> user_cont_;
  std::vector<double> user_cont_total_;
  std::vector<std::array<double, kNumPopGroups>> user_pop_;
  GroupDeltas deltas_;
};

}  // namespace

GroupDeltas compute_deltas(const std::vector<RecommendationList>& lists,
                           const ItemCatalog& catalog, const TargetDistribution& target,
                           BiasKind bias_type, std::size_t k, bool pooled) {
  if (lists.empty()) throw std::invalid_argument("no recommendation lists");
  for (const auto& list : lists) {
    if (list.entries.size() < k)
      throw std::invalid_argument("list for user '" + list.user + "' has fewer than k entries");
  }
  DeltaTracker tracker(lists, catalog, target, bias_type, k, pooled);
  return tracker.deltas();
}

bool is_under_represented(const std::string& item, const ItemCatalog& catalog,
                          const GroupDeltas& deltas) {
  const auto& entry = catalog.at(item);
  for (Continent c : entry.continents.values()) {
    if (deltas.continent_delta(c) > 0.0) return true;
  }
  return false;
}

CandidateSets collect_candidates(const RecommendationList& list, const ItemCatalog& catalog,
                                 const GroupDeltas& deltas, std::size_t k) {
  CandidateSets sets;
  const std::size_t n = list.entries.size();
  for (std::size_t pos = 1; pos <= n; ++pos) {
    const bool under = is_under_represented(list.entries[pos - 1].item, catalog, deltas);
    if (pos <= k && !under) {
      sets.down.push_back(pos);
    } else if (pos > k && under) {
      sets.up.push_back(pos);
    }
  }
  return sets;
}

std::vector<SwapCandidate> propose_swaps(const RecommendationList& list,
                                         const CandidateSets& sets) {
  std::vector<SwapCandidate> swaps;
  const std::size_t pairs = std::min(sets.down.size(), sets.up.size());
  swaps.reserve(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::size_t pos_up = sets.up[i];                          // highest-scoring up first
    const std::size_t pos_down = sets.down[sets.down.size() - 1 - i];  // lowest-scoring down first
    SwapCandidate swap;
    swap.user = list.user;
    swap.pos_down = pos_down;
    swap.down_item = list.entries[pos_down - 1].item;
    swap.pos_up = pos_up;
    swap.up_item = list.entries[pos_up - 1].item;
    swap.raw_loss = list.entries[pos_down - 1].score - list.entries[pos_up - 1].score;
    swap.adj_loss = swap.raw_loss;
    swaps.push_back(std::move(swap));
  }
  return swaps;
}

std::size_t add_penalty(std::vector<SwapCandidate>& swaps,
                        const std::array<double, kNumPopGroups>& pop_deltas,
                        const ItemCatalog& catalog, double eps) {
  if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("eps must lie in [0, 1]");
  if (eps == 0.0 || swaps.empty()) return 0;

  double average_loss = 0.0;
  for (const auto& swap : swaps) average_loss += std::abs(swap.raw_loss);
  average_loss /= static_cast<double>(swaps.size());

  std::size_t adjusted = 0;
  for (auto& swap : swaps) {
    const double up_delta = pop_deltas[static_cast<std::size_t>(catalog.at(swap.up_item).group)];
    const double down_delta =
        pop_deltas[static_cast<std::size_t>(catalog.at(swap.down_item).group)];
    if (up_delta > 0.0 && down_delta < 0.0) {
      swap.adj_loss = swap.raw_loss - average_loss * eps;
      ++adjusted;
    } else if (up_delta < 0.0 && down_delta > 0.0) {
      swap.adj_loss = swap.raw_loss + average_loss * eps;
      ++adjusted;
    }
  }
  return adjusted;
}

MitigationPhases phases_from_string(const std::string& name) {
  if (name == "visibility" || name == "visibility_only") return MitigationPhases::visibility_only;
  if (name == "exposure" || name == "exposure_only") return MitigationPhases::exposure_only;
  if (name == "both") return MitigationPhases::both;
  throw std::invalid_argument("unknown phases value: '" + name + "'");
}

const char* to_string(MitigationPhases phases) {
  switch (phases) {
    case MitigationPhases::visibility_only: return "visibility";
    case MitigationPhases::exposure_only: return "exposure";
    case MitigationPhases::both: return "both";
  }
  throw std::logic_error("invalid phases value");
}

void MitigationConfig::validate() const {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (k >= n) throw std::invalid_argument("k must be smaller than n");
  if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("eps must lie in [0, 1]");
}

std::size_t MitigationStats::total_applied() const {
  std::size_t total = 0;
  for (const auto& p : phases) total += p.applied_swaps;
  return total;
}

std::size_t MitigationStats::total_penalty_adjustments() const {
  std::size_t total = 0;
  for (const auto& p : phases) total += p.penalty_adjustments;
  return total;
}

std::vector<RecommendationList> mfair_phase(const std::vector<RecommendationList>& lists,
                                            const ItemCatalog& catalog,
                                            const TargetDistribution& target,
                                            BiasKind bias_type,
                                            const MitigationConfig& config,
                                            MitigationStats* stats) {
  if (config.k < 1) throw std::invalid_argument("k must be >= 1");
  if (config.eps < 0.0 || config.eps > 1.0) throw std::invalid_argument("eps must lie in [0, 1]");
  if (lists.empty()) throw std::invalid_argument("no recommendation lists");
  for (const auto& list : lists) {
    if (list.entries.size() < config.k)
      throw std::invalid_argument("list for user '" + list.user + "' has fewer than k entries");
  }

  std::vector<RecommendationList> out = lists;
  DeltaTracker tracker(out, catalog, target, bias_type, config.k, config.pooled_shares);

  PhaseStats phase;
  phase.bias_type = bias_type;

  std::vector<SwapCandidate> swaps;
  for (std::size_t u = 0; u < out.size(); ++u) {
    const auto sets = collect_candidates(out[u], catalog, tracker.deltas(), config.k);
    auto user_swaps = propose_swaps(out[u], sets);
    for (auto& swap : user_swaps) swap.user_index = u;
    swaps.insert(swaps.end(), user_swaps.begin(), user_swaps.end());
  }
  phase.candidates = swaps.size();
  phase.min_raw_loss = 0.0;
  for (std::size_t i = 0; i < swaps.size(); ++i) {
    phase.min_raw_loss =
        i == 0 ? swaps[i].raw_loss : std::min(phase.min_raw_loss, swaps[i].raw_loss);
  }

  phase.penalty_adjustments =
      add_penalty(swaps, tracker.deltas().popgroup, catalog, config.eps);

  std::sort(swaps.begin(), swaps.end(), [](const SwapCandidate& a, const SwapCandidate& b) {
    if (a.adj_loss != b.adj_loss) return a.adj_loss < b.adj_loss;
    if (a.user != b.user) return id_less(a.user, b.user);
    return a.pos_down < b.pos_down;
  });

  for (const auto& swap : swaps) {
    if (!tracker.any_continent_under()) break;
    if (!is_under_represented(swap.up_item, catalog, tracker.deltas())) {
      ++phase.discarded_swaps;
      continue;
    }
    auto& entries = out[swap.user_index].entries;
    std::swap(entries[swap.pos_down - 1], entries[swap.pos_up - 1]);
    tracker.refresh_user(swap.user_index, out[swap.user_index]);
    if (config.strict_demote &&
        is_under_represented(swap.down_item, catalog, tracker.deltas())) {
      // demotion left the demoted item's continent under-represented; undo
      std::swap(entries[swap.pos_down - 1], entries[swap.pos_up - 1]);
      tracker.refresh_user(swap.user_index, out[swap.user_index]);
      ++phase.discarded_swaps;
      continue;
    }
    ++phase.applied_swaps;
  }

  if (stats) stats->phases.push_back(phase);
  return out;
}

std::vector<RecommendationList> mitigate_two_phase(const std::vector<RecommendationList>& lists,
                                                   const ItemCatalog& catalog,
                                                   const TargetDistribution& target,
                                                   const MitigationConfig& config,
                                                   MitigationStats* stats) {
  switch (config.phases) {
    case MitigationPhases::visibility_only:
      return mfair_phase(lists, catalog, target, BiasKind::visibility, config, stats);
    case MitigationPhases::exposure_only:
      return mfair_phase(lists, catalog, target, BiasKind::exposure, config, stats);
    case MitigationPhases::both: {
      auto after_visibility =
          mfair_phase(lists, catalog, target, BiasKind::visibility, config, stats);
      return mfair_phase(after_visibility, catalog, target, BiasKind::exposure, config, stats);
    }
  }
  throw std::logic_error("invalid phases value");
}

}  // namespace mfair
