#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mfair/dataset.hpp"
#include "mfair/metrics.hpp"
#include "mfair/types.hpp"

namespace mfair {

// Gap between target and actual share per group: positive means the group
// is under-represented. Note the sign is the negation of the reported
// VB/EB metrics.
struct GroupDeltas {
  std::array<double, kNumContinents> continent{};
  std::array<double, kNumPopGroups> popgroup{};
  BiasKind bias_type = BiasKind::visibility;

  double continent_delta(Continent c) const {
    return continent[static_cast<std::size_t>(c)];
  }
  double pop_delta(PopGroup g) const { return popgroup[static_cast<std::size_t>(g)]; }
};

GroupDeltas compute_deltas(const std::vector<RecommendationList>& lists,
                           const ItemCatalog& catalog, const TargetDistribution& target,
                           BiasKind bias_type, std::size_t k, bool pooled = false);

// True iff any continent of the item has a positive delta. Eligibility is
// geographic only; popularity never decides it.
bool is_under_represented(const std::string& item, const ItemCatalog& catalog,
                          const GroupDeltas& deltas);

// Positions (1-based, in list order) of demotion and promotion candidates:
// top-k items that are not under-represented, and beyond-top-k items that
// are.
struct CandidateSets {
  std::vector<std::size_t> down;
  std::vector<std::size_t> up;
};

CandidateSets collect_candidates(const RecommendationList& list, const ItemCatalog& catalog,
                                 const GroupDeltas& deltas, std::size_t k);

// One potential exchange between a top-k item and a beyond-top-k item of
// the same user's list.
struct SwapCandidate {
  std::size_t user_index = 0;  // position of the list in the input vector
  std::string user;
  std::string down_item;
  std::size_t pos_down = 0;  // 1-based
  std::string up_item;
  std::size_t pos_up = 0;  // 1-based
  double raw_loss = 0.0;  // score(down) - score(up)
  double adj_loss = 0.0;  // after the popularity penalty
};

// Pairs the highest-scoring promotion candidate with the lowest-scoring
// demotion candidate, repeatedly, until either side runs out.
std::vector<SwapCandidate> propose_swaps(const RecommendationList& list,
                                         const CandidateSets& sets);

// Popularity penalty: shifts each swap's loss by (mean |raw_loss|) * eps
// when the swap moves mass from an over-represented popularity group to an
// under-represented one (minus) or the reverse (plus). Returns the number
// of adjusted losses; eps = 0 is the identity and never reads the deltas.
std::size_t add_penalty(std::vector<SwapCandidate>& swaps,
                        const std::array<double, kNumPopGroups>& pop_deltas,
                        const ItemCatalog& catalog, double eps);

enum class MitigationPhases : std::uint8_t { visibility_only, exposure_only, both };

MitigationPhases phases_from_string(const std::string& name);
const char* to_string(MitigationPhases phases);

struct MitigationConfig {
  std::size_t k = 20;
  std::size_t n = 150;
  double eps = 1.0;
  TargetMode target_mode = TargetMode::item_based;
  MitigationPhases phases = MitigationPhases::both;
  // Also reject a swap if the demotion would leave any continent of the
  // demoted item under-represented.
  bool strict_demote = false;
  // Sensitivity flag: pool per-user shares globally instead of averaging.
  bool pooled_shares = false;

  void validate() const;  // throws on k >= n or eps outside [0, 1]
};

struct PhaseStats {
  BiasKind bias_type = BiasKind::visibility;
  std::size_t candidates = 0;
  std::size_t applied_swaps = 0;
  std::size_t discarded_swaps = 0;
  std::size_t penalty_adjustments = 0;
  double min_raw_loss = 0.0;  // over proposed candidates; 0 when none
};

struct MitigationStats {
  std::vector<PhaseStats> phases;
  std::size_t total_applied() const;
  std::size_t total_penalty_adjustments() const;
};

// One greedy pass for a single bias type: collect candidates per user,
// apply the popularity penalty, then perform swaps in ascending adjusted
// loss while any continent stays under-represented, re-validating each
// promotion against fresh deltas.
std::vector<RecommendationList> mfair_phase(const std::vector<RecommendationList>& lists,
                                            const ItemCatalog& catalog,
                                            const TargetDistribution& target,
                                            BiasKind bias_type,
                                            const MitigationConfig& config,
                                            MitigationStats* stats = nullptr);

// Visibility phase followed by an exposure phase on its output (or a single
// phase, per config.phases).
std::vector<RecommendationList> mitigate_two_phase(const std::vector<RecommendationList>& lists,
                                                   const ItemCatalog& catalog,
                                                   const TargetDistribution& target,
                                                   const MitigationConfig& config,
                                                   MitigationStats* stats = nullptr);

}  // namespace mfair
