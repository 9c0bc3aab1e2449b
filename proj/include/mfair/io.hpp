#pragma once

#include <string>
#include <vector>

#include "mfair/types.hpp"

namespace mfair {

// Interchange format for recommendation lists:
// `user<TAB>rank<TAB>item<TAB>score`, rank starting at 1.
void write_lists_tsv(const std::vector<RecommendationList>& lists, const std::string& path);
std::vector<RecommendationList> read_lists_tsv(const std::string& path);

void write_interactions_tsv(const InteractionSet& set, const std::string& path);

}  // namespace mfair
