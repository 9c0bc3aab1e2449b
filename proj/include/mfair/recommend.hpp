#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mfair/dataset.hpp"
#include "mfair/types.hpp"

namespace mfair {

enum class Algorithm : std::uint8_t { mostpop, random, userknn, itemknn, biasedmf, bpr };

Algorithm algorithm_from_string(const std::string& name);
const char* to_string(Algorithm algo);

// Per-epoch training diagnostics for the model-based recommenders.
struct TrainReport {
  std::vector<double> epoch_rmse;  // biased_mf: train RMSE after each epoch
  std::vector<double> epoch_loss;  // bpr: mean pairwise loss per epoch
  double auc = 0.0;                // bpr: held-out pairwise AUC
};

// All recommenders score catalog items only (items without continent data
// never enter a list), exclude the user's training profile, sort by
// (score desc, item id asc) and cut to n. One list per training user, in
// user id order.

std::vector<RecommendationList> most_popular(const InteractionSet& train,
                                             const ItemCatalog& catalog, std::size_t n);

std::vector<RecommendationList> random_guess(const InteractionSet& train,
                                             const ItemCatalog& catalog, std::size_t n,
                                             std::uint64_t seed);

enum class KnnMode : std::uint8_t { user, item };

// Mean-centered cosine between two users' (or two items') rating vectors,
// the similarity the neighborhood models rank by. Zero when there is no
// co-rated support or a vector is constant.
double user_cosine(const InteractionSet& train, const std::string& user_a,
                   const std::string& user_b);
double item_cosine(const InteractionSet& train, const std::string& item_a,
                   const std::string& item_b);

// Neighborhood model: cosine similarity on mean-centered rating vectors,
// prediction = similarity-weighted average of neighbor ratings over the
// k_neighbors most similar raters (user mode) or rated items (item mode)
// with positive similarity. Items without scoring evidence are omitted;
// popularity_backfill pads such lists with popular unseen items scored
// below every prediction.
std::vector<RecommendationList> knn(const InteractionSet& train, const ItemCatalog& catalog,
                                    KnnMode mode, std::size_t k_neighbors, std::size_t n,
                                    bool popularity_backfill = false);

// Biased matrix factorization r = mu + b_u + b_i + p.q trained with
// squared-error SGD. Throws on divergence (non-finite loss).
std::vector<RecommendationList> biased_mf(const InteractionSet& train,
                                          const ItemCatalog& catalog, std::size_t factors,
                                          double lr, double reg, std::size_t epochs,
                                          std::uint64_t seed, std::size_t n,
                                          TrainReport* report = nullptr);

// Bayesian personalized ranking on sampled (user, positive, negative)
// triples with sigmoid pairwise loss; scores are p.q.
std::vector<RecommendationList> bpr(const InteractionSet& train, const ItemCatalog& catalog,
                                    std::size_t factors, double lr, double reg,
                                    std::size_t epochs, std::uint64_t seed, std::size_t n,
                                    TrainReport* report = nullptr);

// Pairwise BPR objective for one (user, positive, negative) triple:
// -ln sigmoid(p.(qi - qj)) + (reg/2) * (|p|^2 + |qi|^2 + |qj|^2).
// Exposed so the gradient can be checked against finite differences.
double bpr_pair_loss(std::span<const double> pu, std::span<const double> qi,
                     std::span<const double> qj, double reg);
void bpr_pair_grad(std::span<const double> pu, std::span<const double> qi,
                   std::span<const double> qj, double reg, std::span<double> grad_pu,
                   std::span<double> grad_qi, std::span<double> grad_qj);

}  // namespace mfair
