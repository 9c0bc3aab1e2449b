#include "mfair/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "mfair/random.hpp"

namespace mfair {

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "mostpop") return Algorithm::mostpop;
  if (name == "random") return Algorithm::random;
  if (name == "userknn") return Algorithm::userknn;
  if (name == "itemknn") return Algorithm::itemknn;
  if (name == "biasedmf") return Algorithm::biasedmf;
  if (name == "bpr") return Algorithm::bpr;
  throw std::invalid_argument("unknown algorithm: '" + name + "'");
}

const char* to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::mostpop: return "mostpop";
    case Algorithm::random: return "random";
    case Algorithm::userknn: return "userknn";
    case Algorithm::itemknn: return "itemknn";
    case Algorithm::biasedmf: return "biasedmf";
    case Algorithm::bpr: return "bpr";
  }
  throw std::logic_error("invalid algorithm value");
}

namespace {

// Dense user/item index over the training data. Users and items are kept
// in id order, so an index comparison doubles as the id tie-break.
struct Interned {
  std::vector<std::string> users;
  std::vector<std::string> items;
  std::unordered_map<std::string, std::size_t> item_index;
  std::vector<std::vector<std::pair<std::size_t, double>>> by_user;  // (item, rating)
  std::vector<std::vector<std::pair<std::size_t, double>>> by_item;  // (user, rating)
  std::vector<char> in_catalog;
  std::size_t n_ratings = 0;
};

Interned intern(const InteractionSet& train, const ItemCatalog& catalog) {
  if (train.empty()) throw std::invalid_argument("empty training data");

  std::map<std::string, std::vector<std::size_t>, IdLess> users;  // interaction indexes
  std::map<std::string, std::size_t, IdLess> items;
  for (std::size_t r = 0; r < train.interactions.size(); ++r) {
    users[train.interactions[r].user].push_back(r);
    items.emplace(train.interactions[r].item, 0);
  }

  Interned ix;
  ix.n_ratings = train.interactions.size();
  ix.items.reserve(items.size());
  for (auto& [item, idx] : items) {
    idx = ix.items.size();
    ix.items.push_back(item);
    ix.item_index.emplace(item, idx);
    ix.in_catalog.push_back(catalog.contains(item) ? 1 : 0);
  }
  ix.by_item.resize(ix.items.size());

  ix.users.reserve(users.size());
  ix.by_user.resize(users.size());
  for (auto& [user, recs] : users) {
    const std::size_t u = ix.users.size();
    ix.users.push_back(user);
    for (std::size_t r : recs) {
      const std::size_t i = items[train.interactions[r].item];
      ix.by_user[u].push_back({i, train.interactions[r].rating});
      ix.by_item[i].push_back({u, train.interactions[r].rating});
    }
  }
  return ix;
}

std::vector<char> seen_mask(const Interned& ix, std::size_t u) {
  std::vector<char> seen(ix.items.size(), 0);
  for (const auto& [i, r] : ix.by_user[u]) seen[i] = 1;
  return seen;
}

// (item index, score) pairs -> list sorted by (score desc, id asc), cut to n.
RecommendationList build_list(const Interned& ix, std::size_t u,
                              std::vector<std::pair<std::size_t, double>>& scored,
                              std::size_t n) {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (scored.size() > n) scored.resize(n);
  RecommendationList list;
  list.user = ix.users[u];
  list.entries.reserve(scored.size());
  for (const auto& [i, s] : scored) list.entries.push_back({ix.items[i], s});
  return list;
}

}  // namespace

std::vector<RecommendationList> most_popular(const InteractionSet& train,
                                             const ItemCatalog& catalog, std::size_t n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const Interned ix = intern(train, catalog);

  // Catalog items ranked once by (popularity desc, id asc).
  std::vector<std::pair<std::size_t, double>> ranked;
  for (std::size_t i = 0; i < ix.items.size(); ++i) {
    if (ix.in_catalog[i])
      ranked.push_back({i, static_cast<double>(catalog.at(ix.items[i]).popularity)});
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::vector<RecommendationList> lists;
  lists.reserve(ix.users.size());
  for (std::size_t u = 0; u < ix.users.size(); ++u) {
    const auto seen = seen_mask(ix, u);
    RecommendationList list;
    list.user = ix.users[u];
    for (const auto& [i, pop] : ranked) {
      if (seen[i]) continue;
      list.entries.push_back({ix.items[i], pop});
      if (list.entries.size() == n) break;
    }
    lists.push_back(std::move(list));
  }
  return lists;
}

std::vector<RecommendationList> random_guess(const InteractionSet& train,
                                             const ItemCatalog& catalog, std::size_t n,
                                             std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const Interned ix = intern(train, catalog);

  std::vector<RecommendationList> lists;
  lists.reserve(ix.users.size());
  for (std::size_t u = 0; u < ix.users.size(); ++u) {
    Rng rng(seed, "random:" + ix.users[u]);
    const auto seen = seen_mask(ix, u);
    std::vector<std::pair<std::size_t, double>> scored;
    for (std::size_t i = 0; i < ix.items.size(); ++i) {
      if (!ix.in_catalog[i] || seen[i]) continue;
      scored.push_back({i, rng.uniform()});
    }
    lists.push_back(build_list(ix, u, scored, n));
  }
  return lists;
}

namespace {

struct CenteredProfile {
  std::vector<double> mean;  // per row (user or item)
  std::vector<double> norm;  // Euclidean norm of the centered vector
};

CenteredProfile center_rows(const std::vector<std::vector<std::pair<std::size_t, double>>>& rows) {
  CenteredProfile p;
  p.mean.resize(rows.size(), 0.0);
  p.norm.resize(rows.size(), 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    double sum = 0.0;
    for (const auto& [c, v] : rows[r]) sum += v;
    p.mean[r] = sum / static_cast<double>(rows[r].size());
    double sq = 0.0;
    for (const auto& [c, v] : rows[r]) {
      const double d = v - p.mean[r];
      sq += d * d;
    }
    p.norm[r] = std::sqrt(sq);
  }
  return p;
}

// Weighted average of the k most similar raters with positive similarity;
// returns false when there is no evidence.
bool neighborhood_predict(std::vector<std::tuple<double, std::size_t, double>>& pool,
                          std::size_t k_neighbors, double* out) {
  if (pool.empty()) return false;
  std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::get<1>(a) < std::get<1>(b);
  });
  if (pool.size() > k_neighbors) pool.resize(k_neighbors);
  double wsum = 0.0, acc = 0.0;
  for (const auto& [sim, idx, rating] : pool) {
    wsum += sim;
    acc += sim * rating;
  }
  if (wsum <= 0.0) return false;
  *out = acc / wsum;
  return true;
}

void backfill(const Interned& ix, const ItemCatalog& catalog, const std::vector<char>& seen,
              const std::unordered_set<std::size_t>& already, std::size_t n,
              RecommendationList* list) {
  // Padding scores stay below every rating-scale prediction and order by
  // popularity with the id tie-break.
  std::vector<std::pair<std::size_t, double>> pool;
  double max_pop = 0.0;
  for (std::size_t i = 0; i < ix.items.size(); ++i) {
    if (!ix.in_catalog[i] || seen[i] || already.count(i)) continue;
    const double pop = static_cast<double>(catalog.at(ix.items[i]).popularity);
    max_pop = std::max(max_pop, pop);
    pool.push_back({i, pop});
  }
  std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (const auto& [i, pop] : pool) {
    if (list->entries.size() >= n) break;
    list->entries.push_back({ix.items[i], 0.5 * pop / (max_pop + 1.0)});
  }
}

}  // namespace

namespace {

double centered_cosine(const std::map<std::string, double>& a,
                       const std::map<std::string, double>& b) {
  const auto mean_of = [](const std::map<std::string, double>& v) {
    double sum = 0.0;
    for (const auto& [key, value] : v) sum += value;
    return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
  };
  const double mean_a = mean_of(a);
  const double mean_b = mean_of(b);
  double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
  for (const auto& [key, value] : a) norm_a += (value - mean_a) * (value - mean_a);
  for (const auto& [key, value] : b) norm_b += (value - mean_b) * (value - mean_b);
  for (const auto& [key, value] : a) {
    const auto it = b.find(key);
    if (it != b.end()) dot += (value - mean_a) * (it->second - mean_b);
  }
  const double denom = std::sqrt(norm_a) * std::sqrt(norm_b);
  return denom > 0.0 ? dot / denom : 0.0;
}

}  // namespace

double user_cosine(const InteractionSet& train, const std::string& user_a,
                   const std::string& user_b) {
  std::map<std::string, double> a, b;
  for (const auto& r : train.interactions) {
    if (r.user == user_a) a[r.item] = r.rating;
    if (r.user == user_b) b[r.item] = r.rating;
  }
  return centered_cosine(a, b);
}

double item_cosine(const InteractionSet& train, const std::string& item_a,
                   const std::string& item_b) {
  std::map<std::string, double> a, b;
  for (const auto& r : train.interactions) {
    if (r.item == item_a) a[r.user] = r.rating;
    if (r.item == item_b) b[r.user] = r.rating;
  }
  return centered_cosine(a, b);
}

std::vector<RecommendationList> knn(const InteractionSet& train, const ItemCatalog& catalog,
                                    KnnMode mode, std::size_t k_neighbors, std::size_t n,
                                    bool popularity_backfill) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (k_neighbors < 1) throw std::invalid_argument("k_neighbors must be >= 1");
  const Interned ix = intern(train, catalog);

  std::vector<RecommendationList> lists;
  lists.reserve(ix.users.size());

  if (mode == KnnMode::user) {
    const CenteredProfile prof = center_rows(ix.by_user);
    for (std::size_t u = 0; u < ix.users.size(); ++u) {
      // cosine(u, v) over co-rated items, accumulated via the item lists
      std::vector<double> sims(ix.users.size(), 0.0);
      for (const auto& [i, r] : ix.by_user[u]) {
        const double cu = r - prof.mean[u];
        for (const auto& [v, rv] : ix.by_item[i]) {
          if (v == u) continue;
          sims[v] += cu * (rv - prof.mean[v]);
        }
      }
      for (std::size_t v = 0; v < sims.size(); ++v) {
        const double denom = prof.norm[u] * prof.norm[v];
        sims[v] = denom > 0.0 ? sims[v] / denom : 0.0;
      }

      const auto seen = seen_mask(ix, u);
      std::vector<std::pair<std::size_t, double>> scored;
      std::vector<std::tuple<double, std::size_t, double>> pool;
      for (std::size_t i = 0; i < ix.items.size(); ++i) {
        if (!ix.in_catalog[i] || seen[i]) continue;
        pool.clear();
        for (const auto& [v, rv] : ix.by_item[i]) {
          if (v != u && sims[v] > 0.0) pool.push_back({sims[v], v, rv});
        }
        double pred;
        if (neighborhood_predict(pool, k_neighbors, &pred)) scored.push_back({i, pred});
      }
      auto list = build_list(ix, u, scored, n);
      if (popularity_backfill && list.entries.size() < n) {
        std::unordered_set<std::size_t> already;
        for (const auto& [i, s] : scored) already.insert(i);
        backfill(ix, catalog, seen, already, n, &list);
      }
      lists.push_back(std::move(list));
    }
    return lists;
  }

  // item mode: similarities between co-rated item pairs
  const CenteredProfile prof = center_rows(ix.by_item);
  std::unordered_map<std::uint64_t, double> dot;
  for (std::size_t u = 0; u < ix.users.size(); ++u) {
    const auto& row = ix.by_user[u];
    for (std::size_t a = 0; a < row.size(); ++a) {
      const double ca = row[a].second - prof.mean[row[a].first];
      for (std::size_t b = a + 1; b < row.size(); ++b) {
        const double cb = row[b].second - prof.mean[row[b].first];
        std::uint64_t lo = row[a].first, hi = row[b].first;
        if (lo > hi) std::swap(lo, hi);
        dot[lo * ix.items.size() + hi] += ca * cb;
      }
    }
  }
  const auto item_sim = [&](std::size_t i, std::size_t j) -> double {
    std::uint64_t lo = i, hi = j;
    if (lo > hi) std::swap(lo, hi);
    const auto it = dot.find(lo * ix.items.size() + hi);
    if (it == dot.end()) return 0.0;
    const double denom = prof.norm[i] * prof.norm[j];
    return denom > 0.0 ? it->second / denom : 0.0;
  };

  for (std::size_t u = 0; u < ix.users.size(); ++u) {
    const auto seen = seen_mask(ix, u);
    std::vector<std::pair<std::size_t, double>> scored;
    std::vector<std::tuple<double, std::size_t, double>> pool;
    for (std::size_t i = 0; i < ix.items.size(); ++i) {
      if (!ix.in_catalog[i] || seen[i]) continue;
      pool.clear();
      for (const auto& [j, ruj] : ix.by_user[u]) {
        const double s = item_sim(i, j);
        if (s > 0.0) pool.push_back({s, j, ruj});
      }
      double pred;
      if (neighborhood_predict(pool, k_neighbors, &pred)) scored.push_back({i, pred});
    }
    auto list = build_list(ix, u, scored, n);
    if (popularity_backfill && list.entries.size() < n) {
      std::unordered_set<std::size_t> already;
      for (const auto& [i, s] : scored) already.insert(i);
      backfill(ix, catalog, seen, already, n, &list);
    }
    lists.push_back(std::move(list));
  }
  return lists;
}

namespace {

struct FactorModel {
  std::size_t factors = 0;
  double mu = 0.0;
  std::vector<double> user_bias, item_bias;
  std::vector<double> p, q;  // row-major [index * factors + f]

  double dot(std::size_t u, std::size_t i) const {
    double s = 0.0;
    for (std::size_t f = 0; f < factors; ++f) s += p[u * factors + f] * q[i * factors + f];
    return s;
  }
};

FactorModel init_model(std::size_t n_users, std::size_t n_items, std::size_t factors,
                       double mu, std::uint64_t seed, const std::string& salt) {
  FactorModel m;
  m.factors = factors;
  m.mu = mu;
  m.user_bias.assign(n_users, 0.0);
  m.item_bias.assign(n_items, 0.0);
  m.p.resize(n_users * factors);
  m.q.resize(n_items * factors);
  Rng rng(seed, salt);
  for (auto& v : m.p) v = 0.1 * rng.normal();
  for (auto& v : m.q) v = 0.1 * rng.normal();
  return m;
}

}  // namespace

std::vector<RecommendationList> biased_mf(const InteractionSet& train,
                                          const ItemCatalog& catalog, std::size_t factors,
                                          double lr, double reg, std::size_t epochs,
                                          std::uint64_t seed, std::size_t n,
                                          TrainReport* report) {
  if (factors < 1) throw std::invalid_argument("factors must be >= 1");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const Interned ix = intern(train, catalog);

  // flat record list for the SGD loop
  struct Record {
    std::size_t u, i;
    double r;
  };
  std::vector<Record> records;
  records.reserve(ix.n_ratings);
  double mu = 0.0;
  for (std::size_t u = 0; u < ix.users.size(); ++u) {
    for (const auto& [i, r] : ix.by_user[u]) {
      records.push_back({u, i, r});
      mu += r;
    }
  }
  mu /= static_cast<double>(records.size());

  FactorModel model = init_model(ix.users.size(), ix.items.size(), factors, mu, seed, "mf:init");

  std::vector<std::size_t> order(records.size());
  for (std::size_t r = 0; r < order.size(); ++r) order[r] = r;
  Rng shuffle_rng(seed, "mf:order");

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::size_t r : order) {
      const auto& rec = records[r];
      const double pred = model.mu + model.user_bias[rec.u] + model.item_bias[rec.i] +
                          model.dot(rec.u, rec.i);
      const double e = rec.r - pred;
      model.user_bias[rec.u] += lr * (e - reg * model.user_bias[rec.u]);
      model.item_bias[rec.i] += lr * (e - reg * model.item_bias[rec.i]);
      for (std::size_t f = 0; f < factors; ++f) {
        const double pu = model.p[rec.u * factors + f];
        const double qi = model.q[rec.i * factors + f];
        model.p[rec.u * factors + f] += lr * (e * qi - reg * pu);
        model.q[rec.i * factors + f] += lr * (e * pu - reg * qi);
      }
    }
    double sq = 0.0;
    for (const auto& rec : records) {
      const double pred = model.mu + model.user_bias[rec.u] + model.item_bias[rec.i] +
                          model.dot(rec.u, rec.i);
      sq += (rec.r - pred) * (rec.r - pred);
    }
    const double rmse = std::sqrt(sq / static_cast<double>(records.size()));
    if (!std::isfinite(rmse))
      throw std::runtime_error("biased_mf diverged at epoch " + std::to_string(epoch + 1) +
                               " (non-finite training loss); lower the learning rate");
    if (report) report->epoch_rmse.push_back(rmse);
  }

  std::vector<RecommendationList> lists;
  lists.reserve(ix.users.size());
  for (std::size_t u = 0; u < ix.users.size(); ++u) {
    const auto seen = seen_mask(ix, u);
    std::vector<std::pair<std::size_t, double>> scored;
    for (std::size_t i = 0; i < ix.items.size(); ++i) {
      if (!ix.in_catalog[i] || seen[i]) continue;
      scored.push_back({i, model.mu + model.user_bias[u] + model.item_bias[i] + model.dot(u, i)});
    }
    lists.push_back(build_list(ix, u, scored, n));
  }
  return lists;
}

double bpr_pair_loss(std::span<const double> pu, std::span<const double> qi,
                     std::span<const double> qj, double reg) {
  double x = 0.0, np = 0.0, ni = 0.0, nj = 0.0;
  for (std::size_t f = 0; f < pu.size(); ++f) {
    x += pu[f] * (qi[f] - qj[f]);
    np += pu[f] * pu[f];
    ni += qi[f] * qi[f];
    nj += qj[f] * qj[f];
  }
  const double sigma = 1.0 / (1.0 + std::exp(-x));
  return -std::log(sigma) + 0.5 * reg * (np + ni + nj);
}

void bpr_pair_grad(std::span<const double> pu, std::span<const double> qi,
                   std::span<const double> qj, double reg, std::span<double> grad_pu,
                   std::span<double> grad_qi, std::span<double> grad_qj) {
  double x = 0.0;
  for (std::size_t f = 0; f < pu.size(); ++f) x += pu[f] * (qi[f] - qj[f]);
  const double sigma = 1.0 / (1.0 + std::exp(-x));
  const double g = 1.0 - sigma;
  for (std::size_t f = 0; f < pu.size(); ++f) {
    grad_pu[f] = -g * (qi[f] - qj[f]) + reg * pu[f];
    grad_qi[f] = -g * pu[f] + reg * qi[f];
    grad_qj[f] = g * pu[f] + reg * qj[f];
  }
}

std::vector<RecommendationList> bpr(const InteractionSet& train, const ItemCatalog& catalog,
                                    std::size_t factors, double lr, double reg,
                                    std::size_t epochs, std::uint64_t seed, std::size_t n,
                                    TrainReport* report) {
  if (factors < 1) throw std::invalid_argument("factors must be >= 1");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const Interned ix = intern(train, catalog);
  const std::size_t n_items = ix.items.size();

  // Positive sets; one positive per user (when they have several) is held
  // out of the SGD stream to score a pairwise AUC afterwards.
  std::vector<std::vector<std::size_t>> positives(ix.users.size());
  std::vector<std::unordered_set<std::size_t>> seen_sets(ix.users.size());
  for (std::size_t u = 0; u < ix.users.size(); ++u) {
    for (const auto& [i, r] : ix.by_user[u]) {
      positives[u].push_back(i);
      seen_sets[u].insert(i);
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> holdout;  // (user, item)
  Rng holdout_rng(seed, "bpr:holdout");
  std::vector<std::size_t> trainable;
  for (std::size_t u = 0; u < ix.users.size(); ++u) {
    if (positives[u].size() >= 2 && seen_sets[u].size() < n_items) {
      const std::size_t pick = static_cast<std::size_t>(holdout_rng.below(positives[u].size()));
      holdout.push_back({u, positives[u][pick]});
      positives[u].erase(positives[u].begin() + static_cast<std::ptrdiff_t>(pick));
    }
    if (!positives[u].empty() && seen_sets[u].size() < n_items) trainable.push_back(u);
  }
  if (trainable.empty()) throw std::runtime_error("bpr: no user has a sampleable negative");

  FactorModel model = init_model(ix.users.size(), n_items, factors, 0.0, seed, "bpr:init");

  Rng sample_rng(seed, "bpr:sample");
  const std::size_t samples_per_epoch = ix.n_ratings;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    double loss_sum = 0.0;
    for (std::size_t s = 0; s < samples_per_epoch; ++s) {
      const std::size_t u = trainable[sample_rng.below(trainable.size())];
      const std::size_t i = positives[u][sample_rng.below(positives[u].size())];
      std::size_t j = 0;
      do {
        j = static_cast<std::size_t>(sample_rng.below(n_items));
      } while (seen_sets[u].count(j));

      const double x = model.dot(u, i) - model.dot(u, j);
      const double sigma = 1.0 / (1.0 + std::exp(-x));
      const double g = 1.0 - sigma;
      double np = 0.0, ni = 0.0, nj = 0.0;
      for (std::size_t f = 0; f < factors; ++f) {
        const double pu = model.p[u * factors + f];
        const double qi = model.q[i * factors + f];
        const double qj = model.q[j * factors + f];
        np += pu * pu;
        ni += qi * qi;
        nj += qj * qj;
        model.p[u * factors + f] += lr * (g * (qi - qj) - reg * pu);
        model.q[i * factors + f] += lr * (g * pu - reg * qi);
        model.q[j * factors + f] += lr * (-g * pu - reg * qj);
      }
      loss_sum += -std::log(sigma) + 0.5 * reg * (np + ni + nj);
    }
    const double mean_loss = loss_sum / static_cast<double>(samples_per_epoch);
    if (!std::isfinite(mean_loss))
      throw std::runtime_error("bpr diverged at epoch " + std::to_string(epoch + 1) +
                               " (non-finite pairwise loss); lower the learning rate");
    if (report) report->epoch_loss.push_back(mean_loss);
  }

  if (report) {
    Rng auc_rng(seed, "bpr:auc");
    double wins = 0.0;
    std::size_t trials = 0;
    for (const auto& [u, ipos] : holdout) {
      const double pos_score = model.dot(u, ipos);
      for (std::size_t t = 0; t < 50; ++t) {
        std::size_t j = 0;
        do {
          j = static_cast<std::size_t>(auc_rng.below(n_items));
        } while (seen_sets[u].count(j));
        const double neg_score = model.dot(u, j);
        if (pos_score > neg_score) wins += 1.0;
        else if (pos_score == neg_score) wins += 0.5;
        ++trials;
      }
    }
    report->auc = trials > 0 ? wins / static_cast<double>(trials) : 0.5;
  }

  std::vector<RecommendationList> lists;
  lists.reserve(ix.users.size());
  for (std::size_t u = 0; u < ix.users.size(); ++u) {
    const auto seen = seen_mask(ix, u);
    std::vector<std::pair<std::size_t, double>> scored;
    for (std::size_t i = 0; i < n_items; ++i) {
      if (!ix.in_catalog[i] || seen[i]) continue;
      scored.push_back({i, model.dot(u, i)});
    }
    lists.push_back(build_list(ix, u, scored, n));
  }
  return lists;
}

}  // namespace mfair
