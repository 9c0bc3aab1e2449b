#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "mfair/dataset.hpp"
#include "mfair/random.hpp"
#include "mfair/recommend.hpp"
#include "mfair/testkit.hpp"

using namespace mfair;

namespace {

ItemCatalog catalog_for(const InteractionSet& train, Continent code = Continent::NA) {
  std::map<std::string, ContinentSet, IdLess> continents;
  for (const auto& r : train.interactions) {
    ContinentSet cs;
    cs.insert(code);
    continents.emplace(r.item, cs);
  }
  return build_catalog(train, continents);
}

const RecommendationList& list_for(const std::vector<RecommendationList>& lists,
                                   const std::string& user) {
  for (const auto& list : lists) {
    if (list.user == user) return list;
  }
  FAIL("no list for user " << user);
  return lists.front();
}

bool lists_identical(const std::vector<RecommendationList>& a,
                     const std::vector<RecommendationList>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t u = 0; u < a.size(); ++u) {
    if (a[u].user != b[u].user || a[u].entries.size() != b[u].entries.size()) return false;
    for (std::size_t i = 0; i < a[u].entries.size(); ++i) {
      if (a[u].entries[i].item != b[u].entries[i].item ||
          a[u].entries[i].score != b[u].entries[i].score)
        return false;
    }
  }
  return true;
}

void check_list_contract(const std::vector<RecommendationList>& lists,
                         const InteractionSet& train, std::size_t n) {
  std::map<std::string, std::set<std::string>> profiles;
  for (const auto& r : train.interactions) profiles[r.user].insert(r.item);
  for (const auto& list : lists) {
    CHECK(list.entries.size() <= n);
    std::set<std::string> seen_items;
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
      if (i > 0) {
        CHECK(list.entries[i - 1].score >= list.entries[i].score);
        if (list.entries[i - 1].score == list.entries[i].score)
          CHECK(id_less(list.entries[i - 1].item, list.entries[i].item));
      }
      CHECK(seen_items.insert(list.entries[i].item).second);
      CHECK(profiles[list.user].count(list.entries[i].item) == 0);
    }
  }
}

}  // namespace

TEST_CASE("most_popular ranks by training count with id tie-break") {
  InteractionSet train;
  // item "3" has 3 ratings, "1" and "2" are tied at 2, "4" has 1
  for (const auto* u : {"a", "b", "c"}) train.interactions.push_back({u, "3", 4});
  for (const auto* u : {"a", "b"}) train.interactions.push_back({u, "1", 4});
  for (const auto* u : {"b", "c"}) train.interactions.push_back({u, "2", 4});
  train.interactions.push_back({"d", "4", 4});
  const auto catalog = catalog_for(train);

  const auto lists = most_popular(train, catalog, 10);
  check_list_contract(lists, train, 10);

  SUBCASE("the most-rated item tops every list that can hold it") {
    CHECK(list_for(lists, "d").entries[0].item == "3");
    CHECK(list_for(lists, "d").entries[1].item == "1");  // tie broken by id
    CHECK(list_for(lists, "d").entries[2].item == "2");
  }

  SUBCASE("seen items are excluded, lists otherwise identical") {
    // users a and c have profiles {3,1} and {3,2}
    const auto& la = list_for(lists, "a");
    const auto& lc = list_for(lists, "c");
    CHECK(la.entries[0].item == "2");
    CHECK(lc.entries[0].item == "1");
    CHECK(la.entries[1].item == "4");
    CHECK(lc.entries[1].item == "4");
  }

  SUBCASE("scores are the popularity counts") {
    CHECK(list_for(lists, "d").entries[0].score == 3.0);
  }
}

TEST_CASE("random_guess is seeded and uniform over continents") {
  SUBCASE("same seed reproduces, different seed does not") {
    const auto world = mfair::test::make_biased_world(5);
    const auto a = random_guess(world.train, world.catalog, 10, 7);
    const auto b = random_guess(world.train, world.catalog, 10, 7);
    CHECK(lists_identical(a, b));
    const auto c = random_guess(world.train, world.catalog, 10, 8);
    CHECK_FALSE(lists_identical(a, c));
    check_list_contract(a, world.train, 10);
  }

  SUBCASE("list length is min(n, unseen catalog items)") {
    InteractionSet train;
    for (int i = 1; i <= 5; ++i) train.interactions.push_back({"u", std::to_string(i), 4});
    train.interactions.push_back({"v", "1", 4});
    const auto catalog = catalog_for(train);
    const auto lists = random_guess(train, catalog, 100, 3);
    CHECK(list_for(lists, "u").entries.size() == 0);  // rated everything
    CHECK(list_for(lists, "v").entries.size() == 4);
  }

  SUBCASE("selection frequency tracks the continent mix (chi-square at desk scale)") {
    // 2000 items split 50/30/20 across three continents; one fresh user.
    InteractionSet train;
    std::map<std::string, ContinentSet, IdLess> continents;
    for (int i = 1; i <= 2000; ++i) {
      const std::string id = std::to_string(i);
      train.interactions.push_back({"filler", id, 4});
      ContinentSet cs;
      cs.insert(i <= 1000 ? Continent::NA : i <= 1600 ? Continent::EU : Continent::AS);
      continents.emplace(id, cs);
    }
    train.interactions.push_back({"fresh", "1", 4});
    const auto catalog = build_catalog(train, continents);
    const auto lists = random_guess(train, catalog, 500, 31);

    std::array<double, 3> observed{};
    for (const auto& e : list_for(lists, "fresh").entries) {
      const auto& cs = catalog.at(e.item).continents;
      if (cs.contains(Continent::NA)) ++observed[0];
      else if (cs.contains(Continent::EU)) ++observed[1];
      else ++observed[2];
    }
    const std::array<double, 3> expected = {0.5 * 500, 0.3 * 500, 0.2 * 500};
    double chi2 = 0.0;
    for (int c = 0; c < 3; ++c)
      chi2 += (observed[c] - expected[c]) * (observed[c] - expected[c]) / expected[c];
    CHECK(chi2 < 13.82);  // df=2 critical value at alpha=0.001
  }
}

TEST_CASE("centered cosine similarity closed forms") {
  InteractionSet train;
  train.interactions = {{"u1", "a", 4}, {"u1", "b", 2},
                        {"twin", "a", 4}, {"twin", "b", 2},
                        {"shift", "a", 5}, {"shift", "b", 3},
                        {"anti", "a", 2}, {"anti", "b", 4},
                        {"disjoint", "c", 5}, {"disjoint", "d", 1},
                        {"cancel", "a", 5}, {"cancel", "b", 5},
                        {"cancel", "c", 2}, {"cancel", "d", 4}};

  CHECK(user_cosine(train, "u1", "twin") == doctest::Approx(1.0).epsilon(1e-12));
  // mean-centering makes a constant shift irrelevant
  CHECK(user_cosine(train, "u1", "shift") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(user_cosine(train, "u1", "anti") == doctest::Approx(-1.0).epsilon(1e-12));
  // disjoint support and canceling overlap are both orthogonal
  CHECK(user_cosine(train, "u1", "disjoint") == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(user_cosine(train, "u1", "cancel") == doctest::Approx(0.0).epsilon(1e-12));

  InteractionSet items;
  items.interactions = {{"u1", "x", 5}, {"u2", "x", 1},
                        {"u1", "y", 4}, {"u2", "y", 2},
                        {"u1", "z", 1}, {"u2", "z", 3}};
  CHECK(item_cosine(items, "x", "y") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(item_cosine(items, "x", "z") == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("user knn predictions match the hand-built neighborhood") {
  // u1: a=4 b=2 | u2: a=4 b=2 c=5 | u3: a=2 b=4 c=1 | u4: c=3 d=5
  // centered cosine: sim(u1,u2) = +0.6547, sim(u1,u3) = -0.6547, sim(u1,u4) = 0
  InteractionSet train;
  train.interactions = {{"u1", "a", 4}, {"u1", "b", 2}, {"u2", "a", 4}, {"u2", "b", 2},
                        {"u2", "c", 5}, {"u3", "a", 2}, {"u3", "b", 4}, {"u3", "c", 1},
                        {"u4", "c", 3}, {"u4", "d", 5}};
  const auto catalog = catalog_for(train);
  const double sim_u2 = 2.0 / (std::sqrt(2.0) * std::sqrt(14.0 / 3.0));
  CHECK(user_cosine(train, "u1", "u2") == doctest::Approx(sim_u2).epsilon(1e-9));
  CHECK(user_cosine(train, "u1", "u3") == doctest::Approx(-sim_u2).epsilon(1e-9));
  CHECK(user_cosine(train, "u1", "u4") == doctest::Approx(0.0).epsilon(1e-12));

  const auto lists = knn(train, catalog, KnnMode::user, 2, 10);
  check_list_contract(lists, train, 10);
  const auto& l1 = list_for(lists, "u1");

  // c's raters: u2 (sim>0, rating 5), u3 (sim<0, dropped), u4 (sim 0, dropped)
  // -> prediction 5; d's only rater u4 has sim 0 -> omitted entirely
  REQUIRE(l1.entries.size() == 1);
  CHECK(l1.entries[0].item == "c");
  CHECK(l1.entries[0].score == doctest::Approx(5.0).epsilon(1e-9));

  SUBCASE("a closer neighbor dominates and the average weighs by similarity") {
    train.interactions.push_back({"u5", "a", 4});
    train.interactions.push_back({"u5", "b", 2});
    train.interactions.push_back({"u5", "c", 2});
    const auto catalog2 = catalog_for(train);
    const double sim_u5 = user_cosine(train, "u1", "u5");
    CHECK(sim_u5 > sim_u2);  // u5 matches u1 exactly on the co-rated items

    const auto single = knn(train, catalog2, KnnMode::user, 1, 10);
    CHECK(list_for(single, "u1").entries[0].score == doctest::Approx(2.0).epsilon(1e-9));

    const auto both = knn(train, catalog2, KnnMode::user, 2, 10);
    const double expected = (sim_u5 * 2.0 + sim_u2 * 5.0) / (sim_u5 + sim_u2);
    CHECK(list_for(both, "u1").entries[0].score == doctest::Approx(expected).epsilon(1e-9));
  }

  SUBCASE("popularity backfill pads below predictions when asked") {
    const auto padded = knn(train, catalog, KnnMode::user, 2, 3, true);
    const auto& lp = list_for(padded, "u1");
    CHECK(lp.entries.size() == 2);  // c predicted, d backfilled
    CHECK(lp.entries[0].item == "c");
    CHECK(lp.entries[1].item == "d");
    CHECK(lp.entries[1].score < lp.entries[0].score);
  }
}

TEST_CASE("item knn predictions match the hand-built neighborhood") {
  // x: u1=5 u2=5 u3=1 ; y: u2=4 u3=2 ; z: u2=1 u3=5
  // centered cosine: sim(x,y) = +0.866, sim(x,z) < 0
  InteractionSet train;
  train.interactions = {{"u1", "x", 5}, {"u2", "x", 5}, {"u3", "x", 1},
                        {"u2", "y", 4}, {"u3", "y", 2}, {"u2", "z", 1}, {"u3", "z", 5}};
  const auto catalog = catalog_for(train);

  const auto lists = knn(train, catalog, KnnMode::item, 3, 10);
  check_list_contract(lists, train, 10);
  const auto& l1 = list_for(lists, "u1");

  // u1 rated only x: y neighbors on x (sim>0) -> weighted avg of u1's
  // rating on x = 5; z has no positively similar rated item -> omitted
  REQUIRE(l1.entries.size() == 1);
  CHECK(l1.entries[0].item == "y");
  CHECK(l1.entries[0].score == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("biased_mf learns and stays deterministic") {
  SUBCASE("lr = 0 leaves the initial model untouched") {
    const auto world = mfair::test::make_biased_world(3);
    const auto frozen = biased_mf(world.train, world.catalog, 4, 0.0, 0.01, 5, 11, 10);
    const auto untrained = biased_mf(world.train, world.catalog, 4, 0.01, 0.01, 0, 11, 10);
    CHECK(lists_identical(frozen, untrained));
  }

  SUBCASE("training RMSE is non-increasing on a low-rank synthetic") {
    InteractionSet train;
    Rng rng(17);
    for (int u = 0; u < 50; ++u) {
      const double au = 1.0 + rng.uniform();
      for (int i = 0; i < 50; ++i) {
        if (rng.uniform() > 0.4) continue;
        const double bi = 1.0 + 0.02 * i;
        train.interactions.push_back(
            {"u" + std::to_string(u), "i" + std::to_string(i), au * bi});
      }
    }
    const auto catalog = catalog_for(train);
    TrainReport report;
    biased_mf(train, catalog, 4, 0.005, 0.001, 25, 7, 5, &report);
    REQUIRE(report.epoch_rmse.size() == 25);
    for (std::size_t e = 1; e < report.epoch_rmse.size(); ++e)
      CHECK(report.epoch_rmse[e] <= report.epoch_rmse[e - 1] + 1e-12);
  }

  SUBCASE("a rank-1 rating matrix is fit below 0.05 RMSE") {
    InteractionSet train;
    Rng rng(23);
    std::array<double, 40> item_factor{};
    for (auto& b : item_factor) b = 1.0 + rng.uniform();
    for (int u = 0; u < 40; ++u) {
      const double au = 1.0 + rng.uniform();
      for (int i = 0; i < 40; ++i) {
        if (rng.uniform() > 0.5) continue;
        train.interactions.push_back(
            {"u" + std::to_string(u), "i" + std::to_string(i), au * item_factor[i]});
      }
    }
    const auto catalog = catalog_for(train);
    TrainReport report;
    biased_mf(train, catalog, 4, 0.01, 0.0005, 300, 7, 5, &report);
    CHECK(report.epoch_rmse.back() < 0.05);
  }

  SUBCASE("deterministic per seed") {
    const auto world = mfair::test::make_biased_world(9);
    const auto a = biased_mf(world.train, world.catalog, 4, 0.01, 0.01, 5, 11, 10);
    const auto b = biased_mf(world.train, world.catalog, 4, 0.01, 0.01, 5, 11, 10);
    CHECK(lists_identical(a, b));
    check_list_contract(a, world.train, 10);
  }
}

namespace {

// Preference-structured implicit data: even users read the first shelf,
// odd users the second.
InteractionSet preference_train(std::size_t n_users, std::size_t n_items, std::uint64_t seed) {
  InteractionSet train;
  Rng rng(seed);
  for (std::size_t u = 0; u < n_users; ++u) {
    const std::size_t lo = (u % 2 == 0) ? 1 : n_items / 2 + 1;
    const std::size_t hi = (u % 2 == 0) ? n_items / 2 : n_items;
    std::set<std::string> picked;
    while (picked.size() < 8) {
      const auto i = lo + rng.below(hi - lo + 1);
      picked.insert(std::to_string(i));
    }
    for (const auto& item : picked)
      train.interactions.push_back({"u" + std::to_string(u), item, 5});
  }
  return train;
}

}  // namespace

TEST_CASE("bpr ranks held-out positives above sampled negatives") {
  const auto train = preference_train(30, 40, 41);
  const auto catalog = catalog_for(train);

  SUBCASE("epochs = 0 scores come from the seeded initialization") {
    const auto a = bpr(train, catalog, 4, 0.05, 0.001, 0, 5, 10);
    const auto b = bpr(train, catalog, 4, 0.05, 0.001, 0, 5, 10);
    CHECK(lists_identical(a, b));
  }

  SUBCASE("trained AUC beats chance") {
    TrainReport report;
    bpr(train, catalog, 8, 0.05, 0.001, 40, 5, 10, &report);
    REQUIRE(report.epoch_loss.size() == 40);
    CHECK(report.auc > 0.5);
    CHECK(report.auc > 0.7);  // the shelf structure is easy to learn
  }

  SUBCASE("deterministic per seed and contract-clean") {
    const auto a = bpr(train, catalog, 4, 0.05, 0.001, 3, 5, 10);
    const auto b = bpr(train, catalog, 4, 0.05, 0.001, 3, 5, 10);
    CHECK(lists_identical(a, b));
    check_list_contract(a, train, 10);
  }
}

TEST_CASE("bpr pairwise gradient matches central finite differences") {
  Rng rng(99);
  const std::size_t f = 6;
  const double reg = 0.02;
  std::vector<double> pu(f), qi(f), qj(f);
  for (int round = 0; round < 20; ++round) {
    for (auto* vec : {&pu, &qi, &qj}) {
      for (auto& v : *vec) v = rng.normal();
    }
    std::vector<double> gp(f), gi(f), gj(f);
    bpr_pair_grad(pu, qi, qj, reg, gp, gi, gj);

    const double h = 1e-6;
    auto check_dim = [&](std::vector<double>& vec, const std::vector<double>& grad,
                         std::size_t d) {
      const double saved = vec[d];
      vec[d] = saved + h;
      const double up = bpr_pair_loss(pu, qi, qj, reg);
      vec[d] = saved - h;
      const double down = bpr_pair_loss(pu, qi, qj, reg);
      vec[d] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double scale = std::max({1.0, std::abs(fd), std::abs(grad[d])});
      CHECK(std::abs(grad[d] - fd) / scale < 1e-4);
    };
    for (std::size_t d = 0; d < f; ++d) {
      check_dim(pu, gp, d);
      check_dim(qi, gi, d);
      check_dim(qj, gj, d);
    }
  }
}
