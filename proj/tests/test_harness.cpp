#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "helpers.hpp"
#include "mfair/harness.hpp"
#include "mfair/io.hpp"

using namespace mfair;
using mfair::test::TempDir;
using mfair::test::slurp;

namespace {

// Writes a biased synthetic world to disk in the CLI interchange formats.
struct WorldOnDisk {
  TempDir dir;
  std::string ratings;
  std::string continents;

  WorldOnDisk() {
    const auto world = mfair::test::make_biased_world(21);
    InteractionSet all;
    all.interactions = world.train.interactions;
    all.interactions.insert(all.interactions.end(), world.test.interactions.begin(),
                            world.test.interactions.end());
    ratings = dir.file("ratings.tsv");
    write_interactions_tsv(all, ratings);

    std::ofstream cont(dir.file("continents.tsv"));
    for (const auto& e : world.catalog.entries()) {
      cont << e.item << '\t';
      bool first = true;
      for (Continent c : e.continents.values()) {
        if (!first) cont << ',';
        cont << to_string(c);
        first = false;
      }
      cont << '\n';
    }
    continents = dir.file("continents.tsv");
  }

  ExperimentConfig config(double eps) const {
    ExperimentConfig cfg;
    cfg.dataset_path = ratings;
    cfg.format = DatasetFormat::generic_tsv;
    cfg.continents_path = continents;
    cfg.algo = Algorithm::mostpop;
    cfg.n = 30;
    cfg.k = 5;
    cfg.eps = eps;
    cfg.seed = 7;
    return cfg;
  }
};

double value_of(const std::vector<BiasValue>& values, const std::string& group) {
  for (const auto& v : values) {
    if (v.group == group) return v.value;
  }
  FAIL("group not reported: " << group);
  return 0.0;
}

}  // namespace

TEST_CASE("run_experiment produces a biased vanilla report and mitigates it") {
  const WorldOnDisk world;
  const auto report = run_experiment(world.config(1.0));

  SUBCASE("a popularity recommender over-represents g1 and the popular continent") {
    CHECK(value_of(report.vanilla.pop_vb, "g1") > 0.0);
    CHECK(value_of(report.vanilla.continent_vb, "NA") > 0.0);
  }

  SUBCASE("two-phase mitigation lowers total continent bias") {
    REQUIRE(report.mitigated.size() == 2);
    CHECK(report.mitigated[0].first == "after_visibility");
    CHECK(report.mitigated[1].first == "after_exposure");
    const auto& final_rep = report.final_report();
    CHECK(total_bs(final_rep.continent_vb) <= total_bs(report.vanilla.continent_vb) + 1e-9);
    CHECK(total_bs(final_rep.continent_eb) <= total_bs(report.vanilla.continent_eb) + 1e-9);
    CHECK(report.applied_swaps > 0);
  }

  SUBCASE("stage timings cover the pipeline") {
    REQUIRE(report.timings.size() >= 5);
    CHECK(report.timings.front().stage == "ingest");
  }
}

TEST_CASE("run_experiment is byte-reproducible for a fixed seed") {
  const WorldOnDisk world;
  auto cfg_a = world.config(1.0);
  auto cfg_b = world.config(1.0);
  TempDir out;
  cfg_a.out_dir = out.file("a");
  cfg_b.out_dir = out.file("b");
  run_experiment(cfg_a);
  run_experiment(cfg_b);
  for (const auto* name :
       {"report.json", "report.csv", "plotdata.csv", "lists_vanilla.tsv",
        "lists_mitigated.tsv"}) {
    CHECK(slurp(cfg_a.out_dir + "/" + name) == slurp(cfg_b.out_dir + "/" + name));
    CHECK_FALSE(slurp(cfg_a.out_dir + "/" + name).empty());
  }
}

TEST_CASE("the eps=0 pathway never touches popularity deltas") {
  const WorldOnDisk world;
  const auto base = run_experiment(world.config(0.0));
  CHECK(base.penalty_adjustments == 0);

  const auto fair = run_experiment(world.config(1.0));
  // popularity total bias with the penalty active is never worse
  const double pop_base = total_bs(base.final_report().pop_vb);
  const double pop_fair = total_bs(fair.final_report().pop_vb);
  CHECK(pop_fair <= pop_base + 1e-9);
}

TEST_CASE("report rendering follows the table conventions") {
  RunReport report;
  report.dataset = "synthetic";
  report.algorithm = "mostpop";
  report.target_mode = TargetMode::item_based;
  report.n = 10;
  report.k = 3;
  report.eps = 1.0;
  report.seed = 1;
  report.phases = "both";
  report.vanilla.k = 3;
  report.vanilla.ndcg = 0.123456;
  report.vanilla.continent_vb = {{"NA", 0.0}, {"EU", 0.0}};
  report.vanilla.continent_eb = {{"NA", 0.0}, {"EU", 0.0}};
  report.vanilla.pop_vb = {{"g1", 0.0}, {"g2", 0.0}, {"g3", 0.0}};
  report.vanilla.pop_eb = {{"g1", 0.0}, {"g2", 0.0}, {"g3", 0.0}};
  report.mitigated.push_back({"after_visibility", report.vanilla});

  SUBCASE("zero-bias rows render as 0.00 percent") {
    const auto csv = render_report(report, ReportFormat::csv);
    CHECK(csv.find("mostpop,VB_I,NA,0.00,0.00") != std::string::npos);
    CHECK(csv.find("mostpop,EB_I,total,0.00,0.00") != std::string::npos);
  }

  SUBCASE("NDCG keeps three decimals, bias two") {
    const auto csv = render_report(report, ReportFormat::csv);
    CHECK(csv.find("mostpop,NDCG,,0.123,0.123") != std::string::npos);
  }

  SUBCASE("rating-based runs relabel the metric") {
    report.target_mode = TargetMode::rating_based;
    const auto csv = render_report(report, ReportFormat::csv);
    CHECK(csv.find("VB_R") != std::string::npos);
    CHECK(csv.find("VB_I") == std::string::npos);
  }

  SUBCASE("plotdata is long-form with one row per group and stage") {
    const auto plot = render_report(report, ReportFormat::plotdata);
    CHECK(plot.find("algorithm,metric,family,group,stage,value") == 0);
    CHECK(plot.find("mostpop,VB_I,continent,NA,vanilla,0.0000") != std::string::npos);
    CHECK(plot.find("mostpop,VB_I,continent,NA,after_visibility,0.0000") != std::string::npos);
  }

  SUBCASE("json round-trips through a file") {
    TempDir dir;
    emit_report(report, ReportFormat::json, dir.file("report.json"));
    const auto back = run_report_from_json_file(dir.file("report.json"));
    CHECK(back.algorithm == report.algorithm);
    CHECK(back.k == report.k);
    CHECK(back.vanilla.ndcg == report.vanilla.ndcg);
    CHECK(back.vanilla.continent_vb.size() == report.vanilla.continent_vb.size());
    CHECK(back.mitigated.size() == 1);
  }
}

TEST_CASE("csv cells re-parse to the in-memory values within formatting precision") {
  const WorldOnDisk world;
  const auto report = run_experiment(world.config(1.0));
  const auto csv = render_report(report, ReportFormat::csv);

  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  std::size_t checked = 0;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string algo, metric, group, vanilla_s, mitigated_s;
    std::getline(cells, algo, ',');
    std::getline(cells, metric, ',');
    std::getline(cells, group, ',');
    std::getline(cells, vanilla_s, ',');
    std::getline(cells, mitigated_s, ',');
    if (metric != "VB_I" || group.empty() || group == "total") continue;
    if (group[0] == 'g') continue;  // popularity rows share the metric label
    const double expected = value_of(report.vanilla.continent_vb, group);
    // two percent-decimals resolve to 5e-5 in fraction space
    CHECK(std::abs(std::stod(vanilla_s) / 100.0 - expected) <= 5.1e-5);
    ++checked;
  }
  CHECK(checked >= 2);
}

TEST_CASE("bias report serialization carries percentages in csv, fractions in json") {
  BiasReport report;
  report.k = 3;
  report.ndcg = 0.25;
  report.continent_vb = {{"NA", 0.125}, {"EU", -0.125}};
  report.continent_eb = {{"NA", 0.1}, {"EU", -0.1}};
  report.pop_vb = {{"g1", 0.2}, {"g2", -0.15}, {"g3", -0.05}};
  report.pop_eb = {{"g1", 0.2}, {"g2", -0.15}, {"g3", -0.05}};

  const auto csv = bias_report_to_csv(report, TargetMode::item_based);
  CHECK(csv.find("VB_I,NA,12.50") != std::string::npos);
  CHECK(csv.find("VB_I,total,25.00") != std::string::npos);
  CHECK(csv.find("NDCG,,0.250") != std::string::npos);

  const auto json_text = bias_report_to_json(report, TargetMode::item_based);
  CHECK(json_text.find("0.125") != std::string::npos);  // raw fraction survives
}

TEST_CASE("compare_runs flags improvements and rejects mismatches") {
  const WorldOnDisk world;
  const auto base = run_experiment(world.config(0.0));
  const auto fair = run_experiment(world.config(1.0));

  SUBCASE("a run against itself yields zero deltas, all improved") {
    const auto cmp = compare_runs(base, base);
    for (const auto& row : cmp.rows) {
      CHECK(row.delta == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(row.improved);
    }
  }

  SUBCASE("eps=1 improves the popularity totals against eps=0") {
    const auto cmp = compare_runs(base, fair);
    bool saw_pop_total = false;
    for (const auto& row : cmp.rows) {
      if (row.group == "total" && row.metric.find("_pop") != std::string::npos &&
          row.metric.find("VB") != std::string::npos) {
        saw_pop_total = true;
        CHECK(row.delta <= 1e-9);
      }
    }
    CHECK(saw_pop_total);
  }

  SUBCASE("mismatched k is a configuration error") {
    auto cfg = world.config(1.0);
    cfg.k = 4;
    const auto other = run_experiment(cfg);
    CHECK_THROWS(compare_runs(base, other));
  }

  SUBCASE("csv rendering includes the improved flag") {
    const auto csv = compare_runs(base, fair).render_csv();
    CHECK(csv.find("metric,group,a,b,delta,improved") == 0);
    CHECK(csv.find("NDCG") != std::string::npos);
  }
}

TEST_CASE("catalog and targets survive a file round-trip") {
  const auto world = mfair::test::make_biased_world(33);
  TempDir dir;

  SUBCASE("catalog tsv") {
    write_catalog_tsv(world.catalog, dir.file("catalog.tsv"));
    const auto back = read_catalog_tsv(dir.file("catalog.tsv"));
    REQUIRE(back.size() == world.catalog.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK(back.entries()[i].item == world.catalog.entries()[i].item);
      CHECK(back.entries()[i].continents == world.catalog.entries()[i].continents);
      CHECK(back.entries()[i].popularity == world.catalog.entries()[i].popularity);
      CHECK(back.entries()[i].group == world.catalog.entries()[i].group);
    }
  }

  SUBCASE("targets json") {
    const auto item_t = make_targets(world.train, world.catalog, TargetMode::item_based);
    const auto rating_t = make_targets(world.train, world.catalog, TargetMode::rating_based);
    write_targets_json(item_t, rating_t, dir.file("targets.json"));
    const auto back = read_targets_json(dir.file("targets.json"), TargetMode::rating_based);
    for (std::size_t c = 0; c < kNumContinents; ++c)
      CHECK(back.continent[c] == doctest::Approx(rating_t.continent[c]).epsilon(1e-12));
    for (std::size_t g = 0; g < kNumPopGroups; ++g)
      CHECK(back.popgroup[g] == doctest::Approx(rating_t.popgroup[g]).epsilon(1e-12));
  }

  SUBCASE("recommendation lists tsv") {
    write_lists_tsv(world.lists, dir.file("lists.tsv"));
    const auto back = read_lists_tsv(dir.file("lists.tsv"));
    REQUIRE(back.size() == world.lists.size());
    for (std::size_t u = 0; u < back.size(); ++u) {
      CHECK(back[u].user == world.lists[u].user);
      REQUIRE(back[u].entries.size() == world.lists[u].entries.size());
      for (std::size_t i = 0; i < back[u].entries.size(); ++i) {
        CHECK(back[u].entries[i].item == world.lists[u].entries[i].item);
        CHECK(back[u].entries[i].score == world.lists[u].entries[i].score);
      }
    }
  }

  SUBCASE("list files with gaps or duplicates are rejected") {
    mfair::test::write_file(dir, "gap.tsv", "u\t1\ta\t0.9\nu\t3\tb\t0.7\n");
    CHECK_THROWS(read_lists_tsv(dir.file("gap.tsv")));
    mfair::test::write_file(dir, "dupitem.tsv", "u\t1\ta\t0.9\nu\t2\ta\t0.7\n");
    CHECK_THROWS(read_lists_tsv(dir.file("dupitem.tsv")));
    mfair::test::write_file(dir, "duprank.tsv", "u\t1\ta\t0.9\nu\t1\tb\t0.7\n");
    CHECK_THROWS(read_lists_tsv(dir.file("duprank.tsv")));
  }
}
