#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mfair/dataset.hpp"
#include "mfair/harness.hpp"
#include "mfair/io.hpp"
#include "mfair/metrics.hpp"
#include "mfair/mitigate.hpp"
#include "mfair/recommend.hpp"
#include "mfair/testkit.hpp"

namespace {

using namespace mfair;

struct SynthArgs {
  std::size_t users = 200;
  std::size_t items = 500;
  std::string weights = "NA=0.55,EU=0.25,AF=0.12,SA=0.08";
  double skew = 1.0;
  std::uint64_t seed = 42;
  std::size_t ratings_per_user = 12;
  std::string out;
};

int cmd_synth(const SynthArgs& args) {
  SynthSpec spec;
  spec.n_users = args.users;
  spec.n_items = args.items;
  spec.popularity_skew = args.skew;
  spec.seed = args.seed;
  spec.ratings_per_user = args.ratings_per_user;
  std::istringstream weights(args.weights);
  std::string part;
  while (std::getline(weights, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad weight entry: " + part);
    spec.continent_weights[continent_from_string(part.substr(0, eq))] =
        std::stod(part.substr(eq + 1));
  }
  const SynthData data = synth_dataset(spec);

  std::filesystem::create_directories(args.out);
  const std::filesystem::path dir(args.out);
  write_interactions_tsv(data.interactions, (dir / "ratings.tsv").string());
  std::ofstream cont((dir / "continents.tsv").string());
  for (const auto& [item, cs] : data.continents) {
    cont << item << '\t';
    bool first = true;
    for (Continent c : cs.values()) {
      if (!first) cont << ',';
      cont << to_string(c);
      first = false;
    }
    cont << '\n';
  }
  std::cout << data.interactions.size() << " ratings over " << args.items << " items -> "
            << args.out << "\n";
  return 0;
}

struct IngestArgs {
  std::string dataset, format = "generic_tsv", continents, out;
  std::size_t min_ratings = 1;
  double split = 0.8;
  std::uint64_t seed = 42;
};

int cmd_ingest(const IngestArgs& args) {
  ParseStats parse_stats;
  auto set = parse_interactions(args.dataset, format_from_string(args.format), &parse_stats);
  std::cout << "parsed " << parse_stats.accepted << " records (" << parse_stats.malformed
            << " malformed, " << parse_stats.implicit_skipped << " implicit skipped)\n";

  if (args.min_ratings > 1) {
    FilterStats filter_stats;
    set = filter_min_activity(set, args.min_ratings, &filter_stats);
    std::cout << "min-" << args.min_ratings << " filter kept " << filter_stats.interactions_kept
              << " ratings / " << filter_stats.users_kept << " users / "
              << filter_stats.items_kept << " items\n";
  }

  auto [train, test] = split_train_test(set, args.split, args.seed);
  auto continents = load_continent_map(args.continents);
  CatalogStats catalog_stats;
  auto catalog = build_catalog(train, continents, &catalog_stats);
  if (catalog_stats.dropped_no_continent > 0) {
    std::cout << "dropped " << catalog_stats.dropped_no_continent
              << " items without continent data\n";
  }
  auto item_targets = make_targets(train, catalog, TargetMode::item_based);
  auto rating_targets = make_targets(train, catalog, TargetMode::rating_based);

  std::filesystem::create_directories(args.out);
  const std::filesystem::path dir(args.out);
  write_interactions_tsv(train, (dir / "train.tsv").string());
  write_interactions_tsv(test, (dir / "test.tsv").string());
  write_catalog_tsv(catalog, (dir / "catalog.tsv").string());
  write_targets_json(item_targets, rating_targets, (dir / "targets.json").string());
  std::cout << "train " << train.size() << " / test " << test.size() << " interactions, catalog "
            << catalog.size() << " items -> " << args.out << "\n";
  return 0;
}

struct RecommendArgs {
  std::string train, catalog, out;
  std::string algo = "mostpop";
  std::size_t topn = 150;
  std::uint64_t seed = 42;
  std::size_t neighbors = 50;
  std::size_t factors = 10;
  double lr = 0.01, reg = 0.01;
  std::size_t epochs = 30;
};

int cmd_recommend(const RecommendArgs& args) {
  auto train = parse_interactions(args.train, DatasetFormat::generic_tsv);
  train.split = Split::train;
  auto catalog = read_catalog_tsv(args.catalog);

  std::vector<RecommendationList> lists;
  TrainReport train_report;
  switch (algorithm_from_string(args.algo)) {
    case Algorithm::mostpop: lists = most_popular(train, catalog, args.topn); break;
    case Algorithm::random: lists = random_guess(train, catalog, args.topn, args.seed); break;
    case Algorithm::userknn:
      lists = knn(train, catalog, KnnMode::user, args.neighbors, args.topn);
      break;
    case Algorithm::itemknn:
      lists = knn(train, catalog, KnnMode::item, args.neighbors, args.topn);
      break;
    case Algorithm::biasedmf:
      lists = biased_mf(train, catalog, args.factors, args.lr, args.reg, args.epochs, args.seed,
                        args.topn, &train_report);
      if (!train_report.epoch_rmse.empty())
        std::cout << "final train RMSE " << train_report.epoch_rmse.back() << "\n";
      break;
    case Algorithm::bpr:
      lists = bpr(train, catalog, args.factors, args.lr, args.reg, args.epochs, args.seed,
                  args.topn, &train_report);
      std::cout << "held-out pairwise AUC " << train_report.auc << "\n";
      break;
  }
  write_lists_tsv(lists, args.out);
  std::cout << lists.size() << " lists -> " << args.out << "\n";
  return 0;
}

struct MitigateArgs {
  std::string lists, catalog, targets, out;
  std::string target = "item";
  std::string phases = "both";
  std::size_t topk = 20;
  double eps = 1.0;
  bool strict = false;
};

int cmd_mitigate(const MitigateArgs& args) {
  auto lists = read_lists_tsv(args.lists);
  auto catalog = read_catalog_tsv(args.catalog);
  const TargetMode mode = args.target == "item" ? TargetMode::item_based
                                                : TargetMode::rating_based;
  auto targets = read_targets_json(args.targets, mode);

  MitigationConfig config;
  config.k = args.topk;
  config.n = args.topk + 1;  // lower bound; real list length rules
  for (const auto& list : lists) config.n = std::max(config.n, list.entries.size());
  config.eps = args.eps;
  config.target_mode = mode;
  config.phases = phases_from_string(args.phases);
  config.strict_demote = args.strict;
  config.validate();

  MitigationStats stats;
  auto out = mitigate_two_phase(lists, catalog, targets, config, &stats);
  write_lists_tsv(out, args.out);
  for (const auto& phase : stats.phases) {
    std::cout << to_string(phase.bias_type) << " phase: " << phase.applied_swaps
              << " swaps applied, " << phase.discarded_swaps << " discarded, "
              << phase.penalty_adjustments << " penalty adjustments\n";
  }
  std::cout << out.size() << " lists -> " << args.out << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string lists, catalog, targets, test, out;
  std::string target = "item";
  std::size_t topk = 20;
};

int cmd_evaluate(const EvaluateArgs& args) {
  auto lists = read_lists_tsv(args.lists);
  auto catalog = read_catalog_tsv(args.catalog);
  const TargetMode mode = args.target == "item" ? TargetMode::item_based
                                                : TargetMode::rating_based;
  auto targets = read_targets_json(args.targets, mode);
  auto test = parse_interactions(args.test, DatasetFormat::generic_tsv);
  test.split = Split::test;

  const BiasReport report = measure(lists, catalog, targets, test, args.topk);
  std::filesystem::create_directories(args.out);
  const std::filesystem::path dir(args.out);
  {
    std::ofstream json_out((dir / "bias_report.json").string());
    json_out << bias_report_to_json(report, mode);
  }
  {
    std::ofstream csv_out((dir / "bias_report.csv").string());
    csv_out << bias_report_to_csv(report, mode);
  }
  std::cout << bias_report_to_csv(report, mode);
  return 0;
}

struct RunArgs {
  ExperimentConfig config;
  std::string format = "generic_tsv";
  std::string target = "item";
  std::string phases = "both";
  std::string algo = "mostpop";
};

int cmd_run(RunArgs& args) {
  args.config.format = format_from_string(args.format);
  args.config.target_mode =
      args.target == "item" ? TargetMode::item_based : TargetMode::rating_based;
  args.config.phases = phases_from_string(args.phases);
  args.config.algo = algorithm_from_string(args.algo);

  const RunReport report = run_experiment(args.config);
  std::cout << render_report(report, ReportFormat::csv);
  std::cout << "applied swaps: " << report.applied_swaps << "\n";
  if (!args.config.out_dir.empty()) std::cout << "report files -> " << args.config.out_dir << "\n";
  return 0;
}

struct CompareArgs {
  std::string a, b, out;
};

int cmd_compare(const CompareArgs& args) {
  const RunReport a = run_report_from_json_file(args.a);
  const RunReport b = run_report_from_json_file(args.b);
  const RunComparison cmp = compare_runs(a, b);
  const std::string csv = cmp.render_csv();
  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) throw std::runtime_error("cannot write comparison: " + args.out);
    out << csv;
  }
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collaborative-filtering lists, continent/popularity bias measures, and the "
               "MFAIR two-phase re-ranking"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "parse, filter, split and build the catalog");
  ingest_cmd->add_option("--dataset", ingest.dataset, "rating file")->required();
  ingest_cmd->add_option("--format", ingest.format, "movielens_dat|bookcrossing_csv|generic_tsv");
  ingest_cmd->add_option("--continents", ingest.continents, "continent sidecar")->required();
  ingest_cmd->add_option("--min-ratings", ingest.min_ratings, "min-activity threshold");
  ingest_cmd->add_option("--split", ingest.split, "train fraction (default 0.8)");
  ingest_cmd->add_option("--seed", ingest.seed, "split seed");
  ingest_cmd->add_option("--out", ingest.out, "output directory")->required();

  RecommendArgs recommend;
  auto* rec_cmd = app.add_subcommand("recommend", "produce top-n lists from a train split");
  rec_cmd->add_option("--train", recommend.train, "train.tsv from ingest")->required();
  rec_cmd->add_option("--catalog", recommend.catalog, "catalog.tsv from ingest")->required();
  rec_cmd->add_option("--algo", recommend.algo,
                      "mostpop|random|userknn|itemknn|biasedmf|bpr");
  rec_cmd->add_option("--topn", recommend.topn, "list length (default 150)");
  rec_cmd->add_option("--seed", recommend.seed, "model seed");
  rec_cmd->add_option("--neighbors", recommend.neighbors, "knn neighborhood size");
  rec_cmd->add_option("--factors", recommend.factors, "latent factors");
  rec_cmd->add_option("--lr", recommend.lr, "learning rate");
  rec_cmd->add_option("--reg", recommend.reg, "regularization");
  rec_cmd->add_option("--epochs", recommend.epochs, "training epochs");
  rec_cmd->add_option("--out", recommend.out, "output list file")->required();

  MitigateArgs mitigate;
  auto* mit_cmd = app.add_subcommand("mitigate", "re-rank lists with the two-phase greedy");
  mit_cmd->add_option("--lists", mitigate.lists, "input lists tsv")->required();
  mit_cmd->add_option("--catalog", mitigate.catalog, "catalog.tsv")->required();
  mit_cmd->add_option("--targets", mitigate.targets, "targets.json")->required();
  mit_cmd->add_option("--target", mitigate.target, "item|rating");
  mit_cmd->add_option("--topk", mitigate.topk, "re-ranked cutoff (default 20)");
  mit_cmd->add_option("--eps", mitigate.eps, "popularity penalty weight (default 1.0)");
  mit_cmd->add_option("--phases", mitigate.phases, "visibility|exposure|both");
  mit_cmd->add_flag("--strict", mitigate.strict, "also guard demotions");
  mit_cmd->add_option("--out", mitigate.out, "output list file")->required();

  EvaluateArgs evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "bias and NDCG report for lists");
  eval_cmd->add_option("--lists", evaluate.lists, "lists tsv")->required();
  eval_cmd->add_option("--catalog", evaluate.catalog, "catalog.tsv")->required();
  eval_cmd->add_option("--targets", evaluate.targets, "targets.json")->required();
  eval_cmd->add_option("--target", evaluate.target, "item|rating");
  eval_cmd->add_option("--test", evaluate.test, "test.tsv from ingest")->required();
  eval_cmd->add_option("--topk", evaluate.topk, "cutoff (default 20)");
  eval_cmd->add_option("--out", evaluate.out, "output directory")->required();

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "end-to-end experiment");
  run_cmd->add_option("--dataset", run.config.dataset_path, "rating file")->required();
  run_cmd->add_option("--format", run.format, "movielens_dat|bookcrossing_csv|generic_tsv");
  run_cmd->add_option("--continents", run.config.continents_path, "continent sidecar")
      ->required();
  run_cmd->add_option("--algo", run.algo, "mostpop|random|userknn|itemknn|biasedmf|bpr");
  run_cmd->add_option("--target", run.target, "item|rating");
  run_cmd->add_option("--topn", run.config.n, "candidate list length (default 150)");
  run_cmd->add_option("--topk", run.config.k, "re-ranked cutoff (default 20)");
  run_cmd->add_option("--eps", run.config.eps, "popularity penalty weight (default 1.0)");
  run_cmd->add_option("--seed", run.config.seed, "seed");
  run_cmd->add_option("--phases", run.phases, "visibility|exposure|both");
  run_cmd->add_option("--min-ratings", run.config.min_ratings, "min-activity threshold");
  run_cmd->add_option("--split", run.config.train_fraction, "train fraction");
  run_cmd->add_flag("--strict", run.config.strict_demote, "also guard demotions");
  run_cmd->add_option("--neighbors", run.config.knn_neighbors, "knn neighborhood size");
  run_cmd->add_option("--factors", run.config.mf_factors, "latent factors");
  run_cmd->add_option("--lr", run.config.mf_lr, "learning rate");
  run_cmd->add_option("--reg", run.config.mf_reg, "regularization");
  run_cmd->add_option("--epochs", run.config.mf_epochs, "training epochs");
  run_cmd->add_option("--out", run.config.out_dir, "output directory");

  CompareArgs compare;
  auto* cmp_cmd = app.add_subcommand("compare", "diff two run reports");
  cmp_cmd->add_option("--a", compare.a, "baseline report.json")->required();
  cmp_cmd->add_option("--b", compare.b, "candidate report.json")->required();
  cmp_cmd->add_option("--out", compare.out, "comparison csv");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset to try the pipeline");
  synth_cmd->add_option("--users", synth.users, "number of users");
  synth_cmd->add_option("--items", synth.items, "number of items");
  synth_cmd->add_option("--weights", synth.weights, "continent weights, e.g. NA=0.6,EU=0.4");
  synth_cmd->add_option("--skew", synth.skew, "popularity power-law exponent");
  synth_cmd->add_option("--seed", synth.seed, "generator seed");
  synth_cmd->add_option("--ratings-per-user", synth.ratings_per_user, "profile size");
  synth_cmd->add_option("--out", synth.out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest_cmd->parsed()) return cmd_ingest(ingest);
    if (rec_cmd->parsed()) return cmd_recommend(recommend);
    if (mit_cmd->parsed()) return cmd_mitigate(mitigate);
    if (eval_cmd->parsed()) return cmd_evaluate(evaluate);
    if (run_cmd->parsed()) return cmd_run(run);
    if (cmp_cmd->parsed()) return cmd_compare(compare);
    if (synth_cmd->parsed()) return cmd_synth(synth);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
