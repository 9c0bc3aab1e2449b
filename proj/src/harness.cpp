#include "mfair/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mfair/io.hpp"

namespace mfair {

namespace {

using nlohmann::json;

std::string pct2(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

std::string pct4(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", fraction * 100.0);
  return buf;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string metric_name(BiasKind kind, TargetMode mode) {
  const std::string base = kind == BiasKind::visibility ? "VB" : "EB";
  return base + (mode == TargetMode::item_based ? "_I" : "_R");
}

const char* mode_name(TargetMode mode) {
  return mode == TargetMode::item_based ? "item" : "rating";
}

TargetMode mode_from_name(const std::string& name) {
  if (name == "item" || name == "item_based") return TargetMode::item_based;
  if (name == "rating" || name == "rating_based") return TargetMode::rating_based;
  throw std::invalid_argument("unknown target mode: '" + name + "'");
}

json bias_values_to_json(const std::vector<BiasValue>& values) {
  json arr = json::array();
  for (const auto& v : values) arr.push_back({{"group", v.group}, {"value", v.value}});
  return arr;
}

std::vector<BiasValue> bias_values_from_json(const json& arr) {
  std::vector<BiasValue> out;
  for (const auto& v : arr) out.push_back({v.at("group").get<std::string>(), v.at("value").get<double>()});
  return out;
}

json bias_report_json(const BiasReport& report) {
  return json{{"k", report.k},
              {"ndcg", report.ndcg},
              {"continent_vb", bias_values_to_json(report.continent_vb)},
              {"continent_eb", bias_values_to_json(report.continent_eb)},
              {"pop_vb", bias_values_to_json(report.pop_vb)},
              {"pop_eb", bias_values_to_json(report.pop_eb)}};
}

BiasReport bias_report_from_json(const json& j) {
  BiasReport report;
  report.k = j.at("k").get<std::size_t>();
  report.ndcg = j.at("ndcg").get<double>();
  report.continent_vb = bias_values_from_json(j.at("continent_vb"));
  report.continent_eb = bias_values_from_json(j.at("continent_eb"));
  report.pop_vb = bias_values_from_json(j.at("pop_vb"));
  report.pop_eb = bias_values_from_json(j.at("pop_eb"));
  return report;
}

class StageClock {
 public:
  explicit StageClock(RunReport* report) : report_(report) {}

  template <typename F>
  auto run(const std::string& stage, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    try {
      auto result = f();
      record(stage, start);
      return result;
    } catch (const std::exception& e) {
      throw std::runtime_error("stage '" + stage + "' failed: " + e.what());
    }
  }

 private:
  void record(const std::string& stage,
              std::chrono::steady_clock::time_point start) {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    report_->timings.push_back({stage, dt.count()});
  }

  RunReport* report_;
};

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset_path.empty()) throw std::invalid_argument("dataset path is required");
  if (continents_path.empty()) throw std::invalid_argument("continents path is required");
  if (!std::filesystem::exists(dataset_path))
    throw std::invalid_argument("dataset file not found: " + dataset_path);
  if (!std::filesystem::exists(continents_path))
    throw std::invalid_argument("continents file not found: " + continents_path);
  if (k < 1 || k >= n) throw std::invalid_argument("need 1 <= k < n");
  if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("eps must lie in [0, 1]");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train fraction must lie in (0, 1)");
}

const BiasReport& RunReport::final_report() const {
  return mitigated.empty() ? vanilla : mitigated.back().second;
}

RunReport run_experiment(const ExperimentConfig& config) {
  config.validate();

  RunReport report;
  report.dataset = config.dataset_path;
  report.algorithm = to_string(config.algo);
  report.target_mode = config.target_mode;
  report.n = config.n;
  report.k = config.k;
  report.eps = config.eps;
  report.seed = config.seed;
  report.phases = to_string(config.phases);

  StageClock clock(&report);

  auto data = clock.run("ingest", [&] {
    auto set = parse_interactions(config.dataset_path, config.format);
    if (config.min_ratings > 1) set = filter_min_activity(set, config.min_ratings);
    return split_train_test(set, config.train_fraction, config.seed);
  });
  const InteractionSet& train = data.first;
  const InteractionSet& test = data.second;

  struct CatalogBundle {
    ItemCatalog catalog;
    TargetDistribution targets;
  };
  auto bundle = clock.run("catalog", [&] {
    auto continents = load_continent_map(config.continents_path);
    CatalogBundle b;
    b.catalog = build_catalog(train, continents);
    b.targets = make_targets(train, b.catalog, config.target_mode);
    return b;
  });

  auto vanilla_lists = clock.run("recommend", [&] {
    switch (config.algo) {
      case Algorithm::mostpop: return most_popular(train, bundle.catalog, config.n);
      case Algorithm::random: return random_guess(train, bundle.catalog, config.n, config.seed);
      case Algorithm::userknn:
        return knn(train, bundle.catalog, KnnMode::user, config.knn_neighbors, config.n);
      case Algorithm::itemknn:
        return knn(train, bundle.catalog, KnnMode::item, config.knn_neighbors, config.n);
      case Algorithm::biasedmf:
        return biased_mf(train, bundle.catalog, config.mf_factors, config.mf_lr, config.mf_reg,
                         config.mf_epochs, config.seed, config.n);
      case Algorithm::bpr:
        return bpr(train, bundle.catalog, config.mf_factors, config.mf_lr, config.mf_reg,
                   config.mf_epochs, config.seed, config.n);
    }
    throw std::logic_error("invalid algorithm value");
  });

  report.vanilla = clock.run("measure_vanilla", [&] {
    return measure(vanilla_lists, bundle.catalog, bundle.targets, test, config.k);
  });

  MitigationStats stats;
  auto mitigated_lists = clock.run("mitigate", [&] {
    MitigationConfig mc;
    mc.k = config.k;
    mc.n = config.n;
    mc.eps = config.eps;
    mc.target_mode = config.target_mode;
    mc.phases = config.phases;
    mc.strict_demote = config.strict_demote;
    return mitigate_two_phase(vanilla_lists, bundle.catalog, bundle.targets, mc, &stats);
  });
  report.applied_swaps = stats.total_applied();
  report.penalty_adjustments = stats.total_penalty_adjustments();

  clock.run("measure_mitigated", [&] {
    if (config.phases == MitigationPhases::both) {
      // re-run the first phase alone so each report row is attributable
      MitigationConfig mc;
      mc.k = config.k;
      mc.n = config.n;
      mc.eps = config.eps;
      mc.target_mode = config.target_mode;
      mc.strict_demote = config.strict_demote;
      auto after_vis =
          mfair_phase(vanilla_lists, bundle.catalog, bundle.targets, BiasKind::visibility, mc);
      report.mitigated.push_back(
          {"after_visibility",
           measure(after_vis, bundle.catalog, bundle.targets, test, config.k)});
      report.mitigated.push_back(
          {"after_exposure",
           measure(mitigated_lists, bundle.catalog, bundle.targets, test, config.k)});
    } else {
      const char* name = config.phases == MitigationPhases::visibility_only ? "after_visibility"
                                                                            : "after_exposure";
      report.mitigated.push_back(
          {name, measure(mitigated_lists, bundle.catalog, bundle.targets, test, config.k)});
    }
    return 0;
  });

  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path dir(config.out_dir);
    write_lists_tsv(vanilla_lists, (dir / "lists_vanilla.tsv").string());
    write_lists_tsv(mitigated_lists, (dir / "lists_mitigated.tsv").string());
    emit_report(report, ReportFormat::json, (dir / "report.json").string());
    emit_report(report, ReportFormat::csv, (dir / "report.csv").string());
    emit_report(report, ReportFormat::plotdata, (dir / "plotdata.csv").string());
    json timings = json::array();
    for (const auto& t : report.timings)
      timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    std::ofstream tout((dir / "timings.json").string());
    tout << timings.dump(2) << '\n';
  }
  return report;
}

namespace {

void append_csv_rows(std::ostringstream& out, const RunReport& report, BiasKind kind,
                     bool popularity) {
  const auto& before = popularity
                           ? (kind == BiasKind::visibility ? report.vanilla.pop_vb
                                                           : report.vanilla.pop_eb)
                           : (kind == BiasKind::visibility ? report.vanilla.continent_vb
                                                           : report.vanilla.continent_eb);
  const BiasReport& final_rep = report.final_report();
  const auto& after = popularity
                          ? (kind == BiasKind::visibility ? final_rep.pop_vb : final_rep.pop_eb)
                          : (kind == BiasKind::visibility ? final_rep.continent_vb
                                                          : final_rep.continent_eb);
  const std::string metric = metric_name(kind, report.target_mode);
  for (std::size_t i = 0; i < before.size(); ++i) {
    out << report.algorithm << ',' << metric << ',' << before[i].group << ','
        << pct2(before[i].value) << ',' << pct2(after[i].value) << '\n';
  }
  out << report.algorithm << ',' << metric << ",total," << pct2(total_bs(before)) << ','
      << pct2(total_bs(after)) << '\n';
}

void append_plot_rows(std::ostringstream& out, const std::string& algorithm,
                      const std::string& stage, const BiasReport& report, TargetMode mode) {
  const struct {
    BiasKind kind;
    const std::vector<BiasValue>* values;
    const char* family;
  } blocks[] = {
      {BiasKind::visibility, &report.continent_vb, "continent"},
      {BiasKind::exposure, &report.continent_eb, "continent"},
      {BiasKind::visibility, &report.pop_vb, "popularity"},
      {BiasKind::exposure, &report.pop_eb, "popularity"},
  };
  for (const auto& block : blocks) {
    for (const auto& v : *block.values) {
      out << algorithm << ',' << metric_name(block.kind, mode) << ',' << block.family << ','
          << v.group << ',' << stage << ',' << pct4(v.value) << '\n';
    }
  }
  out << algorithm << ",NDCG,accuracy,," << stage << ',' << fixed3(report.ndcg) << '\n';
}

}  // namespace

std::string render_report(const RunReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json:
      return run_report_to_json(report);
    case ReportFormat::csv: {
      std::ostringstream out;
      out << "algorithm,metric,group,vanilla,mitigated\n";
      append_csv_rows(out, report, BiasKind::visibility, false);
      append_csv_rows(out, report, BiasKind::exposure, false);
      append_csv_rows(out, report, BiasKind::visibility, true);
      append_csv_rows(out, report, BiasKind::exposure, true);
      out << report.algorithm << ",NDCG,," << fixed3(report.vanilla.ndcg) << ','
          << fixed3(report.final_report().ndcg) << '\n';
      return out.str();
    }
    case ReportFormat::plotdata: {
      std::ostringstream out;
      out << "algorithm,metric,family,group,stage,value\n";
      append_plot_rows(out, report.algorithm, "vanilla", report.vanilla, report.target_mode);
      for (const auto& [phase, rep] : report.mitigated)
        append_plot_rows(out, report.algorithm, phase, rep, report.target_mode);
      return out.str();
    }
  }
  throw std::logic_error("invalid report format");
}

void emit_report(const RunReport& report, ReportFormat format, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << render_report(report, format);
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string run_report_to_json(const RunReport& report) {
  json j;
  j["dataset"] = report.dataset;
  j["algorithm"] = report.algorithm;
  j["target_mode"] = mode_name(report.target_mode);
  j["n"] = report.n;
  j["k"] = report.k;
  j["eps"] = report.eps;
  j["seed"] = report.seed;
  j["phases"] = report.phases;
  j["applied_swaps"] = report.applied_swaps;
  j["penalty_adjustments"] = report.penalty_adjustments;
  j["vanilla"] = bias_report_json(report.vanilla);
  json phases = json::array();
  for (const auto& [name, rep] : report.mitigated)
    phases.push_back({{"phase", name}, {"report", bias_report_json(rep)}});
  j["mitigated"] = phases;
  // timings are emitted separately so report files stay byte-reproducible
  return j.dump(2) + "\n";
}

RunReport run_report_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report: " + path);
  json j = json::parse(in);

  RunReport report;
  report.dataset = j.at("dataset").get<std::string>();
  report.algorithm = j.at("algorithm").get<std::string>();
  report.target_mode = mode_from_name(j.at("target_mode").get<std::string>());
  report.n = j.at("n").get<std::size_t>();
  report.k = j.at("k").get<std::size_t>();
  report.eps = j.at("eps").get<double>();
  report.seed = j.at("seed").get<std::uint64_t>();
  report.phases = j.at("phases").get<std::string>();
  report.applied_swaps = j.at("applied_swaps").get<std::size_t>();
  report.penalty_adjustments = j.at("penalty_adjustments").get<std::size_t>();
  report.vanilla = bias_report_from_json(j.at("vanilla"));
  for (const auto& entry : j.at("mitigated"))
    report.mitigated.push_back({entry.at("phase").get<std::string>(),
                                bias_report_from_json(entry.at("report"))});
  return report;
}

std::string bias_report_to_csv(const BiasReport& report, TargetMode mode) {
  std::ostringstream out;
  out << "metric,group,value\n";
  const struct {
    BiasKind kind;
    const std::vector<BiasValue>* values;
  } blocks[] = {
      {BiasKind::visibility, &report.continent_vb},
      {BiasKind::exposure, &report.continent_eb},
      {BiasKind::visibility, &report.pop_vb},
      {BiasKind::exposure, &report.pop_eb},
  };
  for (const auto& block : blocks) {
    for (const auto& v : *block.values)
      out << metric_name(block.kind, mode) << ',' << v.group << ',' << pct2(v.value) << '\n';
    out << metric_name(block.kind, mode) << ",total," << pct2(total_bs(*block.values)) << '\n';
  }
  out << "NDCG,," << fixed3(report.ndcg) << '\n';
  return out.str();
}

std::string bias_report_to_json(const BiasReport& report, TargetMode mode) {
  json j = bias_report_json(report);
  j["target_mode"] = mode_name(mode);
  j["total_bs"] = {{"continent_vb", total_bs(report.continent_vb)},
                   {"continent_eb", total_bs(report.continent_eb)},
                   {"pop_vb", total_bs(report.pop_vb)},
                   {"pop_eb", total_bs(report.pop_eb)}};
  return j.dump(2) + "\n";
}

namespace {

void append_comparison(std::vector<ComparisonRow>& rows, const std::string& metric,
                       const std::vector<BiasValue>& a, const std::vector<BiasValue>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("mismatched configurations: different group sets");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].group != b[i].group)
      throw std::invalid_argument("mismatched configurations: different group sets");
    ComparisonRow row;
    row.metric = metric;
    row.group = a[i].group;
    row.value_a = a[i].value;
    row.value_b = b[i].value;
    row.delta = std::abs(b[i].value) - std::abs(a[i].value);
    row.improved = row.delta <= 0.0;
    rows.push_back(row);
  }
  ComparisonRow total;
  total.metric = metric;
  total.group = "total";
  total.value_a = total_bs(a);
  total.value_b = total_bs(b);
  total.delta = total.value_b - total.value_a;
  total.improved = total.delta <= 0.0;
  rows.push_back(total);
}

}  // namespace

RunComparison compare_runs(const RunReport& a, const RunReport& b) {
  if (a.dataset != b.dataset)
    throw std::invalid_argument("mismatched configurations: different datasets");
  if (a.k != b.k) throw std::invalid_argument("mismatched configurations: different k");
  if (a.seed != b.seed)
    throw std::invalid_argument("mismatched configurations: different splits (seed)");
  if (a.target_mode != b.target_mode)
    throw std::invalid_argument("mismatched configurations: different target modes");

  const BiasReport& ra = a.final_report();
  const BiasReport& rb = b.final_report();

  RunComparison cmp;
  append_comparison(cmp.rows, metric_name(BiasKind::visibility, a.target_mode) + "_cont",
                    ra.continent_vb, rb.continent_vb);
  append_comparison(cmp.rows, metric_name(BiasKind::exposure, a.target_mode) + "_cont",
                    ra.continent_eb, rb.continent_eb);
  append_comparison(cmp.rows, metric_name(BiasKind::visibility, a.target_mode) + "_pop",
                    ra.pop_vb, rb.pop_vb);
  append_comparison(cmp.rows, metric_name(BiasKind::exposure, a.target_mode) + "_pop",
                    ra.pop_eb, rb.pop_eb);

  ComparisonRow ndcg_row;
  ndcg_row.metric = "NDCG";
  ndcg_row.group = "";
  ndcg_row.value_a = ra.ndcg;
  ndcg_row.value_b = rb.ndcg;
  ndcg_row.delta = rb.ndcg - ra.ndcg;
  ndcg_row.improved = ndcg_row.delta >= 0.0;
  cmp.rows.push_back(ndcg_row);
  return cmp;
}

std::string RunComparison::render_csv() const {
  std::ostringstream out;
  out << "metric,group,a,b,delta,improved\n";
  for (const auto& row : rows) {
    const bool is_ndcg = row.metric == "NDCG";
    out << row.metric << ',' << row.group << ','
        << (is_ndcg ? fixed3(row.value_a) : pct2(row.value_a)) << ','
        << (is_ndcg ? fixed3(row.value_b) : pct2(row.value_b)) << ','
        << (is_ndcg ? fixed3(row.delta) : pct2(row.delta)) << ','
        << (row.improved ? "yes" : "no") << '\n';
  }
  return out.str();
}

void write_catalog_tsv(const ItemCatalog& catalog, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write catalog: " + path);
  for (const auto& e : catalog.entries()) {
    out << e.item << '\t';
    bool first = true;
    for (Continent c : e.continents.values()) {
      if (!first) out << ',';
      out << to_string(c);
      first = false;
    }
    out << '\t' << e.popularity << '\t' << to_string(e.group) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ItemCatalog read_catalog_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open catalog: " + path);
  std::vector<CatalogEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string item, codes, pop, group;
    if (!std::getline(fields, item, '\t') || !std::getline(fields, codes, '\t') ||
        !std::getline(fields, pop, '\t') || !std::getline(fields, group, '\t'))
      throw std::runtime_error("bad catalog line " + std::to_string(lineno) + " in " + path);
    CatalogEntry e;
    e.item = item;
    std::istringstream code_stream(codes);
    std::string code;
    while (std::getline(code_stream, code, ',')) e.continents.insert(continent_from_string(code));
    e.popularity = static_cast<std::uint32_t>(std::stoul(pop));
    e.group = popgroup_from_string(group);
    entries.push_back(std::move(e));
  }
  return ItemCatalog(std::move(entries));
}

namespace {

json targets_json_block(const TargetDistribution& t) {
  json cont = json::object();
  for (Continent c : kAllContinents) {
    const double v = t.continent[static_cast<std::size_t>(c)];
    if (v > 0.0) cont[to_string(c)] = v;
  }
  json pop = json::object();
  for (std::size_t g = 0; g < kNumPopGroups; ++g)
    pop[to_string(static_cast<PopGroup>(g))] = t.popgroup[g];
  return json{{"continent", cont}, {"popgroup", pop}};
}

TargetDistribution targets_from_json_block(const json& j, TargetMode mode) {
  TargetDistribution t;
  t.mode = mode;
  for (const auto& [code, value] : j.at("continent").items())
    t.continent[static_cast<std::size_t>(continent_from_string(code))] = value.get<double>();
  for (const auto& [name, value] : j.at("popgroup").items())
    t.popgroup[static_cast<std::size_t>(popgroup_from_string(name))] = value.get<double>();
  t.validate();
  return t;
}

}  // namespace

void write_targets_json(const TargetDistribution& item_based,
                        const TargetDistribution& rating_based, const std::string& path) {
  json j{{"item_based", targets_json_block(item_based)},
         {"rating_based", targets_json_block(rating_based)}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write targets: " + path);
  out << j.dump(2) << '\n';
}

TargetDistribution read_targets_json(const std::string& path, TargetMode mode) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open targets: " + path);
  json j = json::parse(in);
  return targets_from_json_block(
      j.at(mode == TargetMode::item_based ? "item_based" : "rating_based"), mode);
}

}  // namespace mfair
