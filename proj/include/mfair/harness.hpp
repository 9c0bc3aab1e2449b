#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mfair/dataset.hpp"
#include "mfair/metrics.hpp"
#include "mfair/mitigate.hpp"
#include "mfair/recommend.hpp"
#include "mfair/types.hpp"

namespace mfair {

// End-to-end experiment: ingest -> recommend -> mitigate -> measure.
struct ExperimentConfig {
  std::string dataset_path;
  DatasetFormat format = DatasetFormat::generic_tsv;
  std::string continents_path;
  Algorithm algo = Algorithm::mostpop;
  TargetMode target_mode = TargetMode::item_based;
  std::size_t n = 150;
  std::size_t k = 20;
  double eps = 1.0;
  std::uint64_t seed = 42;
  MitigationPhases phases = MitigationPhases::both;
  std::string out_dir;  // empty = no files written

  std::size_t min_ratings = 1;
  double train_fraction = 0.8;
  bool strict_demote = false;

  std::size_t knn_neighbors = 50;
  std::size_t mf_factors = 10;
  double mf_lr = 0.01;
  double mf_reg = 0.01;
  std::size_t mf_epochs = 30;

  void validate() const;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunReport {
  // configuration echo, so reports are self-describing and comparable
  std::string dataset;
  std::string algorithm;
  TargetMode target_mode = TargetMode::item_based;
  std::size_t n = 0;
  std::size_t k = 0;
  double eps = 1.0;
  std::uint64_t seed = 0;
  std::string phases;

  BiasReport vanilla;
  // phase name ("after_visibility" / "after_exposure") -> report
  std::vector<std::pair<std::string, BiasReport>> mitigated;
  std::size_t applied_swaps = 0;
  std::size_t penalty_adjustments = 0;
  std::vector<StageTiming> timings;

  const BiasReport& final_report() const;
};

// Runs the full pipeline deterministically for the given seed. When
// config.out_dir is set, writes report.json, report.csv, plotdata.csv and
// the vanilla/mitigated list files there. Any stage failure is rethrown
// with the stage name attached.
RunReport run_experiment(const ExperimentConfig& config);

enum class ReportFormat : std::uint8_t { json, csv, plotdata };

// Serializes a run report. CSV rows are
// `algorithm,metric,group,vanilla,mitigated` with bias in percentage at two
// decimals and NDCG raw at three; JSON carries raw fractions; plotdata is a
// long-form table with one row per (metric, group, stage).
std::string render_report(const RunReport& report, ReportFormat format);
void emit_report(const RunReport& report, ReportFormat format, const std::string& path);

std::string run_report_to_json(const RunReport& report);
RunReport run_report_from_json_file(const std::string& path);

// Standalone bias report serialization: `metric,group,value` CSV
// (percentages) and JSON (fractions).
std::string bias_report_to_csv(const BiasReport& report, TargetMode mode);
std::string bias_report_to_json(const BiasReport& report, TargetMode mode);

struct ComparisonRow {
  std::string metric;  // e.g. "VB_I"
  std::string group;   // continent, popularity group, or "total"
  double value_a = 0.0;
  double value_b = 0.0;
  double delta = 0.0;   // |b| - |a| for bias rows, b - a for NDCG
  bool improved = false;  // improvement or no change in b relative to a
};

struct RunComparison {
  std::vector<ComparisonRow> rows;
  std::string render_csv() const;
};

// Per-group and total-bias deltas between two runs over the same dataset,
// split and k; throws on mismatched configurations.
RunComparison compare_runs(const RunReport& a, const RunReport& b);

// Ingest artifacts for the file-based CLI stages.
void write_catalog_tsv(const ItemCatalog& catalog, const std::string& path);
ItemCatalog read_catalog_tsv(const std::string& path);
void write_targets_json(const TargetDistribution& item_based,
                        const TargetDistribution& rating_based, const std::string& path);
TargetDistribution read_targets_json(const std::string& path, TargetMode mode);

}  // namespace mfair
