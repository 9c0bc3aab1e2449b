#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "mfair/dataset.hpp"
#include "mfair/harness.hpp"
#include "mfair/io.hpp"
#include "mfair/metrics.hpp"
#include "mfair/mitigate.hpp"
#include "mfair/recommend.hpp"
#include "mfair/testkit.hpp"
#include "mfair/types.hpp"

namespace py = pybind11;
using namespace mfair;

namespace {

BiasKind bias_kind_from_string(const std::string& name) {
  if (name == "visibility") return BiasKind::visibility;
  if (name == "exposure") return BiasKind::exposure;
  throw std::invalid_argument("bias type must be 'visibility' or 'exposure'");
}

TargetMode target_mode_from_string(const std::string& name) {
  if (name == "item" || name == "item_based") return TargetMode::item_based;
  if (name == "rating" || name == "rating_based") return TargetMode::rating_based;
  throw std::invalid_argument("target mode must be 'item' or 'rating'");
}

std::map<std::string, double> continent_dict(const std::array<double, kNumContinents>& values) {
  std::map<std::string, double> out;
  for (Continent c : kAllContinents) {
    const double v = values[static_cast<std::size_t>(c)];
    if (v != 0.0) out[to_string(c)] = v;
  }
  return out;
}

std::map<std::string, double> popgroup_dict(const std::array<double, kNumPopGroups>& values) {
  std::map<std::string, double> out;
  for (std::size_t g = 0; g < kNumPopGroups; ++g)
    out[to_string(static_cast<PopGroup>(g))] = values[g];
  return out;
}

ContinentSet continent_set(const std::vector<std::string>& codes) {
  ContinentSet cs;
  for (const auto& code : codes) cs.insert(continent_from_string(code));
  return cs;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Continent/popularity bias measures and two-phase greedy re-ranking "
            "for collaborative-filtering recommendation lists";

  py::class_<Interaction>(m, "Interaction")
      .def(py::init([](std::string user, std::string item, double rating) {
             return Interaction{std::move(user), std::move(item), rating};
           }),
           py::arg("user"), py::arg("item"), py::arg("rating"))
      .def_readonly("user", &Interaction::user)
      .def_readonly("item", &Interaction::item)
      .def_readonly("rating", &Interaction::rating)
      .def("__repr__", [](const Interaction& r) {
        return "Interaction(" + r.user + ", " + r.item + ", " + std::to_string(r.rating) + ")";
      });

  py::class_<InteractionSet>(m, "InteractionSet")
      .def(py::init<>())
      .def("add",
           [](InteractionSet& set, std::string user, std::string item, double rating) {
             set.interactions.push_back({std::move(user), std::move(item), rating});
           },
           py::arg("user"), py::arg("item"), py::arg("rating"))
      .def_readonly("interactions", &InteractionSet::interactions)
      .def("__len__", &InteractionSet::size)
      .def("user_count", &InteractionSet::user_count)
      .def("item_count", &InteractionSet::item_count);

  py::class_<CatalogEntry>(m, "CatalogEntry")
      .def(py::init([](std::string item, const std::vector<std::string>& continents,
                       std::uint32_t popularity, const std::string& group) {
             return CatalogEntry{std::move(item), continent_set(continents), popularity,
                                 popgroup_from_string(group)};
           }),
           py::arg("item"), py::arg("continents"), py::arg("popularity"), py::arg("group"))
      .def_readonly("item", &CatalogEntry::item)
      .def_property_readonly("continents",
                             [](const CatalogEntry& e) {
                               std::vector<std::string> out;
                               for (Continent c : e.continents.values())
                                 out.push_back(to_string(c));
                               return out;
                             })
      .def_readonly("popularity", &CatalogEntry::popularity)
      .def_property_readonly("group",
                             [](const CatalogEntry& e) { return std::string(to_string(e.group)); });

  py::class_<ItemCatalog>(m, "ItemCatalog")
      .def(py::init<std::vector<CatalogEntry>>(), py::arg("entries"))
      .def("__len__", &ItemCatalog::size)
      .def("contains", &ItemCatalog::contains)
      .def("at", &ItemCatalog::at, py::return_value_policy::copy)
      .def_property_readonly("entries", &ItemCatalog::entries);

  py::class_<TargetDistribution>(m, "TargetDistribution")
      .def(py::init([](const std::map<std::string, double>& continent,
                       const std::map<std::string, double>& popgroup, const std::string& mode) {
             TargetDistribution t;
             t.mode = target_mode_from_string(mode);
             for (const auto& [code, v] : continent)
               t.continent[static_cast<std::size_t>(continent_from_string(code))] = v;
             for (const auto& [name, v] : popgroup)
               t.popgroup[static_cast<std::size_t>(popgroup_from_string(name))] = v;
             t.validate();
             return t;
           }),
           py::arg("continent"), py::arg("popgroup"), py::arg("mode") = "item")
      .def_property_readonly(
          "continent", [](const TargetDistribution& t) { return continent_dict(t.continent); })
      .def_property_readonly(
          "popgroup", [](const TargetDistribution& t) { return popgroup_dict(t.popgroup); });

  py::class_<ScoredItem>(m, "ScoredItem")
      .def(py::init([](std::string item, double score) {
             return ScoredItem{std::move(item), score};
           }),
           py::arg("item"), py::arg("score"))
      .def_readonly("item", &ScoredItem::item)
      .def_readonly("score", &ScoredItem::score)
      .def("__repr__", [](const ScoredItem& s) {
        return "ScoredItem(" + s.item + ", " + std::to_string(s.score) + ")";
      });

  py::class_<RecommendationList>(m, "RecommendationList")
      .def(py::init([](std::string user, const std::vector<std::pair<std::string, double>>& entries) {
             RecommendationList list;
             list.user = std::move(user);
             for (const auto& [item, score] : entries) list.entries.push_back({item, score});
             return list;
           }),
           py::arg("user"), py::arg("entries"))
      .def_readonly("user", &RecommendationList::user)
      .def_readonly("entries", &RecommendationList::entries)
      .def("items", [](const RecommendationList& list) {
        std::vector<std::string> out;
        for (const auto& e : list.entries) out.push_back(e.item);
        return out;
      })
      .def("__len__", &RecommendationList::size);

  // dataset
  m.def("parse_interactions",
        [](const std::string& path, const std::string& format) {
          return parse_interactions(path, format_from_string(format));
        },
        py::arg("path"), py::arg("format"));
  m.def("filter_min_activity",
        [](const InteractionSet& set, std::size_t min_ratings) {
          return filter_min_activity(set, min_ratings);
        },
        py::arg("set"), py::arg("min_ratings"));
  m.def("split_train_test", &split_train_test, py::arg("set"), py::arg("train_fraction"),
        py::arg("seed"));
  m.def("load_continent_map",
        [](const std::string& path) {
          std::map<std::string, std::vector<std::string>> out;
          for (const auto& [item, cs] : load_continent_map(path)) {
            std::vector<std::string> codes;
            for (Continent c : cs.values()) codes.push_back(to_string(c));
            out[item] = codes;
          }
          return out;
        },
        py::arg("path"));
  m.def("build_catalog",
        [](const InteractionSet& train,
           const std::map<std::string, std::vector<std::string>>& continents) {
          std::map<std::string, ContinentSet, IdLess> cmap;
          for (const auto& [item, codes] : continents) cmap.emplace(item, continent_set(codes));
          return build_catalog(train, cmap);
        },
        py::arg("train"), py::arg("continents"));
  m.def("target_popularity",
        [](const ItemCatalog& catalog) { return popgroup_dict(target_popularity(catalog)); },
        py::arg("catalog"));
  m.def("target_continent",
        [](const InteractionSet& train, const ItemCatalog& catalog, const std::string& mode) {
          return continent_dict(target_continent(train, catalog, target_mode_from_string(mode)));
        },
        py::arg("train"), py::arg("catalog"), py::arg("mode"));
  m.def("make_targets",
        [](const InteractionSet& train, const ItemCatalog& catalog, const std::string& mode) {
          return make_targets(train, catalog, target_mode_from_string(mode));
        },
        py::arg("train"), py::arg("catalog"), py::arg("mode"));

  // recommenders
  m.def("most_popular", &most_popular, py::arg("train"), py::arg("catalog"), py::arg("n"));
  m.def("random_guess", &random_guess, py::arg("train"), py::arg("catalog"), py::arg("n"),
        py::arg("seed"));
  m.def("knn",
        [](const InteractionSet& train, const ItemCatalog& catalog, const std::string& mode,
           std::size_t k_neighbors, std::size_t n, bool popularity_backfill) {
          const KnnMode knn_mode = mode == "user" ? KnnMode::user
                                 : mode == "item" ? KnnMode::item
                                                  : throw std::invalid_argument(
                                                        "knn mode must be 'user' or 'item'");
          return knn(train, catalog, knn_mode, k_neighbors, n, popularity_backfill);
        },
        py::arg("train"), py::arg("catalog"), py::arg("mode"), py::arg("k_neighbors") = 50,
        py::arg("n") = 150, py::arg("popularity_backfill") = false);
  m.def("biased_mf",
        [](const InteractionSet& train, const ItemCatalog& catalog, std::size_t factors,
           double lr, double reg, std::size_t epochs, std::uint64_t seed, std::size_t n) {
          return biased_mf(train, catalog, factors, lr, reg, epochs, seed, n);
        },
        py::arg("train"), py::arg("catalog"), py::arg("factors") = 10, py::arg("lr") = 0.01,
        py::arg("reg") = 0.01, py::arg("epochs") = 30, py::arg("seed") = 42, py::arg("n") = 150);
  m.def("bpr",
        [](const InteractionSet& train, const ItemCatalog& catalog, std::size_t factors,
           double lr, double reg, std::size_t epochs, std::uint64_t seed, std::size_t n) {
          return bpr(train, catalog, factors, lr, reg, epochs, seed, n);
        },
        py::arg("train"), py::arg("catalog"), py::arg("factors") = 10, py::arg("lr") = 0.01,
        py::arg("reg") = 0.01, py::arg("epochs") = 30, py::arg("seed") = 42, py::arg("n") = 150);

  // metrics
  py::class_<BiasValue>(m, "BiasValue")
      .def_readonly("group", &BiasValue::group)
      .def_readonly("value", &BiasValue::value)
      .def("__repr__", [](const BiasValue& v) {
        return "BiasValue(" + v.group + ", " + std::to_string(v.value) + ")";
      });

  py::class_<BiasReport>(m, "BiasReport")
      .def_readonly("k", &BiasReport::k)
      .def_readonly("continent_vb", &BiasReport::continent_vb)
      .def_readonly("continent_eb", &BiasReport::continent_eb)
      .def_readonly("pop_vb", &BiasReport::pop_vb)
      .def_readonly("pop_eb", &BiasReport::pop_eb)
      .def_readonly("ndcg", &BiasReport::ndcg)
      .def("total",
           [](const BiasReport& r, const std::string& kind, bool popularity) {
             return r.total(bias_kind_from_string(kind), popularity);
           },
           py::arg("kind"), py::arg("popularity"));

  m.def("visibility_bias_continent", &visibility_bias_continent, py::arg("lists"),
        py::arg("catalog"), py::arg("target"), py::arg("k"), py::arg("pooled") = false);
  m.def("visibility_bias_popgroup", &visibility_bias_popgroup, py::arg("lists"),
        py::arg("catalog"), py::arg("target"), py::arg("k"));
  m.def("exposure_bias_continent", &exposure_bias_continent, py::arg("lists"), py::arg("catalog"),
        py::arg("target"), py::arg("k"), py::arg("pooled") = false);
  m.def("exposure_bias_popgroup", &exposure_bias_popgroup, py::arg("lists"), py::arg("catalog"),
        py::arg("target"), py::arg("k"));
  m.def("total_bs", &total_bs, py::arg("values"));
  m.def("ndcg", &ndcg, py::arg("lists"), py::arg("test"), py::arg("k"));
  m.def("measure", &measure, py::arg("lists"), py::arg("catalog"), py::arg("target"),
        py::arg("test"), py::arg("k"));

  // mitigation
  py::class_<GroupDeltas>(m, "GroupDeltas")
      .def_property_readonly("continent",
                             [](const GroupDeltas& d) { return continent_dict(d.continent); })
      .def_property_readonly("popgroup",
                             [](const GroupDeltas& d) { return popgroup_dict(d.popgroup); })
      .def_property_readonly("bias_type", [](const GroupDeltas& d) {
        return std::string(to_string(d.bias_type));
      });

  py::class_<MitigationConfig>(m, "MitigationConfig")
      .def(py::init([](std::size_t k, std::size_t n, double eps, const std::string& target_mode,
                       const std::string& phases, bool strict_demote, bool pooled_shares) {
             MitigationConfig config;
             config.k = k;
             config.n = n;
             config.eps = eps;
             config.target_mode = target_mode_from_string(target_mode);
             config.phases = phases_from_string(phases);
             config.strict_demote = strict_demote;
             config.pooled_shares = pooled_shares;
             config.validate();
             return config;
           }),
           py::arg("k") = 20, py::arg("n") = 150, py::arg("eps") = 1.0,
           py::arg("target_mode") = "item", py::arg("phases") = "both",
           py::arg("strict_demote") = false, py::arg("pooled_shares") = false)
      .def_readwrite("k", &MitigationConfig::k)
      .def_readwrite("n", &MitigationConfig::n)
      .def_readwrite("eps", &MitigationConfig::eps)
      .def_readwrite("strict_demote", &MitigationConfig::strict_demote);

  py::class_<PhaseStats>(m, "PhaseStats")
      .def_property_readonly("bias_type",
                             [](const PhaseStats& p) { return std::string(to_string(p.bias_type)); })
      .def_readonly("candidates", &PhaseStats::candidates)
      .def_readonly("applied_swaps", &PhaseStats::applied_swaps)
      .def_readonly("discarded_swaps", &PhaseStats::discarded_swaps)
      .def_readonly("penalty_adjustments", &PhaseStats::penalty_adjustments)
      .def_readonly("min_raw_loss", &PhaseStats::min_raw_loss);

  m.def("compute_deltas",
        [](const std::vector<RecommendationList>& lists, const ItemCatalog& catalog,
           const TargetDistribution& target, const std::string& bias_type, std::size_t k) {
          return compute_deltas(lists, catalog, target, bias_kind_from_string(bias_type), k);
        },
        py::arg("lists"), py::arg("catalog"), py::arg("target"), py::arg("bias_type"),
        py::arg("k"));
  m.def("is_under_represented", &is_under_represented, py::arg("item"), py::arg("catalog"),
        py::arg("deltas"));
  m.def("mfair_phase",
        [](const std::vector<RecommendationList>& lists, const ItemCatalog& catalog,
           const TargetDistribution& target, const std::string& bias_type,
           const MitigationConfig& config) {
          MitigationStats stats;
          auto out = mfair_phase(lists, catalog, target, bias_kind_from_string(bias_type),
                                 config, &stats);
          return py::make_tuple(out, stats.phases);
        },
        py::arg("lists"), py::arg("catalog"), py::arg("target"), py::arg("bias_type"),
        py::arg("config"));
  m.def("mitigate_two_phase",
        [](const std::vector<RecommendationList>& lists, const ItemCatalog& catalog,
           const TargetDistribution& target, const MitigationConfig& config) {
          MitigationStats stats;
          auto out = mitigate_two_phase(lists, catalog, target, config, &stats);
          return py::make_tuple(out, stats.phases);
        },
        py::arg("lists"), py::arg("catalog"), py::arg("target"), py::arg("config"));

  // testkit
  py::class_<ToyFixture>(m, "ToyFixture")
      .def_readonly("catalog", &ToyFixture::catalog)
      .def_readonly("targets", &ToyFixture::targets)
      .def_readonly("vanilla", &ToyFixture::vanilla)
      .def_readonly("k", &ToyFixture::k);
  m.def("toy_fixture", &toy_fixture);

  m.def("synth_dataset",
        [](std::size_t n_users, std::size_t n_items,
           const std::map<std::string, double>& continent_weights, double popularity_skew,
           std::uint64_t seed, std::size_t ratings_per_user) {
          SynthSpec spec;
          spec.n_users = n_users;
          spec.n_items = n_items;
          for (const auto& [code, w] : continent_weights)
            spec.continent_weights[continent_from_string(code)] = w;
          spec.popularity_skew = popularity_skew;
          spec.seed = seed;
          spec.ratings_per_user = ratings_per_user;
          const SynthData data = synth_dataset(spec);
          std::map<std::string, std::vector<std::string>> cmap;
          for (const auto& [item, cs] : data.continents) {
            std::vector<std::string> codes;
            for (Continent c : cs.values()) codes.push_back(to_string(c));
            cmap[item] = codes;
          }
          return py::make_tuple(data.interactions, cmap);
        },
        py::arg("n_users"), py::arg("n_items"), py::arg("continent_weights"),
        py::arg("popularity_skew") = 1.0, py::arg("seed") = 0, py::arg("ratings_per_user") = 10);

  py::class_<BruteForceResult>(m, "BruteForceResult")
      .def_readonly("best_set", &BruteForceResult::best_set)
      .def_readonly("min_deviation", &BruteForceResult::min_deviation)
      .def_readonly("min_loss", &BruteForceResult::min_loss);
  m.def("brute_force_rerank", &brute_force_rerank, py::arg("list"), py::arg("catalog"),
        py::arg("targets"), py::arg("k"));
  m.def("topk_continent_deviation", &topk_continent_deviation, py::arg("list"), py::arg("catalog"),
        py::arg("targets"), py::arg("k"));

  // lists i/o
  m.def("write_lists_tsv", &write_lists_tsv, py::arg("lists"), py::arg("path"));
  m.def("read_lists_tsv", &read_lists_tsv, py::arg("path"));

  // harness
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init([](const std::string& dataset, const std::string& format,
                       const std::string& continents, const std::string& algo,
                       const std::string& target, std::size_t n, std::size_t k, double eps,
                       std::uint64_t seed, const std::string& phases, const std::string& out,
                       std::size_t min_ratings, double train_fraction, bool strict_demote) {
             ExperimentConfig config;
             config.dataset_path = dataset;
             config.format = format_from_string(format);
             config.continents_path = continents;
             config.algo = algorithm_from_string(algo);
             config.target_mode = target_mode_from_string(target);
             config.n = n;
             config.k = k;
             config.eps = eps;
             config.seed = seed;
             config.phases = phases_from_string(phases);
             config.out_dir = out;
             config.min_ratings = min_ratings;
             config.train_fraction = train_fraction;
             config.strict_demote = strict_demote;
             return config;
           }),
           py::arg("dataset"), py::arg("format") = "generic_tsv", py::arg("continents") = "",
           py::arg("algo") = "mostpop", py::arg("target") = "item", py::arg("n") = 150,
           py::arg("k") = 20, py::arg("eps") = 1.0, py::arg("seed") = 42,
           py::arg("phases") = "both", py::arg("out") = "", py::arg("min_ratings") = 1,
           py::arg("train_fraction") = 0.8, py::arg("strict_demote") = false);

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("algorithm", &RunReport::algorithm)
      .def_readonly("k", &RunReport::k)
      .def_readonly("eps", &RunReport::eps)
      .def_readonly("applied_swaps", &RunReport::applied_swaps)
      .def_readonly("penalty_adjustments", &RunReport::penalty_adjustments)
      .def_readonly("vanilla", &RunReport::vanilla)
      .def_readonly("mitigated", &RunReport::mitigated)
      .def("to_json", &run_report_to_json)
      .def("to_csv", [](const RunReport& r) { return render_report(r, ReportFormat::csv); });

  m.def("run_experiment", &run_experiment, py::arg("config"));
}
