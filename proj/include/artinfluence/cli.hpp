#ifndef ARTINFLUENCE_CLI_HPP
#define ARTINFLUENCE_CLI_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "artinfluence/bow.hpp"
#include "artinfluence/core_model.hpp"
#include "artinfluence/cross_validation.hpp"
#include "artinfluence/embedding.hpp"
#include "artinfluence/error.hpp"
#include "artinfluence/influence.hpp"
#include "artinfluence/ingestion.hpp"
#include "artinfluence/lda.hpp"
#include "artinfluence/painting_distance.hpp"
#include "artinfluence/persist.hpp"
#include "artinfluence/svm.hpp"
#include "artinfluence/text_io.hpp"

namespace artinfluence::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutDirEnv = "ARTINFLUENCE_OUT";

enum ExitCode : int { kSuccess = 0, kDataError = 1, kConfigError = 2 };

struct RunConfig {
  std::string features;
  std::string artists;
  std::string ground_truth;
  std::string descriptors;
  std::string out_dir = "artinfluence-out";
  std::string metric = "euclidean";
  int k_nn = 10;
  double q = 50.0;
  std::vector<int> top_k{5, 10, 15, 20, 25};
  int suggest = 5;
  std::string classifier = "kernel";
  int folds = 5;
  std::uint64_t seed = 0;
  std::size_t codebook_size = bow::kDefaultCodebookSize;
  std::size_t topics = 20;
  double lda_alpha = 0.1;
  std::vector<double> c_grid = svm::default_c_grid();
  std::vector<double> gamma_grid = svm::default_gamma_grid();
  std::vector<std::string> styles;
  int dims = 3;
  double unreachable_factor = kUnreachableFactor;
  std::string symmetrization = "average";
  std::string infinity_order = "finitize-first";
  int format_version = persist::kFormatVersion;
};

/// Checks enumerations and ranges; throws ConfigError.
inline void check_config(const RunConfig& c) {
  parse_metric(c.metric);
  parse_symmetrization(c.symmetrization);
  parse_infinity_order(c.infinity_order);
  if (c.classifier != "kernel" && c.classifier != "lda") throw ConfigError("classifier must be 'kernel' or 'lda'");
  if (!(c.q > 0.0 && c.q <= 100.0)) throw ConfigError("q must lie in (0, 100]");
  if (c.folds < 2) throw ConfigError("folds must be at least 2");
  if (c.k_nn < 1) throw ConfigError("k-nn must be at least 1");
  if (c.top_k.empty() || std::any_of(c.top_k.begin(), c.top_k.end(), [](int k) { return k < 1; }))
    throw ConfigError("top-k values must be >= 1");
  if (c.suggest < 1) throw ConfigError("suggest must be at least 1");
  if (c.dims < 1) throw ConfigError("dims must be at least 1");
  if (c.codebook_size < 1 || c.topics < 1) throw ConfigError("codebook-size and topics must be at least 1");
  if (!(c.lda_alpha > 0.0)) throw ConfigError("lda-alpha must be positive");
  if (!(c.unreachable_factor >= 1.0)) throw ConfigError("unreachable-factor must be >= 1");
  if (c.c_grid.empty() || c.gamma_grid.empty()) throw ConfigError("parameter grids must not be empty");
  if (c.format_version != persist::kFormatVersion)
    throw ConfigError("unsupported format version " + std::to_string(c.format_version));
}

/// Config echo written into the manifest. The output directory is omitted
/// so that identical runs into different directories match byte for byte.
inline std::string echo_config(const RunConfig& c) {
  std::ostringstream o;
  auto list = [](const auto& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      if constexpr (std::is_same_v<std::decay_t<decltype(v[i])>, double>)
        s += text::format_double(v[i]);
      else if constexpr (std::is_same_v<std::decay_t<decltype(v[i])>, std::string>)
        s += v[i];
      else
        s += std::to_string(v[i]);
    }
    return s.empty() ? std::string("-") : s;
  };
  auto path = [](const std::string& p) { return p.empty() ? std::string("-") : p; };
  o << "config.features " << path(c.features) << "\n"
    << "config.artists " << path(c.artists) << "\n"
    << "config.ground-truth " << path(c.ground_truth) << "\n"
    << "config.descriptors " << path(c.descriptors) << "\n"
    << "config.metric " << c.metric << "\n"
    << "config.k-nn " << c.k_nn << "\n"
    << "config.q " << text::format_double(c.q) << "\n"
    << "config.top-k " << list(c.top_k) << "\n"
    << "config.suggest " << c.suggest << "\n"
    << "config.classifier " << c.classifier << "\n"
    << "config.folds " << c.folds << "\n"
    << "config.seed " << c.seed << "\n"
    << "config.codebook-size " << c.codebook_size << "\n"
    << "config.topics " << c.topics << "\n"
    << "config.lda-alpha " << text::format_double(c.lda_alpha) << "\n"
    << "config.c-grid " << list(c.c_grid) << "\n"
    << "config.gamma-grid " << list(c.gamma_grid) << "\n"
    << "config.styles " << list(c.styles) << "\n"
    << "config.dims " << c.dims << "\n"
    << "config.unreachable-factor " << text::format_double(c.unreachable_factor) << "\n"
    << "config.symmetrization " << c.symmetrization << "\n"
    << "config.infinity-order " << c.infinity_order << "\n"
    << "config.format-version " << c.format_version << "\n";
  return o.str();
}

/// Collects output files and writes them together with manifest.txt.
class OutputSet {
 public:
  OutputSet(std::string dir, std::string subcommand, const RunConfig& config)
      : dir_(std::move(dir)), subcommand_(std::move(subcommand)), config_(config) {}

  void add_input(const std::string& role, const std::string& path) {
    if (path.empty()) return;
    inputs_.emplace_back(role, text::hex64(text::fnv1a64(text::read_file(path))));
  }

  void add(const std::string& name, std::string contents) { files_.emplace_back(name, std::move(contents)); }

  void write() const {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IOError("cannot create output directory " + dir_ + ": " + ec.message());
    std::ostringstream m;
    m << "artinfluence manifest v" << persist::kFormatVersion << "\n"
      << "version " << kVersion << "\n"
      << "subcommand " << subcommand_ << "\n"
      << echo_config(config_);
    for (const auto& [role, hash] : inputs_) m << "input " << role << " " << hash << "\n";
    for (const auto& [name, contents] : files_) {
      text::write_file((std::filesystem::path(dir_) / name).string(), contents);
      m << "output " << name << " " << text::hex64(text::fnv1a64(contents)) << "\n";
    }
    m << "end\n";
    text::write_file((std::filesystem::path(dir_) / "manifest.txt").string(), m.str());
  }

 private:
  std::string dir_;
  std::string subcommand_;
  RunConfig config_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> files_;
};

namespace detail {

inline void require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw ConfigError(flag + " is required for this subcommand");
}

/// Features + artists without rejecting on validation violations.
inline Dataset read_unvalidated(const RunConfig& c) {
  require(c.features, "--features");
  require(c.artists, "--artists");
  return read_dataset(c.features, c.artists);
}

inline std::string format_violations(const ValidationReport& report) {
  std::string out = "record_id,reason\n";
  for (const auto& v : report) out += text::join_csv({v.record_id, v.reason}) + "\n";
  return out;
}

inline int run_validate(const RunConfig& c, std::ostream& err) {
  const Dataset ds = read_unvalidated(c);
  GroundTruthInfluences gt;
  if (!c.ground_truth.empty()) gt = read_ground_truth(c.ground_truth);
  const auto report = validate_dataset(ds, c.ground_truth.empty() ? nullptr : &gt);
  OutputSet out(c.out_dir, "validate", c);
  out.add_input("features", c.features);
  out.add_input("artists", c.artists);
  out.add_input("ground-truth", c.ground_truth);
  out.add("violations.csv", format_violations(report));
  out.write();
  for (const auto& v : report) err << "violation: " << v.record_id << ": " << v.reason << "\n";
  return report.empty() ? kSuccess : kDataError;
}

inline Dataset load_checked(const RunConfig& c) {
  require(c.features, "--features");
  require(c.artists, "--artists");
  return load_dataset(c.features, c.artists);
}

inline int run_distances(const RunConfig& c) {
  const Dataset ds = load_checked(c);
  const auto D = painting_distances(ds, parse_metric(c.metric), c.k_nn);
  OutputSet out(c.out_dir, "distances", c);
  out.add_input("features", c.features);
  out.add_input("artists", c.artists);
  out.add("distances_" + c.metric + ".csv", persist::format_distance_matrix(D));
  out.write();
  return kSuccess;
}

inline std::string format_hits(const InfluenceGraph& g, const GroundTruthInfluences& gt, const std::vector<int>& ks) {
  std::string out = "influenced,influencer,temporally_possible";
  for (int k : ks) out += ",hit@" + std::to_string(k);
  out += "\n";
  for (const auto& p : gt.pairs) {
    const auto i = static_cast<std::size_t>(std::find(g.artist_ids.begin(), g.artist_ids.end(), p.influenced) - g.artist_ids.begin());
    const auto j = static_cast<std::size_t>(std::find(g.artist_ids.begin(), g.artist_ids.end(), p.influencer) - g.artist_ids.begin());
    out += p.influenced + "," + p.influencer + "," + (std::isfinite(g(i, j)) ? "1" : "0");
    for (int k : ks) {
      const auto top = top_k_influences(g, i, static_cast<std::size_t>(k));
      const bool hit = std::any_of(top.begin(), top.end(), [&](const RankedInfluence& t) { return t.artist_id == p.influencer; });
      out += hit ? ",1" : ",0";
    }
    out += "\n";
  }
  return out;
}

inline int run_influence(const RunConfig& c, std::ostream& err) {
  const Dataset ds = load_checked(c);
  GroundTruthInfluences gt;
  if (!c.ground_truth.empty()) {
    gt = load_ground_truth(c.ground_truth, &ds);
    if (gt.duplicates_collapsed) err << "warning: " << gt.duplicates_collapsed << " duplicate ground-truth pairs collapsed\n";
  }
  const auto D = painting_distances(ds, parse_metric(c.metric), c.k_nn);
  const auto graph = build_influence_graph(ds, c.q, D);

  OutputSet out(c.out_dir, "influence", c);
  out.add_input("features", c.features);
  out.add_input("artists", c.artists);
  out.add_input("ground-truth", c.ground_truth);
  out.add("influence_graph.txt", persist::format_influence_graph(graph));
  out.add("top_k.csv", persist::format_top_k_table(graph, static_cast<std::size_t>(c.suggest)));
  const Eigen::MatrixXd h = symmetric_hausdorff(ds, D);
  out.add("hausdorff.csv", persist::format_matrix_csv({"hausdorff", graph.artist_ids, graph.artist_ids, h}));
  if (!gt.pairs.empty()) {
    const auto table = recall_table(ds, D, gt, report_percentiles(), c.top_k);
    out.add("recall_table.csv", persist::format_recall_table(table));
    out.add("recall_hits.csv", format_hits(graph, gt, c.top_k));
    const auto r = recall_at_k(graph, gt, static_cast<std::size_t>(c.top_k.front()));
    if (!r.temporally_impossible.empty())
      err << "warning: " << r.temporally_impossible.size()
          << " ground-truth pairs violate the temporal mask and can never be retrieved\n";
  }
  out.write();
  return kSuccess;
}

inline int run_map(const RunConfig& c) {
  const Dataset ds = load_checked(c);
  const auto D = painting_distances(ds, parse_metric(c.metric), c.k_nn);
  const auto graph = build_influence_graph(ds, c.q, D);
  const auto map = map_of_artists(graph, c.dims, c.unreachable_factor, parse_symmetrization(c.symmetrization),
                                  parse_infinity_order(c.infinity_order));
  OutputSet out(c.out_dir, "map", c);
  out.add_input("features", c.features);
  out.add_input("artists", c.artists);
  out.add("influence_graph.txt", persist::format_influence_graph(graph));
  out.add("map_geodesics.csv", persist::format_matrix_csv({"geodesic", graph.artist_ids, graph.artist_ids, map.geodesics}));
  out.add("map_embedding.txt", persist::format_embedding(map.embedding));
  out.add("map_coordinates.csv", persist::format_coordinates_csv(map.embedding));
  for (auto [a, b] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}})
    if (b <= c.dims)
      out.add("map_proj_" + std::to_string(a) + "_" + std::to_string(b) + ".csv",
              persist::format_projection_csv(map.embedding, a, b));
  out.write();
  return kSuccess;
}

inline int run_classify(const RunConfig& c, std::ostream& err) {
  const Dataset ds = load_checked(c);
  if (c.classifier == "lda" && c.descriptors.empty())
    throw ConfigError("--classifier lda needs --descriptors (topic models run on visual-word counts)");

  std::vector<std::string> styles = c.styles;
  if (styles.empty()) {
    std::set<std::string> present;
    for (const auto& p : ds.paintings()) present.insert(ds.artists()[*ds.artist_index(p.artist_id)].style);
    styles.assign(present.begin(), present.end());
  }
  std::map<std::string, int> style_index;
  for (std::size_t s = 0; s < styles.size(); ++s) style_index.emplace(styles[s], static_cast<int>(s));

  std::vector<std::size_t> selected;
  std::vector<int> labels;
  for (std::size_t p = 0; p < ds.painting_count(); ++p) {
    const auto& style = ds.artists()[*ds.artist_index(ds.paintings()[p].artist_id)].style;
    auto it = style_index.find(style);
    if (it == style_index.end()) continue;
    selected.push_back(p);
    labels.push_back(it->second);
  }

  OutputSet out(c.out_dir, "classify", c);
  out.add_input("features", c.features);
  out.add_input("artists", c.artists);
  out.add_input("descriptors", c.descriptors);

  std::vector<FeatureVector> samples;
  if (!c.descriptors.empty()) {
    const auto descriptors = load_descriptors(c.descriptors);
    std::vector<FeatureVector> pooled;
    std::vector<std::size_t> kept;
    std::vector<int> kept_labels;
    for (std::size_t i = 0; i < selected.size(); ++i) {
      auto it = descriptors.find(ds.paintings()[selected[i]].painting_id);
      if (it == descriptors.end() || it->second.empty()) {
        err << "warning: painting " << ds.paintings()[selected[i]].painting_id << " has no descriptors; skipped\n";
        continue;
      }
      pooled.insert(pooled.end(), it->second.begin(), it->second.end());
      kept.push_back(selected[i]);
      kept_labels.push_back(labels[i]);
    }
    const auto codebook = bow::kmeans_codebook(pooled, {c.codebook_size, c.seed, 100, 1e-6});
    std::vector<bow::BowHistogram> hists;
    std::vector<std::string> ids;
    for (std::size_t p : kept) {
      hists.push_back(bow::quantize(descriptors.at(ds.paintings()[p].painting_id), codebook));
      ids.push_back(ds.paintings()[p].painting_id);
      const auto& h = hists.back();
      if (c.classifier == "lda")
        samples.emplace_back(h.counts.begin(), h.counts.end());
      else
        samples.push_back(h.normalized);
    }
    out.add("codebook.txt", persist::format_codebook(codebook));
    out.add("histograms.csv", persist::format_histograms(ids, hists));
    labels = std::move(kept_labels);
  } else {
    for (std::size_t p : selected) samples.push_back(ds.paintings()[p].features);
  }

  if (c.classifier == "kernel") {
    svm::ScaledFitOptions opt;
    opt.c_grid = c.c_grid;
    opt.gamma_grid = c.gamma_grid;
    opt.inner_folds = c.folds;
    opt.seed = c.seed;
    const auto cm = cross_validate(kernel_trainer(styles.size(), opt), samples, labels, styles, c.folds, c.seed);
    svm::GridSearchResult search;
    auto model = svm::fit_scaled_classifier(samples, labels, styles.size(), opt, &search);
    out.add("confusion.csv", persist::format_confusion(cm));
    out.add("style_accuracy.csv", persist::format_style_accuracy(cm));
    out.add("model.txt", persist::format_kernel_model({styles, std::move(model)}));
    std::string grid = "C,gamma,mean_cv_accuracy\n";
    for (const auto& g : search.surface)
      grid += text::format_double(g.C) + "," + text::format_double(g.gamma) + "," + text::format_double(g.accuracy) + "\n";
    out.add("grid_search.csv", grid);
  } else {
    lda::FitOptions opt;
    opt.topics = c.topics;
    opt.alpha_init = c.lda_alpha;
    opt.seed = c.seed;
    const auto cm = cross_validate(topic_trainer(styles.size(), opt), samples, labels, styles, c.folds, c.seed);
    out.add("confusion.csv", persist::format_confusion(cm));
    out.add("style_accuracy.csv", persist::format_style_accuracy(cm));
    out.add("model.txt", persist::format_topic_models({styles, fit_style_models(samples, labels, styles.size(), opt)}));
  }
  out.write();
  return kSuccess;
}

}  // namespace detail

/// Parses arguments (argv[0] is the program name), runs the subcommand and
/// returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  CLI::App app{"Discover and rank potential artistic influences from painting features"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "Config file of 'key = value' lines mirroring the long option names");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--features", c.features, "Painting feature file");
  app.add_option("--artists", c.artists, "Artist metadata CSV");
  app.add_option("--ground-truth", c.ground_truth, "Ground-truth influence pairs CSV");
  app.add_option("--descriptors", c.descriptors, "Local descriptor file (enables the visual-word pipeline)");
  app.add_option("--out", c.out_dir, "Output directory")->envname(kOutDirEnv)->capture_default_str();
  app.add_option("--metric", c.metric, "Painting distance: euclidean or manifold")->capture_default_str();
  app.add_option("--k-nn", c.k_nn, "Neighbours per painting in the manifold graph")->capture_default_str();
  app.add_option("--q", c.q, "Percentile of the artist set distance, in (0, 100]")->capture_default_str();
  app.add_option("--top-k", c.top_k, "Comma-separated top-k values for recall")->delimiter(',')->capture_default_str();
  app.add_option("--suggest", c.suggest, "Suggested influences listed per artist")->capture_default_str();
  app.add_option("--classifier", c.classifier, "kernel or lda")->capture_default_str();
  app.add_option("--folds", c.folds, "Cross-validation folds")->capture_default_str();
  app.add_option("--seed", c.seed, "Global seed")->capture_default_str();
  app.add_option("--codebook-size", c.codebook_size, "Visual words in the codebook")->capture_default_str();
  app.add_option("--topics", c.topics, "Topics per style model")->capture_default_str();
  app.add_option("--lda-alpha", c.lda_alpha, "Initial Dirichlet parameter")->capture_default_str();
  app.add_option("--c-grid", c.c_grid, "Comma-separated C values for grid search")->delimiter(',');
  app.add_option("--gamma-grid", c.gamma_grid, "Comma-separated gamma values for grid search")->delimiter(',');
  app.add_option("--styles", c.styles, "Comma-separated styles to classify (default: all)")->delimiter(',');
  app.add_option("--dims", c.dims, "Map dimensions")->capture_default_str();
  app.add_option("--unreachable-factor", c.unreachable_factor, "Multiplier of the largest finite geodesic used for unreachable pairs")
      ->capture_default_str();
  app.add_option("--symmetrization", c.symmetrization, "average, min or max")->capture_default_str();
  app.add_option("--infinity-order", c.infinity_order, "finitize-first or symmetrize-first")->capture_default_str();
  app.add_option("--format-version", c.format_version, "Output format version")->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Check inputs and report every violation");
  auto* distances = app.add_subcommand("distances", "Painting distance matrix");
  auto* influence = app.add_subcommand("influence", "Influence graph, suggestions and recall tables");
  auto* map = app.add_subcommand("map", "Map of artists from the influence graph");
  auto* classify = app.add_subcommand("classify", "Cross-validated style classification");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    check_config(c);
    if (validate->parsed()) return detail::run_validate(c, err);
    if (distances->parsed()) return detail::run_distances(c);
    if (influence->parsed()) return detail::run_influence(c, err);
    if (map->parsed()) return detail::run_map(c);
    if (classify->parsed()) return detail::run_classify(c, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kConfigError;
}

}  // namespace artinfluence::cli

#endif  // ARTINFLUENCE_CLI_HPP
