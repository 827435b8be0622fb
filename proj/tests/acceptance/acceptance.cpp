// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "artinfluence/cli.hpp"
#include "oracles.hpp"

using namespace artinfluence;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::size_t> range(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> v;
  for (std::size_t i = lo; i < hi; ++i) v.push_back(i);
  return v;
}

Check percentile_oracle() {
  Check c;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t a = 1 + rng() % 30, b = 1 + rng() % 30;
    PaintingDistanceMatrix D;
    D.values = oracle::distance_matrix(oracle::random_points(rng, a + b, 1 + rng() % 6));
    const auto from = range(0, a), to = range(a, a + b);
    double prev = 0.0;
    for (double q : {1.0, 10.0, 50.0, 90.0, 99.0, 100.0}) {
      const double got = artist_distance_q(from, to, q, D);
      c.expect(got == oracle::percentile_set_distance(D.values, from, to, q),
               "mismatch at trial " + std::to_string(trial) + " q=" + text::format_double(q));
      c.expect(got >= prev, "q-monotonicity broken at trial " + std::to_string(trial));
      prev = got;
    }
  }
  const double t = seconds_since(t0);
  c.expect(t < 5.0, "took " + std::to_string(t) + " s");
  return c;
}

Check extreme_q() {
  Check c;
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t a = 1 + rng() % 30, b = 1 + rng() % 30;
    PaintingDistanceMatrix D;
    D.values = oracle::distance_matrix(oracle::random_points(rng, a + b, 1 + rng() % 6));
    const auto from = range(0, a), to = range(a, a + b);
    const std::string at = " at trial " + std::to_string(trial);
    c.expect(artist_distance_q(from, to, 1.0, D) == oracle::min_link(D.values, from, to), "q small is not min-link" + at);
    const double h_ab = artist_distance_q(from, to, 100.0, D);
    const double h_ba = artist_distance_q(to, from, 100.0, D);
    c.expect(h_ab == oracle::directed_hausdorff(D.values, from, to), "q=100 is not directed Hausdorff" + at);

    std::vector<ArtistRecord> artists{{"x", "", 1, 2, "s"}, {"y", "", 1, 2, "s"}};
    std::vector<PaintingRecord> paintings;
    for (std::size_t i = 0; i < a + b; ++i)
      paintings.push_back({"p" + std::to_string(i), i < a ? "x" : "y", "", {}, {0.0}});
    const Dataset ds(artists, paintings);
    const auto sym = symmetric_hausdorff(ds, D);
    c.expect(sym(0, 1) == std::max(h_ab, h_ba) && sym(1, 0) == sym(0, 1), "symmetric Hausdorff is not the max" + at);
  }
  return c;
}

Check geodesics() {
  Check c;
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng() % 28;
    const auto pts = oracle::random_points(rng, n, 2 + rng() % 3);
    const auto E = oracle::distance_matrix(pts);
    const int k = 1 + static_cast<int>(rng() % std::min<std::size_t>(n - 1, 4));
    const auto graph = build_knn_graph(E, k);
    std::vector<oracle::Edge> undirected;
    for (const auto& e : graph.edges) {
      undirected.push_back({e.a, e.b, e.weight});
      undirected.push_back({e.b, e.a, e.weight});
    }
    const auto ref = oracle::bellman_ford(n, undirected);
    c.expect((geodesic_all_pairs(graph).values - ref).cwiseAbs().maxCoeff() <= 1e-12,
             "geodesic_all_pairs differs from Bellman-Ford at trial " + std::to_string(trial));

    // Directed graph with missing edges for graph_geodesics.
    Eigen::MatrixXd W = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), oracle::kInf);
    std::vector<oracle::Edge> directed;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && rng() % 3 == 0) {
          const double w = 0.1 + static_cast<double>(rng() % 1000) / 100.0;
          W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
          directed.push_back({i, j, w});
        }
    const auto G = graph_geodesics(W);
    const auto Gref = oracle::bellman_ford(n, directed);
    for (Eigen::Index i = 0; i < G.rows(); ++i)
      for (Eigen::Index j = 0; j < G.cols(); ++j) {
        const bool both_inf = std::isinf(G(i, j)) && std::isinf(Gref(i, j));
        c.expect(both_inf || std::abs(G(i, j) - Gref(i, j)) <= 1e-12,
                 "graph_geodesics differs from Bellman-Ford at trial " + std::to_string(trial));
      }

    const auto complete = geodesic_all_pairs(build_knn_graph(E, static_cast<int>(n) - 1));
    c.expect((complete.values - E).cwiseAbs().maxCoeff() <= 1e-9, "complete graph is not Euclidean");
  }
  return c;
}

Check mds_recovery() {
  Check c;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(404);
  const auto pts = oracle::random_points(rng, 20, 3, -10.0, 10.0);
  const auto e = classical_mds(oracle::distance_matrix(pts), 3);
  Eigen::MatrixXd X(20, 3);
  for (int i = 0; i < 20; ++i)
    for (int d = 0; d < 3; ++d) X(i, d) = pts[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
  const double rms = oracle::procrustes_rms(e.coordinates, X);
  c.expect(rms < 1e-6, "Procrustes RMS " + text::format_double(rms));
  const double t = seconds_since(t0);
  c.expect(t < 1.0, "took " + std::to_string(t) + " s");
  return c;
}

Check planted_influence() {
  Check c;
  const auto t0 = Clock::now();
  for (auto metric : {PaintingMetric::euclidean, PaintingMetric::manifold}) {
    const std::string m = " (" + to_string(metric) + ")";
    const auto planted = oracle::planted_influence(505);
    const auto D = painting_distances(planted.dataset, metric, 10);
    const double r = recall_at_k(build_influence_graph(planted.dataset, 50, D), planted.truth, 1).recall;
    c.expect(r == 1.0, "recall@1 = " + text::format_double(r) + m);
    const auto reversed = oracle::planted_influence(505, true);
    const auto Dr = painting_distances(reversed.dataset, metric, 10);
    const double rr = recall_at_k(build_influence_graph(reversed.dataset, 50, Dr), reversed.truth, 1).recall;
    c.expect(rr == 0.0, "reversed-period recall@1 = " + text::format_double(rr) + m);
  }
  const double t = seconds_since(t0);
  c.expect(t < 10.0, "took " + std::to_string(t) + " s");
  return c;
}

Check smo() {
  Check c;
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = oracle::random_points(rng, 50, 3);
    std::vector<int> y;
    for (int i = 0; i < 50; ++i) y.push_back(i % 2 ? 1 : -1);
    const auto K = svm::kernel_matrix(x, 1.5);
    const auto sol = svm::smo_solve(K, y, {5.0, 1e-3, 1'000'000, true});
    for (std::size_t i = 1; i < sol.objective_trace.size(); ++i)
      c.expect(sol.objective_trace[i] >= sol.objective_trace[i - 1], "dual objective decreased");
    c.expect(sol.converged && sol.max_kkt_violation <= 1e-3, "KKT violation above tolerance");
  }

  const std::vector<FeatureVector> xor_x{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  const std::vector<int> xor_y{0, 0, 1, 1};
  const auto model = svm::train_kernel_classifier(xor_x, xor_y, 2, {10.0, 1.0, 1e-3, 1'000'000});
  for (std::size_t i = 0; i < 4; ++i) c.expect(svm::predict(model, xor_x[i]).label == xor_y[i], "XOR misclassified");

  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
    auto x = oracle::random_points(rng, n, 2);
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) y.push_back(i % 2 ? 1 : -1);
    const double C = std::ldexp(1.0, trial % 6 - 2);
    const auto K = svm::kernel_matrix(x, 1.0);
    const auto exact = oracle::brute_force_svm_dual(K, y, C);
    const auto sol = svm::smo_solve(K, y, {C, 1e-12, 1'000'000, false});
    for (std::size_t i = 0; i < n; ++i)
      c.expect(std::abs(sol.alpha[i] - exact.alpha[i]) <= 1e-6, "SMO differs from the QP oracle at trial " + std::to_string(trial));
  }
  return c;
}

Check lda_checks() {
  Check c;
  std::mt19937_64 rng(707);
  const std::size_t V = 24;
  std::vector<FeatureVector> corpus;
  for (int d = 0; d < 50; ++d) {
    FeatureVector h(V, 0.0);
    const std::size_t block = static_cast<std::size_t>(d % 3) * 8;
    for (int n = 0; n < 50; ++n) h[rng() % 4 == 0 ? rng() % V : block + rng() % 8] += 1.0;
    corpus.push_back(h);
  }
  lda::FitOptions opt;
  opt.topics = 3;
  opt.em_tol = 1e-10;
  opt.max_em_iters = 80;
  const auto fit = lda::lda_fit(corpus, opt);
  for (std::size_t i = 1; i < fit.elbo_history.size(); ++i)
    c.expect(fit.elbo_history[i] >= fit.elbo_history[i - 1] - 1e-6,
             "ELBO decreased at EM iteration " + std::to_string(i));

  FeatureVector totals(V, 0.0);
  double all = 0.0;
  for (const auto& h : corpus)
    for (std::size_t w = 0; w < V; ++w) {
      totals[w] += h[w];
      all += h[w];
    }
  lda::FitOptions one;
  one.topics = 1;
  const auto uni = lda::lda_fit(corpus, one);
  for (std::size_t w = 0; w < V; ++w)
    c.expect(std::abs(uni.model.beta(0, static_cast<Eigen::Index>(w)) - totals[w] / all) <= 1e-9,
             "T=1 does not recover unigram frequencies");

  auto docs = [&](std::size_t first, int count) {
    std::vector<FeatureVector> out;
    for (int d = 0; d < count; ++d) {
      FeatureVector h(20, 0.0);
      for (int n = 0; n < 30; ++n) h[first + rng() % 10] += 1.0;
      out.push_back(h);
    }
    return out;
  };
  lda::FitOptions two;
  two.topics = 2;
  const std::vector<lda::TopicModel> models{lda::lda_fit(docs(0, 20), two).model, lda::lda_fit(docs(10, 20), two).model};
  for (const auto& d : docs(0, 10)) c.expect(lda::lda_classify(models, d) == 0, "held-out style 0 misclassified");
  for (const auto& d : docs(10, 10)) c.expect(lda::lda_classify(models, d) == 1, "held-out style 1 misclassified");
  return c;
}

Check cross_validation() {
  Check c;
  std::mt19937_64 rng(808);
  std::vector<int> y;
  for (int s = 0; s < 7; ++s) y.insert(y.end(), 10 + static_cast<std::size_t>(s), s);
  std::shuffle(y.begin(), y.end(), rng);
  std::vector<FeatureVector> x;
  for (int l : y) x.push_back({static_cast<double>(l)});
  const std::vector<std::string> names{"s0", "s1", "s2", "s3", "s4", "s5", "s6"};

  Trainer perfect = [](std::span<const FeatureVector>, std::span<const int>) -> Predictor {
    return [](std::span<const double> s) { return static_cast<int>(s[0]); };
  };
  const auto cm = cross_validate(perfect, x, y, names, 5, 1);
  c.expect(cm.percent == Eigen::MatrixXd::Identity(7, 7) * 100.0 && cm.overall_accuracy == 100.0,
           "perfect stub is not the identity");

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Trainer noisy = [&rng](std::span<const FeatureVector>, std::span<const int>) -> Predictor {
      return [&rng](std::span<const double>) { return static_cast<int>(rng() % 7); };
    };
    const auto r = cross_validate(noisy, x, y, names, 5, seed);
    for (Eigen::Index i = 0; i < 7; ++i)
      c.expect(std::abs(r.percent.row(i).sum() - 100.0) <= 1e-6, "confusion row does not sum to 100");

    const auto folds = stratified_folds(y, 5, seed);
    std::vector<int> covered(y.size(), 0);
    for (int f = 0; f < 5; ++f)
      for (std::size_t i = 0; i < y.size(); ++i) covered[i] += folds[i] == f;
    for (int n : covered) c.expect(n == 1, "fold partition is not disjoint and covering");
  }
  return c;
}

struct Inputs {
  std::string features, artists, truth, descriptors;
};

Inputs write_inputs(const fs::path& dir) {
  const auto planted = oracle::planted_influence(909);
  Inputs in{(dir / "features.csv").string(), (dir / "artists.csv").string(), (dir / "truth.csv").string(),
            (dir / "descriptors.csv").string()};
  text::write_file(in.features, format_features(planted.dataset));
  text::write_file(in.artists, format_artists(planted.dataset.artists()));
  text::write_file(in.truth, format_ground_truth(planted.truth));
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  DescriptorMap dm;
  for (const auto& p : planted.dataset.paintings())
    for (int d = 0; d < 10; ++d) {
      FeatureVector v(3);
      for (std::size_t k = 0; k < 3; ++k) v[k] = p.features[k] / 3.0 + n(rng);
      dm[p.painting_id].push_back(v);
    }
  text::write_file(in.descriptors, format_descriptors(dm));
  return in;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = text::read_file(e.path().string());
  return files;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "artinfluence");
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

Check reproducibility() {
  Check c;
  const auto dir = oracle::fresh_dir(ARTINFLUENCE_TEST_TMP, "acceptance_repro");
  const auto in = write_inputs(dir);
  const std::vector<std::vector<std::string>> runs{
      {"validate"},
      {"distances", "--metric", "manifold"},
      {"influence"},
      {"map"},
      {"classify", "--c-grid", "1,4", "--gamma-grid", "0.5,2", "--folds", "3"},
      {"classify", "--classifier", "lda", "--descriptors", in.descriptors, "--codebook-size", "6", "--topics", "2"}};
  int idx = 0;
  for (const auto& r : runs) {
    std::map<std::string, std::string> snaps[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto out = dir / ("run" + std::to_string(idx) + "_" + std::to_string(rep));
      std::vector<std::string> args{r.front(), "--features", in.features, "--artists", in.artists,
                                    "--ground-truth", in.truth, "--seed", "17", "--out", out.string()};
      args.insert(args.end(), r.begin() + 1, r.end());
      c.expect(run_cli(args) == 0, r.front() + " failed");
      if (fs::exists(out)) snaps[rep] = snapshot(out);
    }
    c.expect(!snaps[0].empty() && snaps[0] == snaps[1], r.front() + " outputs differ between runs");
    ++idx;
  }

  // Round trips of the persisted artifacts.
  const auto ds = load_dataset(in.features, in.artists);
  c.expect(format_features(load_dataset(in.features, in.artists)) == text::read_file(in.features), "features round trip");
  const auto D = painting_distances(ds, PaintingMetric::manifold, 10);
  const auto Dtext = persist::format_distance_matrix(D);
  c.expect(persist::parse_distance_matrix(Dtext).values == D.values, "distance matrix round trip");
  const auto g = build_influence_graph(ds, 50, D);
  const auto gb = persist::parse_influence_graph(persist::format_influence_graph(g));
  c.expect(gb.weights == g.weights && gb.artist_ids == g.artist_ids && gb.q == g.q, "influence graph round trip");
  const auto map = map_of_artists(g, 3);
  c.expect(persist::parse_embedding(persist::format_embedding(map.embedding)).coordinates == map.embedding.coordinates,
           "embedding round trip");
  return c;
}

Check recall_table_shape() {
  Check c;
  const auto dir = oracle::fresh_dir(ARTINFLUENCE_TEST_TMP, "acceptance_recall");
  const auto in = write_inputs(dir);
  const auto out = dir / "out";
  c.expect(run_cli({"influence", "--features", in.features, "--artists", in.artists, "--ground-truth", in.truth, "--out",
                    out.string()}) == 0,
           "influence failed");
  if (!c.ok) return c;
  const auto golden = text::split_lines(text::read_file(std::string(ARTINFLUENCE_GOLDEN_DIR) + "/recall_table_layout.csv"));
  const auto got = text::split_lines(text::read_file((out / "recall_table.csv").string()));
  c.expect(got.size() == golden.size(), "row count differs from golden layout");
  for (std::size_t r = 0; c.ok && r < golden.size(); ++r) {
    const auto g = *text::split_csv(golden[r]);
    const auto t = *text::split_csv(got[r]);
    c.expect(t.size() == g.size(), "column count differs on row " + std::to_string(r + 1));
    for (std::size_t k = 0; c.ok && k < g.size(); ++k) {
      if (g[k] == "*")
        c.expect(text::parse_double(t[k]).has_value() && *text::parse_double(t[k]) >= 0.0 && *text::parse_double(t[k]) <= 100.0,
                 "cell is not a percentage on row " + std::to_string(r + 1));
      else
        c.expect(t[k] == g[k], "label '" + t[k] + "' differs from golden '" + g[k] + "'");
    }
  }
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"percentile distance matches sort-and-index oracle", percentile_oracle},
      {"extreme q gives min-link and directed Hausdorff", extreme_q},
      {"geodesics match Bellman-Ford", geodesics},
      {"MDS recovers a Euclidean configuration", mds_recovery},
      {"planted influence recovered, reversed periods masked", planted_influence},
      {"SMO monotone, KKT, XOR and QP oracle", smo},
      {"LDA ELBO, unigram recovery and disjoint styles", lda_checks},
      {"cross-validation harness", cross_validation},
      {"reproducible subcommands and exact round trips", reproducibility},
      {"recall table layout", recall_table_shape},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %zu: %s (%.2f s)%s%s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                seconds_since(t0), c.ok ? "" : " -- ", c.detail.c_str());
    failed += !c.ok;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
