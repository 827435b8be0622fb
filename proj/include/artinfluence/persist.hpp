#ifndef ARTINFLUENCE_PERSIST_HPP
#define ARTINFLUENCE_PERSIST_HPP

// Text serialization of computed artifacts. format_* / parse_* work on
// strings; save / load wrap them with file I/O. Doubles use the shortest
// round-trip representation, +inf is written as "inf", NaN is rejected.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "artinfluence/bow.hpp"
#include "artinfluence/cross_validation.hpp"
#include "artinfluence/embedding.hpp"
#include "artinfluence/error.hpp"
#include "artinfluence/influence.hpp"
#include "artinfluence/lda.hpp"
#include "artinfluence/painting_distance.hpp"
#include "artinfluence/svm.hpp"
#include "artinfluence/text_io.hpp"

namespace artinfluence::persist {

inline constexpr int kFormatVersion = 1;

// ---- labelled matrices (CSV with row/column id headers) -------------------

/// Matrix with row and column ids; the top-left header cell carries a tag.
struct LabeledMatrix {
  std::string tag;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  Eigen::MatrixXd values;
};

inline std::string format_matrix_csv(const LabeledMatrix& m) {
  if (static_cast<std::size_t>(m.values.rows()) != m.row_ids.size() ||
      static_cast<std::size_t>(m.values.cols()) != m.col_ids.size())
    throw InvalidInput("matrix ids do not match its shape");
  std::vector<std::string> head{m.tag};
  head.insert(head.end(), m.col_ids.begin(), m.col_ids.end());
  std::string out = text::join_csv(head) + "\n";
  for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
    out += text::csv_field(m.row_ids[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < m.values.cols(); ++c) out += "," + text::format_double(m.values(r, c));
    out += "\n";
  }
  return out;
}

inline LabeledMatrix parse_matrix_csv(const std::string& contents, const std::string& source = "matrix") {
  const auto lines = text::split_lines(contents);
  if (lines.empty()) throw ParseError(source, 1, "empty matrix file");
  auto head = text::split_csv(lines[0]);
  if (!head || head->empty()) throw ParseError(source, 1, "malformed header");
  LabeledMatrix m;
  m.tag = (*head)[0];
  m.col_ids.assign(head->begin() + 1, head->end());
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto f = text::split_csv(lines[i]);
    if (!f || f->size() != m.col_ids.size() + 1) throw ParseError(source, i + 1, "row width mismatch");
    m.row_ids.push_back((*f)[0]);
    std::vector<double> row;
    for (std::size_t c = 1; c < f->size(); ++c) {
      auto v = text::parse_double((*f)[c]);
      if (!v) throw ParseError(source, i + 1, "bad number");
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  m.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m.col_ids.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

inline std::string format_distance_matrix(const PaintingDistanceMatrix& d) {
  return format_matrix_csv({to_string(d.metric), d.ids, d.ids, d.values});
}

inline PaintingDistanceMatrix parse_distance_matrix(const std::string& contents,
                                                    const std::string& source = "distances") {
  auto m = parse_matrix_csv(contents, source);
  if (m.row_ids != m.col_ids) throw ParseError(source, 1, "row and column ids differ");
  PaintingDistanceMatrix d;
  try {
    d.metric = parse_metric(m.tag);
  } catch (const ConfigError&) {
    throw ParseError(source, 1, "unknown metric tag '" + m.tag + "'");
  }
  d.ids = std::move(m.row_ids);
  d.values = std::move(m.values);
  return d;
}

// ---- codebook --------------------------------------------------------------

inline std::string format_codebook(const bow::Codebook& cb) {
  Eigen::MatrixXd c(static_cast<Eigen::Index>(cb.size()), static_cast<Eigen::Index>(cb.width()));
  for (std::size_t r = 0; r < cb.size(); ++r)
    for (std::size_t k = 0; k < cb.width(); ++k)
      c(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = cb.centroids[r][k];
  text::KeyedWriter w("codebook", kFormatVersion);
  w.field("seed", std::to_string(cb.seed)).matrix("centroids", c);
  return w.str();
}

inline bow::Codebook parse_codebook(const std::string& contents, const std::string& source = "codebook") {
  text::KeyedReader r(source, contents, "codebook", kFormatVersion);
  bow::Codebook cb;
  cb.seed = r.int_field<std::uint64_t>("seed");
  auto c = r.matrix<Eigen::MatrixXd>("centroids");
  r.finish();
  for (Eigen::Index i = 0; i < c.rows(); ++i) cb.centroids.emplace_back(c.row(i).begin(), c.row(i).end());
  return cb;
}

/// Per-painting visual-word counts: painting_id,w0,...,w{K-1}.
inline std::string format_histograms(const std::vector<std::string>& painting_ids,
                                     const std::vector<bow::BowHistogram>& hists) {
  std::string out = "painting_id";
  const std::size_t K = hists.empty() ? 0 : hists.front().counts.size();
  for (std::size_t k = 0; k < K; ++k) out += ",w" + std::to_string(k);
  out += "\n";
  for (std::size_t i = 0; i < hists.size(); ++i) {
    out += text::csv_field(painting_ids[i]);
    for (auto c : hists[i].counts) out += "," + std::to_string(c);
    out += "\n";
  }
  return out;
}

// ---- classifier models -----------------------------------------------------

struct LabeledKernelModel {
  std::vector<std::string> class_names;
  svm::KernelClassifierModel model;
};

inline std::string format_kernel_model(const LabeledKernelModel& m) {
  text::KeyedWriter w("kernel-classifier", kFormatVersion);
  w.field("kernel", "rbf")
      .field("C", m.model.C)
      .field("gamma", m.model.gamma)
      .field("dimension", m.model.dimension)
      .list("classes", m.class_names)
      .list("scale_min", m.model.scaler.min)
      .list("scale_max", m.model.scaler.max);
  for (const auto& bm : m.model.classes) {
    Eigen::MatrixXd sv(static_cast<Eigen::Index>(bm.support_vectors.size()), static_cast<Eigen::Index>(m.model.dimension));
    for (std::size_t i = 0; i < bm.support_vectors.size(); ++i)
      for (std::size_t d = 0; d < m.model.dimension; ++d)
        sv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = bm.support_vectors[i][d];
    w.field("bias", bm.bias).list("coefficients", bm.coefficients).matrix("support_vectors", sv);
  }
  return w.str();
}

inline LabeledKernelModel parse_kernel_model(const std::string& contents, const std::string& source = "model") {
  text::KeyedReader r(source, contents, "kernel-classifier", kFormatVersion);
  LabeledKernelModel m;
  if (r.string_field("kernel") != "rbf") r.fail("only the rbf kernel is supported");
  m.model.C = r.double_field("C");
  m.model.gamma = r.double_field("gamma");
  m.model.dimension = r.int_field<std::size_t>("dimension");
  m.class_names = r.string_list("classes");
  m.model.scaler.min = r.double_list("scale_min");
  m.model.scaler.max = r.double_list("scale_max");
  for (std::size_t c = 0; c < m.class_names.size(); ++c) {
    svm::BinaryModel bm;
    bm.bias = r.double_field("bias");
    bm.coefficients = r.double_list("coefficients");
    auto sv = r.matrix<Eigen::MatrixXd>("support_vectors");
    if (static_cast<std::size_t>(sv.rows()) != bm.coefficients.size()) r.fail("support vector count mismatch");
    for (Eigen::Index i = 0; i < sv.rows(); ++i) bm.support_vectors.emplace_back(sv.row(i).begin(), sv.row(i).end());
    m.model.classes.push_back(std::move(bm));
  }
  r.finish();
  return m;
}

struct LabeledTopicModels {
  std::vector<std::string> class_names;
  std::vector<lda::TopicModel> models;
};

inline std::string format_topic_models(const LabeledTopicModels& m) {
  text::KeyedWriter w("topic-models", kFormatVersion);
  w.list("classes", m.class_names);
  for (const auto& tm : m.models) w.field("alpha", tm.alpha).matrix("beta", tm.beta);
  return w.str();
}

inline LabeledTopicModels parse_topic_models(const std::string& contents, const std::string& source = "model") {
  text::KeyedReader r(source, contents, "topic-models", kFormatVersion);
  LabeledTopicModels m;
  m.class_names = r.string_list("classes");
  for (std::size_t c = 0; c < m.class_names.size(); ++c) {
    lda::TopicModel tm;
    tm.alpha = r.double_field("alpha");
    tm.beta = r.matrix<Eigen::MatrixXd>("beta");
    m.models.push_back(std::move(tm));
  }
  r.finish();
  return m;
}

// ---- influence graph and embedding -----------------------------------------

inline std::string format_influence_graph(const InfluenceGraph& g) {
  text::KeyedWriter w("influence-graph", kFormatVersion);
  w.field("q", g.q)
      .field("metric", to_string(g.metric))
      .list("artists", g.artist_ids)
      .list("styles", g.styles)
      .matrix("weights", g.weights);
  return w.str();
}

inline InfluenceGraph parse_influence_graph(const std::string& contents, const std::string& source = "graph") {
  text::KeyedReader r(source, contents, "influence-graph", kFormatVersion);
  InfluenceGraph g;
  g.q = r.double_field("q");
  const auto metric = r.string_field("metric");
  if (metric != "euclidean" && metric != "manifold") r.fail("unknown metric '" + metric + "'");
  g.metric = parse_metric(metric);
  g.artist_ids = r.string_list("artists");
  g.styles = r.string_list("styles");
  g.weights = r.matrix<Eigen::MatrixXd>("weights");
  r.finish();
  return g;
}

inline std::string format_embedding(const ArtistEmbedding& e) {
  text::KeyedWriter w("artist-embedding", kFormatVersion);
  w.list("artists", e.artist_ids).list("styles", e.styles).list("eigenvalues", e.eigenvalues).matrix("coordinates", e.coordinates);
  return w.str();
}

inline ArtistEmbedding parse_embedding(const std::string& contents, const std::string& source = "embedding") {
  text::KeyedReader r(source, contents, "artist-embedding", kFormatVersion);
  ArtistEmbedding e;
  e.artist_ids = r.string_list("artists");
  e.styles = r.string_list("styles");
  e.eigenvalues = r.double_list("eigenvalues");
  e.coordinates = r.matrix<Eigen::MatrixXd>("coordinates");
  r.finish();
  return e;
}

/// artist_id,style,x1..xd for all dimensions.
inline std::string format_coordinates_csv(const ArtistEmbedding& e) {
  std::vector<std::string> head{"artist_id", "style"};
  for (Eigen::Index c = 0; c < e.coordinates.cols(); ++c) head.push_back("x" + std::to_string(c + 1));
  std::string out = text::join_csv(head) + "\n";
  for (std::size_t i = 0; i < e.artist_ids.size(); ++i) {
    out += text::csv_field(e.artist_ids[i]) + "," + text::csv_field(e.styles[i]);
    for (Eigen::Index c = 0; c < e.coordinates.cols(); ++c)
      out += "," + text::format_double(e.coordinates(static_cast<Eigen::Index>(i), c));
    out += "\n";
  }
  return out;
}

/// Two-dimensional projection onto dimensions a and b (1-based).
inline std::string format_projection_csv(const ArtistEmbedding& e, int a, int b) {
  std::string out = "artist_id,style,x" + std::to_string(a) + ",x" + std::to_string(b) + "\n";
  for (std::size_t i = 0; i < e.artist_ids.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out += text::csv_field(e.artist_ids[i]) + "," + text::csv_field(e.styles[i]) + "," +
           text::format_double(e.coordinates(r, a - 1)) + "," + text::format_double(e.coordinates(r, b - 1)) + "\n";
  }
  return out;
}

// ---- reports ---------------------------------------------------------------

/// Sections: row-normalized percentages, raw counts, overall and per-fold
/// accuracy.
inline std::string format_confusion(const ConfusionMatrix& cm) {
  std::string out = format_matrix_csv({"percent", cm.class_names, cm.class_names, cm.percent});
  out += format_matrix_csv({"counts", cm.class_names, cm.class_names, cm.counts});
  out += "overall_accuracy," + text::format_double(cm.overall_accuracy) + "\n";
  out += "fold_accuracy";
  for (double a : cm.fold_accuracies) out += "," + text::format_double(a);
  out += "\n";
  return out;
}

inline ConfusionMatrix parse_confusion(const std::string& contents, const std::string& source = "confusion") {
  const auto lines = text::split_lines(contents);
  const std::size_t S = [&] {
    auto head = text::split_csv(lines.empty() ? std::string{} : lines[0]);
    if (!head || head->empty() || (*head)[0] != "percent") throw ParseError(source, 1, "expected percent section");
    return head->size() - 1;
  }();
  if (lines.size() < 2 * (S + 1) + 2) throw ParseError(source, lines.size(), "truncated confusion file");
  auto join = [&](std::size_t from, std::size_t count) {
    std::string s;
    for (std::size_t i = from; i < from + count; ++i) s += lines[i] + "\n";
    return s;
  };
  auto pct = parse_matrix_csv(join(0, S + 1), source);
  auto cnt = parse_matrix_csv(join(S + 1, S + 1), source);
  if (cnt.tag != "counts") throw ParseError(source, S + 2, "expected counts section");
  ConfusionMatrix cm;
  cm.class_names = pct.col_ids;
  cm.percent = std::move(pct.values);
  cm.counts = std::move(cnt.values);
  auto overall = text::split_csv(lines[2 * (S + 1)]);
  if (!overall || overall->size() != 2 || (*overall)[0] != "overall_accuracy")
    throw ParseError(source, 2 * (S + 1) + 1, "expected overall_accuracy");
  auto v = text::parse_double((*overall)[1]);
  if (!v) throw ParseError(source, 2 * (S + 1) + 1, "bad number");
  cm.overall_accuracy = *v;
  auto folds = text::split_csv(lines[2 * (S + 1) + 1]);
  if (!folds || folds->empty() || (*folds)[0] != "fold_accuracy")
    throw ParseError(source, 2 * (S + 1) + 2, "expected fold_accuracy");
  for (std::size_t i = 1; i < folds->size(); ++i) {
    auto f = text::parse_double((*folds)[i]);
    if (!f) throw ParseError(source, 2 * (S + 1) + 2, "bad number");
    cm.fold_accuracies.push_back(*f);
  }
  return cm;
}

/// style,accuracy_percent (the diagonal of the confusion matrix).
inline std::string format_style_accuracy(const ConfusionMatrix& cm) {
  std::string out = "style,accuracy_percent\n";
  const auto acc = cm.per_class_accuracy();
  for (std::size_t c = 0; c < acc.size(); ++c)
    out += text::csv_field(cm.class_names[c]) + "," + text::format_double(acc[c]) + "\n";
  out += "overall," + text::format_double(cm.overall_accuracy) + "\n";
  return out;
}

/// Rows are q percentiles, columns top-k values; cells are recall in percent.
inline std::string format_recall_table(const RecallTable& t) {
  std::vector<std::string> head{"q%"};
  for (int k : t.ks) head.push_back(std::to_string(k));
  std::string out = text::join_csv(head) + "\n";
  for (std::size_t r = 0; r < t.qs.size(); ++r) {
    out += text::format_double(t.qs[r]);
    for (std::size_t c = 0; c < t.ks.size(); ++c)
      out += "," + text::format_double(100.0 * t.recall(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    out += "\n";
  }
  return out;
}

inline RecallTable parse_recall_table(const std::string& contents, const std::string& source = "recall") {
  auto m = parse_matrix_csv(contents, source);
  if (m.tag != "q%") throw ParseError(source, 1, "expected 'q%' header cell");
  RecallTable t;
  for (const auto& k : m.col_ids) {
    auto v = text::parse_int<int>(k);
    if (!v) throw ParseError(source, 1, "bad top-k header");
    t.ks.push_back(*v);
  }
  for (std::size_t r = 0; r < m.row_ids.size(); ++r) {
    auto q = text::parse_double(m.row_ids[r]);
    if (!q) throw ParseError(source, r + 2, "bad q");
    t.qs.push_back(*q);
  }
  t.recall = m.values / 100.0;
  return t;
}

/// artist_id,rank,influencer_id,weight
inline std::string format_top_k_table(const InfluenceGraph& g, std::size_t k) {
  std::string out = "artist_id,rank,influencer_id,weight\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto top = top_k_influences(g, i, k);
    for (std::size_t r = 0; r < top.size(); ++r)
      out += g.artist_ids[i] + "," + std::to_string(r + 1) + "," + top[r].artist_id + "," +
             text::format_double(top[r].weight) + "\n";
  }
  return out;
}

// ---- file wrappers ---------------------------------------------------------

inline void save(const std::string& path, const std::string& contents) { text::write_file(path, contents); }
inline std::string load(const std::string& path) { return text::read_file(path); }

}  // namespace artinfluence::persist

#endif  // ARTINFLUENCE_PERSIST_HPP
