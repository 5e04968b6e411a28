#include "forge/attention.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "forge/errors.hpp"

namespace forge::attention {

namespace {

std::string dims(std::size_t a, std::size_t b) {
  return std::to_string(a) + "x" + std::to_string(b);
}

double relu(double x) { return x > 0.0 ? x : 0.0; }

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw ShapeError(std::string(what) + " contains a non-finite value");
  }
}

void check_bias(const Vector& b, std::size_t n, const char* what) {
  if (!b.empty() && b.size() != n) {
    throw ShapeError(std::string(what) + " has " + std::to_string(b.size()) +
                     " entries, expected " + std::to_string(n));
  }
}

void check_att(const AttentionMlpParams& p, std::size_t x_dim, std::size_t q_dim) {
  if (p.hidden_w.cols != x_dim + q_dim) {
    throw ShapeError("att hidden layer expects input " + std::to_string(p.hidden_w.cols) +
                     ", got " + std::to_string(x_dim) + " + " + std::to_string(q_dim));
  }
  if (p.hidden_w.data.size() != p.hidden_w.rows * p.hidden_w.cols) {
    throw ShapeError("att hidden weights are not " + dims(p.hidden_w.rows, p.hidden_w.cols));
  }
  check_bias(p.hidden_b, p.hidden_w.rows, "att hidden bias");
  if (p.out_w.size() != p.hidden_w.rows) {
    throw ShapeError("att output weights have " + std::to_string(p.out_w.size()) +
                     " entries, expected " + std::to_string(p.hidden_w.rows));
  }
}

// Scores, softmax and weighted sum over the frame features for one query.
Vector attend_frames(const std::vector<Vector>& frames, std::span<const double> query,
                     const AttentionMlpParams& params, Vector& alpha) {
  Vector scores(frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) scores[t] = params.score(frames[t], query);
  alpha = softmax(scores);
  Vector out(frames.front().size(), 0.0);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += alpha[t] * frames[t][c];
  }
  return out;
}

}  // namespace

Matrix Matrix::zeros(std::size_t rows, std::size_t cols) {
  return Matrix{rows, cols, std::vector<double>(rows * cols, 0.0)};
}

Vector Matrix::apply(std::span<const double> x) const {
  if (x.size() != cols) {
    throw ShapeError("matrix " + dims(rows, cols) + " applied to vector of " +
                     std::to_string(x.size()));
  }
  if (data.size() != rows * cols) throw ShapeError("matrix data is not " + dims(rows, cols));
  Vector y(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = data.data() + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

FeatureVolume FeatureVolume::zeros(std::size_t c, std::size_t t, std::size_t h, std::size_t w) {
  return FeatureVolume{c, t, h, w, std::vector<double>(c * t * h * w, 0.0)};
}

Vector FeatureVolume::cell(std::size_t t, std::size_t h, std::size_t w) const {
  Vector out(channels);
  for (std::size_t c = 0; c < channels; ++c) out[c] = at(c, t, h, w);
  return out;
}

void FeatureVolume::validate() const {
  if (channels == 0 || frames == 0 || height == 0 || width == 0) {
    throw ShapeError("feature volume dimensions must all be >= 1");
  }
  if (values.size() != channels * frames * height * width) {
    throw ShapeError("feature volume holds " + std::to_string(values.size()) +
                     " values, expected " + std::to_string(channels * frames * height * width));
  }
  require_finite(values, "feature volume");
}

double AttentionMlpParams::score(std::span<const double> x, std::span<const double> q) const {
  check_att(*this, x.size(), q.size());
  double out = out_b;
  for (std::size_t r = 0; r < hidden_w.rows; ++r) {
    const double* row = hidden_w.data.data() + r * hidden_w.cols;
    double acc = hidden_b.empty() ? 0.0 : hidden_b[r];
    for (std::size_t i = 0; i < x.size(); ++i) acc += row[i] * x[i];
    for (std::size_t i = 0; i < q.size(); ++i) acc += row[x.size() + i] * q[i];
    out += out_w[r] * relu(acc);
  }
  return out;
}

Vector MlpParams::forward(std::span<const double> x) const {
  if (layers.empty()) throw ShapeError("MLP has no layers");
  Vector h(x.begin(), x.end());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& layer = layers[i];
    check_bias(layer.b, layer.w.rows, "MLP bias");
    Vector next = layer.w.apply(h);
    for (std::size_t r = 0; r < next.size(); ++r) {
      if (!layer.b.empty()) next[r] += layer.b[r];
      if (i + 1 < layers.size()) next[r] = relu(next[r]);
    }
    h = std::move(next);
  }
  return h;
}

std::size_t MlpParams::input_dim() const { return layers.empty() ? 0 : layers.front().w.cols; }
std::size_t MlpParams::output_dim() const { return layers.empty() ? 0 : layers.back().w.rows; }

Vector softmax(std::span<const double> logits) {
  if (logits.empty()) throw ShapeError("softmax of an empty vector");
  double m = *std::max_element(logits.begin(), logits.end());
  Vector out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

std::vector<Vector> frame_features(const FeatureVolume& v) {
  v.validate();
  const double cells = static_cast<double>(v.height * v.width);
  std::vector<Vector> frames(v.frames, Vector(v.channels, 0.0));
  for (std::size_t c = 0; c < v.channels; ++c) {
    for (std::size_t t = 0; t < v.frames; ++t) {
      double acc = 0.0;
      for (std::size_t h = 0; h < v.height; ++h) {
        for (std::size_t w = 0; w < v.width; ++w) acc += v.at(c, t, h, w);
      }
      frames[t][c] = acc / cells;
    }
  }
  return frames;
}

TemporalAttentionResult single_step_temporal_attention(const FeatureVolume& v,
                                                       const QuestionEmbedding& q,
                                                       const AttentionMlpParams& params) {
  require_finite(q.values, "question embedding");
  auto frames = frame_features(v);
  check_att(params, v.channels, q.values.size());
  TemporalAttentionResult result;
  result.alphas.emplace_back();
  result.embedding.values = attend_frames(frames, q.values, params, result.alphas.back());
  result.embedding.kind = EmbeddingKind::T1;
  return result;
}

TemporalAttentionResult temporal_attention(const FeatureVolume& v, const QuestionEmbedding& q,
                                           const AttentionMlpParams& params, std::size_t steps) {
  if (steps == 0) throw ShapeError("temporal attention needs at least one step");
  require_finite(q.values, "question embedding");
  if (steps > 1 && q.values.size() != v.channels) {
    throw ShapeError("multi-step attention adds the attended embedding to the query; dim(q)=" +
                     std::to_string(q.values.size()) + " but C=" + std::to_string(v.channels));
  }
  auto frames = frame_features(v);
  check_att(params, v.channels, q.values.size());

  TemporalAttentionResult result;
  Vector query = q.values;
  Vector embedding;
  for (std::size_t k = 0; k < steps; ++k) {
    if (k > 0) {
      for (std::size_t i = 0; i < query.size(); ++i) query[i] = q.values[i] + embedding[i];
    }
    result.alphas.emplace_back();
    embedding = attend_frames(frames, query, params, result.alphas.back());
  }
  result.embedding.values = std::move(embedding);
  result.embedding.kind = steps == 1 ? EmbeddingKind::T1 : EmbeddingKind::Tm;
  return result;
}

Vector spatiotemporal_scores(const FeatureVolume& v, const QuestionEmbedding& q,
                             const AttentionMlpParams& params) {
  v.validate();
  require_finite(q.values, "question embedding");
  check_att(params, v.channels, q.values.size());
  Vector scores;
  scores.reserve(v.cells());
  for (std::size_t t = 0; t < v.frames; ++t) {
    for (std::size_t h = 0; h < v.height; ++h) {
      for (std::size_t w = 0; w < v.width; ++w) {
        scores.push_back(params.score(v.cell(t, h, w), q.values));
      }
    }
  }
  return scores;
}

SpatioTemporalAttentionResult spatiotemporal_attention(const FeatureVolume& v,
                                                       const QuestionEmbedding& q,
                                                       const AttentionMlpParams& params) {
  SpatioTemporalAttentionResult result;
  result.alpha = softmax(spatiotemporal_scores(v, q, params));
  result.embedding = attend_cells(v, result.alpha, EmbeddingKind::ST);
  return result;
}

Embedding attend_cells(const FeatureVolume& v, std::span<const double> alpha, EmbeddingKind kind) {
  v.validate();
  if (alpha.size() != v.cells()) {
    throw ShapeError("attention weights cover " + std::to_string(alpha.size()) +
                     " cells, volume has " + std::to_string(v.cells()));
  }
  Embedding out{Vector(v.channels, 0.0), kind};
  const std::size_t cells = v.cells();
  for (std::size_t c = 0; c < v.channels; ++c) {
    const double* slab = v.values.data() + c * cells;
    double acc = 0.0;
    for (std::size_t i = 0; i < cells; ++i) acc += alpha[i] * slab[i];
    out.values[c] = acc;
  }
  return out;
}

Embedding average_pool_embed(const FeatureVolume& v) {
  v.validate();
  const std::size_t cells = v.cells();
  Embedding out{Vector(v.channels, 0.0), EmbeddingKind::AP};
  for (std::size_t c = 0; c < v.channels; ++c) {
    const double* slab = v.values.data() + c * cells;
    double acc = 0.0;
    for (std::size_t i = 0; i < cells; ++i) acc += slab[i];
    out.values[c] = acc / static_cast<double>(cells);
  }
  return out;
}

Embedding global_context_embed(const FeatureVolume& v, const MlpParams& mlp) {
  v.validate();
  if (mlp.input_dim() != v.values.size()) {
    throw ShapeError("global context MLP expects " + std::to_string(mlp.input_dim()) +
                     " inputs, flattened volume has " + std::to_string(v.values.size()));
  }
  return Embedding{mlp.forward(v.values), EmbeddingKind::GC};
}

Vector classify_logits(const Embedding& video, const QuestionEmbedding& q,
                       const ProjectionParams& proj) {
  require_finite(video.values, "video embedding");
  require_finite(q.values, "question embedding");
  if (proj.question_w.rows != video.values.size()) {
    throw ShapeError("question projection yields " + std::to_string(proj.question_w.rows) +
                     " dims, video embedding has " + std::to_string(video.values.size()));
  }
  check_bias(proj.question_b, proj.question_w.rows, "question projection bias");
  Vector fq = proj.question_w.apply(q.values);
  for (std::size_t i = 0; i < fq.size(); ++i) {
    if (!proj.question_b.empty()) fq[i] += proj.question_b[i];
    fq[i] = relu(fq[i]) * video.values[i];
  }
  check_bias(proj.class_b, proj.class_w.rows, "classifier bias");
  Vector logits = proj.class_w.apply(fq);
  if (!proj.class_b.empty()) {
    for (std::size_t i = 0; i < logits.size(); ++i) logits[i] += proj.class_b[i];
  }
  return logits;
}

Vector classify(const Embedding& video, const QuestionEmbedding& q, const ProjectionParams& proj) {
  return softmax(classify_logits(video, q, proj));
}

// ---------------------------------------------------------------------------
// Fixtures

namespace {

using nlohmann::json;

Vector vec_from(const json& j, const char* what) {
  if (!j.is_array()) throw ShapeError(std::string(what) + " must be an array");
  Vector out;
  out.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) throw ShapeError(std::string(what) + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Matrix mat_from(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ShapeError(std::string(what) + " must be a non-empty array of rows");
  Matrix m;
  m.rows = j.size();
  for (const auto& row : j) {
    Vector r = vec_from(row, what);
    if (m.cols == 0) m.cols = r.size();
    if (r.size() != m.cols || r.empty()) throw ShapeError(std::string(what) + " rows differ in length");
    m.data.insert(m.data.end(), r.begin(), r.end());
  }
  return m;
}

json mat_to(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    rows.push_back(Vector(m.data.begin() + r * m.cols, m.data.begin() + (r + 1) * m.cols));
  }
  return rows;
}

Vector opt_vec(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  return vec_from(*it, key);
}

Vector random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
  Vector v(n);
  for (double& x : v) x = (2.0 * rng.uniform_unit() - 1.0) * scale;
  return v;
}

Matrix random_mat(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  return Matrix{rows, cols, random_vec(rng, rows * cols, scale)};
}

std::size_t pick(Rng& rng, std::size_t max) {
  return static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(max)));
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
  return worst;
}

// |sum - 1| or infinity when any entry is negative.
double distribution_error(std::span<const double> p) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) return INFINITY;
    sum += x;
  }
  return std::fabs(sum - 1.0);
}

}  // namespace

Fixture fixture_from_json(const json& j) {
  try {
    Fixture f;
    const auto& d = j.at("dims");
    f.volume.channels = d.at("C").get<std::size_t>();
    f.volume.frames = d.at("T").get<std::size_t>();
    f.volume.height = d.at("H").get<std::size_t>();
    f.volume.width = d.at("W").get<std::size_t>();
    f.volume.values = vec_from(j.at("volume"), "volume");
    f.volume.validate();
    f.question.values = vec_from(j.at("question"), "question");
    const auto& att = j.at("att");
    f.att.hidden_w = mat_from(att.at("W1"), "att.W1");
    f.att.hidden_b = opt_vec(att, "b1");
    f.att.out_w = vec_from(att.at("w2"), "att.w2");
    f.att.out_b = att.value("b2", 0.0);
    const auto& proj = j.at("proj");
    f.proj.question_w = mat_from(proj.at("W_q"), "proj.W_q");
    f.proj.question_b = opt_vec(proj, "b_q");
    f.proj.class_w = mat_from(proj.at("W_cls"), "proj.W_cls");
    f.proj.class_b = opt_vec(proj, "b_cls");
    if (auto it = j.find("gc"); it != j.end() && !it->is_null()) {
      for (const auto& layer : *it) {
        f.global_context.layers.push_back(
            DenseLayer{mat_from(layer.at("W"), "gc.W"), opt_vec(layer, "b")});
      }
    }
    f.steps = j.value("steps", std::size_t{1});
    return f;
  } catch (const json::exception& e) {
    throw ShapeError(std::string("malformed fixture: ") + e.what());
  }
}

json fixture_to_json(const Fixture& f) {
  json j;
  j["dims"] = {{"C", f.volume.channels},
               {"T", f.volume.frames},
               {"H", f.volume.height},
               {"W", f.volume.width}};
  j["volume"] = f.volume.values;
  j["question"] = f.question.values;
  j["att"] = {{"W1", mat_to(f.att.hidden_w)},
              {"b1", f.att.hidden_b},
              {"w2", f.att.out_w},
              {"b2", f.att.out_b}};
  j["proj"] = {{"W_q", mat_to(f.proj.question_w)},
               {"b_q", f.proj.question_b},
               {"W_cls", mat_to(f.proj.class_w)},
               {"b_cls", f.proj.class_b}};
  if (!f.global_context.layers.empty()) {
    json layers = json::array();
    for (const auto& l : f.global_context.layers) layers.push_back({{"W", mat_to(l.w)}, {"b", l.b}});
    j["gc"] = layers;
  }
  j["steps"] = f.steps;
  return j;
}

Fixture random_fixture(Rng& rng, const FixtureLimits& limits) {
  Fixture f;
  const std::size_t c = pick(rng, limits.max_channels);
  const std::size_t t = pick(rng, limits.max_frames);
  const std::size_t h = pick(rng, limits.max_height);
  const std::size_t w = pick(rng, limits.max_width);
  f.volume = FeatureVolume{c, t, h, w, random_vec(rng, c * t * h * w, 2.0)};
  f.question.values = random_vec(rng, c, 2.0);

  const std::size_t hidden = pick(rng, limits.max_hidden);
  f.att.hidden_w = random_mat(rng, hidden, 2 * c);
  f.att.hidden_b = random_vec(rng, hidden);
  f.att.out_w = random_vec(rng, hidden, 3.0);
  f.att.out_b = 2.0 * rng.uniform_unit() - 1.0;

  const std::size_t classes = 1 + pick(rng, limits.max_classes - 1);
  f.proj.question_w = random_mat(rng, c, c);
  f.proj.question_b = random_vec(rng, c);
  f.proj.class_w = random_mat(rng, classes, c, 3.0);
  f.proj.class_b = random_vec(rng, classes);

  const std::size_t gh = pick(rng, limits.max_hidden);
  f.global_context.layers = {
      DenseLayer{random_mat(rng, gh, f.volume.values.size(), 0.5), random_vec(rng, gh)},
      DenseLayer{random_mat(rng, gh, gh), random_vec(rng, gh)},
      DenseLayer{random_mat(rng, c, gh), random_vec(rng, c)},
  };
  f.steps = pick(rng, limits.max_steps);
  return f;
}

std::vector<InvariantResult> check_invariants(const Fixture& f, std::uint64_t seed) {
  std::vector<InvariantResult> out;
  auto record = [&](std::string name, double worst) {
    out.push_back(InvariantResult{std::move(name), worst <= kTolerance, worst});
  };

  const auto single = single_step_temporal_attention(f.volume, f.question, f.att);
  const auto one = temporal_attention(f.volume, f.question, f.att, 1);
  const auto multi = temporal_attention(f.volume, f.question, f.att, f.steps);
  const auto st = spatiotemporal_attention(f.volume, f.question, f.att);

  double alpha_err = 0.0;
  for (const auto* r : {&single, &one, &multi}) {
    for (const auto& a : r->alphas) alpha_err = std::max(alpha_err, distribution_error(a));
  }
  alpha_err = std::max(alpha_err, distribution_error(st.alpha));
  record("alpha_distribution", alpha_err);

  // Uniform probabilities come from the softmax of constant scores.
  const Vector uniform = softmax(Vector(f.volume.cells(), 0.0));
  const Embedding ap = average_pool_embed(f.volume);
  const Embedding uni = attend_cells(f.volume, uniform);
  record("ap_equals_uniform_st", max_abs_diff(ap.values, uni.values));

  const bool exact = one.embedding.values == single.embedding.values &&
                     one.alphas.front() == single.alphas.front();
  record("m1_equals_single_step", exact ? 0.0 : INFINITY);

  // Spatial permutation within every frame.
  Rng rng(seed);
  FeatureVolume permuted = f.volume;
  const std::size_t plane = f.volume.height * f.volume.width;
  for (std::size_t t = 0; t < f.volume.frames; ++t) {
    auto perm = rng.permutation(plane);
    for (std::size_t c = 0; c < f.volume.channels; ++c) {
      const std::size_t base = (c * f.volume.frames + t) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        permuted.values[base + i] = f.volume.values[base + perm[i]];
      }
    }
  }
  const auto multi_perm = temporal_attention(permuted, f.question, f.att, f.steps);
  record("spatial_permutation", max_abs_diff(multi.embedding.values, multi_perm.embedding.values));

  double dist_err = 0.0;
  double shift_err = 0.0;
  double argmax_mismatch = 0.0;
  std::vector<Embedding> embeddings = {single.embedding, multi.embedding, st.embedding, ap};
  if (!f.global_context.layers.empty()) {
    embeddings.push_back(global_context_embed(f.volume, f.global_context));
  }
  for (const auto& e : embeddings) {
    Vector logits = classify_logits(e, f.question, f.proj);
    Vector s = softmax(logits);
    dist_err = std::max(dist_err, distribution_error(s));
    const double shift = 100.0 * (2.0 * rng.uniform_unit() - 1.0);
    Vector shifted = logits;
    for (double& x : shifted) x += shift;
    shift_err = std::max(shift_err, max_abs_diff(s, softmax(shifted)));
  }
  {
    Vector a = classify(ap, f.question, f.proj);
    Vector b = classify(uni, f.question, f.proj);
    // Only compare argmax where the top two classes are separated.
    auto top = std::max_element(a.begin(), a.end()) - a.begin();
    auto top_b = std::max_element(b.begin(), b.end()) - b.begin();
    Vector sorted = a;
    std::sort(sorted.rbegin(), sorted.rend());
    const bool separated = sorted.size() < 2 || sorted[0] - sorted[1] > kTolerance;
    if (separated && top != top_b) argmax_mismatch = INFINITY;
  }
  record("classify_distribution", dist_err);
  record("classify_shift_invariance", shift_err);
  record("ap_uniform_argmax", argmax_mismatch);
  return out;
}

}  // namespace forge::attention
