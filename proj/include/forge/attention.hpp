#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "forge/rng.hpp"
#include "json.hpp"

// Reference (non-trainable) math for question-conditioned video embeddings:
// frame pooling, single and multi-step temporal attention, spatio-temporal
// attention, average pooling, global context embedding and the fused
// classifier. All arithmetic is in double precision; parameters come from
// fixtures.
namespace forge::attention {

using Vector = std::vector<double>;

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  static Matrix zeros(std::size_t rows, std::size_t cols);
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  /// this * x; throws ShapeError when x.size() != cols.
  Vector apply(std::span<const double> x) const;
};

/// C x T x H x W volume stored row-major in that order. The default
/// producer shape is (512, T, 7, 10).
struct FeatureVolume {
  std::size_t channels = 0;
  std::size_t frames = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  static FeatureVolume zeros(std::size_t c, std::size_t t, std::size_t h, std::size_t w);

  std::size_t index(std::size_t c, std::size_t t, std::size_t h, std::size_t w) const {
    return ((c * frames + t) * height + h) * width + w;
  }
  double& at(std::size_t c, std::size_t t, std::size_t h, std::size_t w) {
    return values[index(c, t, h, w)];
  }
  double at(std::size_t c, std::size_t t, std::size_t h, std::size_t w) const {
    return values[index(c, t, h, w)];
  }
  std::size_t cells() const { return frames * height * width; }

  /// Channel vector at one spatio-temporal cell.
  Vector cell(std::size_t t, std::size_t h, std::size_t w) const;

  /// Throws ShapeError on zero dimensions, wrong value count or non-finite
  /// values.
  void validate() const;
};

/// Opaque sentence-encoder output (2400-d by default).
struct QuestionEmbedding {
  Vector values;
};

/// att(x, q): one hidden ReLU layer over the concatenation [x; q] and a
/// scalar output.
struct AttentionMlpParams {
  Matrix hidden_w;  // hidden x (dim(x) + dim(q))
  Vector hidden_b;
  Vector out_w;  // hidden
  double out_b = 0.0;

  double score(std::span<const double> x, std::span<const double> q) const;
};

struct DenseLayer {
  Matrix w;
  Vector b;
};

/// Fully connected stack; ReLU after every layer except the last.
struct MlpParams {
  std::vector<DenseLayer> layers;

  Vector forward(std::span<const double> x) const;
  std::size_t input_dim() const;
  std::size_t output_dim() const;
};

struct ProjectionParams {
  Matrix question_w;  // D_emb x D_q
  Vector question_b;  // empty means zero
  Matrix class_w;     // classes x D_emb
  Vector class_b;     // empty means zero
};

enum class EmbeddingKind { T1, Tm, ST, GC, AP };

struct Embedding {
  Vector values;
  EmbeddingKind kind = EmbeddingKind::AP;
};

struct TemporalAttentionResult {
  Embedding embedding;
  std::vector<Vector> alphas;  // one distribution over frames per step
};

struct SpatioTemporalAttentionResult {
  Embedding embedding;
  Vector alpha;  // over (t, h, w), row-major
};

/// Numerically stable softmax.
Vector softmax(std::span<const double> logits);

/// Spatial average of every frame: T vectors of dimension C.
std::vector<Vector> frame_features(const FeatureVolume& v);

/// One attention step with the raw question embedding (no refinement).
TemporalAttentionResult single_step_temporal_attention(const FeatureVolume& v,
                                                       const QuestionEmbedding& q,
                                                       const AttentionMlpParams& params);

/// `steps` rounds of temporal attention; from the second round the query is
/// q + previous attended embedding, which requires dim(q) == C.
TemporalAttentionResult temporal_attention(const FeatureVolume& v, const QuestionEmbedding& q,
                                           const AttentionMlpParams& params, std::size_t steps);

/// Attention scores for every cell, row-major over (t, h, w).
Vector spatiotemporal_scores(const FeatureVolume& v, const QuestionEmbedding& q,
                             const AttentionMlpParams& params);

SpatioTemporalAttentionResult spatiotemporal_attention(const FeatureVolume& v,
                                                       const QuestionEmbedding& q,
                                                       const AttentionMlpParams& params);

/// Sum over cells of alpha(t,h,w) * f(t,h,w) for arbitrary weights.
Embedding attend_cells(const FeatureVolume& v, std::span<const double> alpha,
                       EmbeddingKind kind = EmbeddingKind::ST);

Embedding average_pool_embed(const FeatureVolume& v);

/// MLP over the volume flattened in (C, T, H, W) row-major order.
Embedding global_context_embed(const FeatureVolume& v, const MlpParams& mlp);

/// W_cls (v_emb * relu(W_q q + b_q)) + b_cls.
Vector classify_logits(const Embedding& video, const QuestionEmbedding& q,
                       const ProjectionParams& proj);

/// Softmax of classify_logits.
Vector classify(const Embedding& video, const QuestionEmbedding& q, const ProjectionParams& proj);

// Fixture files for the invariant checker.
struct Fixture {
  FeatureVolume volume;
  QuestionEmbedding question;
  AttentionMlpParams att;
  ProjectionParams proj;
  MlpParams global_context;  // optional: no layers means skip
  std::size_t steps = 1;
};

Fixture fixture_from_json(const nlohmann::json& j);
nlohmann::json fixture_to_json(const Fixture& f);

struct FixtureLimits {
  std::size_t max_channels = 8;
  std::size_t max_frames = 6;
  std::size_t max_height = 4;
  std::size_t max_width = 5;
  std::size_t max_hidden = 8;
  std::size_t max_classes = 6;
  std::size_t max_steps = 3;
};

/// Random fixture with dim(q) == C so multi-step refinement is defined.
Fixture random_fixture(Rng& rng, const FixtureLimits& limits = {});

struct InvariantResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // largest observed deviation
};

inline constexpr double kTolerance = 1e-9;

/// Evaluates every invariant on one fixture (distribution validity,
/// AP vs uniform attention, m=1 vs single step, spatial permutation,
/// softmax shift invariance).
std::vector<InvariantResult> check_invariants(const Fixture& f, std::uint64_t seed = 0);

}  // namespace forge::attention
