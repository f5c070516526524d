#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pcgcn/graph.hpp"
#include "pcgcn/types.hpp"

namespace pcgcn::nn {

enum class LayerKind { kGcn, kHogcn };
enum class Head { kSigmoid, kSoftmax };

Head head_for(TaskKind task);

/// Glorot-uniform initialized matrix.
Matrix glorot(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// One propagation layer.
///   gcn:   Z' = act(A Z W)
///   hogcn: Z' = act([Z W0 | A Z W1 | A^2 Z W2])   (output width 3 x branch width)
struct GcnLayer {
  LayerKind kind = LayerKind::kGcn;
  std::vector<Matrix> weights;
  bool relu = true;

  Eigen::Index in_dim() const { return weights.front().rows(); }
  Eigen::Index out_dim() const;
};

/// Stack of propagation layers with a sigmoid (multilabel) or softmax
/// (multiclass) head. With kind = hogcn every hidden layer is a hogcn layer and
/// the output layer is a gcn layer mapping the concatenation to the labels.
struct GcnModel {
  std::vector<GcnLayer> layers;
  Head head = Head::kSoftmax;

  static GcnModel create(LayerKind kind, Eigen::Index in_dim, Eigen::Index hidden, Eigen::Index out_dim, Head head,
                         Rng& rng, int num_layers = 2);

  LayerKind kind() const;
  std::vector<Matrix*> parameters();
  std::vector<const Matrix*> parameters() const;
  std::size_t num_parameters() const;
};

struct LayerCache {
  Matrix input;  // after dropout
  Matrix dropout_mask;
  Matrix ax;   // A * input
  Matrix aax;  // A * A * input (hogcn)
  Matrix pre;  // pre-activation output
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  Matrix logits;
  Matrix probs;
};

/// Inverted dropout on every layer input, active only when rate > 0 and an
/// rng is supplied.
struct Dropout {
  double rate = 0.0;
  Rng* rng = nullptr;
};

/// Per-node output probabilities of the model on (adjacency, features).
Matrix forward(const GcnModel& model, const SparseMatrix& adj, const Matrix& x, ForwardCache* cache = nullptr,
               Dropout dropout = {});

/// forward() restricted to models built from gcn layers.
Matrix gcn_forward(const GcnModel& model, const SparseMatrix& adj, const Matrix& x, ForwardCache* cache = nullptr);
/// forward() restricted to models whose hidden layers are hogcn layers.
Matrix hogcn_forward(const GcnModel& model, const SparseMatrix& adj, const Matrix& x, ForwardCache* cache = nullptr);

Matrix softmax_rows(const Matrix& logits);
Matrix sigmoid(const Matrix& logits);

struct LossAndGrad {
  double loss = 0.0;
  /// One gradient per parameter, in GcnModel::parameters() order.
  std::vector<Matrix> grads;
};

/// Mean binary cross-entropy over (node, label) entries (sigmoid head) or
/// mean categorical cross-entropy over nodes (softmax head), restricted to the
/// `mask` rows, with backpropagated gradients. Throws std::invalid_argument
/// ("no labeled nodes in batch") for an empty mask.
LossAndGrad loss_and_grad(const GcnModel& model, const SparseMatrix& adj, const Matrix& x, const Labels& labels,
                          std::span<const NodeId> mask, Dropout dropout = {});

/// Loss value only (no dropout).
double loss(const GcnModel& model, const SparseMatrix& adj, const Matrix& x, const Labels& labels,
            std::span<const NodeId> mask);

/// Two-layer perceptron: relu(x W1 + b1) W2 + b2. Rows of x are samples.
struct Mlp {
  Matrix w1, b1, w2, b2;

  static Mlp create(Eigen::Index in_dim, Eigen::Index hidden, Eigen::Index out_dim, Rng& rng);

  struct Cache {
    Matrix x;
    Matrix pre;
    Matrix hidden;
  };

  Matrix forward(const Matrix& x, Cache* cache = nullptr) const;
  /// Parameter gradients (w1, b1, w2, b2 order) for upstream d_out.
  std::vector<Matrix> backward(const Cache& cache, const Matrix& d_out) const;

  std::vector<Matrix*> parameters() { return {&w1, &b1, &w2, &b2}; }
  std::vector<const Matrix*> parameters() const { return {&w1, &b1, &w2, &b2}; }
  Eigen::Index in_dim() const { return w1.rows(); }
  Eigen::Index out_dim() const { return w2.cols(); }
};

/// Single-sample convenience wrapper.
Vector mlp_forward(const Mlp& mlp, const Vector& x);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
};

/// One bias-corrected Adam step (descent).
void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads, AdamState& state, double lr);

/// Largest relative error between `analytic` and central differences of
/// `f` w.r.t. every entry of `params`. The error is |a - n| / max(|a|, |n|, floor).
double finite_diff_check(const std::function<double()>& f, std::span<Matrix* const> params,
                         std::span<const Matrix> analytic, double h = 1e-5, double floor = 1e-6);

}  // namespace pcgcn::nn
