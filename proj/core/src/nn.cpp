#include "pcgcn/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pcgcn::nn {
namespace {

constexpr double kLogFloor = 1e-12;

void check_shapes(const GcnModel& model, const SparseMatrix& adj, const Matrix& x) {
  if (model.layers.empty()) throw std::invalid_argument("gcn: model has no layers");
  if (adj.rows() != adj.cols() || adj.rows() != x.rows()) {
    throw std::invalid_argument("gcn: adjacency is " + std::to_string(adj.rows()) + "x" + std::to_string(adj.cols()) +
                                " but features have " + std::to_string(x.rows()) + " rows");
  }
  if (x.cols() != model.layers.front().in_dim()) {
    throw std::invalid_argument("gcn: feature width " + std::to_string(x.cols()) + " != model input width " +
                                std::to_string(model.layers.front().in_dim()));
  }
}

Matrix relu_mask(const Matrix& pre) { return (pre.array() > 0.0).cast<double>().matrix(); }

}  // namespace

Head head_for(TaskKind task) { return task == TaskKind::kMulticlass ? Head::kSoftmax : Head::kSigmoid; }

Matrix glorot(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = (2.0 * uniform01(rng) - 1.0) * limit;
  }
  return m;
}

Eigen::Index GcnLayer::out_dim() const {
  Eigen::Index total = 0;
  for (const auto& w : weights) total += w.cols();
  return total;
}

GcnModel GcnModel::create(LayerKind kind, Eigen::Index in_dim, Eigen::Index hidden, Eigen::Index out_dim, Head head,
                          Rng& rng, int num_layers) {
  if (num_layers < 1) throw std::invalid_argument("gcn: need at least one layer");
  if (in_dim < 1 || hidden < 1 || out_dim < 1) throw std::invalid_argument("gcn: layer widths must be positive");
  GcnModel model;
  model.head = head;
  Eigen::Index width = in_dim;
  for (int l = 0; l < num_layers; ++l) {
    GcnLayer layer;
    const bool last = l + 1 == num_layers;
    layer.relu = !last;
    if (kind == LayerKind::kHogcn && !last) {
      layer.kind = LayerKind::kHogcn;
      for (int b = 0; b < 3; ++b) layer.weights.push_back(glorot(width, hidden, rng));
    } else {
      layer.kind = LayerKind::kGcn;
      layer.weights.push_back(glorot(width, last ? out_dim : hidden, rng));
    }
    width = layer.out_dim();
    model.layers.push_back(std::move(layer));
  }
  return model;
}

LayerKind GcnModel::kind() const {
  for (const auto& layer : layers) {
    if (layer.kind == LayerKind::kHogcn) return LayerKind::kHogcn;
  }
  return LayerKind::kGcn;
}

std::vector<Matrix*> GcnModel::parameters() {
  std::vector<Matrix*> out;
  for (auto& layer : layers) {
    for (auto& w : layer.weights) out.push_back(&w);
  }
  return out;
}

std::vector<const Matrix*> GcnModel::parameters() const {
  std::vector<const Matrix*> out;
  for (const auto& layer : layers) {
    for (const auto& w : layer.weights) out.push_back(&w);
  }
  return out;
}

std::size_t GcnModel::num_parameters() const {
  std::size_t total = 0;
  for (const auto* p : parameters()) total += static_cast<std::size_t>(p->size());
  return total;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double top = logits.row(i).maxCoeff();
    out.row(i) = (logits.row(i).array() - top).exp().matrix();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

Matrix sigmoid(const Matrix& logits) {
  return logits.unaryExpr([](double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
  });
}

Matrix forward(const GcnModel& model, const SparseMatrix& adj, const Matrix& x, ForwardCache* cache, Dropout dropout) {
  check_shapes(model, adj, x);
  if (cache) cache->layers.assign(model.layers.size(), {});
  Matrix z = x;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    if (z.cols() != layer.in_dim()) throw std::invalid_argument("gcn: layer widths do not compose");
    Matrix mask;
    if (dropout.rate > 0.0 && dropout.rng) {
      mask.resize(z.rows(), z.cols());
      const double keep = 1.0 - dropout.rate;
      for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = uniform01(*dropout.rng) < keep ? 1.0 / keep : 0.0;
      z = z.cwiseProduct(mask);
    }
    Matrix ax = adj * z;
    Matrix pre;
    Matrix aax;
    if (layer.kind == LayerKind::kGcn) {
      pre = ax * layer.weights[0];
    } else {
      aax = adj * ax;
      const Eigen::Index w = layer.weights[0].cols();
      pre.resize(z.rows(), layer.out_dim());
      pre.leftCols(w) = z * layer.weights[0];
      pre.middleCols(w, layer.weights[1].cols()) = ax * layer.weights[1];
      pre.rightCols(layer.weights[2].cols()) = aax * layer.weights[2];
    }
    Matrix out = layer.relu ? Matrix(pre.cwiseMax(0.0)) : pre;
    if (cache) {
      auto& lc = cache->layers[l];
      lc.input = std::move(z);
      lc.dropout_mask = std::move(mask);
      lc.ax = std::move(ax);
      lc.aax = std::move(aax);
      lc.pre = std::move(pre);
    }
    z = std::move(out);
  }
  Matrix probs = model.head == Head::kSoftmax ? softmax_rows(z) : sigmoid(z);
  if (cache) {
    cache->logits = z;
    cache->probs = probs;
  }
  return probs;
}

Matrix gcn_forward(const GcnModel& model, const SparseMatrix& adj, const Matrix& x, ForwardCache* cache) {
  if (model.kind() != LayerKind::kGcn) throw std::invalid_argument("gcn_forward: model has hogcn layers");
  return forward(model, adj, x, cache);
}

Matrix hogcn_forward(const GcnModel& model, const SparseMatrix& adj, const Matrix& x, ForwardCache* cache) {
  if (model.kind() != LayerKind::kHogcn) throw std::invalid_argument("hogcn_forward: model has no hogcn layers");
  return forward(model, adj, x, cache);
}

namespace {

// Loss and d(loss)/d(logits) for the given head over `mask` rows.
double head_loss(Head head, const Matrix& probs, const Labels& labels, std::span<const NodeId> mask, Matrix* d_logits) {
  if (mask.empty()) throw std::invalid_argument("no labeled nodes in batch");
  if (labels.num_nodes() != probs.rows() || labels.num_labels() != probs.cols()) {
    throw std::invalid_argument("loss: labels are " + std::to_string(labels.num_nodes()) + "x" +
                                std::to_string(labels.num_labels()) + " but predictions are " +
                                std::to_string(probs.rows()) + "x" + std::to_string(probs.cols()));
  }
  if (d_logits) *d_logits = Matrix::Zero(probs.rows(), probs.cols());
  const auto q = probs.cols();
  double total = 0.0;
  if (head == Head::kSoftmax) {
    if (labels.kind() != TaskKind::kMulticlass) throw std::invalid_argument("softmax head needs multiclass labels");
    const double scale = 1.0 / static_cast<double>(mask.size());
    for (NodeId v : mask) {
      const int y = labels.class_of(v);
      total -= std::log(std::max(probs(v, y), kLogFloor));
      if (d_logits) {
        d_logits->row(v) = probs.row(v) * scale;
        (*d_logits)(v, y) -= scale;
      }
    }
    return total * scale;
  }
  const double scale = 1.0 / (static_cast<double>(mask.size()) * static_cast<double>(q));
  for (NodeId v : mask) {
    for (Eigen::Index j = 0; j < q; ++j) {
      const double p = probs(v, j);
      const double y = labels.value(v, static_cast<int>(j)) ? 1.0 : 0.0;
      total -= y * std::log(std::max(p, kLogFloor)) + (1.0 - y) * std::log(std::max(1.0 - p, kLogFloor));
      if (d_logits) (*d_logits)(v, j) = (p - y) * scale;
    }
  }
  return total * scale;
}

}  // namespace

LossAndGrad loss_and_grad(const GcnModel& model, const SparseMatrix& adj, const Matrix& x, const Labels& labels,
                          std::span<const NodeId> mask, Dropout dropout) {
  if (mask.empty()) throw std::invalid_argument("no labeled nodes in batch");
  ForwardCache cache;
  forward(model, adj, x, &cache, dropout);
  LossAndGrad result;
  Matrix d;
  result.loss = head_loss(model.head, cache.probs, labels, mask, &d);

  std::vector<std::vector<Matrix>> per_layer(model.layers.size());
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    const auto& layer = model.layers[l];
    const auto& lc = cache.layers[l];
    if (layer.relu) d = d.cwiseProduct(relu_mask(lc.pre));
    auto& grads = per_layer[l];
    const bool need_input_grad = l > 0;
    Matrix d_input;
    if (layer.kind == LayerKind::kGcn) {
      grads.push_back(lc.ax.transpose() * d);
      if (need_input_grad) d_input = adj.transpose() * (d * layer.weights[0].transpose());
    } else {
      const Eigen::Index w0 = layer.weights[0].cols();
      const Eigen::Index w1 = layer.weights[1].cols();
      const Eigen::Index w2 = layer.weights[2].cols();
      const Matrix d0 = d.leftCols(w0);
      const Matrix d1 = d.middleCols(w0, w1);
      const Matrix d2 = d.rightCols(w2);
      grads.push_back(lc.input.transpose() * d0);
      grads.push_back(lc.ax.transpose() * d1);
      grads.push_back(lc.aax.transpose() * d2);
      if (need_input_grad) {
        const Matrix via2 = adj.transpose() * (d2 * layer.weights[2].transpose());
        d_input = d0 * layer.weights[0].transpose() + adj.transpose() * (d1 * layer.weights[1].transpose() + via2);
      }
    }
    if (need_input_grad) {
      if (lc.dropout_mask.size() > 0) d_input = d_input.cwiseProduct(lc.dropout_mask);
      d = std::move(d_input);
    }
  }
  for (auto& grads : per_layer) {
    for (auto& g : grads) result.grads.push_back(std::move(g));
  }
  return result;
}

double loss(const GcnModel& model, const SparseMatrix& adj, const Matrix& x, const Labels& labels,
            std::span<const NodeId> mask) {
  const Matrix probs = forward(model, adj, x);
  return head_loss(model.head, probs, labels, mask, nullptr);
}

Mlp Mlp::create(Eigen::Index in_dim, Eigen::Index hidden, Eigen::Index out_dim, Rng& rng) {
  if (in_dim < 1 || hidden < 1 || out_dim < 1) throw std::invalid_argument("mlp: widths must be positive");
  Mlp m;
  m.w1 = glorot(in_dim, hidden, rng);
  m.b1 = Matrix::Zero(1, hidden);
  m.w2 = glorot(hidden, out_dim, rng);
  m.b2 = Matrix::Zero(1, out_dim);
  return m;
}

Matrix Mlp::forward(const Matrix& x, Cache* cache) const {
  if (x.cols() != w1.rows()) {
    throw std::invalid_argument("mlp: input width " + std::to_string(x.cols()) + " != " + std::to_string(w1.rows()));
  }
  Matrix pre = x * w1;
  pre.rowwise() += b1.row(0);
  Matrix hidden = pre.cwiseMax(0.0);
  Matrix out = hidden * w2;
  out.rowwise() += b2.row(0);
  if (cache) {
    cache->x = x;
    cache->pre = std::move(pre);
    cache->hidden = std::move(hidden);
  }
  return out;
}

std::vector<Matrix> Mlp::backward(const Cache& cache, const Matrix& d_out) const {
  std::vector<Matrix> grads(4);
  const Matrix dh = (d_out * w2.transpose()).cwiseProduct(relu_mask(cache.pre));
  grads[0] = cache.x.transpose() * dh;
  grads[1] = dh.colwise().sum();
  grads[2] = cache.hidden.transpose() * d_out;
  grads[3] = d_out.colwise().sum();
  return grads;
}

Vector mlp_forward(const Mlp& mlp, const Vector& x) {
  const Matrix out = mlp.forward(x.transpose());
  return out.row(0).transpose();
}

void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads, AdamState& state, double lr) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam: parameter/gradient count mismatch");
  if (state.m.empty()) {
    for (const auto* p : params) {
      state.m.push_back(Matrix::Zero(p->rows(), p->cols()));
      state.v.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (state.m.size() != params.size()) throw std::invalid_argument("adam: state does not match parameters");
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& g = grads[i];
    if (g.rows() != params[i]->rows() || g.cols() != params[i]->cols()) {
      throw std::invalid_argument("adam: gradient shape mismatch");
    }
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g.cwiseProduct(g);
    const auto m_hat = state.m[i].array() / c1;
    const auto v_hat = state.v[i].array() / c2;
    params[i]->array() -= lr * m_hat / (v_hat.sqrt() + state.epsilon);
  }
}

double finite_diff_check(const std::function<double()>& f, std::span<Matrix* const> params,
                         std::span<const Matrix> analytic, double h, double floor) {
  if (params.size() != analytic.size()) throw std::invalid_argument("finite_diff_check: size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    for (Eigen::Index j = 0; j < p.size(); ++j) {
      const double saved = p.data()[j];
      p.data()[j] = saved + h;
      const double up = f();
      p.data()[j] = saved - h;
      const double down = f();
      p.data()[j] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[i].data()[j];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace pcgcn::nn
