#include "pcgcn/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "pcgcn/checkpoint.hpp"

namespace pcgcn {
namespace {

bool all_finite(const std::vector<Matrix>& ms) {
  return std::all_of(ms.begin(), ms.end(), [](const Matrix& m) { return m.allFinite(); });
}

void check_actions(const Matrix& states, const ActionVector& actions, int num_actions) {
  if (states.rows() == 0) throw std::invalid_argument("policy: no edge states");
  if (actions.index.size() != static_cast<std::size_t>(states.rows())) {
    throw std::invalid_argument("policy: " + std::to_string(actions.index.size()) + " actions for " +
                                std::to_string(states.rows()) + " states");
  }
  for (int a : actions.index) {
    if (a < 0 || a >= num_actions) throw std::invalid_argument("policy: action index out of range");
  }
}

// ln softmax row-wise, computed stably.
Matrix log_softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double top = logits.row(i).maxCoeff();
    const double lse = top + std::log((logits.row(i).array() - top).exp().sum());
    out.row(i) = logits.row(i).array() - lse;
  }
  return out;
}

void ascend(std::vector<Matrix*> params, const std::vector<Matrix>& grads, double step) {
  for (std::size_t i = 0; i < params.size(); ++i) *params[i] += step * grads[i];
}

}  // namespace

void PolicyOptions::validate() const {
  if (p < 1 || p > 30) throw std::invalid_argument("p must lie in [1, 30]");
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (hidden < 1) throw std::invalid_argument("policy hidden width must be >= 1");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (!(alpha_theta >= 0.0) || !(alpha_w >= 0.0)) throw std::invalid_argument("step sizes must be non-negative");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
}

EdgeHistory::EdgeHistory(std::size_t num_edges, int m, int p)
    : p_(p),
      weights_(Matrix::Ones(static_cast<Eigen::Index>(num_edges), m)),
      rewards_(Matrix::Zero(static_cast<Eigen::Index>(num_edges), m)) {
  if (m < 1 || p < 1) throw std::invalid_argument("history needs m >= 1 and p >= 1");
}

void EdgeHistory::push(std::span<const int> actions, std::span<const double> scores) {
  const auto n = weights_.rows();
  if (static_cast<Eigen::Index>(actions.size()) != n || static_cast<Eigen::Index>(scores.size()) != n) {
    throw std::invalid_argument("history update does not match the edge count");
  }
  const auto m = weights_.cols();
  if (m > 1) {
    weights_.leftCols(m - 1) = weights_.rightCols(m - 1).eval();
    rewards_.leftCols(m - 1) = rewards_.rightCols(m - 1).eval();
  }
  for (Eigen::Index e = 0; e < n; ++e) {
    weights_(e, m - 1) = static_cast<double>(actions[static_cast<std::size_t>(e)]) / p_;
    rewards_(e, m - 1) = scores[static_cast<std::size_t>(e)];
  }
}

Eigen::Index edge_state_dim(Eigen::Index f, Eigen::Index d, int m) { return 2 * f + 4 * d + 2 * m; }

Matrix build_edge_states(const Graph& g, const Matrix& features, const Matrix& embeddings, const EdgeHistory& history,
                         int threads) {
  const auto n = g.num_nodes();
  if (features.rows() != n || embeddings.rows() != n) {
    throw std::invalid_argument("edge states: features/embeddings rows must equal the node count");
  }
  const auto ne = static_cast<Eigen::Index>(g.num_edges());
  if (history.weights().rows() != ne) throw std::invalid_argument("edge states: history does not match edges");
  const auto f = features.cols();
  const auto d = embeddings.cols();
  const int m = history.length();

  Matrix agg = Matrix::Zero(n, d);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId w : g.neighbors(u)) agg.row(u) += embeddings.row(w);
  }

  Matrix states(ne, edge_state_dim(f, d, m));
  auto fill = [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index e = begin; e < end; ++e) {
      const auto [u, v] = g.endpoints(e);
      auto row = states.row(e);
      Eigen::Index c = 0;
      row.segment(c, f) = features.row(u), c += f;
      row.segment(c, f) = features.row(v), c += f;
      row.segment(c, d) = embeddings.row(u), c += d;
      row.segment(c, d) = embeddings.row(v), c += d;
      row.segment(c, d) = agg.row(u), c += d;
      row.segment(c, d) = agg.row(v), c += d;
      row.segment(c, m) = history.weights().row(e), c += m;
      row.segment(c, m) = history.rewards().row(e);
    }
  };
  const int workers = std::clamp<int>(threads, 1, static_cast<int>(std::max<Eigen::Index>(ne, 1)));
  if (workers == 1) {
    fill(0, ne);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(fill, ne * w / workers, ne * (w + 1) / workers);
    for (auto& t : pool) t.join();
  }
  return states;
}

PolicyModel PolicyModel::create(Eigen::Index state_dim, const PolicyOptions& options, Rng& rng) {
  options.validate();
  PolicyModel model;
  model.options = options;
  model.actor = nn::Mlp::create(state_dim, options.hidden, options.p + 1, rng);
  model.critic = nn::Mlp::create(state_dim, options.hidden, 1, rng);
  return model;
}

std::vector<Weight> ActionVector::weights() const {
  std::vector<Weight> out;
  out.reserve(index.size());
  for (int a : index) out.push_back(Weight{1} << a);
  return out;
}

std::vector<std::int64_t> ActionVector::histogram(int p) const {
  std::vector<std::int64_t> h(static_cast<std::size_t>(p + 1), 0);
  for (int a : index) ++h.at(static_cast<std::size_t>(a));
  return h;
}

Matrix action_probabilities(const PolicyModel& policy, const Matrix& states) {
  return nn::softmax_rows(policy.actor.forward(states));
}

ActionVector select_actions(const PolicyModel& policy, const Matrix& states, double eps, Rng& rng, bool greedy) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  const Matrix probs = action_probabilities(policy, states);
  const int count = policy.num_actions();
  ActionVector out;
  out.index.resize(static_cast<std::size_t>(states.rows()));
  for (Eigen::Index e = 0; e < states.rows(); ++e) {
    int action = 0;
    if (uniform01(rng) < eps) {
      action = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(count)));
    } else if (greedy) {
      for (int a = 1; a < count; ++a) {
        if (probs(e, a) > probs(e, action)) action = a;
      }
    } else {
      const double u = uniform01(rng);
      double acc = 0.0;
      action = count - 1;
      for (int a = 0; a < count; ++a) {
        acc += probs(e, a);
        if (u < acc) {
          action = a;
          break;
        }
      }
    }
    out.index[static_cast<std::size_t>(e)] = action;
  }
  return out;
}

double epsilon(double t, double start, double end, double decay) {
  if (!(decay > 0.0)) throw std::invalid_argument("eps_decay must be positive");
  if (!(start >= end && end >= 0.0)) throw std::invalid_argument("need eps_start >= eps_end >= 0");
  return end + (start - end) * std::exp(-t / decay);
}

double critic_value(const PolicyModel& policy, const Matrix& states) {
  if (states.rows() == 0) throw std::invalid_argument("critic: no edge states");
  return policy.critic.forward(states).mean();
}

std::vector<Matrix> critic_value_grad(const PolicyModel& policy, const Matrix& states) {
  if (states.rows() == 0) throw std::invalid_argument("critic: no edge states");
  nn::Mlp::Cache cache;
  policy.critic.forward(states, &cache);
  const Matrix d = Matrix::Constant(states.rows(), 1, 1.0 / static_cast<double>(states.rows()));
  return policy.critic.backward(cache, d);
}

double mean_log_prob(const PolicyModel& policy, const Matrix& states, const ActionVector& actions) {
  check_actions(states, actions, policy.num_actions());
  const Matrix logp = log_softmax_rows(policy.actor.forward(states));
  double total = 0.0;
  for (Eigen::Index e = 0; e < states.rows(); ++e) total += logp(e, actions.index[static_cast<std::size_t>(e)]);
  return total / static_cast<double>(states.rows());
}

std::vector<Matrix> mean_log_prob_grad(const PolicyModel& policy, const Matrix& states, const ActionVector& actions) {
  check_actions(states, actions, policy.num_actions());
  nn::Mlp::Cache cache;
  const Matrix probs = nn::softmax_rows(policy.actor.forward(states, &cache));
  const double scale = 1.0 / static_cast<double>(states.rows());
  Matrix d = -scale * probs;
  for (Eigen::Index e = 0; e < states.rows(); ++e) d(e, actions.index[static_cast<std::size_t>(e)]) += scale;
  return policy.actor.backward(cache, d);
}

UpdateInfo actor_critic_update(PolicyModel& policy, const Matrix& states, const ActionVector& actions, double reward,
                               const Matrix& next_states) {
  UpdateInfo info;
  const double v = critic_value(policy, states);
  const double v_next = critic_value(policy, next_states);
  info.delta = reward + policy.options.gamma * v_next - v;
  if (!std::isfinite(info.delta)) {
    info.skipped = true;
    return info;
  }
  const auto critic_grads = critic_value_grad(policy, states);
  const auto actor_grads = mean_log_prob_grad(policy, states, actions);
  if (!all_finite(critic_grads) || !all_finite(actor_grads)) {
    info.skipped = true;
    return info;
  }
  ascend(policy.critic.parameters(), critic_grads, policy.options.alpha_w * info.delta);
  ascend(policy.actor.parameters(), actor_grads, policy.options.alpha_theta * info.delta);
  return info;
}

std::vector<double> windowed_returns(std::span<const double> rewards, double gamma, int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::vector<double> out(rewards.size(), 0.0);
  for (std::size_t t = 0; t < rewards.size(); ++t) {
    double discount = 1.0;
    const std::size_t end = std::min(rewards.size(), t + static_cast<std::size_t>(window));
    for (std::size_t j = t; j < end; ++j) {
      out[t] += discount * rewards[j];
      discount *= gamma;
    }
  }
  return out;
}

int reinforce_update(PolicyModel& policy, std::span<const Transition> trajectory, double gamma, int window) {
  if (trajectory.empty()) throw std::invalid_argument("reinforce: empty trajectory");
  std::vector<double> rewards;
  for (const auto& tr : trajectory) rewards.push_back(tr.reward);
  const auto returns = windowed_returns(rewards, gamma, window);
  int skipped = 0;
  std::vector<Matrix> total;
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    if (returns[t] == 0.0) continue;
    if (!std::isfinite(returns[t])) {
      ++skipped;
      continue;
    }
    auto grads = mean_log_prob_grad(policy, trajectory[t].states, trajectory[t].actions);
    if (!all_finite(grads)) {
      ++skipped;
      continue;
    }
    if (total.empty()) {
      for (auto& g : grads) total.push_back(Matrix::Zero(g.rows(), g.cols()));
    }
    for (std::size_t i = 0; i < grads.size(); ++i) total[i] += returns[t] * grads[i];
  }
  if (!total.empty()) ascend(policy.actor.parameters(), total, policy.options.alpha_theta);
  return skipped;
}

// Metadata: p, m, hidden, window. Arrays: actor (w1, b1, w2, b2), critic
// (w1, b1, w2, b2), then [gamma, alpha_theta, alpha_w].
void save_policy(const std::filesystem::path& path, const PolicyModel& policy) {
  const auto& o = policy.options;
  const std::vector<std::int32_t> meta{o.p, o.m, o.hidden, o.window};
  Matrix scalars(1, 3);
  scalars << o.gamma, o.alpha_theta, o.alpha_w;
  std::vector<const Matrix*> arrays;
  for (const auto* a : policy.actor.parameters()) arrays.push_back(a);
  for (const auto* a : policy.critic.parameters()) arrays.push_back(a);
  arrays.push_back(&scalars);
  write_checkpoint(path, kPolicyMagic, meta, arrays);
}

PolicyModel load_policy(const std::filesystem::path& path) {
  Checkpoint ck = read_checkpoint(path, kPolicyMagic);
  if (ck.meta.size() != 4 || ck.arrays.size() != 9 || ck.arrays[8].size() != 3) {
    throw std::runtime_error(path.string() + ": malformed policy checkpoint");
  }
  PolicyModel policy;
  policy.options.p = ck.meta[0];
  policy.options.m = ck.meta[1];
  policy.options.hidden = ck.meta[2];
  policy.options.window = ck.meta[3];
  policy.options.gamma = ck.arrays[8](0, 0);
  policy.options.alpha_theta = ck.arrays[8](0, 1);
  policy.options.alpha_w = ck.arrays[8](0, 2);
  auto actor = policy.actor.parameters();
  auto critic = policy.critic.parameters();
  for (std::size_t i = 0; i < 4; ++i) {
    *actor[i] = std::move(ck.arrays[i]);
    *critic[i] = std::move(ck.arrays[4 + i]);
  }
  return policy;
}

}  // namespace pcgcn
