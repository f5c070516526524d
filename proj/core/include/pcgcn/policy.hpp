#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pcgcn/graph.hpp"
#include "pcgcn/nn.hpp"

namespace pcgcn {

struct PolicyOptions {
  /// Actions are 0..p; action i sets edge weight 2^i.
  int p = 3;
  /// History length for past weights and rewards.
  int m = 5;
  int hidden = 64;
  double gamma = 0.95;
  double alpha_theta = 0.001;
  double alpha_w = 0.001;
  /// Return window of the REINFORCE update.
  int window = 10;

  void validate() const;
};

/// Per-edge history of the last m actions (scaled by 1/p) and the last m edge
/// scores, oldest first. Fresh histories hold weight 1 and reward 0.
class EdgeHistory {
 public:
  EdgeHistory() = default;
  EdgeHistory(std::size_t num_edges, int m, int p);

  void push(std::span<const int> actions, std::span<const double> scores);

  const Matrix& weights() const { return weights_; }
  const Matrix& rewards() const { return rewards_; }
  int length() const { return static_cast<int>(weights_.cols()); }

 private:
  int p_ = 1;
  Matrix weights_;
  Matrix rewards_;
};

/// Width of an edge state: 2f + 4d + 2m.
Eigen::Index edge_state_dim(Eigen::Index f, Eigen::Index d, int m);

/// One row per undirected edge (u < v) of g:
///   [x_u | x_v | e_u | e_v | sum of e over N(u) | sum of e over N(v) | weight history | reward history]
/// where x are node features and e node embeddings. Rows are independent, so
/// `threads` > 1 splits them into contiguous ranges with identical results.
Matrix build_edge_states(const Graph& g, const Matrix& features, const Matrix& embeddings, const EdgeHistory& history,
                         int threads = 1);

struct PolicyModel {
  nn::Mlp actor;
  nn::Mlp critic;
  PolicyOptions options;

  static PolicyModel create(Eigen::Index state_dim, const PolicyOptions& options, Rng& rng);
  int num_actions() const { return options.p + 1; }
};

/// Action index per edge; the realized weight is 2^index.
struct ActionVector {
  std::vector<int> index;

  std::vector<Weight> weights() const;
  /// Count of each action index (p + 1 entries).
  std::vector<std::int64_t> histogram(int p) const;
};

/// Row-wise action probabilities of the actor.
Matrix action_probabilities(const PolicyModel& policy, const Matrix& states);

/// Per edge: with probability epsilon a uniform action, otherwise a draw from
/// the actor's softmax (its arg-max when `greedy`).
ActionVector select_actions(const PolicyModel& policy, const Matrix& states, double epsilon, Rng& rng,
                            bool greedy = false);

/// end + (start - end) exp(-t / decay).
double epsilon(double t, double start, double end, double decay);

/// Mean critic output over the edge states.
double critic_value(const PolicyModel& policy, const Matrix& states);
/// Gradient of critic_value w.r.t. the critic parameters (w1, b1, w2, b2).
std::vector<Matrix> critic_value_grad(const PolicyModel& policy, const Matrix& states);

/// Mean over edges of ln pi(action | state).
double mean_log_prob(const PolicyModel& policy, const Matrix& states, const ActionVector& actions);
/// Gradient of mean_log_prob w.r.t. the actor parameters (w1, b1, w2, b2).
std::vector<Matrix> mean_log_prob_grad(const PolicyModel& policy, const Matrix& states, const ActionVector& actions);

struct UpdateInfo {
  double delta = 0.0;
  bool skipped = false;
};

/// delta = r + gamma v(s') - v(s); the critic moves by alpha_w delta grad v(s)
/// and the actor by alpha_theta delta grad mean ln pi(a | s). Non-finite
/// values skip the step and leave the policy untouched.
UpdateInfo actor_critic_update(PolicyModel& policy, const Matrix& states, const ActionVector& actions, double reward,
                               const Matrix& next_states);

struct Transition {
  Matrix states;
  ActionVector actions;
  double reward = 0.0;
};

/// For every t: G_t = sum of gamma^(j-t) r_j over j in [t, t + window) within
/// the trajectory; the actor moves by alpha_theta G_t grad ln pi(a_t | s_t),
/// all gradients taken at the incoming parameters. Returns the number of
/// transitions skipped for non-finite values.
int reinforce_update(PolicyModel& policy, std::span<const Transition> trajectory, double gamma, int window);

/// Windowed discounted returns used by reinforce_update.
std::vector<double> windowed_returns(std::span<const double> rewards, double gamma, int window);

void save_policy(const std::filesystem::path& path, const PolicyModel& policy);
PolicyModel load_policy(const std::filesystem::path& path);

}  // namespace pcgcn
