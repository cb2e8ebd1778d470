#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "evcs/actions.hpp"
#include "evcs/rng.hpp"

namespace evcs {

// Scalar action-value network Q(s, a): fully connected, relu hidden layers,
// identity output. The input row is the state feature vector with the
// normalized action a / a_max appended.
class QNet {
 public:
  QNet() = default;
  explicit QNet(std::vector<int> layer_sizes);  // e.g. {12, 256, 128, 64, 1}

  // Uniform fan-in weights on +-sqrt(6 / fan_in), zero biases.
  static QNet init_random(std::vector<int> layer_sizes, uint64_t seed);

  int input_dim() const { return layer_sizes_.empty() ? 0 : layer_sizes_.front(); }
  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  int n_layers() const { return static_cast<int>(weights_.size()); }

  // X has one sample per row.
  Eigen::VectorXd forward(const Eigen::MatrixXd& X) const;
  double forward_one(const Eigen::VectorXd& x) const;

  // One plain gradient-descent step on mean squared error; returns the
  // pre-update batch loss.
  double sgd_step(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lr);

  double loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const;
  double loss_and_grad(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       std::vector<Eigen::MatrixXd>& grad_w,
                       std::vector<Eigen::VectorXd>& grad_b) const;

  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  bool same_shape(const QNet& other) const;
  bool equal(const QNet& other) const;

 private:
  std::vector<int> layer_sizes_;
  std::vector<Eigen::MatrixXd> weights_;  // layer l: in x out
  std::vector<Eigen::VectorXd> biases_;
};

struct ArgmaxResult {
  double action = 0.0;  // kW
  double value = 0.0;
};

// Grid-scan tie rule shared by every argmax over actions: prefer the higher
// value, then the smaller magnitude, then the discharge side.
inline bool q_action_better(double q, double a, double best_q, double best_a) {
  if (q != best_q) return q > best_q;
  double ma = a < 0 ? -a : a, mb = best_a < 0 ? -best_a : best_a;
  if (ma != mb) return ma < mb;
  return a < best_a;
}

// One (features, bounds) query per charger. Evaluates every feasible grid
// action of every query in a single batched forward pass and returns each
// query's maximizer. Ties prefer the smaller |a|, then discharge.
std::vector<ArgmaxResult> q_argmax(const QNet& net,
                                   const std::vector<std::vector<double>>& features,
                                   const std::vector<ActionBounds>& bounds, double delta_a,
                                   double a_max);

ArgmaxResult q_argmax_one(const QNet& net, const std::vector<double>& features,
                          const ActionBounds& bounds, double delta_a, double a_max);

// Persistence. Files carry a format tag, a config fingerprint, the episode
// the parameters were saved after, and the raw tensors; loading checks the
// tag and returns the metadata alongside the network.
struct NetMeta {
  uint64_t fingerprint = 0;
  int64_t episode = 0;
};

void save_net(const QNet& net, const std::string& path, const NetMeta& meta);
QNet load_net(const std::string& path, NetMeta* meta = nullptr);
void save_checkpoint(const QNet& net, const QNet& target, const std::string& path,
                     const NetMeta& meta);
std::pair<QNet, QNet> load_checkpoint(const std::string& path, NetMeta* meta = nullptr);

}  // namespace evcs
