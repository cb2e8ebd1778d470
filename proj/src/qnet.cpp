#include "evcs/qnet.hpp"

#include <cmath>
#include <stdexcept>

namespace evcs {

QNet::QNet(std::vector<int> layer_sizes) : layer_sizes_(std::move(layer_sizes)) {
  if (layer_sizes_.size() < 2) throw std::invalid_argument("need at least input and output layers");
  for (int n : layer_sizes_)
    if (n < 1) throw std::invalid_argument("layer sizes must be positive");
  if (layer_sizes_.back() != 1) throw std::invalid_argument("output layer must be scalar");
  for (size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    weights_.emplace_back(Eigen::MatrixXd::Zero(layer_sizes_[l], layer_sizes_[l + 1]));
    biases_.emplace_back(Eigen::VectorXd::Zero(layer_sizes_[l + 1]));
  }
}

QNet QNet::init_random(std::vector<int> layer_sizes, uint64_t seed) {
  QNet net(std::move(layer_sizes));
  Rng rng = make_rng(seed, 0x9e7);
  // fan-in scaled uniform keeps rectifier pre-activations at unit variance
  for (auto& W : net.weights_) {
    double bound = std::sqrt(6.0 / W.rows());
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index j = 0; j < W.cols(); ++j)
      for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, j) = u(rng);
  }
  return net;
}

Eigen::VectorXd QNet::forward(const Eigen::MatrixXd& X) const {
  if (X.cols() != input_dim()) throw std::invalid_argument("input width mismatch");
  Eigen::MatrixXd H = X;
  for (int l = 0; l < n_layers(); ++l) {
    Eigen::MatrixXd Z = (H * weights_[l]).rowwise() + biases_[l].transpose();
    if (l + 1 < n_layers()) Z = Z.cwiseMax(0.0);
    H = std::move(Z);
  }
  return H.col(0);
}

double QNet::forward_one(const Eigen::VectorXd& x) const {
  return forward(x.transpose())(0);
}

double QNet::loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const {
  return (forward(X) - y).squaredNorm() / X.rows();
}

double QNet::loss_and_grad(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           std::vector<Eigen::MatrixXd>& grad_w,
                           std::vector<Eigen::VectorXd>& grad_b) const {
  if (X.rows() != y.size()) throw std::invalid_argument("batch size mismatch");
  int L = n_layers();
  std::vector<Eigen::MatrixXd> acts(L + 1);  // post-activation outputs
  acts[0] = X;
  for (int l = 0; l < L; ++l) {
    acts[l + 1] = (acts[l] * weights_[l]).rowwise() + biases_[l].transpose();
    if (l + 1 < L) acts[l + 1] = acts[l + 1].cwiseMax(0.0);
  }
  Eigen::VectorXd diff = acts[L].col(0) - y;
  double loss = diff.squaredNorm() / X.rows();

  grad_w.resize(L);
  grad_b.resize(L);
  Eigen::MatrixXd delta = (2.0 / X.rows()) * diff;
  for (int l = L - 1; l >= 0; --l) {
    grad_w[l].noalias() = acts[l].transpose() * delta;
    grad_b[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd back = delta * weights_[l].transpose();
      // relu gate: the stored activation is positive iff the unit fired
      delta = back.cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
    }
  }
  return loss;
}

double QNet::sgd_step(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lr) {
  std::vector<Eigen::MatrixXd> gw;
  std::vector<Eigen::VectorXd> gb;
  double l = loss_and_grad(X, y, gw, gb);
  for (int i = 0; i < n_layers(); ++i) {
    weights_[i] -= lr * gw[i];
    biases_[i] -= lr * gb[i];
  }
  return l;
}

bool QNet::same_shape(const QNet& other) const { return layer_sizes_ == other.layer_sizes_; }

bool QNet::equal(const QNet& other) const {
  if (!same_shape(other)) return false;
  for (int l = 0; l < n_layers(); ++l)
    if (weights_[l] != other.weights_[l] || biases_[l] != other.biases_[l]) return false;
  return true;
}

std::vector<ArgmaxResult> q_argmax(const QNet& net,
                                   const std::vector<std::vector<double>>& features,
                                   const std::vector<ActionBounds>& bounds, double delta_a,
                                   double a_max) {
  if (features.size() != bounds.size()) throw std::invalid_argument("features/bounds mismatch");
  size_t n = features.size();
  std::vector<ArgmaxResult> out(n);
  if (n == 0) return out;

  int dim = net.input_dim();
  size_t rows = 0;
  for (const auto& b : bounds) rows += b.count(delta_a);
  Eigen::MatrixXd X(rows, dim);
  size_t row = 0;
  for (size_t i = 0; i < n; ++i) {
    if (static_cast<int>(features[i].size()) + 1 != dim)
      throw std::invalid_argument("feature width mismatch");
    int m = bounds[i].count(delta_a);
    for (int k = 0; k < m; ++k) {
      for (int c = 0; c + 1 < dim; ++c) X(row, c) = features[i][c];
      X(row, dim - 1) = bounds[i].at(k, delta_a) / a_max;
      ++row;
    }
  }
  Eigen::VectorXd q = net.forward(X);

  row = 0;
  for (size_t i = 0; i < n; ++i) {
    int m = bounds[i].count(delta_a);
    double best_a = bounds[i].at(0, delta_a);
    double best_q = q(row);
    for (int k = 1; k < m; ++k) {
      double a = bounds[i].at(k, delta_a);
      if (q_action_better(q(row + k), a, best_q, best_a)) {
        best_q = q(row + k);
        best_a = a;
      }
    }
    out[i] = {best_a, best_q};
    row += m;
  }
  return out;
}

ArgmaxResult q_argmax_one(const QNet& net, const std::vector<double>& features,
                          const ActionBounds& bounds, double delta_a, double a_max) {
  return q_argmax(net, {features}, {bounds}, delta_a, a_max)[0];
}

}  // namespace evcs
