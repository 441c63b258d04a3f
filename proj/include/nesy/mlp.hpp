#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace nesy {

/// One-hidden-layer perceptron: logits = W2 tanh(W1 x + b1) + b2.
/// Rows of every batch matrix are examples.
class Mlp {
 public:
  struct Forward {
    Eigen::MatrixXd hidden;   // N x H, post-tanh
    Eigen::MatrixXd logits;   // N x out
  };

  Mlp() = default;
  Mlp(int inputs, int hidden, int outputs);

  /// Uniform [-scale, scale] initialization from a counter-based generator;
  /// `stream` separates networks that share a seed.
  static Mlp random(int inputs, int hidden, int outputs, std::uint64_t seed,
                    std::uint64_t stream, double scale = 0.5);

  int inputs() const { return static_cast<int>(w1.cols()); }
  int hidden_width() const { return static_cast<int>(w1.rows()); }
  int outputs() const { return static_cast<int>(w2.rows()); }

  Forward forward(const Eigen::MatrixXd& x) const;
  /// Parameter gradients given dLoss/dlogits for the batch used in `fwd`.
  Mlp backward(const Eigen::MatrixXd& x, const Forward& fwd,
               const Eigen::MatrixXd& dlogits) const;

  /// this -= step * grad
  void descend(const Mlp& grad, double step);
  bool finite() const;

  // Flat view over all parameters, in the order w1, b1, w2, b2.
  Eigen::Index parameter_count() const;
  double& parameter(Eigen::Index i);
  double parameter(Eigen::Index i) const;

  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
};

/// Counter-based generator: the same (seed, stream, counter) always yields the
/// same value on every platform.
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);
/// Uniform in [0, 1) with 53 random bits.
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

}  // namespace nesy
