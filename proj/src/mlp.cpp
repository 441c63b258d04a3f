#include "nesy/mlp.hpp"

namespace nesy {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return splitmix(splitmix(splitmix(seed) ^ stream) ^ counter);
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return static_cast<double>(counter_hash(seed, stream, counter) >> 11) * 0x1.0p-53;
}

Mlp::Mlp(int inputs, int hidden, int outputs)
    : w1(Eigen::MatrixXd::Zero(hidden, inputs)),
      b1(Eigen::VectorXd::Zero(hidden)),
      w2(Eigen::MatrixXd::Zero(outputs, hidden)),
      b2(Eigen::VectorXd::Zero(outputs)) {}

Mlp Mlp::random(int inputs, int hidden, int outputs, std::uint64_t seed, std::uint64_t stream,
                double scale) {
  Mlp net(inputs, hidden, outputs);
  for (Eigen::Index i = 0; i < net.parameter_count(); ++i) {
    const double u = counter_uniform(seed, stream, static_cast<std::uint64_t>(i));
    net.parameter(i) = scale * (2.0 * u - 1.0);
  }
  return net;
}

Mlp::Forward Mlp::forward(const Eigen::MatrixXd& x) const {
  Forward out;
  out.hidden = ((x * w1.transpose()).rowwise() + b1.transpose()).array().tanh().matrix();
  out.logits = (out.hidden * w2.transpose()).rowwise() + b2.transpose();
  return out;
}

Mlp Mlp::backward(const Eigen::MatrixXd& x, const Forward& fwd,
                  const Eigen::MatrixXd& dlogits) const {
  Mlp grad;
  grad.w2 = dlogits.transpose() * fwd.hidden;
  grad.b2 = dlogits.colwise().sum().transpose();
  const Eigen::MatrixXd dpre =
      ((dlogits * w2).array() * (1.0 - fwd.hidden.array().square())).matrix();
  grad.w1 = dpre.transpose() * x;
  grad.b1 = dpre.colwise().sum().transpose();
  return grad;
}

void Mlp::descend(const Mlp& grad, double step) {
  w1 -= step * grad.w1;
  b1 -= step * grad.b1;
  w2 -= step * grad.w2;
  b2 -= step * grad.b2;
}

bool Mlp::finite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

Eigen::Index Mlp::parameter_count() const {
  return w1.size() + b1.size() + w2.size() + b2.size();
}

double& Mlp::parameter(Eigen::Index i) {
  if (i < w1.size()) return w1.data()[i];
  i -= w1.size();
  if (i < b1.size()) return b1.data()[i];
  i -= b1.size();
  if (i < w2.size()) return w2.data()[i];
  return b2.data()[i - w2.size()];
}

double Mlp::parameter(Eigen::Index i) const { return const_cast<Mlp&>(*this).parameter(i); }

}  // namespace nesy
