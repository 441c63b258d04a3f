#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nesy/detopt.hpp"
#include "nesy/mlp.hpp"
#include "nesy/task.hpp"

namespace nesy {

/// Probabilities over all 2^k concept vectors, indexed by code.
using Categorical = std::vector<double>;

/// p_theta(c | g): maps g to per-bit Bernoulli means.
struct EncoderParams {
  Mlp net;
};

/// p_psi(g | c): maps c to per-bit Bernoulli means over g.
struct DecoderParams {
  Mlp net;
};

struct TrainConfig {
  std::uint64_t seed = 0;
  double learning_rate = 0.1;
  int epochs = 5000;
  int hidden = 32;
  double lambda_rec = 0.0;
  double lambda_concept = 0.0;
  double determinism_threshold = 0.99;   // tau
  double optimality_epsilon = 1e-2;

  /// Throws nesy::Error on an invalid combination.
  void validate() const;
};

/// Probabilities inside logarithms are clamped below at this value.
inline constexpr double kLogFloor = 1e-30;

EncoderParams init_encoder(int concepts, int hidden, std::uint64_t seed);
DecoderParams init_decoder(int concepts, int hidden, std::uint64_t seed);

/// Factorized Bernoulli distribution materialized over all 2^k vectors.
Categorical bernoulli_dist(std::span<const double> logits);
Categorical encoder_dist(const EncoderParams& params, BitVec g);
/// encoder_dist for every g, indexed by code.
std::vector<Categorical> encoder_dists(const EncoderParams& params, int concepts);

/// p(y | g; K) = sum over c in S_y of dist(c).
double label_prob(const Task& task, const Categorical& dist, std::uint32_t y);

/// -sum_g log p(h(g) | g; K) for explicit per-g distributions. Exactly zero
/// when every distribution is supported inside S_{h(g)}.
double likelihood_loss(const Task& task, std::span<const Categorical> dists);
/// sum over pinned g of E_c ||c - g||^2.
double concept_loss(const Task& task, std::span<const Categorical> dists);

double loss_likelihood(const EncoderParams& enc, const Task& task);
double loss_reconstruction(const EncoderParams& enc, const DecoderParams& dec, const Task& task);
/// Throws NoPins when the task has no supervision.
double loss_concept(const EncoderParams& enc, const Task& task);

struct LossBreakdown {
  double likelihood = 0.0;
  std::optional<double> reconstruction;
  std::optional<double> supervision;
  double total = 0.0;
};

/// Total training loss likelihood + lambda_rec * rec + lambda_concept * concept
/// with analytic gradients by exact enumeration and backprop. The
/// reconstruction term needs a decoder; the concept term needs pins.
class Objective {
 public:
  Objective(const Task& task, double lambda_rec, double lambda_concept);

  /// Evaluates the losses; fills gradients when the pointers are non-null.
  /// `dec` may be null only when lambda_rec == 0.
  LossBreakdown evaluate(const EncoderParams& enc, const DecoderParams* dec,
                         Mlp* enc_grad = nullptr, Mlp* dec_grad = nullptr) const;

  bool uses_decoder() const { return lambda_rec_ > 0.0; }
  bool uses_concepts() const { return lambda_concept_ > 0.0; }

 private:
  const Task* task_;
  double lambda_rec_;
  double lambda_concept_;
  Eigen::MatrixXd inputs_;   // 2^k x k, row g holds the bits of g
};

struct BitConfusion {
  std::uint64_t tn = 0, fp = 0, fn = 0, tp = 0;
};

struct RunReport {
  TrainConfig config;
  LossBreakdown losses;
  std::vector<Categorical> dists;          // p_theta(. | g) per g
  DetOpt extracted;                         // per-g argmax, ties toward smaller c
  double determinism = 0.0;                 // min_g max_c p(c | g)
  double min_label_prob = 0.0;              // min_g p(h(g) | g)
  bool optimal = false;                     // min_label_prob >= 1 - epsilon
  bool deterministic = false;               // determinism >= tau
  bool rs = false;                          // extracted map is not the identity
  bool admissible = false;
  bool injective = false;
  std::vector<std::vector<double>> confusion;   // rows g, columns argmax c
  std::vector<BitConfusion> bit_confusion;      // one per concept bit
};

/// Diagnostics computed from a trained encoder (used by train and by tests).
RunReport diagnose(const Task& task, const TrainConfig& cfg, const EncoderParams& enc,
                   const DecoderParams* dec);

/// Full-batch gradient descent on the total loss. Deterministic given the
/// config. Throws NonFinite when a loss or parameter stops being finite.
RunReport train(const Task& task, const TrainConfig& cfg);
/// Same, starting from the given parameters instead of the seeded
/// initialization. A decoder is required when cfg.lambda_rec > 0.
RunReport train(const Task& task, const TrainConfig& cfg, EncoderParams enc,
                std::optional<DecoderParams> dec);

/// Max relative error between the analytic gradient of the total loss and
/// central finite differences (step 1e-5) over `trials` random parameter points.
double gradient_check(const Task& task, const TrainConfig& cfg, int trials);

/// |a - b| / max(|a|, |b|, floor); the floor keeps near-zero components from
/// reporting finite-difference noise as large relative errors.
double relative_error(double analytic, double numeric, double floor = 1e-4);

}  // namespace nesy
