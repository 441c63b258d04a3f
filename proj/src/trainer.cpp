#include "nesy/trainer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "nesy/errors.hpp"

namespace nesy {

namespace {

constexpr std::uint64_t kEncoderStream = 1;
constexpr std::uint64_t kDecoderStream = 2;
constexpr std::uint64_t kCheckStream = 0x67726164;   // gradient-check parameter points

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

Eigen::MatrixXd all_vectors(int concepts) {
  const std::uint32_t n = space_size(concepts);
  Eigen::MatrixXd x(n, concepts);
  for (std::uint32_t code = 0; code < n; ++code) {
    for (int j = 1; j <= concepts; ++j) x(code, j - 1) = bit_of(code, concepts, j) ? 1.0 : 0.0;
  }
  return x;
}

std::vector<Categorical> dists_from_logits(const Eigen::MatrixXd& logits) {
  std::vector<Categorical> out;
  out.reserve(static_cast<std::size_t>(logits.rows()));
  std::vector<double> row(static_cast<std::size_t>(logits.cols()));
  for (Eigen::Index g = 0; g < logits.rows(); ++g) {
    for (Eigen::Index j = 0; j < logits.cols(); ++j) row[j] = logits(g, j);
    out.push_back(bernoulli_dist(row));
  }
  return out;
}

struct LikelihoodTerm {
  double loss = 0.0;
  double inside = 0.0;    // P = mass on S_y
  double outside = 0.0;   // Q = 1 - P, summed directly
};

// -log p(y | g), evaluated from whichever of P and Q is less exposed to
// cancellation; Q == 0 gives exactly zero loss.
LikelihoodTerm likelihood_term(const Task& task, const Categorical& dist, std::uint32_t y) {
  LikelihoodTerm t;
  for (std::uint32_t c = 0; c < dist.size(); ++c) {
    (task.consistent(c, y) ? t.inside : t.outside) += dist[c];
  }
  t.loss = t.outside < 0.5 ? -std::log1p(-t.outside) : -std::log(std::max(t.inside, kLogFloor));
  return t;
}

double expected_distance(const Categorical& dist, std::uint32_t g) {
  double sum = 0.0;
  for (std::uint32_t c = 0; c < dist.size(); ++c) sum += std::popcount(c ^ g) * dist[c];
  return sum;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(fmt::format("epochs must be >= 1 (got {})", epochs));
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(fmt::format("learning rate must be positive (got {})", learning_rate));
  }
  if (hidden < 1) throw Error(fmt::format("hidden width must be >= 1 (got {})", hidden));
  if (!(lambda_rec >= 0.0) || !(lambda_concept >= 0.0)) {
    throw Error("loss weights must be non-negative");
  }
  if (!(determinism_threshold > 0.5 && determinism_threshold < 1.0)) {
    throw Error(fmt::format("determinism threshold must lie in (0.5, 1) (got {})",
                            determinism_threshold));
  }
  if (!(optimality_epsilon > 0.0 && optimality_epsilon < 1.0)) {
    throw Error(fmt::format("optimality epsilon must lie in (0, 1) (got {})",
                            optimality_epsilon));
  }
}

EncoderParams init_encoder(int concepts, int hidden, std::uint64_t seed) {
  return {Mlp::random(concepts, hidden, concepts, seed, kEncoderStream)};
}

DecoderParams init_decoder(int concepts, int hidden, std::uint64_t seed) {
  return {Mlp::random(concepts, hidden, concepts, seed, kDecoderStream)};
}

Categorical bernoulli_dist(std::span<const double> logits) {
  // Bit 1 is the most significant, so appending bits in order builds codes.
  Categorical p{1.0};
  for (double z : logits) {
    const double on = sigmoid(z);
    const double off = sigmoid(-z);
    Categorical next(p.size() * 2);
    for (std::size_t prefix = 0; prefix < p.size(); ++prefix) {
      next[2 * prefix] = p[prefix] * off;
      next[2 * prefix + 1] = p[prefix] * on;
    }
    p = std::move(next);
  }
  return p;
}

Categorical encoder_dist(const EncoderParams& params, BitVec g) {
  Eigen::MatrixXd x(1, g.width());
  for (int j = 1; j <= g.width(); ++j) x(0, j - 1) = g[j] ? 1.0 : 0.0;
  const auto fwd = params.net.forward(x);
  return dists_from_logits(fwd.logits).front();
}

std::vector<Categorical> encoder_dists(const EncoderParams& params, int concepts) {
  return dists_from_logits(params.net.forward(all_vectors(concepts)).logits);
}

double label_prob(const Task& task, const Categorical& dist, std::uint32_t y) {
  double sum = 0.0;
  for (std::uint32_t c : task.consistent_concepts(y)) sum += dist.at(c);
  return sum;
}

double likelihood_loss(const Task& task, std::span<const Categorical> dists) {
  double total = 0.0;
  for (std::uint32_t g = 0; g < dists.size(); ++g) {
    total += likelihood_term(task, dists[g], task.label_of(g)).loss;
  }
  return total;
}

double concept_loss(const Task& task, std::span<const Categorical> dists) {
  double total = 0.0;
  for (std::uint32_t g : task.pin_list()) total += expected_distance(dists[g], g);
  return total;
}

double loss_likelihood(const EncoderParams& enc, const Task& task) {
  return likelihood_loss(task, encoder_dists(enc, task.concepts()));
}

double loss_reconstruction(const EncoderParams& enc, const DecoderParams& dec, const Task& task) {
  Objective objective(task, 0.0, 0.0);
  return objective.evaluate(enc, &dec).reconstruction.value();
}

double loss_concept(const EncoderParams& enc, const Task& task) {
  if (!task.has_pins()) throw NoPins();
  return concept_loss(task, encoder_dists(enc, task.concepts()));
}

Objective::Objective(const Task& task, double lambda_rec, double lambda_concept)
    : task_(&task),
      lambda_rec_(lambda_rec),
      lambda_concept_(lambda_concept),
      inputs_(all_vectors(task.concepts())) {
  if (lambda_concept > 0.0 && !task.has_pins()) throw NoPins();
}

LossBreakdown Objective::evaluate(const EncoderParams& enc, const DecoderParams* dec,
                                  Mlp* enc_grad, Mlp* dec_grad) const {
  if (uses_decoder() && dec == nullptr) throw Error("reconstruction term needs a decoder");
  const Task& task = *task_;
  const int k = task.concepts();
  const auto n = static_cast<std::uint32_t>(inputs_.rows());
  const bool want_grad = enc_grad != nullptr;

  const Mlp::Forward enc_fwd = enc.net.forward(inputs_);
  const std::vector<Categorical> dists = dists_from_logits(enc_fwd.logits);
  Eigen::MatrixXd mean(n, k);
  for (std::uint32_t g = 0; g < n; ++g) {
    for (int j = 0; j < k; ++j) mean(g, j) = sigmoid(enc_fwd.logits(g, j));
  }
  Eigen::MatrixXd d_enc = Eigen::MatrixXd::Zero(n, k);

  // Accumulates the gradient of sum_c dist(c) * weight(c) with respect to the
  // encoder logits of g: dp(c)/dz_j = p(c) (c_j - mu_j).
  auto add_expectation_grad = [&](std::uint32_t g, double scale, auto&& weight) {
    double total = 0.0;
    std::vector<double> on(static_cast<std::size_t>(k), 0.0);
    for (std::uint32_t c = 0; c < n; ++c) {
      const double w = dists[g][c] * weight(c);
      total += w;
      for (int j = 1; j <= k; ++j) {
        if (bit_of(c, k, j)) on[j - 1] += w;
      }
    }
    for (int j = 0; j < k; ++j) d_enc(g, j) += scale * (on[j] - mean(g, j) * total);
  };

  LossBreakdown out;
  for (std::uint32_t g = 0; g < n; ++g) {
    const std::uint32_t y = task.label_of(g);
    const LikelihoodTerm term = likelihood_term(task, dists[g], y);
    out.likelihood += term.loss;
    if (!want_grad) continue;
    if (term.outside < 0.5) {
      // d/dz [-log(1 - Q)] = (dQ/dz) / (1 - Q)
      add_expectation_grad(g, 1.0 / (1.0 - term.outside),
                           [&](std::uint32_t c) { return task.consistent(c, y) ? 0.0 : 1.0; });
    } else if (term.inside > kLogFloor) {
      add_expectation_grad(g, -1.0 / term.inside,
                           [&](std::uint32_t c) { return task.consistent(c, y) ? 1.0 : 0.0; });
    }
  }
  out.total = out.likelihood;

  if (dec != nullptr) {
    const Mlp::Forward dec_fwd = dec->net.forward(inputs_);
    // nll(g, c) = -log p_psi(g | c), a sum of per-bit softplus terms.
    Eigen::MatrixXd nll(n, n);
    for (std::uint32_t g = 0; g < n; ++g) {
      for (std::uint32_t c = 0; c < n; ++c) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) {
          const double a = dec_fwd.logits(c, j - 1);
          s += softplus(bit_of(g, k, j) ? -a : a);
        }
        nll(g, c) = s;
      }
    }
    double rec = 0.0;
    for (std::uint32_t g = 0; g < n; ++g) {
      for (std::uint32_t c = 0; c < n; ++c) rec += dists[g][c] * nll(g, c);
    }
    out.reconstruction = rec;
    if (uses_decoder()) {
      out.total += lambda_rec_ * rec;
      if (want_grad) {
        for (std::uint32_t g = 0; g < n; ++g) {
          add_expectation_grad(g, lambda_rec_, [&](std::uint32_t c) { return nll(g, c); });
        }
      }
      if (dec_grad != nullptr) {
        Eigen::MatrixXd d_dec = Eigen::MatrixXd::Zero(n, k);
        for (std::uint32_t c = 0; c < n; ++c) {
          for (int j = 0; j < k; ++j) {
            const double a = dec_fwd.logits(c, j);
            const double on = sigmoid(a);
            double acc = 0.0;
            for (std::uint32_t g = 0; g < n; ++g) {
              acc += dists[g][c] * (on - (bit_of(g, k, j + 1) ? 1.0 : 0.0));
            }
            d_dec(c, j) = lambda_rec_ * acc;
          }
        }
        *dec_grad = dec->net.backward(inputs_, dec_fwd, d_dec);
      }
    }
  }

  if (task.has_pins()) {
    const double conc = concept_loss(task, dists);
    out.supervision = conc;
    if (uses_concepts()) {
      out.total += lambda_concept_ * conc;
      if (want_grad) {
        for (std::uint32_t g : task.pin_list()) {
          add_expectation_grad(g, lambda_concept_,
                               [g](std::uint32_t c) { return std::popcount(c ^ g); });
        }
      }
    }
  }

  if (want_grad) *enc_grad = enc.net.backward(inputs_, enc_fwd, d_enc);
  return out;
}

RunReport diagnose(const Task& task, const TrainConfig& cfg, const EncoderParams& enc,
                   const DecoderParams* dec) {
  RunReport report;
  report.config = cfg;
  const Objective objective(task, dec != nullptr ? cfg.lambda_rec : 0.0, cfg.lambda_concept);
  report.losses = objective.evaluate(enc, dec);
  report.dists = encoder_dists(enc, task.concepts());

  const int k = task.concepts();
  const std::uint32_t n = task.concept_space();
  report.extracted.concepts = k;
  report.extracted.image.resize(n);
  report.determinism = 1.0;
  report.min_label_prob = 1.0;
  for (std::uint32_t g = 0; g < n; ++g) {
    const Categorical& p = report.dists[g];
    // max_element returns the first maximum, i.e. the smallest code on ties.
    const auto best = static_cast<std::uint32_t>(std::max_element(p.begin(), p.end()) - p.begin());
    report.extracted.image[g] = best;
    report.determinism = std::min(report.determinism, p[best]);
    report.min_label_prob =
        std::min(report.min_label_prob, label_prob(task, p, task.label_of(g)));
  }
  report.optimal = report.min_label_prob >= 1.0 - cfg.optimality_epsilon;
  report.deterministic = report.determinism >= cfg.determinism_threshold;
  report.rs = !is_ground_truth(report.extracted);
  report.admissible = is_admissible(report.extracted, task);
  report.injective = is_injective(report.extracted);
  report.extracted.injective = report.injective;

  report.confusion.assign(n, std::vector<double>(n, 0.0));
  for (std::uint32_t g = 0; g < n; ++g) report.confusion[g][report.extracted.image[g]] = 1.0;

  report.bit_confusion.assign(static_cast<std::size_t>(k), {});
  for (std::uint32_t g = 0; g < n; ++g) {
    const std::uint32_t c = report.extracted.image[g];
    for (int j = 1; j <= k; ++j) {
      BitConfusion& m = report.bit_confusion[static_cast<std::size_t>(j - 1)];
      const bool truth = bit_of(g, k, j);
      const bool pred = bit_of(c, k, j);
      if (truth) {
        ++(pred ? m.tp : m.fn);
      } else {
        ++(pred ? m.fp : m.tn);
      }
    }
  }
  return report;
}

RunReport train(const Task& task, const TrainConfig& cfg) {
  std::optional<DecoderParams> dec;
  if (cfg.lambda_rec > 0.0) dec = init_decoder(task.concepts(), cfg.hidden, cfg.seed);
  return train(task, cfg, init_encoder(task.concepts(), cfg.hidden, cfg.seed), std::move(dec));
}

RunReport train(const Task& task, const TrainConfig& cfg, EncoderParams enc,
                std::optional<DecoderParams> dec) {
  cfg.validate();
  const Objective objective(task, cfg.lambda_rec, cfg.lambda_concept);
  if (objective.uses_decoder() && !dec) throw Error("reconstruction term needs a decoder");
  if (!objective.uses_decoder()) dec.reset();

  Mlp enc_grad;
  Mlp dec_grad;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const LossBreakdown loss =
        objective.evaluate(enc, dec ? &*dec : nullptr, &enc_grad, dec ? &dec_grad : nullptr);
    if (!std::isfinite(loss.total)) throw NonFinite(epoch);
    enc.net.descend(enc_grad, cfg.learning_rate);
    if (dec) dec->net.descend(dec_grad, cfg.learning_rate);
    if (!enc.net.finite() || (dec && !dec->net.finite())) throw NonFinite(epoch);
  }
  RunReport report = diagnose(task, cfg, enc, dec ? &*dec : nullptr);
  if (!std::isfinite(report.losses.total)) throw NonFinite(cfg.epochs);
  return report;
}

double relative_error(double analytic, double numeric, double floor) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

double gradient_check(const Task& task, const TrainConfig& cfg, int trials) {
  if (trials < 1) throw Error("gradient check needs at least one trial");
  constexpr double kStep = 1e-5;
  constexpr Eigen::Index kMaxCoordinates = 256;
  const Objective objective(task, cfg.lambda_rec, cfg.lambda_concept);
  const int k = task.concepts();
  double worst = 0.0;

  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t point_seed = counter_hash(cfg.seed, kCheckStream, trial);
    EncoderParams enc{Mlp::random(k, cfg.hidden, k, point_seed, kEncoderStream, 1.0)};
    std::optional<DecoderParams> dec;
    if (objective.uses_decoder()) {
      dec = DecoderParams{Mlp::random(k, cfg.hidden, k, point_seed, kDecoderStream, 1.0)};
    }
    Mlp enc_grad;
    Mlp dec_grad;
    objective.evaluate(enc, dec ? &*dec : nullptr, &enc_grad, dec ? &dec_grad : nullptr);

    auto total = [&] { return objective.evaluate(enc, dec ? &*dec : nullptr).total; };
    auto probe = [&](Mlp& net, const Mlp& grad, std::uint64_t stream) {
      const Eigen::Index count = net.parameter_count();
      const Eigen::Index probes = std::min(count, kMaxCoordinates);
      for (Eigen::Index p = 0; p < probes; ++p) {
        const Eigen::Index i =
            probes == count
                ? p
                : static_cast<Eigen::Index>(counter_hash(point_seed, stream, p) %
                                            static_cast<std::uint64_t>(count));
        const double saved = net.parameter(i);
        net.parameter(i) = saved + kStep;
        const double up = total();
        net.parameter(i) = saved - kStep;
        const double down = total();
        net.parameter(i) = saved;
        worst = std::max(worst, relative_error(grad.parameter(i), (up - down) / (2.0 * kStep)));
      }
    };
    probe(enc.net, enc_grad, kEncoderStream);
    if (dec) probe(dec->net, dec_grad, kDecoderStream);
  }
  return worst;
}

}  // namespace nesy
