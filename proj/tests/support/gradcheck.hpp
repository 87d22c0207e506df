// Finite-difference gradient check for the LSTM. Noise is frozen by replaying
// the same counter-based stream, so every forward evaluation sees identical
// per-position draws.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "brlstm/lstm.hpp"
#include "oracles.hpp"

namespace brlstm::testing {

struct GradCheckCase {
  LstmParams params;
  Matrix sequence;
  ActivationKind activation;
  Head head = Head::regression;
  RngStream noise;
  double weight = 1.0;  // L = weight * prediction
  int attempts = 1;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;
  std::size_t checked = 0;
};

/// Minimum |pre-activation| kept away from kinks (and from the 1/sqrt|x|
/// singularity of the brownian pathwise derivative) so that +-h never crosses them.
inline double kink_margin(const ActivationKind& act) {
  switch (act.type) {
    case ActivationType::relu:
    case ActivationType::leaky_relu:
    case ActivationType::prelu: return 1e-3;
    case ActivationType::brownian: return 5e-2;
    default: return 0.0;
  }
}

inline bool clear_of_kinks(const ForwardTrace& trace, double margin) {
  if (margin <= 0.0) return true;
  for (const StepCache& s : trace.steps) {
    for (const Matrix* m : {&s.candidate_cache.inputs, &s.cell_cache.inputs})
      for (double v : m->values())
        if (std::abs(v) < margin) return false;
  }
  return true;
}

/// Random small model and sequence; redrawn (deterministically) until every
/// activation input clears the kink margin.
inline GradCheckCase make_gradcheck_case(const ActivationKind& act, std::uint64_t seed,
                                         Head head = Head::regression, std::size_t d = 2,
                                         std::size_t n = 3, std::size_t steps = 4) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    RngStream rng(seed, 0xC0DE + static_cast<std::uint64_t>(attempt));
    GradCheckCase c;
    c.params = LstmParams::zeros(d, n, 1);
    for (Matrix* t : c.params.tensors())
      for (double& v : t->values()) v = rng.uniform(-1.0, 1.0);
    c.params.alpha = rng.uniform(0.2, 1.0);
    c.sequence = Matrix(steps, d);
    for (double& v : c.sequence.values()) v = rng.uniform(-1.0, 1.0);
    c.activation = act;
    c.head = head;
    c.noise = RngStream(seed, 0xAB5E + static_cast<std::uint64_t>(attempt));
    c.weight = rng.uniform(0.5, 1.5);
    c.attempts = attempt + 1;
    const auto out = sequence_forward(c.params, c.sequence, act, head, c.noise);
    if (clear_of_kinks(out.trace, kink_margin(act))) return c;
  }
  throw std::runtime_error("could not draw a kink-free gradient-check case");
}

inline double gradcheck_loss(const GradCheckCase& c, const LstmParams& p) {
  return c.weight * sequence_forward(p, c.sequence, c.activation, c.head, c.noise).prediction[0];
}

/// Compares backward_bptt with central differences over every weight and alpha.
inline GradCheckResult run_gradcheck(const GradCheckCase& c, double h = 1e-5,
                                     double floor = 1e-4) {
  const auto out = sequence_forward(c.params, c.sequence, c.activation, c.head, c.noise);
  Matrix dpred(1, 1, c.weight);
  const ParamGrads analytic = backward_bptt(c.params, out.trace, dpred);

  GradCheckResult r;
  LstmParams p = c.params;
  auto tensors = p.tensors();
  const auto grads = analytic.tensors();
  auto check_one = [&](double& slot, double expected, const std::string& name) {
    const double saved = slot;
    slot = saved + h;
    const double up = gradcheck_loss(c, p);
    slot = saved - h;
    const double down = gradcheck_loss(c, p);
    slot = saved;
    const double fd = (up - down) / (2.0 * h);
    const double err = relative_error(expected, fd, floor);
    ++r.checked;
    if (err > r.max_rel_error) {
      r.max_rel_error = err;
      r.worst = name + " analytic=" + std::to_string(expected) + " fd=" + std::to_string(fd);
    }
  };
  for (std::size_t k = 0; k < LstmParams::kTensorCount; ++k) {
    for (std::size_t i = 0; i < tensors[k]->size(); ++i) {
      check_one((*tensors[k])[i], (*grads[k])[i],
                std::string(LstmParams::kTensorNames[k]) + "[" + std::to_string(i) + "]");
    }
  }
  check_one(p.alpha, analytic.alpha, "alpha");
  return r;
}

}  // namespace brlstm::testing
