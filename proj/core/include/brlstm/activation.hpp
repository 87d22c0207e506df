#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "brlstm/matrix.hpp"
#include "brlstm/rng.hpp"

namespace brlstm {

enum class ActivationType { relu, leaky_relu, prelu, tanh, gelu, brownian };

/// How the negative branch of BrownianReLU draws its Monte Carlo mean.
///  explicit_paths: average M unit-normal draws (one per sample path).
///  collapsed: one draw from N(0, 1/M), identical in law at 1/M the cost.
enum class Sampling { explicit_paths, collapsed };

/// stochastic: fresh noise on every call. mean: b replaced by its expectation 0.
enum class NoiseMode { stochastic, mean };

/// Input-gradient rule on the BrownianReLU negative branch.
///  pathwise: exact derivative of the sampled function with the noise frozen.
///  zero: treat the negative branch as constant in x.
enum class BrownianInputGrad { pathwise, zero };

struct ActivationKind {
  ActivationType type = ActivationType::tanh;
  double slope = 0.01;  // leaky_relu only
  int paths = 1000;     // M, brownian only
  double epsilon = 1e-6;
  Sampling sampling = Sampling::collapsed;
  BrownianInputGrad input_grad = BrownianInputGrad::pathwise;

  static ActivationKind relu() { return {ActivationType::relu}; }
  static ActivationKind leaky_relu(double slope = 0.01) {
    ActivationKind k{ActivationType::leaky_relu};
    k.slope = slope;
    return k;
  }
  static ActivationKind prelu() { return {ActivationType::prelu}; }
  static ActivationKind tanh() { return {ActivationType::tanh}; }
  static ActivationKind gelu() { return {ActivationType::gelu}; }
  static ActivationKind brownian(int paths = 1000, Sampling sampling = Sampling::collapsed,
                                 double epsilon = 1e-6);

  /// True for kinds whose negative branch is scaled by the trainable alpha.
  bool has_alpha() const noexcept {
    return type == ActivationType::prelu || type == ActivationType::brownian;
  }

  /// Throws ArgumentError if M < 1, epsilon <= 0 or the slope is not finite.
  void validate() const;

  friend bool operator==(const ActivationKind&, const ActivationKind&) = default;
};

/// Canonical names: relu, leaky_relu, prelu, tanh, gelu, brownian.
std::string_view to_string(ActivationType type) noexcept;
ActivationType parse_activation_type(std::string_view name);
std::string_view to_string(Sampling s) noexcept;
Sampling parse_sampling(std::string_view name);
std::string_view to_string(NoiseMode m) noexcept;
NoiseMode parse_noise_mode(std::string_view name);

/// Everything backward needs from one forward call. For brownian, zbar holds
/// the per-element mean of the unit-normal path draws (0 where input > 0), so
/// the sampled output is -alpha * sqrt(|x|) * zbar.
struct ActivationCache {
  ActivationType type = ActivationType::tanh;
  Matrix inputs;
  Matrix zbar;
  double alpha_at_call = 0.0;
};

struct ActivationResult {
  Matrix output;
  ActivationCache cache;
};

/// Elementwise activation. Element k of x draws its noise from rng.derive(k),
/// so the sample at a position does not depend on the signs of other entries.
ActivationResult forward(const ActivationKind& kind, const Matrix& x, double alpha,
                         const RngStream& rng, NoiseMode noise = NoiseMode::stochastic);

/// Forward with caller-supplied zbar (brownian only; ignored for other kinds).
/// Used to re-evaluate the sampled function with its noise frozen.
ActivationResult forward_frozen(const ActivationKind& kind, const Matrix& x, double alpha,
                                const Matrix& zbar);

/// Per-element mean of M unit-normal draws under the given sampling mode.
double sample_zbar(int paths, RngStream& rng, Sampling sampling);

/// Monte Carlo mean of M Brownian samples B(|x|) ~ N(0, |x|) for x <= 0.
/// The result is distributed N(0, |x|/M).
double brownian_mean_path(double x, int paths, RngStream& rng,
                          Sampling sampling = Sampling::collapsed);

/// upstream * f'(x), elementwise.
Matrix backward_input(const ActivationKind& kind, const ActivationCache& cache,
                      const Matrix& upstream);

/// dL/dalpha = sum of upstream * df/dalpha. Only prelu and brownian have alpha.
double backward_alpha(const ActivationKind& kind, const ActivationCache& cache,
                      const Matrix& upstream);

/// Scalar building blocks shared by the matrix routines and the LSTM kernels.
namespace scalar {

double std_normal_cdf(double x) noexcept;
double std_normal_pdf(double x) noexcept;
double deterministic(const ActivationKind& kind, double x, double alpha) noexcept;
double deterministic_derivative(const ActivationKind& kind, double x, double alpha) noexcept;

/// b = sqrt(|x|) * zbar for x <= 0.
inline double brownian_mean_sample(double x, double zbar) noexcept {
  return std::sqrt(-x) * zbar;
}

/// x for x > 0, otherwise -alpha * b. Written as 0 - alpha*b so that alpha = 0
/// yields +0.0, bitwise equal to ReLU.
inline double brownian_value(double x, double alpha, double zbar) noexcept {
  if (x > 0.0) return x;
  return 0.0 - alpha * brownian_mean_sample(x, zbar);
}

}  // namespace scalar

}  // namespace brlstm
