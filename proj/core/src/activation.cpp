#include "brlstm/activation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "brlstm/error.hpp"

namespace brlstm {

ActivationKind ActivationKind::brownian(int paths, Sampling sampling, double epsilon) {
  ActivationKind k{ActivationType::brownian};
  k.paths = paths;
  k.sampling = sampling;
  k.epsilon = epsilon;
  return k;
}

void ActivationKind::validate() const {
  if (type == ActivationType::brownian) {
    if (paths < 1) throw ArgumentError("brownian: number of paths M must be >= 1");
    if (!(epsilon > 0.0)) throw ArgumentError("brownian: epsilon must be > 0");
  }
  if (type == ActivationType::leaky_relu && !std::isfinite(slope)) {
    throw ArgumentError("leaky_relu: slope must be finite");
  }
}

std::string_view to_string(ActivationType type) noexcept {
  switch (type) {
    case ActivationType::relu: return "relu";
    case ActivationType::leaky_relu: return "leaky_relu";
    case ActivationType::prelu: return "prelu";
    case ActivationType::tanh: return "tanh";
    case ActivationType::gelu: return "gelu";
    case ActivationType::brownian: return "brownian";
  }
  return "unknown";
}

ActivationType parse_activation_type(std::string_view name) {
  for (auto t : {ActivationType::relu, ActivationType::leaky_relu, ActivationType::prelu,
                 ActivationType::tanh, ActivationType::gelu, ActivationType::brownian}) {
    if (to_string(t) == name) return t;
  }
  throw ConfigError("unknown activation '" + std::string(name) +
                    "' (expected relu, leaky_relu, prelu, tanh, gelu or brownian)");
}

std::string_view to_string(Sampling s) noexcept {
  return s == Sampling::explicit_paths ? "explicit" : "collapsed";
}

Sampling parse_sampling(std::string_view name) {
  if (name == "explicit") return Sampling::explicit_paths;
  if (name == "collapsed") return Sampling::collapsed;
  throw ConfigError("unknown sampling mode '" + std::string(name) +
                    "' (expected explicit or collapsed)");
}

std::string_view to_string(NoiseMode m) noexcept {
  return m == NoiseMode::stochastic ? "stochastic" : "mean";
}

NoiseMode parse_noise_mode(std::string_view name) {
  if (name == "stochastic") return NoiseMode::stochastic;
  if (name == "mean") return NoiseMode::mean;
  throw ConfigError("unknown eval noise mode '" + std::string(name) +
                    "' (expected stochastic or mean)");
}

namespace scalar {

double std_normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

double std_normal_pdf(double x) noexcept {
  constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684758586311649;
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double deterministic(const ActivationKind& kind, double x, double alpha) noexcept {
  switch (kind.type) {
    case ActivationType::relu: return x > 0.0 ? x : 0.0;
    case ActivationType::leaky_relu: return x > 0.0 ? x : kind.slope * x;
    case ActivationType::prelu: return x > 0.0 ? x : alpha * x;
    case ActivationType::tanh: return std::tanh(x);
    case ActivationType::gelu: return x * std_normal_cdf(x);
    case ActivationType::brownian: return x > 0.0 ? x : 0.0;
  }
  return 0.0;
}

double deterministic_derivative(const ActivationKind& kind, double x, double alpha) noexcept {
  switch (kind.type) {
    case ActivationType::relu: return x > 0.0 ? 1.0 : 0.0;
    case ActivationType::leaky_relu: return x > 0.0 ? 1.0 : kind.slope;
    case ActivationType::prelu: return x > 0.0 ? 1.0 : alpha;
    case ActivationType::tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case ActivationType::gelu: return std_normal_cdf(x) + x * std_normal_pdf(x);
    case ActivationType::brownian: return x > 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace scalar

double sample_zbar(int paths, RngStream& rng, Sampling sampling) {
  if (paths < 1) throw ArgumentError("number of paths M must be >= 1");
  if (sampling == Sampling::collapsed) {
    return rng.standard_normal() / std::sqrt(static_cast<double>(paths));
  }
  double sum = 0.0;
  for (int k = 0; k < paths; ++k) sum += rng.standard_normal();
  return sum / static_cast<double>(paths);
}

double brownian_mean_path(double x, int paths, RngStream& rng, Sampling sampling) {
  if (!(x <= 0.0)) {
    throw ArgumentError("brownian_mean_path: x must be <= 0, got " + std::to_string(x));
  }
  return scalar::brownian_mean_sample(x, sample_zbar(paths, rng, sampling));
}

namespace {

void check_finite(const Matrix& x) {
  if (!x.all_finite()) throw ArgumentError("activation input contains non-finite values");
}

}  // namespace

ActivationResult forward(const ActivationKind& kind, const Matrix& x, double alpha,
                         const RngStream& rng, NoiseMode noise) {
  check_finite(x);
  kind.validate();
  ActivationResult r{Matrix(x.rows(), x.cols()), {kind.type, x, Matrix(), alpha}};
  if (kind.type != ActivationType::brownian) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      r.output[k] = scalar::deterministic(kind, x[k], alpha);
    }
    return r;
  }
  r.cache.zbar = Matrix(x.rows(), x.cols());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] > 0.0) {
      r.output[k] = x[k];
      continue;
    }
    if (noise == NoiseMode::stochastic) {
      RngStream element = rng.derive(k);
      r.cache.zbar[k] = sample_zbar(kind.paths, element, kind.sampling);
    }
    r.output[k] = scalar::brownian_value(x[k], alpha, r.cache.zbar[k]);
  }
  return r;
}

ActivationResult forward_frozen(const ActivationKind& kind, const Matrix& x, double alpha,
                                const Matrix& zbar) {
  check_finite(x);
  kind.validate();
  ActivationResult r{Matrix(x.rows(), x.cols()), {kind.type, x, Matrix(), alpha}};
  if (kind.type != ActivationType::brownian) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      r.output[k] = scalar::deterministic(kind, x[k], alpha);
    }
    return r;
  }
  if (!zbar.same_shape(x)) {
    throw DimensionError("forward_frozen: zbar " + zbar.shape_string() + " vs input " +
                         x.shape_string());
  }
  r.cache.zbar = Matrix(x.rows(), x.cols());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] <= 0.0) r.cache.zbar[k] = zbar[k];
    r.output[k] = scalar::brownian_value(x[k], alpha, r.cache.zbar[k]);
  }
  return r;
}

namespace {

void check_cache(const ActivationKind& kind, const ActivationCache& cache,
                 const Matrix& upstream) {
  if (cache.type != kind.type) {
    throw ArgumentError("activation cache was produced by '" +
                        std::string(to_string(cache.type)) + "', not '" +
                        std::string(to_string(kind.type)) + "'");
  }
  if (!upstream.same_shape(cache.inputs)) {
    throw DimensionError("activation backward: upstream " + upstream.shape_string() +
                         " vs cached input " + cache.inputs.shape_string());
  }
  if (kind.type == ActivationType::brownian && !cache.zbar.same_shape(cache.inputs)) {
    throw ArgumentError("brownian activation cache is missing its noise");
  }
}

}  // namespace

Matrix backward_input(const ActivationKind& kind, const ActivationCache& cache,
                      const Matrix& upstream) {
  check_cache(kind, cache, upstream);
  const Matrix& x = cache.inputs;
  Matrix grad(x.rows(), x.cols());
  if (kind.type != ActivationType::brownian) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      grad[k] = upstream[k] * scalar::deterministic_derivative(kind, x[k], cache.alpha_at_call);
    }
    return grad;
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] > 0.0) {
      grad[k] = upstream[k];
    } else if (x[k] < 0.0 && kind.input_grad == BrownianInputGrad::pathwise) {
      const double mag = std::max(-x[k], kind.epsilon);
      grad[k] = upstream[k] * cache.alpha_at_call * cache.zbar[k] / (2.0 * std::sqrt(mag));
    }
  }
  return grad;
}

double backward_alpha(const ActivationKind& kind, const ActivationCache& cache,
                      const Matrix& upstream) {
  if (!kind.has_alpha()) {
    throw ArgumentError("activation '" + std::string(to_string(kind.type)) +
                        "' has no learnable alpha");
  }
  check_cache(kind, cache, upstream);
  const Matrix& x = cache.inputs;
  double g = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] > 0.0) continue;
    if (kind.type == ActivationType::prelu) {
      g += upstream[k] * x[k];
    } else {
      g -= upstream[k] * scalar::brownian_mean_sample(x[k], cache.zbar[k]);
    }
  }
  return g;
}

}  // namespace brlstm
