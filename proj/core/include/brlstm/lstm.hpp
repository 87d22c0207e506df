#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "brlstm/activation.hpp"
#include "brlstm/matrix.hpp"
#include "brlstm/rng.hpp"

namespace brlstm {

/// Output head applied to the final hidden state.
enum class Head { regression, classification };

std::string_view to_string(Head h) noexcept;
Head parse_head(std::string_view name);

/// Weights of a single-layer LSTM with a dense output head.
///   f = sigmoid(W_f x + U_f h + b_f), likewise i and o
///   C~ = act(W_c x + U_c h + b_c)
///   C = f * C_prev + i * C~
///   h = o * act(C)
/// `alpha` is the shared negative-branch scale used by prelu and brownian.
struct LstmParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t output_dim = 0;
  Matrix w_f, w_i, w_c, w_o;  // hidden x input
  Matrix u_f, u_i, u_c, u_o;  // hidden x hidden
  Matrix b_f, b_i, b_c, b_o;  // hidden x 1
  Matrix w_y;                 // output x hidden
  Matrix b_y;                 // output x 1
  double alpha = 0.25;

  static constexpr std::size_t kTensorCount = 14;
  static constexpr std::array<std::string_view, kTensorCount> kTensorNames = {
      "w_f", "w_i", "w_c", "w_o", "u_f", "u_i", "u_c",
      "u_o", "b_f", "b_i", "b_c", "b_o", "w_y", "b_y"};

  /// All-zero parameters (alpha included) of the given shape.
  static LstmParams zeros(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim);

  std::array<Matrix*, kTensorCount> tensors();
  std::array<const Matrix*, kTensorCount> tensors() const;

  /// Number of scalar weights, alpha excluded.
  std::size_t weight_count() const;

  /// Throws DimensionError when any tensor disagrees with the declared dims.
  void validate() const;
  bool all_finite() const;

  friend bool operator==(const LstmParams&, const LstmParams&) = default;
};

/// Gradients share the parameter layout; `alpha` holds dL/dalpha.
using ParamGrads = LstmParams;

/// Xavier-uniform weights, zero biases except b_f = 1, alpha = 0.25.
LstmParams init_params(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim,
                       std::uint64_t seed);

/// Model = parameters + activation + head; the unit that gets trained and saved.
struct Model {
  LstmParams params;
  ActivationKind activation;
  Head head = Head::regression;
};

/// State kept from one cell step for backpropagation.
struct StepCache {
  Matrix x, h_prev, c_prev;
  Matrix f, i, o;
  Matrix candidate;
  ActivationCache candidate_cache;  // inputs = candidate pre-activation
  Matrix c;
  Matrix cell_act;
  ActivationCache cell_cache;  // inputs = C_t
  Matrix h;
};

struct CellOutput {
  Matrix h;
  Matrix c;
  StepCache cache;
};

/// One LSTM step. The candidate site samples noise from rng.derive(0) and the
/// cell-output site from rng.derive(1).
CellOutput cell_forward(const LstmParams& p, const Matrix& x_t, const Matrix& h_prev,
                        const Matrix& c_prev, const ActivationKind& act, const RngStream& rng,
                        NoiseMode noise = NoiseMode::stochastic);

struct ForwardTrace {
  std::vector<StepCache> steps;
  ActivationKind activation;
  Head head = Head::regression;
  Matrix logits;      // W_y h_T + b_y
  Matrix prediction;  // logits, or sigmoid(logits) for classification
};

struct SequenceOutput {
  Matrix prediction;
  ForwardTrace trace;
};

/// Runs the cell over the rows of `sequence` (T x input_dim) from h_0 = C_0 = 0.
/// Step t draws its noise from rng.derive(t).
SequenceOutput sequence_forward(const LstmParams& p, const Matrix& sequence,
                                const ActivationKind& act, Head head, const RngStream& rng,
                                NoiseMode noise = NoiseMode::stochastic);

/// Upstream gradients seen at each activation site, recorded on request.
struct BpttSites {
  std::vector<Matrix> candidate_upstream;  // per step, dL/dC~
  std::vector<Matrix> cell_upstream;       // per step, dL/d act(C)
};

/// Exact gradients under the noise frozen in `trace`.
ParamGrads backward_bptt(const LstmParams& p, const ForwardTrace& trace, const Matrix& dL_dpred,
                         BpttSites* sites = nullptr);

/// Adds `scale * src` into `dst`, tensor by tensor (alpha included).
void accumulate(ParamGrads& dst, const ParamGrads& src, double scale = 1.0);

/// Euclidean norm over every gradient entry, alpha included.
double global_norm(const ParamGrads& g);

}  // namespace brlstm
