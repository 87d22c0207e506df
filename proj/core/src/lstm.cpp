#include "brlstm/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "brlstm/error.hpp"

namespace brlstm {

std::string_view to_string(Head h) noexcept {
  return h == Head::regression ? "regression" : "classification";
}

Head parse_head(std::string_view name) {
  if (name == "regression") return Head::regression;
  if (name == "classification") return Head::classification;
  throw ConfigError("unknown head '" + std::string(name) + "'");
}

LstmParams LstmParams::zeros(std::size_t d, std::size_t n, std::size_t out) {
  LstmParams p;
  p.input_dim = d;
  p.hidden_dim = n;
  p.output_dim = out;
  for (Matrix* w : {&p.w_f, &p.w_i, &p.w_c, &p.w_o}) *w = Matrix(n, d);
  for (Matrix* u : {&p.u_f, &p.u_i, &p.u_c, &p.u_o}) *u = Matrix(n, n);
  for (Matrix* b : {&p.b_f, &p.b_i, &p.b_c, &p.b_o}) *b = Matrix(n, 1);
  p.w_y = Matrix(out, n);
  p.b_y = Matrix(out, 1);
  p.alpha = 0.0;
  return p;
}

std::array<Matrix*, LstmParams::kTensorCount> LstmParams::tensors() {
  return {&w_f, &w_i, &w_c, &w_o, &u_f, &u_i, &u_c, &u_o, &b_f, &b_i, &b_c, &b_o, &w_y, &b_y};
}

std::array<const Matrix*, LstmParams::kTensorCount> LstmParams::tensors() const {
  return {&w_f, &w_i, &w_c, &w_o, &u_f, &u_i, &u_c, &u_o, &b_f, &b_i, &b_c, &b_o, &w_y, &b_y};
}

std::size_t LstmParams::weight_count() const {
  std::size_t n = 0;
  for (const Matrix* t : tensors()) n += t->size();
  return n;
}

void LstmParams::validate() const {
  if (input_dim == 0 || hidden_dim == 0 || output_dim == 0) {
    throw DimensionError("LSTM dimensions must be positive");
  }
  const std::array<std::pair<std::size_t, std::size_t>, kTensorCount> expected = {{
      {hidden_dim, input_dim}, {hidden_dim, input_dim}, {hidden_dim, input_dim},
      {hidden_dim, input_dim}, {hidden_dim, hidden_dim}, {hidden_dim, hidden_dim},
      {hidden_dim, hidden_dim}, {hidden_dim, hidden_dim}, {hidden_dim, 1},
      {hidden_dim, 1}, {hidden_dim, 1}, {hidden_dim, 1}, {output_dim, hidden_dim},
      {output_dim, 1},
  }};
  const auto ts = tensors();
  for (std::size_t k = 0; k < kTensorCount; ++k) {
    if (ts[k]->rows() != expected[k].first || ts[k]->cols() != expected[k].second) {
      throw DimensionError("LSTM parameter " + std::string(kTensorNames[k]) + " has shape " +
                           ts[k]->shape_string() + ", expected " +
                           std::to_string(expected[k].first) + "x" +
                           std::to_string(expected[k].second));
    }
  }
}

bool LstmParams::all_finite() const {
  for (const Matrix* t : tensors())
    if (!t->all_finite()) return false;
  return std::isfinite(alpha);
}

LstmParams init_params(std::size_t d, std::size_t n, std::size_t out, std::uint64_t seed) {
  if (d == 0 || n == 0 || out == 0) {
    throw ArgumentError("init_params: dimensions must be positive");
  }
  LstmParams p = LstmParams::zeros(d, n, out);
  const RngStream root(seed, 0x1A17);
  auto xavier = [&](Matrix& m, std::uint64_t id) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    RngStream s = root.derive(id);
    for (double& v : m.values()) v = s.uniform(-limit, limit);
  };
  // Weight tensors occupy slots 0..7 and 12; biases stay zero.
  auto ts = p.tensors();
  for (std::size_t k = 0; k < 8; ++k) xavier(*ts[k], k);
  xavier(p.w_y, 12);
  p.b_f.fill(1.0);
  p.alpha = 0.25;
  return p;
}

namespace {

// Saturated values are pulled back to the nearest doubles inside (0, 1).
double sigmoid(double z) noexcept {
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  if (z >= 0.0) return std::min(hi, 1.0 / (1.0 + std::exp(-z)));
  const double e = std::exp(z);
  return std::max(lo, e / (1.0 + e));
}

// out = W x + U h + b
Matrix gate_preactivation(const Matrix& w, const Matrix& x, const Matrix& u, const Matrix& h,
                          const Matrix& b) {
  Matrix out(b);
  const std::size_t n = w.rows();
  const std::size_t d = w.cols();
  for (std::size_t r = 0; r < n; ++r) {
    double acc = out[r];
    const double* wr = &w.values()[r * d];
    for (std::size_t c = 0; c < d; ++c) acc += wr[c] * x[c];
    const double* ur = &u.values()[r * n];
    for (std::size_t c = 0; c < n; ++c) acc += ur[c] * h[c];
    out[r] = acc;
  }
  return out;
}

void apply_sigmoid(Matrix& m) {
  for (double& v : m.values()) v = sigmoid(v);
}

// dst += a * b^T where a, b are column vectors
void add_outer(Matrix& dst, const Matrix& a, const Matrix& b) {
  for (std::size_t r = 0; r < a.size(); ++r) {
    const double ar = a[r];
    if (ar == 0.0) continue;
    double* row = &dst.values()[r * b.size()];
    for (std::size_t c = 0; c < b.size(); ++c) row[c] += ar * b[c];
  }
}

// dst += M^T v
void add_transposed_product(Matrix& dst, const Matrix& m, const Matrix& v) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double vr = v[r];
    if (vr == 0.0) continue;
    const double* row = &m.values()[r * m.cols()];
    for (std::size_t c = 0; c < m.cols(); ++c) dst[c] += row[c] * vr;
  }
}

void add_into(Matrix& dst, const Matrix& src) {
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
}

}  // namespace

CellOutput cell_forward(const LstmParams& p, const Matrix& x_t, const Matrix& h_prev,
                        const Matrix& c_prev, const ActivationKind& act, const RngStream& rng,
                        NoiseMode noise) {
  const std::size_t n = p.hidden_dim;
  if (x_t.rows() != p.input_dim || x_t.cols() != 1) {
    throw DimensionError("cell_forward: x_t is " + x_t.shape_string() + ", expected " +
                         std::to_string(p.input_dim) + "x1");
  }
  if (h_prev.rows() != n || h_prev.cols() != 1 || !c_prev.same_shape(h_prev)) {
    throw DimensionError("cell_forward: state shapes " + h_prev.shape_string() + " / " +
                         c_prev.shape_string() + ", expected " + std::to_string(n) + "x1");
  }

  StepCache s;
  s.x = x_t;
  s.h_prev = h_prev;
  s.c_prev = c_prev;
  s.f = gate_preactivation(p.w_f, x_t, p.u_f, h_prev, p.b_f);
  s.i = gate_preactivation(p.w_i, x_t, p.u_i, h_prev, p.b_i);
  s.o = gate_preactivation(p.w_o, x_t, p.u_o, h_prev, p.b_o);
  apply_sigmoid(s.f);
  apply_sigmoid(s.i);
  apply_sigmoid(s.o);

  auto cand = forward(act, gate_preactivation(p.w_c, x_t, p.u_c, h_prev, p.b_c), p.alpha,
                      rng.derive(0), noise);
  s.candidate = std::move(cand.output);
  s.candidate_cache = std::move(cand.cache);

  s.c = Matrix(n, 1);
  for (std::size_t k = 0; k < n; ++k) s.c[k] = s.f[k] * c_prev[k] + s.i[k] * s.candidate[k];

  auto cell = forward(act, s.c, p.alpha, rng.derive(1), noise);
  s.cell_act = std::move(cell.output);
  s.cell_cache = std::move(cell.cache);

  s.h = Matrix(n, 1);
  for (std::size_t k = 0; k < n; ++k) s.h[k] = s.o[k] * s.cell_act[k];

  CellOutput out{s.h, s.c, {}};
  out.cache = std::move(s);
  return out;
}

SequenceOutput sequence_forward(const LstmParams& p, const Matrix& sequence,
                                const ActivationKind& act, Head head, const RngStream& rng,
                                NoiseMode noise) {
  if (sequence.rows() == 0) throw ArgumentError("sequence_forward: empty sequence");
  if (sequence.cols() != p.input_dim) {
    throw DimensionError("sequence_forward: sequence is " + sequence.shape_string() +
                         ", expected T x " + std::to_string(p.input_dim));
  }
  SequenceOutput out;
  ForwardTrace& trace = out.trace;
  trace.activation = act;
  trace.head = head;
  trace.steps.reserve(sequence.rows());

  Matrix h(p.hidden_dim, 1);
  Matrix c(p.hidden_dim, 1);
  Matrix x(p.input_dim, 1);
  for (std::size_t t = 0; t < sequence.rows(); ++t) {
    for (std::size_t j = 0; j < p.input_dim; ++j) x[j] = sequence(t, j);
    CellOutput step = cell_forward(p, x, h, c, act, rng.derive(t), noise);
    h = std::move(step.h);
    c = std::move(step.c);
    trace.steps.push_back(std::move(step.cache));
  }

  trace.logits = p.b_y;
  for (std::size_t r = 0; r < p.output_dim; ++r)
    for (std::size_t k = 0; k < p.hidden_dim; ++k) trace.logits[r] += p.w_y(r, k) * h[k];
  trace.prediction = trace.logits;
  if (head == Head::classification) apply_sigmoid(trace.prediction);
  out.prediction = trace.prediction;
  return out;
}

ParamGrads backward_bptt(const LstmParams& p, const ForwardTrace& trace, const Matrix& dL_dpred,
                         BpttSites* sites) {
  if (trace.steps.empty()) throw ArgumentError("backward_bptt: empty trace");
  if (dL_dpred.rows() != p.output_dim || dL_dpred.cols() != 1 ||
      !trace.prediction.same_shape(dL_dpred)) {
    throw DimensionError("backward_bptt: dL/dpred is " + dL_dpred.shape_string() +
                         ", expected " + std::to_string(p.output_dim) + "x1");
  }
  const ActivationKind& act = trace.activation;
  const std::size_t n = p.hidden_dim;
  const std::size_t steps = trace.steps.size();
  for (const StepCache& s : trace.steps) {
    if (s.candidate_cache.inputs.size() != n || s.cell_cache.inputs.size() != n ||
        s.candidate_cache.type != act.type || s.cell_cache.type != act.type) {
      throw ArgumentError("backward_bptt: trace caches do not match the model");
    }
  }
  if (sites) {
    sites->candidate_upstream.assign(steps, Matrix());
    sites->cell_upstream.assign(steps, Matrix());
  }

  ParamGrads g = LstmParams::zeros(p.input_dim, n, p.output_dim);

  Matrix dlogits = dL_dpred;
  if (trace.head == Head::classification) {
    for (std::size_t r = 0; r < dlogits.size(); ++r) {
      const double q = trace.prediction[r];
      dlogits[r] *= q * (1.0 - q);
    }
  }
  const Matrix& h_last = trace.steps.back().h;
  add_outer(g.w_y, dlogits, h_last);
  add_into(g.b_y, dlogits);

  Matrix dh(n, 1);
  add_transposed_product(dh, p.w_y, dlogits);
  Matrix dc_next(n, 1);  // dL/dC_t flowing from step t+1
  Matrix d_cell_act(n, 1), d_candidate(n, 1);
  Matrix dz_f(n, 1), dz_i(n, 1), dz_o(n, 1);

  for (std::size_t t = steps; t-- > 0;) {
    const StepCache& s = trace.steps[t];

    for (std::size_t k = 0; k < n; ++k) {
      dz_o[k] = dh[k] * s.cell_act[k] * s.o[k] * (1.0 - s.o[k]);
      d_cell_act[k] = dh[k] * s.o[k];
    }
    Matrix dc = backward_input(act, s.cell_cache, d_cell_act);
    add_into(dc, dc_next);
    if (act.has_alpha()) g.alpha += backward_alpha(act, s.cell_cache, d_cell_act);

    for (std::size_t k = 0; k < n; ++k) {
      d_candidate[k] = dc[k] * s.i[k];
      dz_i[k] = dc[k] * s.candidate[k] * s.i[k] * (1.0 - s.i[k]);
      dz_f[k] = dc[k] * s.c_prev[k] * s.f[k] * (1.0 - s.f[k]);
      dc_next[k] = dc[k] * s.f[k];
    }
    const Matrix dz_c = backward_input(act, s.candidate_cache, d_candidate);
    if (act.has_alpha()) g.alpha += backward_alpha(act, s.candidate_cache, d_candidate);

    if (sites) {
      sites->candidate_upstream[t] = d_candidate;
      sites->cell_upstream[t] = d_cell_act;
    }

    add_outer(g.w_f, dz_f, s.x);
    add_outer(g.w_i, dz_i, s.x);
    add_outer(g.w_c, dz_c, s.x);
    add_outer(g.w_o, dz_o, s.x);
    add_outer(g.u_f, dz_f, s.h_prev);
    add_outer(g.u_i, dz_i, s.h_prev);
    add_outer(g.u_c, dz_c, s.h_prev);
    add_outer(g.u_o, dz_o, s.h_prev);
    add_into(g.b_f, dz_f);
    add_into(g.b_i, dz_i);
    add_into(g.b_c, dz_c);
    add_into(g.b_o, dz_o);

    dh.fill(0.0);
    add_transposed_product(dh, p.u_f, dz_f);
    add_transposed_product(dh, p.u_i, dz_i);
    add_transposed_product(dh, p.u_c, dz_c);
    add_transposed_product(dh, p.u_o, dz_o);
  }
  return g;
}

void accumulate(ParamGrads& dst, const ParamGrads& src, double scale) {
  auto d = dst.tensors();
  const auto s = src.tensors();
  for (std::size_t k = 0; k < LstmParams::kTensorCount; ++k) {
    if (!d[k]->same_shape(*s[k])) {
      throw DimensionError("accumulate: " + std::string(LstmParams::kTensorNames[k]) + " " +
                           d[k]->shape_string() + " vs " + s[k]->shape_string());
    }
    for (std::size_t i = 0; i < d[k]->size(); ++i) (*d[k])[i] += scale * (*s[k])[i];
  }
  dst.alpha += scale * src.alpha;
}

double global_norm(const ParamGrads& g) {
  double s = g.alpha * g.alpha;
  for (const Matrix* t : g.tensors()) s += squared_norm(*t);
  return std::sqrt(s);
}

}  // namespace brlstm
