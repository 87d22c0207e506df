#include <cmath>
#include <cstring>

#include <gtest/gtest.h>

#include "brlstm/error.hpp"
#include "brlstm/lstm.hpp"
#include "gradcheck.hpp"

namespace brlstm {
namespace {

const std::vector<ActivationKind> kKinds = {
    ActivationKind::relu(), ActivationKind::leaky_relu(), ActivationKind::prelu(),
    ActivationKind::tanh(), ActivationKind::gelu(),       ActivationKind::brownian(1000)};

TEST(LstmCell, ZeroParamsGiveZeroState) {
  const LstmParams p = LstmParams::zeros(2, 3, 1);
  for (const auto& k : kKinds) {
    const auto out = cell_forward(p, Matrix{{0.7}, {-1.2}}, Matrix::zeros(3, 1),
                                  Matrix::zeros(3, 1), k, RngStream(1, 2));
    EXPECT_EQ(out.h, Matrix::zeros(3, 1)) << to_string(k.type);
    EXPECT_EQ(out.c, Matrix::zeros(3, 1)) << to_string(k.type);
    for (double g : out.cache.f.values()) EXPECT_EQ(g, 0.5);
    for (double g : out.cache.i.values()) EXPECT_EQ(g, 0.5);
    for (double g : out.cache.o.values()) EXPECT_EQ(g, 0.5);
  }
}

TEST(LstmCell, HandEvaluatedReluStep) {
  const LstmParams p = LstmParams::zeros(1, 1, 1);
  const auto out = cell_forward(p, Matrix{{3.0}}, Matrix{{0.0}}, Matrix{{2.0}},
                                ActivationKind::relu(), RngStream());
  EXPECT_EQ(out.c[0], 1.0);
  EXPECT_EQ(out.h[0], 0.5);
}

TEST(LstmCell, OutputShapes) {
  const LstmParams p = init_params(4, 5, 1, 3);
  const auto out = cell_forward(p, Matrix(4, 1, 0.1), Matrix::zeros(5, 1), Matrix::zeros(5, 1),
                                ActivationKind::tanh(), RngStream());
  EXPECT_EQ(out.h.rows(), 5u);
  EXPECT_EQ(out.h.cols(), 1u);
  EXPECT_EQ(out.c.rows(), 5u);
  EXPECT_EQ(out.c.cols(), 1u);
}

TEST(LstmCell, ShapeMismatchRejected) {
  const LstmParams p = init_params(2, 3, 1, 3);
  EXPECT_THROW(cell_forward(p, Matrix(3, 1, 0.0), Matrix::zeros(3, 1), Matrix::zeros(3, 1),
                            ActivationKind::tanh(), RngStream()),
               DimensionError);
  EXPECT_THROW(cell_forward(p, Matrix(2, 1, 0.0), Matrix::zeros(2, 1), Matrix::zeros(3, 1),
                            ActivationKind::tanh(), RngStream()),
               DimensionError);
}

TEST(LstmSequence, SingleStepEqualsCellPlusHead) {
  const LstmParams p = init_params(2, 3, 1, 9);
  const Matrix seq{{0.3, -0.4}};
  const RngStream rng(5, 5);
  const auto act = ActivationKind::brownian(10);
  const auto seq_out = sequence_forward(p, seq, act, Head::regression, rng);
  const auto cell = cell_forward(p, Matrix{{0.3}, {-0.4}}, Matrix::zeros(3, 1),
                                 Matrix::zeros(3, 1), act, rng.derive(0));
  const Matrix expected = add(matmul(p.w_y, cell.h), p.b_y);
  EXPECT_EQ(seq_out.prediction, expected);
  EXPECT_EQ(seq_out.trace.steps.size(), 1u);
}

TEST(LstmSequence, ZeroParamsHeads) {
  const LstmParams p = LstmParams::zeros(2, 3, 1);
  const Matrix seq(5, 2, 0.9);
  EXPECT_EQ(sequence_forward(p, seq, ActivationKind::relu(), Head::regression, RngStream())
                .prediction[0],
            0.0);
  EXPECT_EQ(sequence_forward(p, seq, ActivationKind::relu(), Head::classification, RngStream())
                .prediction[0],
            0.5);
}

TEST(LstmSequence, EmptySequenceRejected) {
  const LstmParams p = init_params(2, 3, 1, 1);
  EXPECT_THROW(sequence_forward(p, Matrix(0, 2), ActivationKind::tanh(), Head::regression,
                                RngStream()),
               std::invalid_argument);
}

TEST(LstmSequence, TraceLengthMatchesSequence) {
  const LstmParams p = init_params(1, 4, 1, 2);
  const auto out = sequence_forward(p, Matrix(7, 1, 0.2), ActivationKind::gelu(),
                                    Head::regression, RngStream());
  EXPECT_EQ(out.trace.steps.size(), 7u);
}

TEST(LstmBackward, ZeroUpstreamGivesZeroGradients) {
  const auto c = testing::make_gradcheck_case(ActivationKind::brownian(50), 3);
  const auto out = sequence_forward(c.params, c.sequence, c.activation, c.head, c.noise);
  const ParamGrads g = backward_bptt(c.params, out.trace, Matrix(1, 1, 0.0));
  for (const Matrix* t : g.tensors())
    for (double v : t->values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(g.alpha, 0.0);
}

TEST(LstmBackward, TanhGradientCheck) {
  const auto c = testing::make_gradcheck_case(ActivationKind::tanh(), 42);
  const auto r = testing::run_gradcheck(c);
  EXPECT_LT(r.max_rel_error, 1e-6) << r.worst;
}

TEST(LstmBackward, BrownianFrozenNoiseGradientCheck) {
  const auto c = testing::make_gradcheck_case(ActivationKind::brownian(1000), 42);
  const auto r = testing::run_gradcheck(c);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
}

TEST(LstmBackward, MismatchedTraceRejected) {
  const LstmParams p = init_params(2, 3, 1, 1);
  const LstmParams q = init_params(2, 4, 1, 1);
  const auto out = sequence_forward(p, Matrix(3, 2, 0.1), ActivationKind::tanh(),
                                    Head::regression, RngStream());
  EXPECT_THROW(backward_bptt(q, out.trace, Matrix(1, 1, 1.0)), std::invalid_argument);
  EXPECT_THROW(backward_bptt(p, out.trace, Matrix(2, 1, 1.0)), DimensionError);
}

// Properties.

TEST(LstmProperty, GatesStayInsideUnitInterval) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    LstmParams p = init_params(3, 6, 1, seed);
    for (Matrix* t : p.tensors())
      for (double& v : t->values()) v *= 4.0;
    RngStream gen(seed, 77);
    Matrix seq(12, 3);
    for (double& v : seq.values()) v = gen.uniform(-3.0, 3.0);
    const auto out =
        sequence_forward(p, seq, ActivationKind::brownian(10), Head::regression, RngStream(seed, 1));
    for (const StepCache& s : out.trace.steps)
      for (const Matrix* g : {&s.f, &s.i, &s.o})
        for (double v : g->values()) {
          EXPECT_GT(v, 0.0);
          EXPECT_LT(v, 1.0);
        }
  }
}

class GradientCheckAcrossKinds : public ::testing::TestWithParam<int> {};

TEST_P(GradientCheckAcrossKinds, TwentySeeds) {
  const ActivationKind& act = kKinds[static_cast<std::size_t>(GetParam())];
  const double tol = act.type == ActivationType::brownian ? 1e-4 : 1e-6;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (Head head : {Head::regression, Head::classification}) {
      const auto c = testing::make_gradcheck_case(act, seed, head);
      const auto r = testing::run_gradcheck(c);
      EXPECT_LT(r.max_rel_error, tol)
          << to_string(act.type) << " seed " << seed << " " << to_string(head) << ": " << r.worst;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, GradientCheckAcrossKinds, ::testing::Range(0, 6),
                         [](const auto& info) {
                           return std::string(to_string(kKinds[info.param].type));
                         });

TEST(LstmProperty, AlphaGradientIsSumOfPerSiteAlphaGradients) {
  for (const auto& act : {ActivationKind::prelu(), ActivationKind::brownian(100)}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto c = testing::make_gradcheck_case(act, seed);
      const auto out = sequence_forward(c.params, c.sequence, act, c.head, c.noise);
      BpttSites sites;
      const ParamGrads g = backward_bptt(c.params, out.trace, Matrix(1, 1, c.weight), &sites);
      ASSERT_EQ(sites.candidate_upstream.size(), out.trace.steps.size());
      double total = 0.0;
      for (std::size_t t = 0; t < out.trace.steps.size(); ++t) {
        const StepCache& s = out.trace.steps[t];
        total += backward_alpha(act, s.candidate_cache, sites.candidate_upstream[t]);
        total += backward_alpha(act, s.cell_cache, sites.cell_upstream[t]);
      }
      EXPECT_NEAR(g.alpha, total, 1e-12 * std::max(1.0, std::abs(total)));
    }
  }
}

TEST(LstmProperty, BrownianWithZeroAlphaIsBitwiseRelu) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    LstmParams p = init_params(2, 5, 1, seed);
    p.alpha = 0.0;
    RngStream gen(seed, 3);
    Matrix seq(10, 2);
    for (double& v : seq.values()) v = gen.uniform(-2.0, 2.0);
    for (Head head : {Head::regression, Head::classification}) {
      const double br = sequence_forward(p, seq, ActivationKind::brownian(1000), head,
                                         RngStream(seed, 9))
                            .prediction[0];
      const double re =
          sequence_forward(p, seq, ActivationKind::relu(), head, RngStream()).prediction[0];
      EXPECT_EQ(std::memcmp(&br, &re, sizeof(double)), 0) << br << " vs " << re;
    }
  }
}

TEST(LstmInit, Deterministic) { EXPECT_EQ(init_params(3, 7, 1, 11), init_params(3, 7, 1, 11)); }

TEST(LstmInit, DifferentSeedsDiffer) { EXPECT_NE(init_params(3, 7, 1, 11), init_params(3, 7, 1, 12)); }

TEST(LstmInit, BiasesAndAlpha) {
  const LstmParams p = init_params(3, 7, 1, 5);
  for (double v : p.b_f.values()) EXPECT_EQ(v, 1.0);
  for (const Matrix* b : {&p.b_i, &p.b_c, &p.b_o, &p.b_y})
    for (double v : b->values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(p.alpha, 0.25);
}

TEST(LstmInit, XavierVarianceOnSquareLayer) {
  const LstmParams p = init_params(100, 100, 1, 8);
  const double law = 2.0 / 200.0;
  for (const Matrix* w : {&p.w_f, &p.u_c}) {
    const auto m = testing::sample_moments(w->values());
    EXPECT_NEAR(m.variance / law, 1.0, 0.15);
  }
  const double bound = std::sqrt(6.0 / 200.0);
  for (double v : p.w_o.values()) EXPECT_LE(std::abs(v), bound);
}

TEST(LstmInit, ZeroDimsRejected) {
  EXPECT_THROW(init_params(0, 3, 1, 1), ArgumentError);
  EXPECT_THROW(init_params(2, 0, 1, 1), ArgumentError);
}

TEST(LstmParamsTest, ValidateDetectsBadShape) {
  LstmParams p = init_params(2, 3, 1, 1);
  p.u_f = Matrix(2, 2);
  EXPECT_THROW(p.validate(), DimensionError);
}

}  // namespace
}  // namespace brlstm
