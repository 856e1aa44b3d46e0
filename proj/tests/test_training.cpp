#include <gtest/gtest.h>

#include <cmath>

#include "aalstm/training.hpp"

using namespace aalstm;

TEST(CrossEntropy, NegativeLogOfGoldProbability) {
    EXPECT_NEAR(cross_entropy(Vector{0.2, 0.5, 0.3}, 1), -std::log(0.5), 1e-15);
    EXPECT_NEAR(cross_entropy(Vector{0.0, 1.0, 0.0}, 0), -std::log(1e-12), 1e-9);
    EXPECT_THROW(cross_entropy(Vector{0.2, 0.5, 0.3}, 3), std::invalid_argument);
}

TEST(CrossEntropy, ExtendedAgreesWithSoftmaxForm) {
    const Vector logits{0.3, -1.2, 2.0};
    const double z = std::exp(0.3) + std::exp(-1.2) + std::exp(2.0);
    EXPECT_NEAR(static_cast<double>(cross_entropy_extended(logits, 2)),
                -std::log(std::exp(2.0) / z), 1e-15);
    EXPECT_TRUE(std::isfinite(static_cast<double>(cross_entropy_extended(Vector{800, 0, -800}, 2))));
    EXPECT_THROW(cross_entropy_extended(logits, 5), std::invalid_argument);
}

TEST(L2Penalty, WeightsOnly) {
    Matrix w{{1, 2}, {3, 4}};
    Vector b{10, 10};
    Matrix emb(2, 2, 5.0);
    const std::vector<ConstParamView> params{as_const(view_of("w", w)), as_const(view_of("b", b)),
                                             as_const(view_of("e", emb, ParamKind::WordEmbedding))};
    EXPECT_DOUBLE_EQ(l2_penalty(params, 0.5), 15.0);
    EXPECT_DOUBLE_EQ(static_cast<double>(l2_penalty_extended(params, 0.5)), 15.0);

    Matrix gw(2, 2);
    Vector gb(2);
    Matrix ge(2, 2);
    const std::vector<ParamView> grads{view_of("w", gw), view_of("b", gb),
                                       view_of("e", ge, ParamKind::WordEmbedding)};
    l2_penalty(params, 0.5, grads);
    EXPECT_EQ(gw, (Matrix{{1, 2}, {3, 4}}));
    EXPECT_EQ(gb, Vector(2, 0.0));
    EXPECT_EQ(ge, Matrix(2, 2));
    EXPECT_THROW(l2_penalty(params, -1.0), std::invalid_argument);
}

TEST(L2Penalty, NonNegativeAndZeroOnlyAtZero) {
    Rng rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        Matrix w = uniform_init(3, 3, -1, 1, rng);
        const std::vector<ConstParamView> v{as_const(view_of("w", w))};
        EXPECT_GT(l2_penalty(v, 0.01), 0.0);
    }
    Matrix zero(3, 3);
    const std::vector<ConstParamView> v{as_const(view_of("w", zero))};
    EXPECT_EQ(l2_penalty(v, 0.01), 0.0);
}

TEST(Dropout, EvalModeAndZeroRateAreIdentity) {
    Rng rng(2);
    const Vector v{1, -2, 3};
    const auto e = dropout(v, 0.5, DropoutMode::Eval, rng);
    EXPECT_EQ(e.output, v);
    EXPECT_EQ(e.mask, Vector(3, 1.0));
    EXPECT_EQ(dropout(v, 0.0, DropoutMode::Train, rng).output, v);
}

TEST(Dropout, InvertedScalingPreservesExpectation) {
    Rng rng(3);
    const double p = 0.5;
    const Vector v(20000, 1.0);
    const auto r = dropout(v, p, DropoutMode::Train, rng);
    double dropped = 0, total = 0;
    for (std::size_t i = 0; i < v.dim(); ++i) {
        EXPECT_TRUE(r.mask[i] == 0.0 || r.mask[i] == 2.0);
        EXPECT_EQ(r.output[i], v[i] * r.mask[i]);
        dropped += r.mask[i] == 0.0;
        total += r.output[i];
    }
    // 4 sigma for Binomial(20000, 0.5).
    EXPECT_NEAR(dropped / 20000, p, 4 * std::sqrt(0.25 / 20000));
    EXPECT_NEAR(total / 20000, 1.0, 8 * std::sqrt(0.25 / 20000));
}

TEST(Dropout, RejectsBadRate) {
    Rng rng(4);
    EXPECT_THROW(dropout(Vector{1}, 1.0, DropoutMode::Train, rng), std::invalid_argument);
    EXPECT_THROW(dropout(Vector{1}, -0.1, DropoutMode::Train, rng), std::invalid_argument);
}

TEST(Adam, ZeroGradientFromZeroMomentsIsNoOp) {
    Matrix w{{0.1, -0.2}, {0.3, 0.4}};
    const Matrix before = w;
    Matrix g(2, 2);
    AdamState state;
    const std::vector<ParamView> params{view_of("w", w)};
    const std::vector<ConstParamView> grads{as_const(view_of("g", g))};
    adam_step(params, grads, state, 0.001);
    EXPECT_EQ(w, before);
    EXPECT_EQ(state.step, 1u);
}

TEST(Adam, FirstStepMovesByLearningRateAgainstGradientSign) {
    Vector w{1.0, 1.0, 1.0};
    Vector g{0.5, -3.0, 1e-3};
    AdamState state;
    adam_step(std::vector<ParamView>{view_of("w", w)},
              std::vector<ConstParamView>{as_const(view_of("g", g))}, state, 0.01);
    for (std::size_t i = 0; i < 3; ++i) {
        const double expected = 1.0 - 0.01 * g[i] / (std::abs(g[i]) + 1e-8);
        EXPECT_NEAR(w[i], expected, 1e-15);
    }
}

TEST(Adam, MatchesScalarRecurrenceOverSeveralSteps) {
    Vector w{0.2, -0.4};
    double m[2] = {0, 0}, v[2] = {0, 0}, ref[2] = {0.2, -0.4};
    AdamState state;
    Rng rng(5);
    for (int t = 1; t <= 10; ++t) {
        Vector g{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        adam_step(std::vector<ParamView>{view_of("w", w)},
                  std::vector<ConstParamView>{as_const(view_of("g", g))}, state, 0.05);
        for (int i = 0; i < 2; ++i) {
            m[i] = 0.9 * m[i] + 0.1 * g[i];
            v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
            const double mh = m[i] / (1 - std::pow(0.9, t));
            const double vh = v[i] / (1 - std::pow(0.999, t));
            ref[i] -= 0.05 * mh / (std::sqrt(vh) + 1e-8);
            EXPECT_NEAR(w[i], ref[i], 1e-14) << "step " << t;
        }
    }
}

TEST(Adam, SkipMaskFreezesView) {
    Vector a{1.0}, b{1.0};
    Vector ga{1.0}, gb{1.0};
    AdamState state;
    adam_step(std::vector<ParamView>{view_of("a", a), view_of("b", b)},
              std::vector<ConstParamView>{as_const(view_of("a", ga)), as_const(view_of("b", gb))},
              state, 0.1, {true, false});
    EXPECT_EQ(a[0], 1.0);
    EXPECT_LT(b[0], 1.0);
    EXPECT_EQ(state.first_moment[0][0], 0.0);
    EXPECT_THROW(adam_step(std::vector<ParamView>{view_of("a", a)},
                           std::vector<ConstParamView>{}, state, 0.1),
                 std::invalid_argument);
}

TEST(GradCheck, ExactForQuadraticAndFlagsWrongGradient) {
    Vector x{1.5, -2.0, 0.25};
    Vector good{3.0, -4.0, 0.5}; // d/dx of sum x^2
    Vector bad{3.0, -4.0, 0.6};
    const auto loss = [&] {
        long double s = 0;
        for (double v : x) s += static_cast<long double>(v) * v;
        return s;
    };
    const std::vector<ParamView> params{view_of("x", x)};
    const auto ok = grad_check(params, std::vector<ConstParamView>{as_const(view_of("g", good))},
                               loss, 1e-5);
    EXPECT_LT(ok.max_relative_error, 1e-9);
    EXPECT_EQ(ok.checked, 3u);
    const auto wrong = grad_check(
        params, std::vector<ConstParamView>{as_const(view_of("g", bad))}, loss, 1e-5);
    EXPECT_FALSE(wrong.passes());
    EXPECT_EQ(wrong.worst_index, 2u);
    EXPECT_EQ(x, (Vector{1.5, -2.0, 0.25}));
}
