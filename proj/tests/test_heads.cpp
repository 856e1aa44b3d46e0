#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "aalstm/heads.hpp"
#include "aalstm/params.hpp"
#include "aalstm/training.hpp"
#include "oracles.hpp"

using namespace aalstm;

namespace {

AttentionParams random_attention(std::size_t dc, std::size_t da, std::size_t dr, Rng &rng) {
    AttentionParams p(dc, da, dr);
    for (Matrix *m : {&p.hidden_proj, &p.aspect_proj, &p.pooled_proj, &p.last_proj})
        for (double &v : m->values()) v = rng.uniform(-1, 1);
    for (double &v : p.score.values()) v = rng.uniform(-1, 1);
    return p;
}

std::vector<Vector> random_states(std::size_t T, std::size_t dc, Rng &rng) {
    std::vector<Vector> hs;
    for (std::size_t t = 0; t < T; ++t) hs.push_back(fixtures::random_vector(dc, rng, 0.9));
    return hs;
}

long double weighted_sum(const Vector &v, const Vector &w) {
    long double s = 0;
    for (std::size_t i = 0; i < v.dim(); ++i) s += static_cast<long double>(v[i]) * w[i];
    return s;
}

} // namespace

TEST(LastHidden, ReturnsFinalState) {
    const std::vector<Vector> hs{Vector{1, 2}, Vector{3, 4}};
    EXPECT_EQ(last_hidden_head(hs), (Vector{3, 4}));
    EXPECT_THROW(last_hidden_head(std::vector<Vector>{}), std::invalid_argument);
    const auto back = last_hidden_backward(3, Vector{5, 6});
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(back[0], Vector(2, 0.0));
    EXPECT_EQ(back[2], (Vector{5, 6}));
}

TEST(Softmax, MatchesOracleAndSumsToOne) {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const Vector z = fixtures::random_vector(3, rng, 5.0);
        const Vector p = softmax(z);
        const auto want = oracle::softmax(oracle::to_vec(z));
        double total = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            EXPECT_NEAR(p[i], want[i], 1e-15);
            total += p[i];
        }
        EXPECT_NEAR(total, 1.0, 1e-15);
    }
}

TEST(Softmax, StableForLargeLogits) {
    const Vector p = softmax(Vector{1000, 1001, 999});
    for (double v : p) EXPECT_TRUE(std::isfinite(v));
    const auto want = oracle::softmax({-1, 0, -2});
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(p[i], want[i], 1e-15);
    const Vector q = softmax(Vector{-1000, 0, -1000});
    EXPECT_EQ(q[1], 1.0);
    EXPECT_GE(q[0], 0.0);
}

TEST(Classifier, LogitsAndShapeChecks) {
    ClassifierParams p(2);
    p.weight = Matrix{{1, 0}, {0, 1}, {1, 1}};
    p.bias = Vector{0, 0, -1};
    EXPECT_EQ(classifier_logits(Vector{2, 3}, p), (Vector{2, 3, 4}));
    EXPECT_THROW(classifier_logits(Vector{1, 2, 3}, p), ShapeError);
    ClassifierParams bad;
    bad.weight = Matrix(2, 2);
    bad.bias = Vector(2);
    EXPECT_THROW(classifier_logits(Vector{1, 2}, bad), ShapeError);
}

TEST(Classifier, BackwardMatchesFiniteDifferences) {
    Rng rng(5);
    ClassifierParams p(4);
    for (double &v : p.weight.values()) v = rng.uniform(-1, 1);
    for (double &v : p.bias.values()) v = rng.uniform(-1, 1);
    Vector repr = fixtures::random_vector(4, rng);
    const Vector upstream{0.3, -1.1, 0.7};
    auto g = classifier_backward(p, repr, upstream);

    std::vector<ParamView> params{view_of("w", p.weight), view_of("b", p.bias),
                                  view_of("repr", repr)};
    std::vector<ConstParamView> grads{as_const(view_of("w", g.params.weight)),
                                      as_const(view_of("b", g.params.bias)),
                                      as_const(view_of("repr", g.repr))};
    const auto report = grad_check(
        params, grads, [&] { return weighted_sum(classifier_logits(repr, p), upstream); }, 1e-5);
    EXPECT_TRUE(report.passes()) << report.max_relative_error;
}

TEST(Attention, WeightsFormADistribution) {
    Rng rng(7);
    const auto p = random_attention(4, 4, 4, rng);
    const auto hs = random_states(6, 4, rng);
    const auto out = atae_attention_head(hs, fixtures::random_vector(4, rng), p);
    ASSERT_EQ(out.weights.dim(), 6u);
    double total = 0;
    for (double w : out.weights) {
        EXPECT_GT(w, 0.0);
        total += w;
    }
    EXPECT_NEAR(total, 1.0, 1e-14);
    EXPECT_EQ(out.repr.dim(), 4u);
    for (double v : out.repr) EXPECT_LT(std::abs(v), 1.0);
}

TEST(Attention, ScoreDependsOnlyOnOwnPosition) {
    Rng rng(9);
    const auto p = random_attention(3, 3, 3, rng);
    auto hs = random_states(4, 3, rng);
    const Vector a = fixtures::random_vector(3, rng);
    const Vector before = attention_scores(hs, a, p);
    hs[2] = fixtures::random_vector(3, rng);
    const Vector after = attention_scores(hs, a, p);
    for (std::size_t t : {0u, 1u, 3u}) EXPECT_EQ(before[t], after[t]);
    EXPECT_NE(before[2], after[2]);
}

TEST(Attention, ShapeErrors) {
    Rng rng(11);
    const auto p = random_attention(3, 3, 3, rng);
    const auto hs = random_states(2, 3, rng);
    EXPECT_THROW(atae_attention_head(hs, Vector(4), p), ShapeError);
    EXPECT_THROW(atae_attention_head(random_states(2, 4, rng), Vector(3), p), ShapeError);
    EXPECT_THROW(atae_attention_head(std::vector<Vector>{}, Vector(3), p), std::invalid_argument);
}

TEST(Attention, BackwardMatchesFiniteDifferences) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed * 13);
        auto p = random_attention(4, 3, 5, rng);
        auto hs = random_states(5, 4, rng);
        Vector a = fixtures::random_vector(3, rng);
        const Vector upstream = fixtures::random_vector(5, rng);
        const auto out = atae_attention_head(hs, a, p);
        auto g = attention_backward(p, out.cache, upstream);

        std::vector<ParamView> params{view_of("hidden_proj", p.hidden_proj),
                                      view_of("aspect_proj", p.aspect_proj),
                                      view_of("score", p.score),
                                      view_of("pooled_proj", p.pooled_proj),
                                      view_of("last_proj", p.last_proj), view_of("A", a)};
        std::vector<ParamView> grads{view_of("hidden_proj", g.params.hidden_proj),
                                     view_of("aspect_proj", g.params.aspect_proj),
                                     view_of("score", g.params.score),
                                     view_of("pooled_proj", g.params.pooled_proj),
                                     view_of("last_proj", g.params.last_proj),
                                     view_of("A", g.aspect)};
        for (std::size_t t = 0; t < hs.size(); ++t) {
            params.push_back(view_of("h" + std::to_string(t), hs[t]));
            grads.push_back(view_of("h" + std::to_string(t), g.hidden[t]));
        }
        std::vector<ConstParamView> cgrads;
        for (const auto &v : grads) cgrads.push_back(as_const(v));
        const auto report = grad_check(
            params, cgrads,
            [&] { return weighted_sum(atae_attention_head(hs, a, p).repr, upstream); }, 1e-5);
        EXPECT_TRUE(report.passes()) << "seed " << seed << ": " << report.max_relative_error
                                     << " at " << report.worst_param;
    }
}

// The aspect half of every score is the same constant w_a · tanh(W_v A),
// which the softmax removes.
TEST(Attention, AspectTermCancelsInSoftmax) {
    Rng rng(15);
    const auto p = random_attention(3, 3, 3, rng);
    const auto hs = random_states(4, 3, rng);
    const auto o1 = atae_attention_head(hs, fixtures::random_vector(3, rng), p);
    const auto o2 = atae_attention_head(hs, fixtures::random_vector(3, rng, 4.0), p);
    for (std::size_t t = 0; t < 4; ++t) EXPECT_NEAR(o1.weights[t], o2.weights[t], 1e-14);
}
