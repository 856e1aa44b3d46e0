#include "aalstm/heads.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aalstm {

AttentionParams::AttentionParams(std::size_t hidden_dim, std::size_t aspect_dim,
                                 std::size_t repr_dim)
    : hidden_proj(hidden_dim, hidden_dim), aspect_proj(aspect_dim, aspect_dim),
      score(hidden_dim + aspect_dim), pooled_proj(repr_dim, hidden_dim),
      last_proj(repr_dim, hidden_dim) {}

const Vector &last_hidden_head(std::span<const Vector> hs) {
    if (hs.empty()) {
        throw std::invalid_argument("last_hidden_head: empty hidden-state list");
    }
    return hs.back();
}

std::vector<Vector> last_hidden_backward(std::size_t seq_len, const Vector &d_repr) {
    if (seq_len == 0) {
        throw std::invalid_argument("last_hidden_backward: empty sequence");
    }
    std::vector<Vector> out(seq_len, Vector(d_repr.dim()));
    out.back() = d_repr;
    return out;
}

Vector softmax(const Vector &logits) {
    if (logits.empty()) {
        return {};
    }
    const double peak = *std::max_element(logits.begin(), logits.end());
    Vector out(logits.dim());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.dim(); ++i) {
        out[i] = std::exp(logits[i] - peak);
        total += out[i];
    }
    for (double &x : out) {
        x /= total;
    }
    return out;
}

namespace {

void check_attention_inputs(std::span<const Vector> hs, const Vector &aspect,
                            const AttentionParams &p) {
    if (hs.empty()) {
        throw std::invalid_argument("attention head: empty hidden-state list");
    }
    if (aspect.dim() != p.aspect_dim()) {
        throw ShapeError("attention head: aspect " + shape_string(aspect) +
                         " vs aspect projection " + shape_string(p.aspect_proj));
    }
    if (p.score.dim() != p.hidden_dim() + p.aspect_dim()) {
        throw ShapeError("attention head: score vector " + shape_string(p.score));
    }
}

// tanh([W_h h_t ; W_v A]) for every t.
std::vector<Vector> mix(std::span<const Vector> hs, const Vector &aspect_part,
                        const AttentionParams &p) {
    std::vector<Vector> mixed;
    mixed.reserve(hs.size());
    for (const Vector &h : hs) {
        mixed.push_back(tanh_v(concat(matvec(p.hidden_proj, h), aspect_part)));
    }
    return mixed;
}

} // namespace

Vector attention_scores(std::span<const Vector> hs, const Vector &aspect,
                        const AttentionParams &p) {
    check_attention_inputs(hs, aspect, p);
    const auto mixed = mix(hs, matvec(p.aspect_proj, aspect), p);
    Vector scores(hs.size());
    for (std::size_t t = 0; t < hs.size(); ++t) {
        scores[t] = dot(p.score, mixed[t]);
    }
    return scores;
}

AttentionOutput atae_attention_head(std::span<const Vector> hs, const Vector &aspect,
                                    const AttentionParams &p) {
    check_attention_inputs(hs, aspect, p);
    AttentionCache k;
    k.hidden.assign(hs.begin(), hs.end());
    k.aspect = aspect;
    k.mixed = mix(hs, matvec(p.aspect_proj, aspect), p);
    k.scores = Vector(hs.size());
    for (std::size_t t = 0; t < hs.size(); ++t) {
        k.scores[t] = dot(p.score, k.mixed[t]);
    }
    k.weights = softmax(k.scores);
    k.pooled = Vector(hs.front().dim());
    for (std::size_t t = 0; t < hs.size(); ++t) {
        axpy(k.weights[t], hs[t], k.pooled);
    }
    k.repr = tanh_v(add(matvec(p.pooled_proj, k.pooled), matvec(p.last_proj, hs.back())));
    Vector repr = k.repr;
    Vector weights = k.weights;
    return {std::move(repr), std::move(weights), std::move(k)};
}

AttentionGradients attention_backward(const AttentionParams &p, const AttentionCache &k,
                                      const Vector &d_repr) {
    const std::size_t steps = k.hidden.size();
    if (steps == 0 || k.mixed.size() != steps || k.weights.dim() != steps) {
        throw std::invalid_argument("attention_backward: cache is inconsistent");
    }
    if (d_repr.dim() != p.repr_dim()) {
        throw std::invalid_argument("attention_backward: upstream " + shape_string(d_repr) +
                                    " does not match repr dim " +
                                    std::to_string(p.repr_dim()));
    }
    const std::size_t dc = p.hidden_dim();
    const std::size_t da = p.aspect_dim();

    AttentionGradients g{AttentionParams(dc, da, p.repr_dim()),
                         std::vector<Vector>(steps, Vector(dc)), Vector(da)};

    Vector dq(d_repr.dim());
    for (std::size_t i = 0; i < dq.dim(); ++i) {
        dq[i] = d_repr[i] * (1.0 - k.repr[i] * k.repr[i]);
    }
    add_outer(g.params.pooled_proj, dq, k.pooled);
    add_outer(g.params.last_proj, dq, k.hidden.back());
    const Vector d_pooled = matvec_transposed(p.pooled_proj, dq);
    axpy(1.0, matvec_transposed(p.last_proj, dq), g.hidden.back());

    // Softmax Jacobian: ds_t = alpha_t (d_alpha_t - sum_k alpha_k d_alpha_k)
    Vector d_alpha(steps);
    double expected = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
        d_alpha[t] = dot(d_pooled, k.hidden[t]);
        expected += k.weights[t] * d_alpha[t];
        axpy(k.weights[t], d_pooled, g.hidden[t]);
    }

    Vector d_aspect_part(da);
    for (std::size_t t = 0; t < steps; ++t) {
        const double ds = k.weights[t] * (d_alpha[t] - expected);
        if (ds == 0.0) {
            continue;
        }
        axpy(ds, k.mixed[t], g.params.score);
        Vector d_pre(dc + da);
        for (std::size_t i = 0; i < d_pre.dim(); ++i) {
            const double m = k.mixed[t][i];
            d_pre[i] = ds * p.score[i] * (1.0 - m * m);
        }
        auto [d_hidden_part, d_aspect_t] = split(d_pre, dc);
        add_outer(g.params.hidden_proj, d_hidden_part, k.hidden[t]);
        axpy(1.0, matvec_transposed(p.hidden_proj, d_hidden_part), g.hidden[t]);
        axpy(1.0, d_aspect_t, d_aspect_part);
    }
    add_outer(g.params.aspect_proj, d_aspect_part, k.aspect);
    g.aspect = matvec_transposed(p.aspect_proj, d_aspect_part);
    return g;
}

Vector classifier_logits(const Vector &repr, const ClassifierParams &p) {
    if (p.weight.rows() != kNumClasses || p.bias.dim() != kNumClasses) {
        throw ShapeError("classifier must have exactly 3 outputs, got " + shape_string(p.weight));
    }
    return add(matvec(p.weight, repr), p.bias);
}

Vector softmax_classify(const Vector &repr, const ClassifierParams &p) {
    return softmax(classifier_logits(repr, p));
}

ClassifierGradients classifier_backward(const ClassifierParams &p, const Vector &repr,
                                        const Vector &d_logits) {
    ClassifierGradients g{ClassifierParams(p.weight.cols()), Vector()};
    add_outer(g.params.weight, d_logits, repr);
    g.params.bias = d_logits;
    g.repr = matvec_transposed(p.weight, d_logits);
    return g;
}

} // namespace aalstm
