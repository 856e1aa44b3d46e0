#pragma once

#include <span>
#include <vector>

#include "aalstm/tensor.hpp"

namespace aalstm {

inline constexpr std::size_t kNumClasses = 3;

enum class HeadKind { LastHidden, Attention };

// Attention head following the cited ATAE design:
//   score_t = w · tanh([W_h h_t ; W_v A])
//   alpha   = softmax(score)
//   r       = sum_t alpha_t h_t
//   repr    = tanh(W_p r + W_x h_T)
struct AttentionParams {
    Matrix hidden_proj; // W_h, dc x dc
    Matrix aspect_proj; // W_v, da x da
    Vector score;       // w, dc + da
    Matrix pooled_proj; // W_p, dr x dc
    Matrix last_proj;   // W_x, dr x dc

    AttentionParams() = default;
    AttentionParams(std::size_t hidden_dim, std::size_t aspect_dim, std::size_t repr_dim);

    std::size_t hidden_dim() const { return hidden_proj.rows(); }
    std::size_t aspect_dim() const { return aspect_proj.rows(); }
    std::size_t repr_dim() const { return pooled_proj.rows(); }
};

struct ClassifierParams {
    Matrix weight; // 3 x dr
    Vector bias;   // 3

    ClassifierParams() = default;
    explicit ClassifierParams(std::size_t repr_dim)
        : weight(kNumClasses, repr_dim), bias(kNumClasses) {}
};

// Returns the final hidden state unchanged.
const Vector &last_hidden_head(std::span<const Vector> hs);

struct AttentionCache {
    std::vector<Vector> hidden;
    Vector aspect;
    std::vector<Vector> mixed; // tanh([W_h h_t ; W_v A])
    Vector scores;
    Vector weights;
    Vector pooled; // r
    Vector repr;
};

struct AttentionOutput {
    Vector repr;
    Vector weights;
    AttentionCache cache;
};

AttentionOutput atae_attention_head(std::span<const Vector> hs, const Vector &aspect,
                                    const AttentionParams &p);

// Unnormalized attention scores; each entry depends only on its own h_t.
Vector attention_scores(std::span<const Vector> hs, const Vector &aspect,
                        const AttentionParams &p);

struct AttentionGradients {
    AttentionParams params;
    std::vector<Vector> hidden;
    Vector aspect;
};

AttentionGradients attention_backward(const AttentionParams &p, const AttentionCache &cache,
                                      const Vector &d_repr);

// Routes d_repr to the last position; every other position gets zeros.
std::vector<Vector> last_hidden_backward(std::size_t seq_len, const Vector &d_repr);

Vector softmax(const Vector &logits);
Vector classifier_logits(const Vector &repr, const ClassifierParams &p);
Vector softmax_classify(const Vector &repr, const ClassifierParams &p);

struct ClassifierGradients {
    ClassifierParams params;
    Vector repr;
};

// Backward through logits given dL/dlogits.
ClassifierGradients classifier_backward(const ClassifierParams &p, const Vector &repr,
                                        const Vector &d_logits);

} // namespace aalstm
