#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "aalstm/params.hpp"
#include "aalstm/tensor.hpp"

namespace aalstm {

// -log(probs[gold]) with probabilities floored at 1e-12.
double cross_entropy(const Vector &probs, std::size_t gold);

// Cross-entropy computed from logits with a long double log-sum-exp.
long double cross_entropy_extended(const Vector &logits, std::size_t gold);

// coeff * sum ||W||_F^2 over the Weight-kind views. When `grads` is given
// (same layout as params), 2 * coeff * W is added to the matching entries.
double l2_penalty(std::span<const ConstParamView> params, double coeff,
                  std::span<const ParamView> grads = {});

// Same penalty, summed in long double.
long double l2_penalty_extended(std::span<const ConstParamView> params, double coeff);

enum class DropoutMode { Train, Eval };

struct DropoutResult {
    Vector output;
    Vector mask; // per-entry multiplier: 0 or 1/(1-p); all ones in eval mode
};

// Inverted dropout.
DropoutResult dropout(const Vector &v, double p, DropoutMode mode, Rng &rng);

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step = 0;
    std::vector<std::vector<double>> first_moment;
    std::vector<std::vector<double>> second_moment;
};

// One bias-corrected Adam update. `skip[i]`, when provided, freezes view i
// (its moments are left untouched).
void adam_step(std::span<const ParamView> params, std::span<const ConstParamView> grads,
               AdamState &state, double learning_rate, const std::vector<bool> &skip = {});

struct GradCheckReport {
    double max_relative_error = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
    std::size_t checked = 0; // coordinates above the magnitude floor
    std::size_t total = 0;
    // Largest |numeric - analytic| among coordinates under the floor.
    double max_absolute_error_below_floor = 0.0;

    bool passes(double rel_tol = 1e-4, double abs_tol = 1e-9) const {
        return max_relative_error < rel_tol && max_absolute_error_below_floor <= abs_tol;
    }
};

// Compares analytic gradients against central differences
// (L(θ+ε) - L(θ-ε)) / 2ε for every coordinate of every view. Coordinates
// where both magnitudes are at or below `floor` only contribute to the
// absolute error figure. A loss rounded to double leaves about 1e-11 of
// noise in each quotient at ε = 1e-5, so `loss` should do its final
// reduction in long double (see the *_extended helpers).
GradCheckReport grad_check(std::span<const ParamView> params,
                           std::span<const ConstParamView> analytic,
                           const std::function<long double()> &loss, double epsilon,
                           double floor = 1e-8);

} // namespace aalstm
