#include "aalstm/training.hpp"

#include <algorithm>
#include <cmath>

namespace aalstm {

double cross_entropy(const Vector &probs, std::size_t gold) {
    if (gold >= probs.dim()) {
        throw std::invalid_argument("cross_entropy: gold class " + std::to_string(gold) +
                                    " out of range for " + std::to_string(probs.dim()) +
                                    " classes");
    }
    return -std::log(std::max(probs[gold], 1e-12));
}

long double cross_entropy_extended(const Vector &logits, std::size_t gold) {
    if (gold >= logits.dim()) {
        throw std::invalid_argument("cross_entropy_extended: gold class " + std::to_string(gold) +
                                    " out of range for " + std::to_string(logits.dim()) +
                                    " classes");
    }
    const long double top = *std::max_element(logits.begin(), logits.end());
    long double total = 0.0L;
    for (double z : logits) {
        total += std::exp(static_cast<long double>(z) - top);
    }
    return top + std::log(total) - static_cast<long double>(logits[gold]);
}

long double l2_penalty_extended(std::span<const ConstParamView> params, double coeff) {
    if (coeff < 0.0) {
        throw std::invalid_argument("l2_penalty: coefficient must be non-negative");
    }
    long double total = 0.0L;
    for (const auto &p : params) {
        if (p.kind == ParamKind::Weight) {
            for (double x : p.values) {
                total += static_cast<long double>(x) * x;
            }
        }
    }
    return coeff * total;
}

double l2_penalty(std::span<const ConstParamView> params, double coeff,
                  std::span<const ParamView> grads) {
    if (coeff < 0.0) {
        throw std::invalid_argument("l2_penalty: coefficient must be non-negative");
    }
    if (!grads.empty() && grads.size() != params.size()) {
        throw std::invalid_argument("l2_penalty: gradient layout does not match parameters");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].kind != ParamKind::Weight) {
            continue;
        }
        const auto w = params[i].values;
        for (double x : w) {
            total += x * x;
        }
        if (!grads.empty() && coeff != 0.0) {
            auto g = grads[i].values;
            if (g.size() != w.size()) {
                throw std::invalid_argument("l2_penalty: gradient for " + params[i].name +
                                            " has the wrong size");
            }
            for (std::size_t j = 0; j < w.size(); ++j) {
                g[j] += 2.0 * coeff * w[j];
            }
        }
    }
    return coeff * total;
}

DropoutResult dropout(const Vector &v, double p, DropoutMode mode, Rng &rng) {
    if (!(p >= 0.0 && p < 1.0)) {
        throw std::invalid_argument("dropout: p must lie in [0, 1)");
    }
    if (mode == DropoutMode::Eval || p == 0.0) {
        return {v, Vector(v.dim(), 1.0)};
    }
    const double keep_scale = 1.0 / (1.0 - p);
    DropoutResult r{Vector(v.dim()), Vector(v.dim())};
    for (std::size_t i = 0; i < v.dim(); ++i) {
        r.mask[i] = rng.bernoulli(p) ? 0.0 : keep_scale;
        r.output[i] = v[i] * r.mask[i];
    }
    return r;
}

void adam_step(std::span<const ParamView> params, std::span<const ConstParamView> grads,
               AdamState &state, double learning_rate, const std::vector<bool> &skip) {
    if (params.size() != grads.size()) {
        throw std::invalid_argument("adam_step: " + std::to_string(params.size()) +
                                    " parameters but " + std::to_string(grads.size()) +
                                    " gradients");
    }
    if (!skip.empty() && skip.size() != params.size()) {
        throw std::invalid_argument("adam_step: skip mask has the wrong length");
    }
    if (state.first_moment.empty()) {
        for (const auto &p : params) {
            state.first_moment.emplace_back(p.values.size(), 0.0);
            state.second_moment.emplace_back(p.values.size(), 0.0);
        }
    }
    if (state.first_moment.size() != params.size()) {
        throw std::invalid_argument("adam_step: optimizer state tracks a different parameter set");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto n = params[i].values.size();
        if (grads[i].values.size() != n || state.first_moment[i].size() != n) {
            throw std::invalid_argument("adam_step: shape mismatch for " + params[i].name);
        }
    }

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(state.beta1, t);
    const double correction2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!skip.empty() && skip[i]) {
            continue;
        }
        auto theta = params[i].values;
        const auto g = grads[i].values;
        auto &m = state.first_moment[i];
        auto &v = state.second_moment[i];
        for (std::size_t j = 0; j < theta.size(); ++j) {
            m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g[j];
            v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g[j] * g[j];
            const double m_hat = m[j] / correction1;
            const double v_hat = v[j] / correction2;
            theta[j] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
        }
    }
}

GradCheckReport grad_check(std::span<const ParamView> params,
                           std::span<const ConstParamView> analytic,
                           const std::function<long double()> &loss, double epsilon, double floor) {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("grad_check: epsilon must be positive");
    }
    if (params.size() != analytic.size()) {
        throw std::invalid_argument("grad_check: gradient layout does not match parameters");
    }
    GradCheckReport report;
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto theta = params[i].values;
        const auto grad = analytic[i].values;
        if (grad.size() != theta.size()) {
            throw std::invalid_argument("grad_check: size mismatch for " + params[i].name);
        }
        for (std::size_t j = 0; j < theta.size(); ++j) {
            const double saved = theta[j];
            theta[j] = saved + epsilon;
            const long double up = loss();
            theta[j] = saved - epsilon;
            const long double down = loss();
            theta[j] = saved;

            const double numeric = static_cast<double>((up - down) / (2.0L * epsilon));
            const double scale = std::max(std::abs(numeric), std::abs(grad[j]));
            ++report.total;
            if (scale <= floor) {
                report.max_absolute_error_below_floor =
                    std::max(report.max_absolute_error_below_floor, std::abs(numeric - grad[j]));
                continue;
            }
            ++report.checked;
            const double rel = std::abs(numeric - grad[j]) / scale;
            if (rel > report.max_relative_error || !std::isfinite(rel)) {
                report.max_relative_error = std::isfinite(rel) ? rel : INFINITY;
                report.worst_param = params[i].name;
                report.worst_index = j;
                report.worst_analytic = grad[j];
                report.worst_numeric = numeric;
            }
        }
    }
    return report;
}

} // namespace aalstm
