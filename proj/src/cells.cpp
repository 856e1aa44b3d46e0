#include "aalstm/cells.hpp"

#include <cmath>
#include <string>
#include <type_traits>

namespace aalstm {

Vector Gate::affine(const Vector &z) const { return add(matvec(weight, z), bias); }

namespace {

void check_gate(const Gate &g, std::size_t rows, std::size_t cols, const char *name) {
    if (g.weight.rows() != rows || g.weight.cols() != cols || g.bias.dim() != rows) {
        throw ConfigError(std::string("gate ") + name + ": weight " + shape_string(g.weight) +
                          " bias " + shape_string(g.bias) + ", expected (" +
                          std::to_string(rows) + "x" + std::to_string(cols) + ")");
    }
}

void check_state(const CellState &s, std::size_t hidden) {
    if (s.h.dim() != hidden || s.c.dim() != hidden) {
        throw ShapeError("cell state " + shape_string(s.h) + "/" + shape_string(s.c) +
                         " does not match hidden dim " + std::to_string(hidden));
    }
}

// Derivative helpers expressed through the activation output.
Vector sigmoid_grad(const Vector &upstream, const Vector &y) {
    Vector out(y.dim());
    for (std::size_t i = 0; i < y.dim(); ++i) {
        out[i] = upstream[i] * y[i] * (1.0 - y[i]);
    }
    return out;
}

Vector tanh_grad(const Vector &upstream, const Vector &y) {
    Vector out(y.dim());
    for (std::size_t i = 0; i < y.dim(); ++i) {
        out[i] = upstream[i] * (1.0 - y[i] * y[i]);
    }
    return out;
}

// Shared forward. `aware` is null for the classic cell.
StepResult step_impl(const ClassicLstmParams &core, const AALstmParams *aware, const Vector &x,
                     const Vector *aspect, const CellState &prev) {
    if (x.dim() != core.input_dim) {
        throw ShapeError("cell step: input " + shape_string(x) + " expected dim " +
                         std::to_string(core.input_dim));
    }
    check_state(prev, core.hidden_dim);

    StepCache k;
    k.x = x;
    k.h_prev = prev.h;
    k.c_prev = prev.c;
    k.xh = concat(x, prev.h);

    Vector pre_input = core.input.affine(k.xh);
    Vector pre_forget = core.forget.affine(k.xh);
    Vector pre_output = core.output.affine(k.xh);

    if (aware) {
        if (aspect->dim() != aware->aspect_dim) {
            throw ShapeError("aa_lstm_step: aspect " + shape_string(*aspect) + " expected dim " +
                             std::to_string(aware->aspect_dim));
        }
        k.aspect = *aspect;
        k.ah = concat(*aspect, prev.h);
        k.aspect_input_gate = sigmoid(aware->aspect_input.affine(k.ah));
        k.aspect_forget_gate = sigmoid(aware->aspect_forget.affine(k.ah));
        k.aspect_output_gate = sigmoid(aware->aspect_output.affine(k.ah));
        pre_input = add(pre_input, hadamard(k.aspect_input_gate, *aspect));
        pre_forget = add(pre_forget, hadamard(k.aspect_forget_gate, *aspect));
        pre_output = add(pre_output, hadamard(k.aspect_output_gate, *aspect));
    }

    k.input_gate = sigmoid(pre_input);
    k.forget_gate = sigmoid(pre_forget);
    k.candidate = tanh_v(core.candidate.affine(k.xh));
    k.c = add(hadamard(k.forget_gate, prev.c), hadamard(k.input_gate, k.candidate));
    k.output_gate = sigmoid(pre_output);
    k.tanh_c = tanh_v(k.c);
    k.h = hadamard(k.output_gate, k.tanh_c);

    CellState next{k.h, k.c};
    return {std::move(next), std::move(k)};
}

void zero_like(Gate &g) {
    g.weight.fill(0.0);
    g.bias.fill(0.0);
}

// Accumulates the gradient of a gate whose pre-activation gradient is dz and
// whose affine input was z; returns dL/dz.
Vector gate_backward(const Gate &g, Gate &grad, const Vector &dz, const Vector &z) {
    add_outer(grad.weight, dz, z);
    axpy(1.0, dz, grad.bias);
    return matvec_transposed(g.weight, dz);
}

template <typename Params>
CellGradients<Params> backward_impl(const ClassicLstmParams &core, const AALstmParams *aware,
                                    Params grads, std::span<const StepCache> caches,
                                    std::span<const Vector> dh) {
    if (caches.size() != dh.size()) {
        throw std::invalid_argument("cell backward: " + std::to_string(caches.size()) +
                                    " caches but " + std::to_string(dh.size()) +
                                    " hidden-state gradients");
    }
    const std::size_t hidden = core.hidden_dim;
    const std::size_t in_dim = core.input_dim;

    // Gradients share the parameter layout; start from a zeroed copy.
    CellGradients<Params> out{std::move(grads), std::vector<Vector>(caches.size()),
                              aware ? Vector(aware->aspect_dim) : Vector(),
                              CellState::zeros(hidden)};
    ClassicLstmParams *gcore;
    AALstmParams *gaware = nullptr;
    if constexpr (std::is_same_v<Params, AALstmParams>) {
        gaware = &out.params;
        gcore = &out.params.core;
        zero_like(gaware->aspect_input);
        zero_like(gaware->aspect_forget);
        zero_like(gaware->aspect_output);
    } else {
        gcore = &out.params;
    }
    zero_like(gcore->input);
    zero_like(gcore->forget);
    zero_like(gcore->candidate);
    zero_like(gcore->output);

    Vector dh_next(hidden);
    Vector dc_next(hidden);
    for (std::size_t step = caches.size(); step-- > 0;) {
        const StepCache &k = caches[step];
        if (dh[step].dim() != hidden) {
            throw ShapeError("cell backward: dh[" + std::to_string(step) + "] " +
                             shape_string(dh[step]));
        }
        const Vector dh_t = add(dh[step], dh_next);

        // h = o ⊙ tanh(C)
        const Vector d_output = hadamard(dh_t, k.tanh_c);
        Vector dc = add(dc_next, tanh_grad(hadamard(dh_t, k.output_gate), k.tanh_c));

        // C = f ⊙ C_prev + I ⊙ C~
        const Vector d_input = hadamard(dc, k.candidate);
        const Vector d_forget = hadamard(dc, k.c_prev);
        const Vector d_candidate = hadamard(dc, k.input_gate);
        dc_next = hadamard(dc, k.forget_gate);

        const Vector dz_input = sigmoid_grad(d_input, k.input_gate);
        const Vector dz_forget = sigmoid_grad(d_forget, k.forget_gate);
        const Vector dz_output = sigmoid_grad(d_output, k.output_gate);
        const Vector dz_candidate = tanh_grad(d_candidate, k.candidate);

        Vector dxh = gate_backward(core.input, gcore->input, dz_input, k.xh);
        axpy(1.0, gate_backward(core.forget, gcore->forget, dz_forget, k.xh), dxh);
        axpy(1.0, gate_backward(core.candidate, gcore->candidate, dz_candidate, k.xh), dxh);
        axpy(1.0, gate_backward(core.output, gcore->output, dz_output, k.xh), dxh);

        auto [dx, dh_prev] = split(dxh, in_dim);

        if (aware) {
            // pre_gate += a ⊙ A, with a = σ(W_a [A, h_prev] + b_a)
            const struct {
                const Gate &param;
                Gate &grad;
                const Vector &dz_core;
                const Vector &gate;
            } paths[] = {
                {aware->aspect_input, gaware->aspect_input, dz_input, k.aspect_input_gate},
                {aware->aspect_forget, gaware->aspect_forget, dz_forget, k.aspect_forget_gate},
                {aware->aspect_output, gaware->aspect_output, dz_output, k.aspect_output_gate},
            };
            Vector dah(aware->aspect_dim + hidden);
            for (const auto &path : paths) {
                axpy(1.0, hadamard(path.dz_core, path.gate), out.aspect);
                const Vector dz_a = sigmoid_grad(hadamard(path.dz_core, k.aspect), path.gate);
                axpy(1.0, gate_backward(path.param, path.grad, dz_a, k.ah), dah);
            }
            auto [d_aspect, dh_from_aspect] = split(dah, aware->aspect_dim);
            axpy(1.0, d_aspect, out.aspect);
            axpy(1.0, dh_from_aspect, dh_prev);
        }

        out.inputs[step] = std::move(dx);
        dh_next = std::move(dh_prev);
    }
    out.initial = {std::move(dh_next), std::move(dc_next)};
    return out;
}

} // namespace

ClassicLstmParams::ClassicLstmParams(std::size_t input_dim, std::size_t hidden_dim)
    : input_dim(input_dim), hidden_dim(hidden_dim), input(hidden_dim, input_dim + hidden_dim),
      forget(hidden_dim, input_dim + hidden_dim), candidate(hidden_dim, input_dim + hidden_dim),
      output(hidden_dim, input_dim + hidden_dim) {
    if (hidden_dim == 0) {
        throw ConfigError("LSTM hidden dim must be positive");
    }
}

void ClassicLstmParams::validate() const {
    const std::size_t cols = input_dim + hidden_dim;
    check_gate(input, hidden_dim, cols, "input");
    check_gate(forget, hidden_dim, cols, "forget");
    check_gate(candidate, hidden_dim, cols, "candidate");
    check_gate(output, hidden_dim, cols, "output");
}

AALstmParams::AALstmParams(std::size_t input_dim, std::size_t hidden_dim, std::size_t aspect_dim)
    : core(input_dim, hidden_dim), aspect_dim(aspect_dim) {
    if (aspect_dim != hidden_dim) {
        throw ConfigError("aspect-aware LSTM requires aspect dim == hidden dim, got " +
                          std::to_string(aspect_dim) + " vs " + std::to_string(hidden_dim));
    }
    aspect_input = Gate(aspect_dim, aspect_dim + hidden_dim);
    aspect_forget = Gate(aspect_dim, aspect_dim + hidden_dim);
    aspect_output = Gate(aspect_dim, aspect_dim + hidden_dim);
}

void AALstmParams::validate() const {
    core.validate();
    if (aspect_dim != core.hidden_dim) {
        throw ConfigError("aspect-aware LSTM requires aspect dim == hidden dim");
    }
    const std::size_t cols = aspect_dim + core.hidden_dim;
    check_gate(aspect_input, aspect_dim, cols, "aspect_input");
    check_gate(aspect_forget, aspect_dim, cols, "aspect_forget");
    check_gate(aspect_output, aspect_dim, cols, "aspect_output");
}

StepResult aa_lstm_step(const AALstmParams &p, const Vector &x, const Vector &aspect,
                        const CellState &prev) {
    return step_impl(p.core, &p, x, &aspect, prev);
}

StepResult classic_lstm_step(const ClassicLstmParams &p, const Vector &x, const CellState &prev) {
    return step_impl(p, nullptr, x, nullptr, prev);
}

UnrollResult unroll(CellParamsRef params, std::span<const Vector> xs,
                    const std::optional<Vector> &aspect, const std::optional<CellState> &init) {
    if (xs.empty()) {
        throw std::invalid_argument("unroll: empty input sequence");
    }
    const AALstmParams *aware = params.aspect_aware();
    if (aware && !aspect) {
        throw std::invalid_argument("unroll: aspect-aware cell requires an aspect vector");
    }
    if (!aware && aspect) {
        throw std::invalid_argument("unroll: classic cell does not take an aspect vector");
    }
    const ClassicLstmParams &core = params.core();
    CellState state = init ? *init : CellState::zeros(core.hidden_dim);

    UnrollResult out;
    out.hidden.reserve(xs.size());
    out.caches.reserve(xs.size());
    for (const Vector &x : xs) {
        StepResult r = aware ? aa_lstm_step(*aware, x, *aspect, state)
                             : classic_lstm_step(core, x, state);
        state = std::move(r.state);
        out.hidden.push_back(state.h);
        out.caches.push_back(std::move(r.cache));
    }
    return out;
}

CellGradients<AALstmParams> aa_lstm_backward(const AALstmParams &p,
                                             std::span<const StepCache> caches,
                                             std::span<const Vector> dh) {
    return backward_impl<AALstmParams>(p.core, &p, p, caches, dh);
}

CellGradients<ClassicLstmParams> classic_lstm_backward(const ClassicLstmParams &p,
                                                       std::span<const StepCache> caches,
                                                       std::span<const Vector> dh) {
    return backward_impl<ClassicLstmParams>(p, nullptr, p, caches, dh);
}

} // namespace aalstm
