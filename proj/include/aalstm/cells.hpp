#pragma once

#include <optional>
#include <span>
#include <vector>

#include "aalstm/tensor.hpp"

namespace aalstm {

// One affine map W·z + b feeding a gate.
struct Gate {
    Matrix weight;
    Vector bias;

    Gate() = default;
    Gate(std::size_t out_dim, std::size_t in_dim) : weight(out_dim, in_dim), bias(out_dim) {}

    Vector affine(const Vector &z) const;
};

// Standard (no-peephole) LSTM. Every gate reads [x_t, h_{t-1}].
struct ClassicLstmParams {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    Gate input;     // I_t
    Gate forget;    // f_t
    Gate candidate; // C~_t
    Gate output;    // o_t

    ClassicLstmParams() = default;
    ClassicLstmParams(std::size_t input_dim, std::size_t hidden_dim);

    void validate() const;
};

// Aspect-aware LSTM. The core gates are those of the classic cell; three
// aspect gates read [A, h_{t-1}] and scale how much of the aspect vector A
// is added to the pre-activations of the input, forget and output gates.
// The candidate cell never sees A.
struct AALstmParams {
    ClassicLstmParams core;
    std::size_t aspect_dim = 0;
    Gate aspect_input;  // a_i
    Gate aspect_forget; // a_f
    Gate aspect_output; // a_o

    AALstmParams() = default;
    // Throws ConfigError unless aspect_dim == hidden_dim.
    AALstmParams(std::size_t input_dim, std::size_t hidden_dim, std::size_t aspect_dim);

    std::size_t input_dim() const { return core.input_dim; }
    std::size_t hidden_dim() const { return core.hidden_dim; }

    void validate() const;
};

struct CellState {
    Vector h;
    Vector c;

    static CellState zeros(std::size_t hidden_dim) {
        return {Vector(hidden_dim), Vector(hidden_dim)};
    }
};

// Everything one step computed, kept for the backward pass. Aspect fields
// are empty for the classic cell.
struct StepCache {
    Vector x;
    Vector aspect;
    Vector h_prev;
    Vector c_prev;
    Vector xh; // [x_t, h_{t-1}]
    Vector ah; // [A, h_{t-1}]
    Vector aspect_input_gate;
    Vector aspect_forget_gate;
    Vector aspect_output_gate;
    Vector input_gate;
    Vector forget_gate;
    Vector output_gate;
    Vector candidate;
    Vector c;
    Vector tanh_c;
    Vector h;
};

struct StepResult {
    CellState state;
    StepCache cache;
};

StepResult aa_lstm_step(const AALstmParams &p, const Vector &x, const Vector &aspect,
                        const CellState &prev);
StepResult classic_lstm_step(const ClassicLstmParams &p, const Vector &x, const CellState &prev);

enum class CellKind { Classic, AspectAware };

// Read-only reference to whichever parameter set drives an unroll.
class CellParamsRef {
  public:
    CellParamsRef(const ClassicLstmParams &p) : classic_(&p) {}
    CellParamsRef(const AALstmParams &p) : aware_(&p) {}

    CellKind kind() const { return aware_ ? CellKind::AspectAware : CellKind::Classic; }
    const ClassicLstmParams &core() const { return aware_ ? aware_->core : *classic_; }
    const AALstmParams *aspect_aware() const { return aware_; }

  private:
    const ClassicLstmParams *classic_ = nullptr;
    const AALstmParams *aware_ = nullptr;
};

struct UnrollResult {
    std::vector<Vector> hidden;
    std::vector<StepCache> caches;
};

// Runs the cell over xs. The aspect vector is required for the aspect-aware
// cell and must be absent for the classic one. Missing init means zero state.
UnrollResult unroll(CellParamsRef params, std::span<const Vector> xs,
                    const std::optional<Vector> &aspect = std::nullopt,
                    const std::optional<CellState> &init = std::nullopt);

template <typename Params> struct CellGradients {
    Params params;              // dL/dθ, accumulated over time
    std::vector<Vector> inputs; // dL/dx_t
    Vector aspect;              // dL/dA summed over steps (empty for classic)
    CellState initial;          // dL/dh_0, dL/dC_0
};

// Backpropagation through time. dh[t] is the loss gradient arriving at h_t
// from outside the recurrence (heads, losses).
CellGradients<AALstmParams> aa_lstm_backward(const AALstmParams &p,
                                             std::span<const StepCache> caches,
                                             std::span<const Vector> dh);
CellGradients<ClassicLstmParams> classic_lstm_backward(const ClassicLstmParams &p,
                                                       std::span<const StepCache> caches,
                                                       std::span<const Vector> dh);

} // namespace aalstm
