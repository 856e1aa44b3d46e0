#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "aalstm/cells.hpp"
#include "aalstm/data.hpp"
#include "aalstm/heads.hpp"
#include "aalstm/params.hpp"

namespace aalstm {

std::string_view to_string(CellKind k);
std::string_view to_string(HeadKind k);
std::optional<CellKind> parse_cell_kind(std::string_view s);
std::optional<HeadKind> parse_head_kind(std::string_view s);

struct ModelSpec {
    Task task = Task::Atsa;
    CellKind cell = CellKind::AspectAware;
    HeadKind head = HeadKind::LastHidden;
    std::size_t vocab_size = 0;
    std::size_t input_dim = 0;  // dx, word embedding width
    std::size_t hidden_dim = 0; // dc
    std::size_t aspect_dim = 0; // da

    bool uses_aspect() const {
        return cell == CellKind::AspectAware || head == HeadKind::Attention;
    }
    // Throws ConfigError on inconsistent dimensions.
    void validate() const;

    bool operator==(const ModelSpec &) const = default;
};

using CellParams = std::variant<ClassicLstmParams, AALstmParams>;

// Every trainable tensor of one pipeline. Also used as the gradient buffer.
struct ModelParams {
    ModelSpec spec;
    Matrix embeddings;        // |V| x dx
    Matrix aspect_embeddings; // categories x da; empty for ATSA
    CellParams cell;
    std::optional<AttentionParams> attention;
    ClassifierParams classifier;

    // Zero-filled tensors with the layout implied by spec.
    static ModelParams zeros(const ModelSpec &spec);

    CellParamsRef cell_ref() const;
    std::vector<ParamView> views();
    std::vector<ConstParamView> views() const;
    void set_zero();
};

struct ForwardOptions {
    bool train = false;
    double dropout_p = 0.0;
    bool dropout_embeddings = true;
    bool dropout_repr = true;
    Rng *rng = nullptr; // required when train && dropout_p > 0
};

struct ForwardPass {
    std::vector<std::size_t> token_ids;
    std::vector<Vector> inputs;          // x_t after dropout
    std::vector<Vector> embedding_masks; // empty when no dropout applied
    std::optional<Vector> aspect;
    std::optional<TermSpan> aspect_span;
    std::optional<std::size_t> aspect_category;
    UnrollResult cell;
    std::optional<AttentionCache> attention;
    Vector repr;      // head output
    Vector repr_mask; // empty when no dropout applied
    Vector classifier_input;
    Vector probs;
};

class Model {
  public:
    Model() = default;
    Model(Vocabulary vocab, ModelParams params);

    // Weights ~ U(lo, hi), biases zero, word embeddings copied from the
    // table, category embeddings ~ U(lo, hi).
    static Model initialize(ModelSpec spec, const EmbeddingTable &embeddings, std::uint64_t seed,
                            double init_low = -0.1, double init_high = 0.1);

    const ModelSpec &spec() const { return params_.spec; }
    const Vocabulary &vocab() const { return vocab_; }
    ModelParams &params() { return params_; }
    const ModelParams &params() const { return params_; }

    ForwardPass forward(const LabeledInstance &instance, const ForwardOptions &options = {}) const;

    // Accumulates scale * dL/dθ for the cross-entropy of `pass` against
    // `gold` into grads.
    void backward(const ForwardPass &pass, Polarity gold, ModelParams &grads,
                  double scale = 1.0) const;

    Vector predict_proba(const LabeledInstance &instance) const;
    Polarity predict(const LabeledInstance &instance) const;

    // Checks that an instance is usable with this model's task.
    void check_compatible(const LabeledInstance &instance) const;

  private:
    Vocabulary vocab_;
    ModelParams params_;
};

Polarity argmax_polarity(const Vector &probs);

} // namespace aalstm
