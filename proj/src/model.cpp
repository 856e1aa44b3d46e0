#include "aalstm/model.hpp"

#include <algorithm>

#include "aalstm/training.hpp"

namespace aalstm {

std::string_view to_string(CellKind k) { return k == CellKind::AspectAware ? "aa" : "classic"; }

std::string_view to_string(HeadKind k) { return k == HeadKind::Attention ? "attention" : "last"; }

std::optional<CellKind> parse_cell_kind(std::string_view s) {
    if (s == "aa") return CellKind::AspectAware;
    if (s == "classic") return CellKind::Classic;
    return std::nullopt;
}

std::optional<HeadKind> parse_head_kind(std::string_view s) {
    if (s == "last") return HeadKind::LastHidden;
    if (s == "attention") return HeadKind::Attention;
    return std::nullopt;
}

void ModelSpec::validate() const {
    if (vocab_size == 0 || input_dim == 0 || hidden_dim == 0) {
        throw ConfigError("model dimensions must be positive (vocab " + std::to_string(vocab_size) +
                          ", input " + std::to_string(input_dim) + ", hidden " +
                          std::to_string(hidden_dim) + ")");
    }
    if (!uses_aspect()) {
        return;
    }
    if (cell == CellKind::AspectAware && aspect_dim != hidden_dim) {
        throw ConfigError("aspect-aware cell requires aspect dim (" + std::to_string(aspect_dim) +
                          ") == hidden dim (" + std::to_string(hidden_dim) + ")");
    }
    if (task == Task::Atsa && aspect_dim != input_dim) {
        throw ConfigError("ATSA aspect vectors are averaged word embeddings, so aspect dim (" +
                          std::to_string(aspect_dim) + ") must equal embedding dim (" +
                          std::to_string(input_dim) + ")");
    }
    if (aspect_dim == 0) {
        throw ConfigError("aspect dim must be positive");
    }
}

namespace {

template <typename Out, typename G> void gate_views(Out &out, const std::string &prefix, G &g) {
    out.push_back({prefix + ".weight", g.weight.rows(), g.weight.cols(), g.weight.values(),
                   ParamKind::Weight});
    out.push_back({prefix + ".bias", g.bias.dim(), 1, g.bias.values(), ParamKind::Bias});
}

template <typename Out, typename P> void classic_views(Out &out, P &p) {
    gate_views(out, "cell.input", p.input);
    gate_views(out, "cell.forget", p.forget);
    gate_views(out, "cell.candidate", p.candidate);
    gate_views(out, "cell.output", p.output);
}

template <typename Out, typename P> void aware_views(Out &out, P &p) {
    classic_views(out, p.core);
    gate_views(out, "cell.aspect_input", p.aspect_input);
    gate_views(out, "cell.aspect_forget", p.aspect_forget);
    gate_views(out, "cell.aspect_output", p.aspect_output);
}

template <typename Out, typename P> void attention_views(Out &out, P &p) {
    const auto weight = [&](const char *name, auto &m) {
        out.push_back({name, m.rows(), m.cols(), m.values(), ParamKind::Weight});
    };
    weight("attention.hidden_proj", p.hidden_proj);
    weight("attention.aspect_proj", p.aspect_proj);
    out.push_back({"attention.score", p.score.dim(), 1, p.score.values(), ParamKind::Weight});
    weight("attention.pooled_proj", p.pooled_proj);
    weight("attention.last_proj", p.last_proj);
}

template <typename Out, typename M> void model_views(Out &out, M &m) {
    out.push_back({"embeddings", m.embeddings.rows(), m.embeddings.cols(), m.embeddings.values(),
                   ParamKind::WordEmbedding});
    if (m.aspect_embeddings.size() > 0) {
        out.push_back({"aspect_embeddings", m.aspect_embeddings.rows(), m.aspect_embeddings.cols(),
                       m.aspect_embeddings.values(), ParamKind::AspectEmbedding});
    }
    std::visit(
        [&](auto &cell) {
            if constexpr (std::is_same_v<std::remove_cvref_t<decltype(cell)>, AALstmParams>) {
                aware_views(out, cell);
            } else {
                classic_views(out, cell);
            }
        },
        m.cell);
    if (m.attention) {
        attention_views(out, *m.attention);
    }
    out.push_back({"classifier.weight", m.classifier.weight.rows(), m.classifier.weight.cols(),
                   m.classifier.weight.values(), ParamKind::Weight});
    out.push_back({"classifier.bias", m.classifier.bias.dim(), 1, m.classifier.bias.values(),
                   ParamKind::Bias});
}

// dst += scale * src, view by view.
void accumulate(const std::vector<ParamView> &dst, const std::vector<ConstParamView> &src,
                double scale) {
    if (dst.size() != src.size()) {
        throw std::invalid_argument("gradient layout mismatch");
    }
    for (std::size_t i = 0; i < dst.size(); ++i) {
        auto d = dst[i].values;
        const auto s = src[i].values;
        for (std::size_t j = 0; j < d.size(); ++j) {
            d[j] += scale * s[j];
        }
    }
}

template <typename P> std::vector<ParamView> mutable_views_of(P &p) {
    std::vector<ParamView> out;
    if constexpr (std::is_same_v<P, AALstmParams>) {
        aware_views(out, p);
    } else if constexpr (std::is_same_v<P, ClassicLstmParams>) {
        classic_views(out, p);
    } else if constexpr (std::is_same_v<P, AttentionParams>) {
        attention_views(out, p);
    }
    return out;
}

template <typename P> std::vector<ConstParamView> const_views_of(const P &p) {
    std::vector<ConstParamView> out;
    if constexpr (std::is_same_v<P, AALstmParams>) {
        aware_views(out, p);
    } else if constexpr (std::is_same_v<P, ClassicLstmParams>) {
        classic_views(out, p);
    } else if constexpr (std::is_same_v<P, AttentionParams>) {
        attention_views(out, p);
    }
    return out;
}

void add_row(Matrix &m, std::size_t row, const Vector &v, double scale) {
    auto r = m.row(row);
    for (std::size_t j = 0; j < r.size(); ++j) {
        r[j] += scale * v[j];
    }
}

} // namespace

ModelParams ModelParams::zeros(const ModelSpec &spec) {
    spec.validate();
    ModelParams p;
    p.spec = spec;
    p.embeddings = Matrix(spec.vocab_size, spec.input_dim);
    if (spec.task == Task::Acsa && spec.aspect_dim > 0) {
        p.aspect_embeddings = Matrix(kAspectCategories.size(), spec.aspect_dim);
    }
    if (spec.cell == CellKind::AspectAware) {
        p.cell = AALstmParams(spec.input_dim, spec.hidden_dim, spec.aspect_dim);
    } else {
        p.cell = ClassicLstmParams(spec.input_dim, spec.hidden_dim);
    }
    if (spec.head == HeadKind::Attention) {
        p.attention = AttentionParams(spec.hidden_dim, spec.aspect_dim, spec.hidden_dim);
    }
    p.classifier = ClassifierParams(spec.hidden_dim);
    return p;
}

CellParamsRef ModelParams::cell_ref() const {
    if (const auto *aware = std::get_if<AALstmParams>(&cell)) {
        return CellParamsRef(*aware);
    }
    return CellParamsRef(std::get<ClassicLstmParams>(cell));
}

std::vector<ParamView> ModelParams::views() {
    std::vector<ParamView> out;
    model_views(out, *this);
    return out;
}

std::vector<ConstParamView> ModelParams::views() const {
    std::vector<ConstParamView> out;
    model_views(out, *this);
    return out;
}

void ModelParams::set_zero() {
    for (auto &v : views()) {
        std::fill(v.values.begin(), v.values.end(), 0.0);
    }
}

Model::Model(Vocabulary vocab, ModelParams params)
    : vocab_(std::move(vocab)), params_(std::move(params)) {
    params_.spec.validate();
    if (vocab_.size() != params_.spec.vocab_size ||
        params_.embeddings.rows() != params_.spec.vocab_size) {
        throw ConfigError("vocabulary size " + std::to_string(vocab_.size()) +
                          " does not match embedding rows " +
                          std::to_string(params_.embeddings.rows()));
    }
}

Model Model::initialize(ModelSpec spec, const EmbeddingTable &embeddings, std::uint64_t seed,
                        double init_low, double init_high) {
    spec.vocab_size = embeddings.vocab.size();
    if (embeddings.dim() != spec.input_dim) {
        throw ConfigError("embedding table width " + std::to_string(embeddings.dim()) +
                          " does not match input dim " + std::to_string(spec.input_dim));
    }
    ModelParams p = ModelParams::zeros(spec);
    p.embeddings = embeddings.matrix;
    Rng rng(seed);
    for (auto &v : p.views()) {
        if (v.kind == ParamKind::Weight || v.kind == ParamKind::AspectEmbedding) {
            for (double &x : v.values) {
                x = rng.uniform(init_low, init_high);
            }
        }
    }
    return Model(embeddings.vocab, std::move(p));
}

void Model::check_compatible(const LabeledInstance &instance) const {
    if (instance.tokens.empty()) {
        throw std::invalid_argument("instance has no tokens");
    }
    const bool is_term = std::holds_alternative<TermSpan>(instance.aspect);
    if (is_term != (spec().task == Task::Atsa)) {
        throw ConfigError(std::string("instance aspect kind does not match model task ") +
                          std::string(to_string(spec().task)));
    }
    if (const auto *span = std::get_if<TermSpan>(&instance.aspect)) {
        if (span->start > span->end || span->end >= instance.tokens.size()) {
            throw std::invalid_argument("aspect span out of range");
        }
    } else if (std::get<CategoryId>(instance.aspect).index >= kAspectCategories.size()) {
        throw std::invalid_argument("aspect category out of range");
    }
}

ForwardPass Model::forward(const LabeledInstance &instance, const ForwardOptions &options) const {
    check_compatible(instance);
    const ModelSpec &spec = params_.spec;
    const bool drop = options.train && options.dropout_p > 0.0;
    if (drop && !options.rng) {
        throw std::invalid_argument("training-mode dropout needs a random generator");
    }

    ForwardPass pass;
    pass.token_ids.reserve(instance.tokens.size());
    for (const auto &tok : instance.tokens) {
        pass.token_ids.push_back(vocab_.index_or_unknown(tok));
    }
    for (std::size_t id : pass.token_ids) {
        const auto row = params_.embeddings.row(id);
        Vector x(std::vector<double>(row.begin(), row.end()));
        if (drop && options.dropout_embeddings) {
            auto r = dropout(x, options.dropout_p, DropoutMode::Train, *options.rng);
            pass.embedding_masks.push_back(std::move(r.mask));
            x = std::move(r.output);
        }
        pass.inputs.push_back(std::move(x));
    }

    if (spec.uses_aspect()) {
        if (const auto *span = std::get_if<TermSpan>(&instance.aspect)) {
            Vector mean(spec.input_dim);
            const double w = 1.0 / static_cast<double>(span->end - span->start + 1);
            for (std::size_t t = span->start; t <= span->end; ++t) {
                const auto row = params_.embeddings.row(pass.token_ids[t]);
                for (std::size_t j = 0; j < row.size(); ++j) {
                    mean[j] += w * row[j];
                }
            }
            pass.aspect = std::move(mean);
            pass.aspect_span = *span;
        } else {
            pass.aspect_category = std::get<CategoryId>(instance.aspect).index;
            const auto row = params_.aspect_embeddings.row(*pass.aspect_category);
            pass.aspect = Vector(std::vector<double>(row.begin(), row.end()));
        }
    }

    const bool aware = spec.cell == CellKind::AspectAware;
    pass.cell = unroll(params_.cell_ref(), pass.inputs,
                       aware ? pass.aspect : std::optional<Vector>{});

    if (spec.head == HeadKind::Attention) {
        auto out = atae_attention_head(pass.cell.hidden, *pass.aspect, *params_.attention);
        pass.repr = std::move(out.repr);
        pass.attention = std::move(out.cache);
    } else {
        pass.repr = last_hidden_head(pass.cell.hidden);
    }

    if (drop && options.dropout_repr) {
        auto r = dropout(pass.repr, options.dropout_p, DropoutMode::Train, *options.rng);
        pass.repr_mask = std::move(r.mask);
        pass.classifier_input = std::move(r.output);
    } else {
        pass.classifier_input = pass.repr;
    }
    pass.probs = softmax_classify(pass.classifier_input, params_.classifier);
    return pass;
}

void Model::backward(const ForwardPass &pass, Polarity gold, ModelParams &grads,
                     double scale) const {
    const ModelSpec &spec = params_.spec;
    if (!(grads.spec == spec)) {
        throw std::invalid_argument("gradient buffer was built for a different model");
    }
    const std::size_t steps = pass.inputs.size();
    if (steps == 0 || pass.cell.caches.size() != steps || pass.probs.dim() != kNumClasses) {
        throw std::invalid_argument("forward pass cache is incomplete");
    }

    // Softmax + cross-entropy.
    Vector d_logits = pass.probs;
    d_logits[static_cast<std::size_t>(gold)] -= 1.0;
    d_logits = aalstm::scale(d_logits, scale);

    auto cls = classifier_backward(params_.classifier, pass.classifier_input, d_logits);
    axpy(1.0, cls.params.weight, grads.classifier.weight);
    axpy(1.0, cls.params.bias, grads.classifier.bias);

    Vector d_repr = std::move(cls.repr);
    if (!pass.repr_mask.empty()) {
        d_repr = hadamard(d_repr, pass.repr_mask);
    }

    std::vector<Vector> dh;
    Vector d_aspect = spec.uses_aspect() ? Vector(spec.aspect_dim) : Vector();
    if (spec.head == HeadKind::Attention) {
        auto ag = attention_backward(*params_.attention, *pass.attention, d_repr);
        accumulate(mutable_views_of(*grads.attention), const_views_of(ag.params), 1.0);
        dh = std::move(ag.hidden);
        axpy(1.0, ag.aspect, d_aspect);
    } else {
        dh = last_hidden_backward(steps, d_repr);
    }

    std::vector<Vector> dx;
    if (const auto *aware = std::get_if<AALstmParams>(&params_.cell)) {
        auto cg = aa_lstm_backward(*aware, pass.cell.caches, dh);
        accumulate(mutable_views_of(std::get<AALstmParams>(grads.cell)),
                   const_views_of(cg.params), 1.0);
        axpy(1.0, cg.aspect, d_aspect);
        dx = std::move(cg.inputs);
    } else {
        auto cg = classic_lstm_backward(std::get<ClassicLstmParams>(params_.cell),
                                        pass.cell.caches, dh);
        accumulate(mutable_views_of(std::get<ClassicLstmParams>(grads.cell)),
                   const_views_of(cg.params), 1.0);
        dx = std::move(cg.inputs);
    }

    for (std::size_t t = 0; t < steps; ++t) {
        const Vector &g =
            pass.embedding_masks.empty() ? dx[t] : hadamard(dx[t], pass.embedding_masks[t]);
        add_row(grads.embeddings, pass.token_ids[t], g, 1.0);
    }

    if (!spec.uses_aspect()) {
        return;
    }
    if (pass.aspect_span) {
        // The aspect vector is the mean of the span's undropped embeddings.
        const auto [start, end] = *pass.aspect_span;
        const double w = 1.0 / static_cast<double>(end - start + 1);
        for (std::size_t t = start; t <= end; ++t) {
            add_row(grads.embeddings, pass.token_ids[t], d_aspect, w);
        }
    } else {
        add_row(grads.aspect_embeddings, *pass.aspect_category, d_aspect, 1.0);
    }
}

Vector Model::predict_proba(const LabeledInstance &instance) const {
    return forward(instance).probs;
}

Polarity Model::predict(const LabeledInstance &instance) const {
    return argmax_polarity(predict_proba(instance));
}

Polarity argmax_polarity(const Vector &probs) {
    const auto it = std::max_element(probs.begin(), probs.end());
    return static_cast<Polarity>(std::distance(probs.begin(), it));
}

} // namespace aalstm
