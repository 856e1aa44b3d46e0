#include "aalstm/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>
#include <utility>

namespace aalstm {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) {
        throw ConfigError("learning_rate must be positive");
    }
    if (batch_size == 0) {
        throw ConfigError("batch_size must be positive");
    }
    if (!(dropout_p >= 0.0 && dropout_p < 1.0)) {
        throw ConfigError("dropout_p must lie in [0, 1)");
    }
    if (l2_coeff < 0.0) {
        throw ConfigError("l2_coeff must be non-negative");
    }
    if (embedding_dim == 0) {
        throw ConfigError("embedding_dim must be positive");
    }
    if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
        throw ConfigError("dev_fraction must lie in (0, 1)");
    }
    if (!(init_low < init_high)) {
        throw ConfigError("init_low must be below init_high");
    }
    if (max_epochs == 0) {
        throw ConfigError("max_epochs must be positive");
    }
}

namespace {

using Setter = std::function<void(TrainConfig &, const std::string &)>;

template <typename T> T parse_number(const std::string &value) {
    std::size_t pos = 0;
    T out{};
    if constexpr (std::is_floating_point_v<T>) {
        out = std::stod(value, &pos);
    } else {
        if (!value.empty() && value[0] == '-') {
            throw std::invalid_argument(value);
        }
        out = static_cast<T>(std::stoull(value, &pos));
    }
    if (pos != value.size()) {
        throw std::invalid_argument(value);
    }
    return out;
}

bool parse_bool(const std::string &value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument(value);
}

const std::map<std::string, Setter> &config_setters() {
    static const std::map<std::string, Setter> setters = [] {
        std::map<std::string, Setter> m;
#define AALSTM_NUMBER_FIELD(name)                                                                 \
    m[#name] = [](TrainConfig &c, const std::string &v) {                                         \
        c.name = parse_number<decltype(c.name)>(v);                                               \
    };
#define AALSTM_BOOL_FIELD(name)                                                                   \
    m[#name] = [](TrainConfig &c, const std::string &v) { c.name = parse_bool(v); };
        AALSTM_NUMBER_FIELD(learning_rate)
        AALSTM_NUMBER_FIELD(batch_size)
        AALSTM_NUMBER_FIELD(dropout_p)
        AALSTM_NUMBER_FIELD(l2_coeff)
        AALSTM_NUMBER_FIELD(embedding_dim)
        AALSTM_NUMBER_FIELD(hidden_dim)
        AALSTM_NUMBER_FIELD(max_epochs)
        AALSTM_NUMBER_FIELD(early_stop_patience)
        AALSTM_NUMBER_FIELD(seed)
        AALSTM_NUMBER_FIELD(dev_fraction)
        AALSTM_NUMBER_FIELD(init_low)
        AALSTM_NUMBER_FIELD(init_high)
        AALSTM_BOOL_FIELD(finetune_embeddings)
        AALSTM_BOOL_FIELD(dropout_embeddings)
        AALSTM_BOOL_FIELD(dropout_repr)
#undef AALSTM_NUMBER_FIELD
#undef AALSTM_BOOL_FIELD
        return m;
    }();
    return setters;
}

std::string trim(const std::string &s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

void apply_config(std::istream &in, TrainConfig &config, const std::string &source) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(line_no);
        if (eq == std::string::npos) {
            throw ParseError(where + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto &setters = config_setters();
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ParseError(where + ": unknown key '" + key + "'");
        }
        try {
            it->second(config, value);
        } catch (const std::exception &) {
            throw ParseError(where + ": bad value '" + value + "' for " + key);
        }
    }
}

void apply_config_file(const std::filesystem::path &path, TrainConfig &config) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open config file " + path.string());
    }
    apply_config(in, config, path.string());
}

std::string log_header() { return "epoch\ttrain_loss\tdev_acc\tdev_macro_f1"; }

std::string format_log_row(const EpochLog &row) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu\t%.6f\t%.6f\t%.6f", row.epoch, row.train_loss,
                  row.dev_accuracy, row.dev_macro_f1);
    return buf;
}

double batch_loss(const Model &model, const std::vector<LabeledInstance> &batch,
                  double l2_coeff) {
    if (batch.empty()) {
        throw std::invalid_argument("batch_loss: empty batch");
    }
    double total = 0.0;
    for (const auto &inst : batch) {
        total += cross_entropy(model.forward(inst).probs, static_cast<std::size_t>(inst.polarity));
    }
    const auto views = model.params().views();
    return total / static_cast<double>(batch.size()) + l2_penalty(views, l2_coeff);
}

GradCheckReport check_model_gradients(Model &model, const LabeledInstance &instance,
                                      double epsilon, double l2_coeff, double corrupt,
                                      double floor) {
    ModelParams grads = ModelParams::zeros(model.spec());
    const auto gold = instance.polarity;
    model.backward(model.forward(instance), gold, grads);
    const auto grad_views = grads.views();
    l2_penalty(std::as_const(model.params()).views(), l2_coeff, grad_views);
    if (corrupt != 0.0) {
        // First classifier weight: present in every pipeline.
        for (const auto &v : grad_views) {
            if (v.name == "classifier.weight") {
                v.values[0] += corrupt;
            }
        }
    }
    const auto loss = [&] {
        const ForwardPass pass = model.forward(instance);
        const Vector logits = classifier_logits(pass.classifier_input, model.params().classifier);
        return cross_entropy_extended(logits, static_cast<std::size_t>(gold)) +
               l2_penalty_extended(std::as_const(model.params()).views(), l2_coeff);
    };
    return grad_check(model.params().views(), std::as_const(grads).views(), loss, epsilon,
                      floor);
}

TrainResult train(const TrainConfig &config, Model model,
                  const std::vector<LabeledInstance> &train_set,
                  const std::vector<LabeledInstance> &dev_set, std::ostream *log_out) {
    config.validate();
    if (train_set.empty()) {
        throw std::invalid_argument("train: empty training set");
    }
    if (dev_set.empty()) {
        throw std::invalid_argument("train: empty dev set");
    }
    for (const auto &inst : train_set) {
        model.check_compatible(inst);
    }

    Rng order_rng(config.seed);
    Rng dropout_rng(config.seed ^ 0xd1b54a32d192ed03ULL);
    AdamState adam;
    ModelParams grads = ModelParams::zeros(model.spec());

    std::vector<bool> frozen;
    for (const auto &v : model.params().views()) {
        frozen.push_back(v.kind == ParamKind::WordEmbedding && !config.finetune_embeddings);
    }

    const ForwardOptions options{true, config.dropout_p, config.dropout_embeddings,
                                 config.dropout_repr, &dropout_rng};

    TrainResult result;
    double best_f1 = -1.0;
    std::size_t since_best = 0;
    std::vector<std::size_t> order(train_set.size());

    if (log_out) {
        *log_out << log_header() << '\n';
    }
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        order_rng.shuffle(order);

        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            const double inv = 1.0 / static_cast<double>(stop - start);
            grads.set_zero();
            double loss = 0.0;
            for (std::size_t i = start; i < stop; ++i) {
                const auto &inst = train_set[order[i]];
                const ForwardPass pass = model.forward(inst, options);
                loss += cross_entropy(pass.probs, static_cast<std::size_t>(inst.polarity));
                model.backward(pass, inst.polarity, grads, inv);
            }
            loss = loss * inv +
                   l2_penalty(std::as_const(model.params()).views(), config.l2_coeff,
                              grads.views());
            if (!std::isfinite(loss)) {
                throw TrainingError("non-finite loss in epoch " + std::to_string(epoch) +
                                    ", batch " + std::to_string(batches + 1) +
                                    " (instances " + std::to_string(start) + ".." +
                                    std::to_string(stop - 1) + " of the shuffled order)");
            }
            adam_step(model.params().views(), std::as_const(grads).views(), adam,
                      config.learning_rate, frozen);
            loss_sum += loss;
            ++batches;
        }

        const EvalReport dev = evaluate(model, dev_set);
        const EpochLog row{epoch, loss_sum / static_cast<double>(batches), dev.accuracy,
                           dev.macro_f1};
        result.log.push_back(row);
        if (log_out) {
            *log_out << format_log_row(row) << '\n' << std::flush;
        }

        if (dev.macro_f1 > best_f1) {
            best_f1 = dev.macro_f1;
            result.model = model;
            result.best_epoch = epoch;
            result.best_dev = dev;
            since_best = 0;
        } else if (++since_best >= config.early_stop_patience) {
            break;
        }
    }
    return result;
}

} // namespace aalstm
