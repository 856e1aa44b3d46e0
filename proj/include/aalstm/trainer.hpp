#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "aalstm/metrics.hpp"
#include "aalstm/model.hpp"
#include "aalstm/training.hpp"

namespace aalstm {

class TrainingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Defaults: U(-0.1, 0.1) init, 300-d embeddings, batch 16, Adam at 1e-3,
// dropout 0.5, L2 0.01, 20% dev split.
struct TrainConfig {
    double learning_rate = 0.001;
    std::size_t batch_size = 16;
    double dropout_p = 0.5;
    double l2_coeff = 0.01;
    std::size_t embedding_dim = 300;
    std::size_t hidden_dim = 0; // 0 means "same as embedding_dim"
    std::size_t max_epochs = 50;
    std::size_t early_stop_patience = 5;
    std::uint64_t seed = 1;
    double dev_fraction = 0.20;
    double init_low = -0.1;
    double init_high = 0.1;
    bool finetune_embeddings = true;
    bool dropout_embeddings = true;
    bool dropout_repr = true;

    std::size_t effective_hidden_dim() const { return hidden_dim ? hidden_dim : embedding_dim; }
    void validate() const;
};

// Applies `key=value` lines (field names as in TrainConfig; '#' starts a
// comment) on top of `config`. Unknown keys and bad values throw ParseError.
void apply_config(std::istream &in, TrainConfig &config, const std::string &source = "<config>");
void apply_config_file(const std::filesystem::path &path, TrainConfig &config);

struct EpochLog {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double dev_accuracy = 0.0;
    double dev_macro_f1 = 0.0;
};

// epoch, train_loss, dev_acc, dev_macro_f1 separated by tabs.
std::string format_log_row(const EpochLog &row);
std::string log_header();

struct TrainResult {
    Model model; // parameters from the epoch with the best dev macro-F1
    std::vector<EpochLog> log;
    std::size_t best_epoch = 0;
    EvalReport best_dev;
};

// Minibatch Adam on mean cross-entropy + L2. Writes one log row per epoch
// to `log_out` when given.
TrainResult train(const TrainConfig &config, Model model,
                  const std::vector<LabeledInstance> &train_set,
                  const std::vector<LabeledInstance> &dev_set, std::ostream *log_out = nullptr);

// Mean cross-entropy over `batch` plus the L2 penalty, with dropout off.
double batch_loss(const Model &model, const std::vector<LabeledInstance> &batch, double l2_coeff);

// Finite-difference check of the full training loss on one instance with
// dropout disabled. `corrupt` adds that amount to one analytic gradient
// entry, to confirm the detector fires.
GradCheckReport check_model_gradients(Model &model, const LabeledInstance &instance,
                                      double epsilon, double l2_coeff, double corrupt = 0.0,
                                      double floor = 1e-8);

} // namespace aalstm
