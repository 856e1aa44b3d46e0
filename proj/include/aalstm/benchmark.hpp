#pragma once

#include <cstdint>
#include <iosfwd>

#include "aalstm/trainer.hpp"

namespace aalstm {

// Settings for the two-aspect synthetic corpus run. The corpus is small and
// noise-free, so regularization is lighter and the step size larger than the
// full-data defaults.
struct SyntheticSetup {
    std::size_t sentences = 900; // 1200 train / 600 test instances
    std::uint64_t corpus_seed = 7;
    std::size_t embedding_dim = 16;
    TrainConfig train = defaults();

    static TrainConfig defaults();
};

struct SyntheticRun {
    ModelSpec spec;
    TrainResult result;
    EvalReport test;
    double disambiguation_accuracy = 0.0;
    std::size_t disambiguation_size = 0;
    std::size_t train_size = 0;
    std::size_t dev_size = 0;
    double seconds = 0.0;
};

// Generates the corpus, splits off dev, trains one pipeline and scores it
// on the held-out sentences and their disambiguation subset.
SyntheticRun run_synthetic(const SyntheticSetup &setup, CellKind cell, HeadKind head,
                           std::ostream *log_out = nullptr);

} // namespace aalstm
