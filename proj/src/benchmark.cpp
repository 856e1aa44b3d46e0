#include "aalstm/benchmark.hpp"

#include <chrono>

namespace aalstm {

TrainConfig SyntheticSetup::defaults() {
    TrainConfig c;
    c.learning_rate = 0.01;
    c.dropout_p = 0.0;
    c.l2_coeff = 1e-4;
    c.embedding_dim = 16;
    c.max_epochs = 60;
    c.early_stop_patience = 60;
    return c;
}

SyntheticRun run_synthetic(const SyntheticSetup &setup, CellKind cell, HeadKind head,
                           std::ostream *log_out) {
    const auto start = std::chrono::steady_clock::now();
    const SyntheticCorpus corpus =
        generate_synthetic(setup.sentences, setup.corpus_seed, setup.embedding_dim);
    auto [train_set, dev_set] =
        dev_split(corpus.train, setup.train.dev_fraction, setup.train.seed);

    ModelSpec spec;
    spec.task = Task::Atsa;
    spec.cell = cell;
    spec.head = head;
    spec.input_dim = setup.embedding_dim;
    spec.hidden_dim = setup.embedding_dim;
    spec.aspect_dim = setup.embedding_dim;
    const Model model = Model::initialize(spec, corpus.embeddings, setup.train.seed,
                                          setup.train.init_low, setup.train.init_high);

    SyntheticRun run;
    run.spec = model.spec();
    run.train_size = train_set.size();
    run.dev_size = dev_set.size();
    run.result = train(setup.train, model, train_set, dev_set, log_out);
    run.test = evaluate(run.result.model, corpus.test);

    const auto subset = disambiguation_subset(corpus.test);
    std::size_t correct = 0;
    for (std::size_t i : subset) {
        correct += run.result.model.predict(corpus.test[i]) == corpus.test[i].polarity;
    }
    run.disambiguation_size = subset.size();
    run.disambiguation_accuracy =
        subset.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(subset.size());
    run.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return run;
}

} // namespace aalstm
