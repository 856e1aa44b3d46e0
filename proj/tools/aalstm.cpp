// aalstm: train, evaluate and gradient-check aspect-aware LSTM classifiers.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aalstm/benchmark.hpp"
#include "aalstm/checkpoint.hpp"
#include "aalstm/trainer.hpp"

namespace fs = std::filesystem;
using namespace aalstm;

namespace {

// Bad flag combinations; reported with exit code 2.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct TrainFlags {
    std::string task = "atsa";
    std::string cell = "aa";
    std::string head = "last";
    std::string data;
    std::string test_data;
    std::string emb;
    std::string out = "aalstm-out";
    std::string config;
    bool synthetic = false;
    std::size_t sentences = SyntheticSetup{}.sentences;
    std::optional<std::uint64_t> seed;
    std::optional<double> lr;
    std::optional<std::size_t> batch;
    std::optional<double> dropout;
    std::optional<double> l2;
    std::optional<std::size_t> dim;
    std::optional<std::size_t> hidden;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> patience;
};

Task task_flag(const std::string &s) {
    const auto t = parse_task(s);
    if (!t) throw UsageError("unknown task '" + s + "' (expected atsa or acsa)");
    return *t;
}

CellKind cell_flag(const std::string &s) {
    const auto c = parse_cell_kind(s);
    if (!c) throw UsageError("unknown cell '" + s + "' (expected classic or aa)");
    return *c;
}

HeadKind head_flag(const std::string &s) {
    const auto h = parse_head_kind(s);
    if (!h) throw UsageError("unknown head '" + s + "' (expected last or attention)");
    return *h;
}

std::vector<LabeledInstance> load_instances(const fs::path &path, Task task) {
    if (!fs::exists(path)) {
        throw std::runtime_error("no such file: " + path.string());
    }
    std::vector<LabeledInstance> out =
        path.extension() == ".xml" ? parse_semeval_xml(path, task) : read_instances(path);
    for (const auto &inst : out) {
        const bool term = std::holds_alternative<TermSpan>(inst.aspect);
        if (term && task == Task::Acsa) {
            throw UsageError(path.string() + " holds aspect-term instances; --task acsa needs "
                             "aspect categories");
        }
        if (!term && task == Task::Atsa) {
            throw UsageError(path.string() + " holds aspect-category instances; --task atsa "
                             "needs aspect terms");
        }
    }
    if (out.empty()) {
        throw std::runtime_error(path.string() + " contains no usable instances");
    }
    return out;
}

void write_tsv(const fs::path &path, const std::vector<LabeledInstance> &instances) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_instances(out, instances);
}

void print_report(const std::string &title, const EvalReport &r) {
    std::cout << title << "\n" << format_table(r) << format_json(r) << "\n";
}

TrainConfig resolve_config(const TrainFlags &f) {
    TrainConfig c = f.synthetic ? SyntheticSetup::defaults() : TrainConfig{};
    if (!f.config.empty()) {
        apply_config_file(f.config, c);
    }
    if (f.seed) c.seed = *f.seed;
    if (f.lr) c.learning_rate = *f.lr;
    if (f.batch) c.batch_size = *f.batch;
    if (f.dropout) c.dropout_p = *f.dropout;
    if (f.l2) c.l2_coeff = *f.l2;
    if (f.dim) c.embedding_dim = *f.dim;
    if (f.hidden) c.hidden_dim = *f.hidden;
    if (f.epochs) c.max_epochs = *f.epochs;
    if (f.patience) c.early_stop_patience = *f.patience;
    c.validate();
    return c;
}

int cmd_train(const TrainFlags &f) {
    const Task task = task_flag(f.task);
    const TrainConfig config = resolve_config(f);
    ModelSpec spec;
    spec.task = task;
    spec.cell = cell_flag(f.cell);
    spec.head = head_flag(f.head);

    std::vector<LabeledInstance> pool;
    std::vector<LabeledInstance> test_set;
    std::optional<EmbeddingTable> synthetic_embeddings;
    if (f.synthetic) {
        if (task == Task::Acsa) {
            throw UsageError("the synthetic corpus uses aspect-term spans; it cannot be combined "
                             "with --task acsa");
        }
        if (!f.data.empty()) {
            throw UsageError("--synthetic and --data are mutually exclusive");
        }
        SyntheticCorpus corpus = generate_synthetic(f.sentences, config.seed, config.embedding_dim);
        pool = std::move(corpus.train);
        test_set = std::move(corpus.test);
        synthetic_embeddings = std::move(corpus.embeddings);
    } else {
        if (f.data.empty()) {
            throw UsageError("train needs --data or --synthetic");
        }
        pool = load_instances(f.data, task);
        if (!f.test_data.empty()) {
            test_set = load_instances(f.test_data, task);
        }
    }
    auto [train_set, dev_set] = dev_split(std::move(pool), config.dev_fraction, config.seed);

    EmbeddingTable table;
    if (synthetic_embeddings) {
        table = std::move(*synthetic_embeddings);
    } else {
        const Vocabulary vocab = build_vocabulary({&train_set, &dev_set, &test_set});
        if (!f.emb.empty()) {
            if (!fs::exists(f.emb)) {
                throw std::runtime_error("no such file: " + f.emb);
            }
            table = load_embeddings(f.emb, vocab, config.embedding_dim, config.seed);
            std::cerr << "embeddings: " << table.from_file << " from file, "
                      << table.out_of_vocabulary << " sampled\n";
        } else {
            std::cerr << "no --emb given; all word vectors sampled from U(-0.1, 0.1)\n";
            table = random_embeddings(vocab, config.embedding_dim, config.seed);
        }
    }

    spec.input_dim = config.embedding_dim;
    spec.hidden_dim = config.effective_hidden_dim();
    spec.aspect_dim = task == Task::Atsa ? spec.input_dim : spec.hidden_dim;
    const Model initial =
        Model::initialize(spec, table, config.seed, config.init_low, config.init_high);

    const fs::path out_dir = f.out;
    fs::create_directories(out_dir);
    write_tsv(out_dir / "train.tsv", train_set);
    write_tsv(out_dir / "dev.tsv", dev_set);

    std::ofstream log(out_dir / "metrics.tsv");
    if (!log) throw std::runtime_error("cannot write " + (out_dir / "metrics.tsv").string());
    std::cerr << "training on " << train_set.size() << " instances, dev " << dev_set.size()
              << "\n";
    const TrainResult result = train(config, initial, train_set, dev_set, &log);
    save_checkpoint(out_dir / "model.ckpt", result.model);

    print_report("dev (best epoch " + std::to_string(result.best_epoch) + ")", result.best_dev);
    if (!test_set.empty()) {
        write_tsv(out_dir / "test.tsv", test_set);
        print_report("test", evaluate(result.model, test_set));
    }
    std::cout << "wrote " << (out_dir / "model.ckpt").string() << "\n";
    return 0;
}

int cmd_eval(const std::string &checkpoint, const std::string &data,
             const std::optional<std::string> &task_name) {
    if (!fs::exists(checkpoint)) {
        throw std::runtime_error("no such file: " + checkpoint);
    }
    const Model model = load_checkpoint(fs::path(checkpoint));
    const Task task = model.spec().task;
    if (task_name && task_flag(*task_name) != task) {
        throw ConfigError("checkpoint " + checkpoint + " was trained for task " +
                          std::string(to_string(task)) + ", not " + *task_name);
    }
    std::vector<LabeledInstance> instances;
    try {
        instances = load_instances(data, task);
    } catch (const UsageError &e) {
        throw ConfigError("checkpoint " + checkpoint + " was trained for task " +
                          std::string(to_string(task)) + ": " + e.what());
    }
    print_report("eval " + data, evaluate(model, instances));
    return 0;
}

struct GradcheckFlags {
    std::string task = "acsa";
    std::string cell = "aa";
    std::string head = "attention";
    std::size_t dim = 6;
    std::size_t input_dim = 4;
    std::size_t seq = 5;
    std::uint64_t seed = 1;
    double eps = 1e-5;
    double l2 = 0.01;
    double corrupt = 0.0;
};

int cmd_gradcheck(const GradcheckFlags &f) {
    ModelSpec spec;
    spec.task = task_flag(f.task);
    spec.cell = cell_flag(f.cell);
    spec.head = head_flag(f.head);
    spec.hidden_dim = f.dim;
    spec.aspect_dim = f.dim;
    spec.input_dim = spec.task == Task::Atsa ? f.dim : f.input_dim;
    if (f.seq == 0) throw UsageError("--seq must be positive");

    Vocabulary vocab;
    for (std::size_t i = 0; i < f.seq + 2; ++i) {
        vocab.add("w" + std::to_string(i));
    }
    const EmbeddingTable table = random_embeddings(vocab, spec.input_dim, f.seed);
    Model model = Model::initialize(spec, table, f.seed);

    Rng rng(f.seed ^ 0x5bd1e995ULL);
    LabeledInstance inst;
    for (std::size_t t = 0; t < f.seq; ++t) {
        inst.tokens.push_back("w" + std::to_string(1 + rng.index(vocab.size() - 1)));
    }
    if (spec.task == Task::Atsa) {
        const std::size_t start = rng.index(f.seq);
        inst.aspect = TermSpan{start, std::min(f.seq - 1, start + 1)};
    } else {
        inst.aspect = CategoryId{rng.index(kAspectCategories.size())};
    }
    inst.polarity = static_cast<Polarity>(rng.index(3));

    const GradCheckReport r = check_model_gradients(model, inst, f.eps, f.l2, f.corrupt);
    const bool ok = r.passes();
    std::printf("gradcheck %s/%s/%s dx=%zu dc=%zu da=%zu T=%zu: checked %zu of %zu, "
                "max rel err %.3e, max abs err below floor %.3e",
                f.task.c_str(), f.cell.c_str(), f.head.c_str(), spec.input_dim, spec.hidden_dim,
                spec.aspect_dim, f.seq, r.checked, r.total, r.max_relative_error,
                r.max_absolute_error_below_floor);
    if (!r.worst_param.empty()) {
        std::printf(" at %s[%zu] (analytic %.6e, numeric %.6e)", r.worst_param.c_str(),
                    r.worst_index, r.worst_analytic, r.worst_numeric);
    }
    std::printf(" -> %s\n", ok ? "ok" : "FAILED");
    return ok ? 0 : 1;
}

int cmd_benchmark(std::uint64_t seed, std::size_t sentences, std::optional<std::size_t> epochs) {
    SyntheticSetup setup;
    setup.sentences = sentences;
    setup.train.seed = seed;
    if (epochs) setup.train.max_epochs = *epochs;
    for (const CellKind cell : {CellKind::AspectAware, CellKind::Classic}) {
        const SyntheticRun run = run_synthetic(setup, cell, HeadKind::LastHidden);
        std::printf("%-8s test acc %.4f  macro-F1 %.4f  disambiguation acc %.4f (%zu)  "
                    "best epoch %zu  %.1fs\n",
                    std::string(to_string(cell)).c_str(), run.test.accuracy, run.test.macro_f1,
                    run.disambiguation_accuracy, run.disambiguation_size, run.result.best_epoch,
                    run.seconds);
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Aspect-aware LSTM sentiment classifier"};
    app.require_subcommand(1);

    TrainFlags tf;
    auto *train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
    train_cmd->add_option("--task", tf.task, "atsa or acsa")->capture_default_str();
    train_cmd->add_option("--cell", tf.cell, "classic or aa")->capture_default_str();
    train_cmd->add_option("--head", tf.head, "last or attention")->capture_default_str();
    train_cmd->add_option("--data", tf.data, "training data (.xml SemEval or .tsv instances)");
    train_cmd->add_option("--test-data", tf.test_data, "held-out data scored after training");
    train_cmd->add_option("--emb", tf.emb, "GloVe-format text vectors");
    train_cmd->add_option("--out", tf.out, "output directory")->capture_default_str();
    train_cmd->add_option("--config", tf.config, "key=value file with TrainConfig fields");
    train_cmd->add_flag("--synthetic", tf.synthetic, "use the generated two-aspect corpus");
    train_cmd->add_option("--sentences", tf.sentences, "synthetic corpus size")
        ->capture_default_str();
    train_cmd->add_option("--seed", tf.seed);
    train_cmd->add_option("--lr", tf.lr);
    train_cmd->add_option("--batch", tf.batch);
    train_cmd->add_option("--dropout", tf.dropout);
    train_cmd->add_option("--l2", tf.l2);
    train_cmd->add_option("--dim", tf.dim, "word embedding width");
    train_cmd->add_option("--hidden", tf.hidden, "hidden width (default: --dim)");
    train_cmd->add_option("--epochs", tf.epochs);
    train_cmd->add_option("--patience", tf.patience);

    std::string checkpoint;
    std::string eval_data;
    std::optional<std::string> eval_task;
    auto *eval_cmd = app.add_subcommand("eval", "score a checkpoint on labelled data");
    eval_cmd->add_option("--checkpoint", checkpoint)->required();
    eval_cmd->add_option("--data", eval_data)->required();
    eval_cmd->add_option("--task", eval_task, "expected task; must match the checkpoint");

    GradcheckFlags gf;
    auto *grad_cmd =
        app.add_subcommand("gradcheck", "finite-difference check of the training gradient");
    grad_cmd->add_option("--task", gf.task)->capture_default_str();
    grad_cmd->add_option("--cell", gf.cell)->capture_default_str();
    grad_cmd->add_option("--head", gf.head)->capture_default_str();
    grad_cmd->add_option("--dim", gf.dim, "hidden and aspect width")->capture_default_str();
    grad_cmd->add_option("--input-dim", gf.input_dim, "word width (acsa only)")
        ->capture_default_str();
    grad_cmd->add_option("--seq", gf.seq)->capture_default_str();
    grad_cmd->add_option("--seed", gf.seed)->capture_default_str();
    grad_cmd->add_option("--eps", gf.eps)->capture_default_str();
    grad_cmd->add_option("--l2", gf.l2)->capture_default_str();
    grad_cmd->add_option("--corrupt", gf.corrupt)->group("");

    std::uint64_t bench_seed = 1;
    std::size_t bench_sentences = SyntheticSetup{}.sentences;
    std::optional<std::size_t> bench_epochs;
    auto *bench_cmd = app.add_subcommand(
        "benchmark", "synthetic corpus: aspect-aware vs classic cell, last-hidden head");
    bench_cmd->add_option("--seed", bench_seed)->capture_default_str();
    bench_cmd->add_option("--sentences", bench_sentences)->capture_default_str();
    bench_cmd->add_option("--epochs", bench_epochs);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) return cmd_train(tf);
        if (*eval_cmd) return cmd_eval(checkpoint, eval_data, eval_task);
        if (*grad_cmd) return cmd_gradcheck(gf);
        if (*bench_cmd) return cmd_benchmark(bench_seed, bench_sentences, bench_epochs);
    } catch (const UsageError &e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError &e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const TrainingError &e) {
        std::cerr << "training aborted: " << e.what() << "\n";
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
