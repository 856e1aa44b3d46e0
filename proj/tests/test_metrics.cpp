#include <gtest/gtest.h>

#include <json.hpp>

#include "aalstm/metrics.hpp"
#include "aalstm/tensor.hpp"
#include "oracles.hpp"

using namespace aalstm;

using Labels = std::vector<std::size_t>;

TEST(Accuracy, HandCountedExamples) {
    EXPECT_EQ(accuracy(Labels{0, 1, 2}, Labels{0, 1, 2}), 1.0);
    EXPECT_EQ(accuracy(Labels{0, 1, 2, 0}, Labels{0, 1, 1, 0}), 0.75);
    EXPECT_EQ(accuracy(Labels{1, 2, 0}, Labels{0, 1, 2}), 0.0);
}

TEST(Accuracy, RejectsBadInput) {
    EXPECT_THROW(accuracy(Labels{0, 1}, Labels{0}), std::invalid_argument);
    EXPECT_THROW(accuracy(Labels{}, Labels{}), std::invalid_argument);
    EXPECT_THROW(accuracy(Labels{3}, Labels{0}), std::invalid_argument);
}

TEST(MacroF1, HandComputedExamples) {
    EXPECT_EQ(macro_f1(Labels{0, 0, 1, 1, 2, 2}, Labels{0, 0, 1, 1, 2, 2}), 1.0);
    const Labels preds{0, 1, 1, 1};
    const Labels golds{0, 0, 1, 1};
    // class 0: P=1, R=1/2; class 1: P=2/3, R=1; class 2 absent.
    const double expected = (2.0 / 3.0 + 0.8 + 0.0) / 3.0;
    EXPECT_NEAR(macro_f1(preds, golds), expected, 1e-15);
    EXPECT_NEAR(macro_f1(preds, golds), oracle::macro_f1(preds, golds), 1e-15);
    EXPECT_NEAR(macro_f1(preds, golds), 0.4889, 5e-5);
    EXPECT_THROW(macro_f1(Labels{0}, Labels{0, 1}), std::invalid_argument);
}

TEST(EvalReport, InternallyConsistentOnRandomLabels) {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.index(60);
        Labels preds(n), golds(n);
        for (std::size_t i = 0; i < n; ++i) {
            preds[i] = rng.index(3);
            golds[i] = rng.index(3);
        }
        const EvalReport r = evaluate(preds, golds);
        std::size_t trace = 0, cells = 0;
        for (std::size_t g = 0; g < 3; ++g) {
            std::size_t row = 0;
            for (std::size_t p = 0; p < 3; ++p) row += r.confusion[g][p];
            EXPECT_EQ(row, r.per_class[g].support);
            EXPECT_EQ(row, static_cast<std::size_t>(std::count(golds.begin(), golds.end(), g)));
            trace += r.confusion[g][g];
            cells += row;
        }
        EXPECT_EQ(cells, n);
        EXPECT_NEAR(r.accuracy, static_cast<double>(trace) / n, 1e-12);
        const double f1_mean = (r.per_class[0].f1 + r.per_class[1].f1 + r.per_class[2].f1) / 3;
        EXPECT_NEAR(r.macro_f1, f1_mean, 1e-12);
        EXPECT_NEAR(r.macro_f1, oracle::macro_f1(preds, golds), 1e-12);
        EXPECT_GE(r.macro_f1, 0.0);
        EXPECT_LE(r.macro_f1, 1.0);
    }
}

TEST(EvalReport, JsonKeyOrderAndValues) {
    const EvalReport r = evaluate(Labels{0, 1, 1, 1}, Labels{0, 0, 1, 1});
    const std::string line = format_json(r);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    const auto j = nlohmann::ordered_json::parse(line);
    std::vector<std::string> keys;
    for (const auto &item : j.items()) keys.push_back(item.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"accuracy", "macro_f1", "precision", "recall", "f1",
                                              "support", "confusion", "total"}));
    EXPECT_EQ(j["accuracy"].get<double>(), 0.75);
    EXPECT_EQ(j["support"], nlohmann::json::parse("[2, 2, 0]"));
    EXPECT_EQ(j["confusion"], nlohmann::json::parse("[[1, 1, 0], [0, 2, 0], [0, 0, 0]]"));
    EXPECT_EQ(j["total"].get<std::size_t>(), 4u);
}

TEST(EvalReport, TableNamesEveryClass) {
    const std::string table = format_table(evaluate(Labels{0, 1, 2}, Labels{0, 1, 1}));
    for (const char *word : {"accuracy", "macro-F1", "positive", "negative", "neutral", "0.6667"})
        EXPECT_NE(table.find(word), std::string::npos) << word;
}
