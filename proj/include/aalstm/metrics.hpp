#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "aalstm/data.hpp"

namespace aalstm {

class Model;

// Fraction of positions where preds and golds agree.
double accuracy(std::span<const std::size_t> preds, std::span<const std::size_t> golds);

// Unweighted mean of the three per-class F1 scores. A class whose precision
// and recall are both zero contributes 0.
double macro_f1(std::span<const std::size_t> preds, std::span<const std::size_t> golds);

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0; // gold count
};

struct EvalReport {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::array<ClassScores, 3> per_class{};
    // confusion[gold][predicted]
    std::array<std::array<std::size_t, 3>, 3> confusion{};
    std::size_t total = 0;
};

EvalReport evaluate(std::span<const std::size_t> preds, std::span<const std::size_t> golds);
EvalReport evaluate(const Model &model, const std::vector<LabeledInstance> &instances);

// Multi-line human-readable table.
std::string format_table(const EvalReport &report);

// Single JSON line with keys in this order: accuracy, macro_f1, precision,
// recall, f1, support, confusion, total. Per-class arrays are ordered
// positive, negative, neutral; confusion rows are gold classes.
std::string format_json(const EvalReport &report);

} // namespace aalstm
