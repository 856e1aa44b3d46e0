#include "aalstm/metrics.hpp"

#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "aalstm/model.hpp"

namespace aalstm {

namespace {

void check_labels(std::span<const std::size_t> preds, std::span<const std::size_t> golds) {
    if (preds.size() != golds.size()) {
        throw std::invalid_argument("metrics: " + std::to_string(preds.size()) +
                                    " predictions but " + std::to_string(golds.size()) +
                                    " gold labels");
    }
    if (preds.empty()) {
        throw std::invalid_argument("metrics: no labels");
    }
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] >= kNumClasses || golds[i] >= kNumClasses) {
            throw std::invalid_argument("metrics: class index out of range at position " +
                                        std::to_string(i));
        }
    }
}

} // namespace

EvalReport evaluate(std::span<const std::size_t> preds, std::span<const std::size_t> golds) {
    check_labels(preds, golds);
    EvalReport r;
    r.total = preds.size();
    for (std::size_t i = 0; i < preds.size(); ++i) {
        ++r.confusion[golds[i]][preds[i]];
    }
    std::size_t correct = 0;
    double f1_sum = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
        correct += r.confusion[c][c];
        std::size_t predicted = 0;
        std::size_t gold = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            predicted += r.confusion[k][c];
            gold += r.confusion[c][k];
        }
        auto &s = r.per_class[c];
        s.support = gold;
        const double tp = static_cast<double>(r.confusion[c][c]);
        s.precision = predicted ? tp / static_cast<double>(predicted) : 0.0;
        s.recall = gold ? tp / static_cast<double>(gold) : 0.0;
        s.f1 = s.precision + s.recall > 0.0
                   ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                   : 0.0;
        f1_sum += s.f1;
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(r.total);
    r.macro_f1 = f1_sum / 3.0;
    return r;
}

double accuracy(std::span<const std::size_t> preds, std::span<const std::size_t> golds) {
    return evaluate(preds, golds).accuracy;
}

double macro_f1(std::span<const std::size_t> preds, std::span<const std::size_t> golds) {
    return evaluate(preds, golds).macro_f1;
}

EvalReport evaluate(const Model &model, const std::vector<LabeledInstance> &instances) {
    std::vector<std::size_t> preds;
    std::vector<std::size_t> golds;
    preds.reserve(instances.size());
    golds.reserve(instances.size());
    for (const auto &inst : instances) {
        preds.push_back(static_cast<std::size_t>(model.predict(inst)));
        golds.push_back(static_cast<std::size_t>(inst.polarity));
    }
    return evaluate(preds, golds);
}

std::string format_table(const EvalReport &r) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "accuracy  %.4f\nmacro-F1  %.4f\n\n", r.accuracy,
                  r.macro_f1);
    out += line;
    out += "class      precision  recall     f1         support\n";
    for (std::size_t c = 0; c < 3; ++c) {
        const auto &s = r.per_class[c];
        std::snprintf(line, sizeof line, "%-10s %-10.4f %-10.4f %-10.4f %zu\n",
                      std::string(to_string(static_cast<Polarity>(c))).c_str(), s.precision,
                      s.recall, s.f1, s.support);
        out += line;
    }
    out += "\nconfusion (rows gold, cols predicted: pos neg neu)\n";
    for (std::size_t g = 0; g < 3; ++g) {
        std::snprintf(line, sizeof line, "%-10s %6zu %6zu %6zu\n",
                      std::string(to_string(static_cast<Polarity>(g))).c_str(), r.confusion[g][0],
                      r.confusion[g][1], r.confusion[g][2]);
        out += line;
    }
    return out;
}

std::string format_json(const EvalReport &r) {
    nlohmann::ordered_json j;
    j["accuracy"] = r.accuracy;
    j["macro_f1"] = r.macro_f1;
    auto per_class = [&](auto field) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto &s : r.per_class) {
            arr.push_back(field(s));
        }
        return arr;
    };
    j["precision"] = per_class([](const ClassScores &s) { return s.precision; });
    j["recall"] = per_class([](const ClassScores &s) { return s.recall; });
    j["f1"] = per_class([](const ClassScores &s) { return s.f1; });
    j["support"] = per_class([](const ClassScores &s) { return s.support; });
    j["confusion"] = r.confusion;
    j["total"] = r.total;
    return j.dump();
}

} // namespace aalstm
