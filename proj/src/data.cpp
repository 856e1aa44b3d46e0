#include "aalstm/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace aalstm {

std::string_view to_string(Polarity p) {
    switch (p) {
    case Polarity::Positive:
        return "positive";
    case Polarity::Negative:
        return "negative";
    case Polarity::Neutral:
        return "neutral";
    }
    return "?";
}

std::string_view to_string(Task t) { return t == Task::Atsa ? "atsa" : "acsa"; }

std::optional<Polarity> parse_polarity(std::string_view s) {
    if (s == "positive") return Polarity::Positive;
    if (s == "negative") return Polarity::Negative;
    if (s == "neutral") return Polarity::Neutral;
    return std::nullopt;
}

std::optional<Task> parse_task(std::string_view s) {
    if (s == "atsa") return Task::Atsa;
    if (s == "acsa") return Task::Acsa;
    return std::nullopt;
}

std::optional<std::size_t> category_index(std::string_view name) {
    for (std::size_t i = 0; i < kAspectCategories.size(); ++i) {
        if (kAspectCategories[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

PolarityCounts count_polarities(const std::vector<LabeledInstance> &instances) {
    PolarityCounts counts{};
    for (const auto &inst : instances) {
        ++counts[static_cast<std::size_t>(inst.polarity)];
    }
    return counts;
}

// ─── Tokenizer ──────────────────────────────────────────────────────────────

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::optional<Token> word;
    std::size_t cp = 0; // code-point index of text[i]

    auto flush = [&] {
        if (word) {
            word->end = cp;
            tokens.push_back(std::move(*word));
            word.reset();
        }
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto byte = static_cast<unsigned char>(text[i]);
        const bool continuation = (byte & 0xC0) == 0x80;
        if (continuation) {
            // Part of the previous code point; never starts a token.
            if (word) {
                word->text.push_back(static_cast<char>(byte));
            }
            continue;
        }
        if (byte < 0x80 && std::isspace(byte)) {
            flush();
        } else if (byte < 0x80 && std::ispunct(byte)) {
            flush();
            tokens.push_back({std::string(1, static_cast<char>(byte)), cp, cp + 1});
        } else {
            if (!word) {
                word = Token{{}, cp, cp};
            }
            word->text.push_back(static_cast<char>(byte < 0x80 ? std::tolower(byte) : byte));
        }
        ++cp;
    }
    flush();
    return tokens;
}

TermSpan span_for_offsets(const std::vector<Token> &tokens, std::size_t from, std::size_t to) {
    if (from >= to) {
        throw ParseError("empty character range [" + std::to_string(from) + ", " +
                         std::to_string(to) + ")");
    }
    std::optional<std::size_t> first;
    std::size_t last = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].end > from && tokens[i].begin < to) {
            if (!first) {
                first = i;
            }
            last = i;
        }
    }
    if (!first) {
        throw ParseError("character range [" + std::to_string(from) + ", " + std::to_string(to) +
                         ") covers no token");
    }
    return {*first, last};
}

// ─── SemEval-2014 Task 4 XML ────────────────────────────────────────────────

namespace {

namespace pt = boost::property_tree;

std::size_t parse_offset(const std::string &value, const std::string &where) {
    try {
        std::size_t pos = 0;
        const unsigned long v = std::stoul(value, &pos);
        if (pos != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception &) {
        throw ParseError(where + ": invalid character offset '" + value + "'");
    }
}

} // namespace

std::vector<LabeledInstance> parse_semeval_xml(std::istream &in, Task task,
                                               const std::string &source) {
    pt::ptree tree;
    try {
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error &e) {
        throw ParseError(source + ":" + std::to_string(e.line()) + ": " + e.message());
    }

    const auto root = tree.get_child_optional("sentences");
    if (!root) {
        throw ParseError(source + ": missing <sentences> root element");
    }

    std::vector<LabeledInstance> out;
    for (const auto &[name, sentence] : *root) {
        if (name != "sentence") {
            continue;
        }
        const std::string id = sentence.get<std::string>("<xmlattr>.id", "?");
        const std::string where = source + ": sentence " + id;
        const auto text = sentence.get_optional<std::string>("text");
        if (!text) {
            throw ParseError(where + ": missing <text>");
        }
        const std::vector<Token> tokens = tokenize(*text);
        std::vector<std::string> words;
        words.reserve(tokens.size());
        for (const auto &t : tokens) {
            words.push_back(t.text);
        }

        const char *group = task == Task::Atsa ? "aspectTerms" : "aspectCategories";
        const char *item = task == Task::Atsa ? "aspectTerm" : "aspectCategory";
        const auto aspects = sentence.get_child_optional(group);
        if (!aspects) {
            continue;
        }
        for (const auto &[child, aspect] : *aspects) {
            if (child != item) {
                continue;
            }
            const std::string label = aspect.get<std::string>("<xmlattr>.polarity", "");
            if (label == "conflict") {
                continue;
            }
            const auto polarity = parse_polarity(label);
            if (!polarity) {
                throw ParseError(where + ": unknown polarity '" + label + "'");
            }
            LabeledInstance inst{words, CategoryId{}, *polarity};
            if (task == Task::Atsa) {
                const auto from = parse_offset(aspect.get<std::string>("<xmlattr>.from", ""), where);
                const auto to = parse_offset(aspect.get<std::string>("<xmlattr>.to", ""), where);
                try {
                    inst.aspect = span_for_offsets(tokens, from, to);
                } catch (const ParseError &e) {
                    throw ParseError(where + ": " + e.what());
                }
            } else {
                const std::string category = aspect.get<std::string>("<xmlattr>.category", "");
                const auto idx = category_index(category);
                if (!idx) {
                    throw ParseError(where + ": unknown aspect category '" + category + "'");
                }
                inst.aspect = CategoryId{*idx};
            }
            out.push_back(std::move(inst));
        }
    }
    return out;
}

std::vector<LabeledInstance> parse_semeval_xml(const std::filesystem::path &path, Task task) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    return parse_semeval_xml(in, task, path.string());
}

// ─── Vocabulary and embeddings ──────────────────────────────────────────────

Vocabulary::Vocabulary() { add(std::string(kUnknown)); }

Vocabulary::Vocabulary(const std::vector<std::string> &tokens) {
    for (const auto &t : tokens) {
        add(t);
    }
    if (tokens_.empty() || tokens_.front() != kUnknown) {
        throw std::invalid_argument("vocabulary must start with " + std::string(kUnknown));
    }
}

std::size_t Vocabulary::add(const std::string &token) {
    const auto [it, inserted] = index_.emplace(token, tokens_.size());
    if (inserted) {
        tokens_.push_back(token);
    }
    return it->second;
}

std::optional<std::size_t> Vocabulary::find(const std::string &token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t Vocabulary::index_or_unknown(const std::string &token) const {
    return find(token).value_or(0);
}

Vocabulary build_vocabulary(const std::vector<const std::vector<LabeledInstance> *> &sets) {
    Vocabulary vocab;
    for (const auto *set : sets) {
        for (const auto &inst : *set) {
            for (const auto &tok : inst.tokens) {
                vocab.add(tok);
            }
        }
    }
    return vocab;
}

EmbeddingTable load_embeddings(std::istream &in, const Vocabulary &vocab, std::size_t dim,
                               std::uint64_t seed, const std::string &source) {
    EmbeddingTable table{vocab, Matrix(vocab.size(), dim), 0, 0};
    std::vector<bool> found(vocab.size(), false);

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> fields;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        fields.clear();
        std::istringstream ss(line);
        for (std::string f; ss >> f;) {
            fields.push_back(std::move(f));
        }
        if (fields.empty()) {
            continue;
        }
        if (fields.size() < dim + 1) {
            throw ParseError(source + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(dim) + " values, found " +
                             std::to_string(fields.size() - 1));
        }
        // Some GloVe releases contain tokens with embedded spaces; the last
        // `dim` fields are always the vector.
        const std::size_t head = fields.size() - dim;
        std::string token = fields[0];
        for (std::size_t i = 1; i < head; ++i) {
            token += " " + fields[i];
        }
        std::transform(token.begin(), token.end(), token.begin(), [](unsigned char c) {
            return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
        });
        const auto idx = vocab.find(token);
        if (!idx || found[*idx]) {
            continue;
        }
        auto row = table.matrix.row(*idx);
        for (std::size_t j = 0; j < dim; ++j) {
            char *end = nullptr;
            const std::string &f = fields[head + j];
            row[j] = std::strtod(f.c_str(), &end);
            if (end != f.c_str() + f.size()) {
                throw ParseError(source + ":" + std::to_string(line_no) + ": bad number '" + f +
                                 "'");
            }
        }
        found[*idx] = true;
        ++table.from_file;
    }

    Rng rng(seed);
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        if (!found[i]) {
            for (double &x : table.matrix.row(i)) {
                x = rng.uniform(-0.1, 0.1);
            }
            ++table.out_of_vocabulary;
        }
    }
    return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path &path, const Vocabulary &vocab,
                               std::size_t dim, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    return load_embeddings(in, vocab, dim, seed, path.string());
}

EmbeddingTable random_embeddings(const Vocabulary &vocab, std::size_t dim, std::uint64_t seed) {
    std::istringstream empty;
    return load_embeddings(empty, vocab, dim, seed);
}

AspectEmbeddingTable AspectEmbeddingTable::random(std::size_t dim, std::uint64_t seed) {
    return {uniform_init(kAspectCategories.size(), dim, -0.1, 0.1, seed)};
}

Vector build_aspect_vector(const LabeledInstance &instance, const EmbeddingTable &embeddings,
                           const AspectEmbeddingTable *aspects) {
    if (const auto *span = std::get_if<TermSpan>(&instance.aspect)) {
        if (span->start > span->end || span->end >= instance.tokens.size()) {
            throw std::invalid_argument("aspect span [" + std::to_string(span->start) + ", " +
                                        std::to_string(span->end) + "] is empty or out of range");
        }
        Vector mean(embeddings.dim());
        const double weight = 1.0 / static_cast<double>(span->end - span->start + 1);
        for (std::size_t t = span->start; t <= span->end; ++t) {
            const auto row =
                embeddings.matrix.row(embeddings.vocab.index_or_unknown(instance.tokens[t]));
            for (std::size_t j = 0; j < row.size(); ++j) {
                mean[j] += weight * row[j];
            }
        }
        return mean;
    }
    const auto category = std::get<CategoryId>(instance.aspect).index;
    if (!aspects) {
        throw std::invalid_argument("category aspect requires an aspect embedding table");
    }
    if (category >= aspects->vectors.rows()) {
        throw std::invalid_argument("aspect category index out of range");
    }
    const auto row = aspects->vectors.row(category);
    return Vector(std::vector<double>(row.begin(), row.end()));
}

std::pair<std::vector<LabeledInstance>, std::vector<LabeledInstance>>
dev_split(std::vector<LabeledInstance> instances, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("dev fraction must lie in (0, 1)");
    }
    Rng rng(seed);
    rng.shuffle(instances);
    const auto dev_size = static_cast<std::size_t>(
        std::lround(static_cast<double>(instances.size()) * fraction));
    std::vector<LabeledInstance> dev(std::make_move_iterator(instances.begin()),
                                     std::make_move_iterator(instances.begin() +
                                                             static_cast<std::ptrdiff_t>(dev_size)));
    instances.erase(instances.begin(), instances.begin() + static_cast<std::ptrdiff_t>(dev_size));
    return {std::move(instances), std::move(dev)};
}

// ─── Synthetic corpus ───────────────────────────────────────────────────────

namespace {

constexpr std::array<std::string_view, 10> kNouns = {
    "salad", "soup", "pizza", "beef", "pasta", "steak", "service", "dessert", "wine", "bread"};
constexpr std::array<std::string_view, 5> kPositiveWords = {"delicious", "great", "excellent",
                                                            "wonderful", "tasty"};
constexpr std::array<std::string_view, 5> kNegativeWords = {"unsatisfied", "bad", "awful",
                                                            "terrible", "bland"};
constexpr std::array<std::string_view, 4> kNeutralWords = {"okay", "average", "ordinary",
                                                           "standard"};

std::string_view sentiment_word(Polarity p, Rng &rng) {
    switch (p) {
    case Polarity::Positive:
        return kPositiveWords[rng.index(kPositiveWords.size())];
    case Polarity::Negative:
        return kNegativeWords[rng.index(kNegativeWords.size())];
    case Polarity::Neutral:
        return kNeutralWords[rng.index(kNeutralWords.size())];
    }
    return {};
}

} // namespace

SyntheticCorpus generate_synthetic(std::size_t n_sentences, std::uint64_t seed,
                                   std::size_t embedding_dim) {
    if (n_sentences < 20) {
        throw std::invalid_argument("synthetic corpus needs at least 20 sentences");
    }
    Rng rng(seed);
    const std::size_t n_test = n_sentences / 3;

    SyntheticCorpus corpus;
    for (std::size_t s = 0; s < n_sentences; ++s) {
        const std::size_t first = rng.index(kNouns.size());
        std::size_t second = rng.index(kNouns.size() - 1);
        if (second >= first) {
            ++second;
        }
        const auto p1 = static_cast<Polarity>(rng.index(3));
        const auto p2 = static_cast<Polarity>(rng.index(3));
        // the X is W1 but the Y is W2
        const std::vector<std::string> tokens = {
            "the", std::string(kNouns[first]),  "is", std::string(sentiment_word(p1, rng)),
            "but", "the", std::string(kNouns[second]), "is", std::string(sentiment_word(p2, rng))};
        auto &dest = s < n_sentences - n_test ? corpus.train : corpus.test;
        dest.push_back({tokens, TermSpan{1, 1}, p1});
        dest.push_back({tokens, TermSpan{6, 6}, p2});
    }

    Vocabulary vocab;
    for (std::string_view w : {"the", "is", "but"}) {
        vocab.add(std::string(w));
    }
    for (auto w : kNouns) vocab.add(std::string(w));
    for (auto w : kPositiveWords) vocab.add(std::string(w));
    for (auto w : kNegativeWords) vocab.add(std::string(w));
    for (auto w : kNeutralWords) vocab.add(std::string(w));
    corpus.embeddings = random_embeddings(vocab, embedding_dim, seed ^ 0x9e3779b97f4a7c15ULL);
    return corpus;
}

std::vector<std::size_t> disambiguation_subset(const std::vector<LabeledInstance> &instances) {
    std::map<std::vector<std::string>, std::set<Polarity>> labels;
    for (const auto &inst : instances) {
        labels[inst.tokens].insert(inst.polarity);
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (labels[instances[i].tokens].size() > 1) {
            out.push_back(i);
        }
    }
    return out;
}

// ─── Instance serialization ─────────────────────────────────────────────────

std::string format_instance(const LabeledInstance &instance) {
    std::string line;
    for (std::size_t i = 0; i < instance.tokens.size(); ++i) {
        if (i) line += ' ';
        line += instance.tokens[i];
    }
    line += '\t';
    if (const auto *span = std::get_if<TermSpan>(&instance.aspect)) {
        line += "term:" + std::to_string(span->start) + "-" + std::to_string(span->end);
    } else {
        line += "category:";
        line += kAspectCategories.at(std::get<CategoryId>(instance.aspect).index);
    }
    line += '\t';
    line += to_string(instance.polarity);
    return line;
}

LabeledInstance parse_instance(std::string_view line) {
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string_view::npos) {
        throw ParseError("instance line needs three tab-separated fields: '" + std::string(line) +
                         "'");
    }
    LabeledInstance inst;
    std::istringstream ss{std::string(line.substr(0, tab1))};
    for (std::string tok; ss >> tok;) {
        inst.tokens.push_back(std::move(tok));
    }
    const std::string_view aspect = line.substr(tab1 + 1, tab2 - tab1 - 1);
    const std::string_view label = line.substr(tab2 + 1);

    if (aspect.starts_with("term:")) {
        const std::string range(aspect.substr(5));
        const auto dash = range.find('-');
        if (dash == std::string::npos) {
            throw ParseError("bad term span '" + range + "'");
        }
        TermSpan span;
        try {
            span = {std::stoul(range.substr(0, dash)), std::stoul(range.substr(dash + 1))};
        } catch (const std::exception &) {
            throw ParseError("bad term span '" + range + "'");
        }
        if (span.start > span.end || span.end >= inst.tokens.size()) {
            throw ParseError("term span '" + range + "' outside the sentence");
        }
        inst.aspect = span;
    } else if (aspect.starts_with("category:")) {
        const auto idx = category_index(aspect.substr(9));
        if (!idx) {
            throw ParseError("unknown category '" + std::string(aspect.substr(9)) + "'");
        }
        inst.aspect = CategoryId{*idx};
    } else {
        throw ParseError("bad aspect field '" + std::string(aspect) + "'");
    }
    const auto polarity = parse_polarity(label);
    if (!polarity) {
        throw ParseError("bad polarity '" + std::string(label) + "'");
    }
    inst.polarity = *polarity;
    return inst;
}

void write_instances(std::ostream &out, const std::vector<LabeledInstance> &instances) {
    for (const auto &inst : instances) {
        out << format_instance(inst) << '\n';
    }
}

std::vector<LabeledInstance> read_instances(std::istream &in) {
    std::vector<LabeledInstance> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            out.push_back(parse_instance(line));
        }
    }
    return out;
}

std::vector<LabeledInstance> read_instances(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    return read_instances(in);
}

} // namespace aalstm
