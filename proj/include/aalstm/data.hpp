#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "aalstm/tensor.hpp"

namespace aalstm {

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Polarity : std::uint8_t { Positive = 0, Negative = 1, Neutral = 2 };
enum class Task { Atsa, Acsa };

std::string_view to_string(Polarity p);
std::string_view to_string(Task t);
std::optional<Polarity> parse_polarity(std::string_view s);
std::optional<Task> parse_task(std::string_view s);

// The five SemEval-2014 restaurant aspect categories.
inline constexpr std::array<std::string_view, 5> kAspectCategories = {
    "food", "service", "price", "ambience", "anecdotes/miscellaneous"};

std::optional<std::size_t> category_index(std::string_view name);

// Inclusive token range.
struct TermSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    bool operator==(const TermSpan &) const = default;
};

struct CategoryId {
    std::size_t index = 0;
    bool operator==(const CategoryId &) const = default;
};

using AspectSpec = std::variant<TermSpan, CategoryId>;

struct LabeledInstance {
    std::vector<std::string> tokens;
    AspectSpec aspect;
    Polarity polarity = Polarity::Neutral;

    bool operator==(const LabeledInstance &) const = default;
};

using PolarityCounts = std::array<std::size_t, 3>; // positive, negative, neutral
PolarityCounts count_polarities(const std::vector<LabeledInstance> &instances);

// Tokens carry code-point offsets [begin, end) into the source text.
struct Token {
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Lowercases ASCII letters, splits on whitespace, and emits each ASCII
// punctuation character as its own token.
std::vector<Token> tokenize(std::string_view text);

// Smallest token span covering the character range [from, to).
TermSpan span_for_offsets(const std::vector<Token> &tokens, std::size_t from, std::size_t to);

std::vector<LabeledInstance> parse_semeval_xml(const std::filesystem::path &path, Task task);
std::vector<LabeledInstance> parse_semeval_xml(std::istream &in, Task task,
                                               const std::string &source = "<stream>");

class Vocabulary {
  public:
    static constexpr std::string_view kUnknown = "<unk>";

    Vocabulary();
    explicit Vocabulary(const std::vector<std::string> &tokens);

    std::size_t add(const std::string &token);
    std::optional<std::size_t> find(const std::string &token) const;
    // Unknown tokens map to index 0.
    std::size_t index_or_unknown(const std::string &token) const;
    std::size_t size() const { return tokens_.size(); }
    const std::vector<std::string> &tokens() const { return tokens_; }

    bool operator==(const Vocabulary &other) const { return tokens_ == other.tokens_; }

  private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> index_;
};

Vocabulary build_vocabulary(const std::vector<const std::vector<LabeledInstance> *> &sets);

struct EmbeddingTable {
    Vocabulary vocab;
    Matrix matrix; // |V| x dim
    std::size_t from_file = 0;
    std::size_t out_of_vocabulary = 0;

    std::size_t dim() const { return matrix.cols(); }
};

// Reads GloVe text vectors for the vocabulary; rows not found in the file
// are drawn from U(-0.1, 0.1).
EmbeddingTable load_embeddings(const std::filesystem::path &path, const Vocabulary &vocab,
                               std::size_t dim, std::uint64_t seed);
EmbeddingTable load_embeddings(std::istream &in, const Vocabulary &vocab, std::size_t dim,
                               std::uint64_t seed, const std::string &source = "<stream>");
EmbeddingTable random_embeddings(const Vocabulary &vocab, std::size_t dim, std::uint64_t seed);

// One trainable vector per category.
struct AspectEmbeddingTable {
    Matrix vectors; // categories x da

    static AspectEmbeddingTable random(std::size_t dim, std::uint64_t seed);
};

// ATSA: mean of the span's embedding rows. ACSA: the category's row.
Vector build_aspect_vector(const LabeledInstance &instance, const EmbeddingTable &embeddings,
                           const AspectEmbeddingTable *aspects);

// Seeded shuffle, then the first round(N * fraction) instances go to dev.
std::pair<std::vector<LabeledInstance>, std::vector<LabeledInstance>>
dev_split(std::vector<LabeledInstance> instances, double fraction, std::uint64_t seed);

struct SyntheticCorpus {
    std::vector<LabeledInstance> train;
    std::vector<LabeledInstance> test;
    EmbeddingTable embeddings;
};

// Two-aspect sentences "the X is W1 but the Y is W2". Each sentence yields
// one instance per aspect noun, so both instances share tokens and differ
// only in aspect span and label. One third of the sentences go to test.
SyntheticCorpus generate_synthetic(std::size_t n_sentences, std::uint64_t seed,
                                   std::size_t embedding_dim = 16);

// Indices of instances whose token sequence also occurs with another label.
std::vector<std::size_t> disambiguation_subset(const std::vector<LabeledInstance> &instances);

// Line format: tokens joined by single spaces, TAB, aspect ("term:S-E" or
// "category:NAME"), TAB, polarity.
std::string format_instance(const LabeledInstance &instance);
LabeledInstance parse_instance(std::string_view line);
void write_instances(std::ostream &out, const std::vector<LabeledInstance> &instances);
std::vector<LabeledInstance> read_instances(std::istream &in);
std::vector<LabeledInstance> read_instances(const std::filesystem::path &path);

} // namespace aalstm
