#include "aalstm/checkpoint.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace aalstm {

namespace {

constexpr std::string_view kMagic = "aalstm-checkpoint";
constexpr int kVersion = 1;

class Reader {
  public:
    Reader(std::istream &in, std::string source) : in_(in), source_(std::move(source)) {}

    // Next non-empty line, split on whitespace.
    std::vector<std::string> fields() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            std::istringstream ss(line);
            std::vector<std::string> out;
            for (std::string f; ss >> f;) {
                out.push_back(std::move(f));
            }
            if (!out.empty()) {
                return out;
            }
        }
        fail("unexpected end of file");
    }

    std::string line() {
        std::string s;
        if (!std::getline(in_, s)) {
            fail("unexpected end of file");
        }
        ++line_;
        return s;
    }

    std::vector<std::string> expect(std::string_view key, std::size_t values) {
        auto f = fields();
        if (f.size() != values + 1 || f[0] != key) {
            fail("expected '" + std::string(key) + "' with " + std::to_string(values) +
                 " value(s)");
        }
        return f;
    }

    std::size_t count(const std::string &s) {
        char *end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
        if (errno || *end != '\0' || s.empty() || s[0] == '-') {
            fail("bad count '" + s + "'");
        }
        return static_cast<std::size_t>(v);
    }

    double real(const std::string &s) {
        char *end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || *end != '\0') {
            fail("bad number '" + s + "'");
        }
        return v;
    }

    [[noreturn]] void fail(const std::string &msg) const {
        throw ParseError(source_ + ":" + std::to_string(line_) + ": " + msg);
    }

  private:
    std::istream &in_;
    std::string source_;
    std::size_t line_ = 0;
};

void read_block(Reader &r, std::span<const ParamView> params) {
    const auto head = r.expect("params", 1);
    if (r.count(head[1]) != params.size()) {
        r.fail("expected " + std::to_string(params.size()) + " tensors, found " + head[1]);
    }
    for (const auto &p : params) {
        const auto f = r.fields();
        if (f.size() != 3 || f[0] != p.name) {
            r.fail("expected tensor '" + p.name + "'");
        }
        if (r.count(f[1]) != p.rows || r.count(f[2]) != p.cols) {
            r.fail("tensor '" + p.name + "' has shape " + f[1] + "x" + f[2] + ", expected " +
                   std::to_string(p.rows) + "x" + std::to_string(p.cols));
        }
        std::size_t filled = 0;
        while (filled < p.values.size()) {
            for (const auto &v : r.fields()) {
                if (filled == p.values.size()) {
                    r.fail("too many values for '" + p.name + "'");
                }
                p.values[filled++] = r.real(v);
            }
        }
    }
}

} // namespace

void write_params(std::ostream &out, std::span<const ConstParamView> params) {
    out << "params " << params.size() << '\n';
    char buf[64];
    for (const auto &p : params) {
        out << p.name << ' ' << p.rows << ' ' << p.cols << '\n';
        for (std::size_t r = 0; r < p.rows; ++r) {
            for (std::size_t c = 0; c < p.cols; ++c) {
                std::snprintf(buf, sizeof buf, "%a", p.values[r * p.cols + c]);
                out << (c ? " " : "") << buf;
            }
            out << '\n';
        }
    }
}

void read_params(std::istream &in, std::span<const ParamView> params, const std::string &source) {
    Reader r(in, source);
    read_block(r, params);
}

void save_checkpoint(std::ostream &out, const Model &model) {
    const ModelSpec &s = model.spec();
    out << kMagic << ' ' << kVersion << '\n'
        << "task " << to_string(s.task) << '\n'
        << "cell " << to_string(s.cell) << '\n'
        << "head " << to_string(s.head) << '\n'
        << "dims " << s.vocab_size << ' ' << s.input_dim << ' ' << s.hidden_dim << ' '
        << s.aspect_dim << '\n'
        << "vocab " << model.vocab().size() << '\n';
    for (const auto &tok : model.vocab().tokens()) {
        out << tok << '\n';
    }
    write_params(out, model.params().views());
}

void save_checkpoint(const std::filesystem::path &path, const Model &model) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write checkpoint " + path.string());
    }
    save_checkpoint(out, model);
    if (!out) {
        throw std::runtime_error("error writing checkpoint " + path.string());
    }
}

Model load_checkpoint(std::istream &in, const std::string &source) {
    Reader r(in, source);
    const auto magic = r.fields();
    if (magic.size() != 2 || magic[0] != kMagic) {
        r.fail("not an aalstm checkpoint");
    }
    if (magic[1] != std::to_string(kVersion)) {
        r.fail("unsupported checkpoint version " + magic[1]);
    }
    ModelSpec spec;
    const auto task = parse_task(r.expect("task", 1)[1]);
    const auto cell = parse_cell_kind(r.expect("cell", 1)[1]);
    const auto head = parse_head_kind(r.expect("head", 1)[1]);
    if (!task || !cell || !head) {
        r.fail("unknown task, cell or head kind");
    }
    spec.task = *task;
    spec.cell = *cell;
    spec.head = *head;
    const auto dims = r.expect("dims", 4);
    spec.vocab_size = r.count(dims[1]);
    spec.input_dim = r.count(dims[2]);
    spec.hidden_dim = r.count(dims[3]);
    spec.aspect_dim = r.count(dims[4]);
    try {
        spec.validate();
    } catch (const ConfigError &e) {
        r.fail(e.what());
    }

    const std::size_t n = r.count(r.expect("vocab", 1)[1]);
    if (n != spec.vocab_size) {
        r.fail("vocabulary size disagrees with dims");
    }
    std::vector<std::string> tokens;
    tokens.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        tokens.push_back(r.line());
    }
    ModelParams params = ModelParams::zeros(spec);
    read_block(r, params.views());
    try {
        return Model(Vocabulary(tokens), std::move(params));
    } catch (const std::invalid_argument &e) {
        r.fail(e.what());
    }
}

Model load_checkpoint(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open checkpoint " + path.string());
    }
    return load_checkpoint(in, path.string());
}

} // namespace aalstm
