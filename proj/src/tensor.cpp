#include "aalstm/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace aalstm {

void Vector::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                         " does not match shape " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    data_.reserve(rows_ * cols_);
    for (const auto &r : rows) {
        if (r.size() != cols_) {
            throw ShapeError("ragged matrix initializer");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string shape_string(const Matrix &m) {
    return "(" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")";
}

std::string shape_string(const Vector &v) { return "(" + std::to_string(v.dim()) + ")"; }

namespace {

void require_same_dim(const Vector &a, const Vector &b, const char *op) {
    if (a.dim() != b.dim()) {
        throw ShapeError(std::string(op) + ": dimension mismatch " + shape_string(a) + " vs " +
                         shape_string(b));
    }
}

} // namespace

Vector matvec(const Matrix &m, const Vector &v) {
    if (m.cols() != v.dim()) {
        throw ShapeError("matvec: matrix " + shape_string(m) + " cannot multiply vector " +
                         shape_string(v));
    }
    Vector out(m.rows());
    const auto x = v.values();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j) {
            acc += r[j] * x[j];
        }
        out[i] = acc;
    }
    return out;
}

Vector matvec_transposed(const Matrix &m, const Vector &v) {
    if (m.rows() != v.dim()) {
        throw ShapeError("matvec_transposed: matrix " + shape_string(m) +
                         " cannot multiply vector " + shape_string(v));
    }
    Vector out(m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double s = v[i];
        if (s == 0.0) {
            continue;
        }
        const auto r = m.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            out[j] += r[j] * s;
        }
    }
    return out;
}

void add_outer(Matrix &m, const Vector &a, const Vector &b, double scale) {
    if (m.rows() != a.dim() || m.cols() != b.dim()) {
        throw ShapeError("add_outer: target " + shape_string(m) + " vs outer product " +
                         shape_string(a) + "x" + shape_string(b));
    }
    for (std::size_t i = 0; i < a.dim(); ++i) {
        const double s = scale * a[i];
        if (s == 0.0) {
            continue;
        }
        auto r = m.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            r[j] += s * b[j];
        }
    }
}

Vector concat(const Vector &a, const Vector &b) {
    std::vector<double> out;
    out.reserve(a.dim() + b.dim());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return Vector(std::move(out));
}

std::pair<Vector, Vector> split(const Vector &v, std::size_t head) {
    if (head > v.dim()) {
        throw ShapeError("split: head " + std::to_string(head) + " exceeds " + shape_string(v));
    }
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(head);
    return {Vector(std::vector<double>(v.begin(), mid)),
            Vector(std::vector<double>(mid, v.end()))};
}

Vector hadamard(const Vector &a, const Vector &b) {
    require_same_dim(a, b, "hadamard");
    Vector out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        out[i] = a[i] * b[i];
    }
    return out;
}

Vector add(const Vector &a, const Vector &b) {
    require_same_dim(a, b, "add");
    Vector out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        out[i] = a[i] + b[i];
    }
    return out;
}

Vector scale(const Vector &a, double s) {
    Vector out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        out[i] = a[i] * s;
    }
    return out;
}

void axpy(double s, const Vector &x, Vector &y) {
    require_same_dim(x, y, "axpy");
    for (std::size_t i = 0; i < x.dim(); ++i) {
        y[i] += s * x[i];
    }
}

void axpy(double s, const Matrix &x, Matrix &y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        throw ShapeError("axpy: " + shape_string(x) + " vs " + shape_string(y));
    }
    auto dst = y.values();
    auto src = x.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] += s * src[i];
    }
}

double dot(const Vector &a, const Vector &b) {
    require_same_dim(a, b, "dot");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double sigmoid(double x) {
    // Branch on sign so exp() only ever sees a non-positive argument.
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Vector sigmoid(const Vector &v) {
    Vector out(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) {
        out[i] = sigmoid(v[i]);
    }
    return out;
}

Vector tanh_v(const Vector &v) {
    Vector out(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) {
        out[i] = std::tanh(v[i]);
    }
    return out;
}

double squared_norm(const Matrix &m) {
    double acc = 0.0;
    for (double x : m.values()) {
        acc += x * x;
    }
    return acc;
}

bool all_finite(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) {
    if (!(lo < hi)) {
        throw std::invalid_argument("uniform: require lo < hi");
    }
    const double x = lo + (hi - lo) * uniform01();
    // Rounding can land exactly on hi when the interval is narrow.
    return x < hi ? x : std::nextafter(hi, lo);
}

std::size_t Rng::index(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("index: empty range");
    }
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

bool Rng::bernoulli(double p) { return uniform01() < p; }

Matrix uniform_init(std::size_t rows, std::size_t cols, double lo, double hi, Rng &rng) {
    if (!(lo < hi)) {
        throw std::invalid_argument("uniform_init: require lo < hi, got [" + std::to_string(lo) +
                                    ", " + std::to_string(hi) + ")");
    }
    Matrix m(rows, cols);
    for (double &x : m.values()) {
        x = rng.uniform(lo, hi);
    }
    return m;
}

Matrix uniform_init(std::size_t rows, std::size_t cols, double lo, double hi, std::uint64_t seed) {
    Rng rng(seed);
    return uniform_init(rows, cols, lo, hi, rng);
}

Vector uniform_vector(std::size_t dim, double lo, double hi, Rng &rng) {
    Vector v(dim);
    for (double &x : v) {
        x = rng.uniform(lo, hi);
    }
    return v;
}

} // namespace aalstm
