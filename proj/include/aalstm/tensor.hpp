#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aalstm {

// Raised when operand shapes do not conform.
class ShapeError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a model or parameter set is constructed with inconsistent
// dimensions.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class Vector {
  public:
    Vector() = default;
    explicit Vector(std::size_t dim, double fill = 0.0) : data_(dim, fill) {}
    Vector(std::initializer_list<double> values) : data_(values) {}
    explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

    std::size_t dim() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double &operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    void fill(double v);

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    bool operator==(const Vector &) const = default;

  private:
    std::vector<double> data_;
};

// Row-major dense matrix.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    void fill(double v);

    bool operator==(const Matrix &) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

std::string shape_string(const Matrix &m);
std::string shape_string(const Vector &v);

// M * v
Vector matvec(const Matrix &m, const Vector &v);
// M^T * v
Vector matvec_transposed(const Matrix &m, const Vector &v);
// m += scale * (a ⊗ b)
void add_outer(Matrix &m, const Vector &a, const Vector &b, double scale = 1.0);

Vector concat(const Vector &a, const Vector &b);
// Splits v into its first `head` entries and the remainder.
std::pair<Vector, Vector> split(const Vector &v, std::size_t head);

Vector hadamard(const Vector &a, const Vector &b);
Vector add(const Vector &a, const Vector &b);
Vector scale(const Vector &a, double s);
// y += s * x
void axpy(double s, const Vector &x, Vector &y);
void axpy(double s, const Matrix &x, Matrix &y);
double dot(const Vector &a, const Vector &b);

double sigmoid(double x);
Vector sigmoid(const Vector &v);
Vector tanh_v(const Vector &v);

double squared_norm(const Matrix &m);
bool all_finite(std::span<const double> values);

// Deterministic generator. Draws come from std::mt19937_64, whose output
// sequence is fixed by the standard; the mapping to reals and integers is
// implemented here so results do not depend on the standard library's
// distribution classes.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    // Uniform in [0, 1) with 53 random bits.
    double uniform01();
    // Uniform in [lo, hi).
    double uniform(double lo, double hi);
    // Uniform integer in [0, n).
    std::size_t index(std::size_t n);
    bool bernoulli(double p);

    template <typename T> void shuffle(std::vector<T> &items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[index(i)]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

Matrix uniform_init(std::size_t rows, std::size_t cols, double lo, double hi, std::uint64_t seed);
Matrix uniform_init(std::size_t rows, std::size_t cols, double lo, double hi, Rng &rng);
Vector uniform_vector(std::size_t dim, double lo, double hi, Rng &rng);

} // namespace aalstm
