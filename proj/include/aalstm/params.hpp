#pragma once

#include <span>
#include <string>

#include "aalstm/tensor.hpp"

namespace aalstm {

enum class ParamKind { Weight, Bias, WordEmbedding, AspectEmbedding };

// A named, shaped window onto one parameter tensor.
template <typename T> struct BasicParamView {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::span<T> values;
    ParamKind kind = ParamKind::Weight;
};
using ParamView = BasicParamView<double>;
using ConstParamView = BasicParamView<const double>;

inline ParamView view_of(std::string name, Matrix &m, ParamKind kind = ParamKind::Weight) {
    return {std::move(name), m.rows(), m.cols(), m.values(), kind};
}

inline ParamView view_of(std::string name, Vector &v, ParamKind kind = ParamKind::Bias) {
    return {std::move(name), v.dim(), 1, v.values(), kind};
}

inline ConstParamView as_const(const ParamView &v) {
    return {v.name, v.rows, v.cols, v.values, v.kind};
}

} // namespace aalstm
