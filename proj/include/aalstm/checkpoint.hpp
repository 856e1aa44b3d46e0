#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>

#include "aalstm/model.hpp"
#include "aalstm/params.hpp"

namespace aalstm {

// Text container, one tensor per block:
//
//   params <count>
//   <name> <rows> <cols>
//   <rows*cols hexfloat values, row-major>
//
// Hexfloat keeps the round trip bit-exact.
void write_params(std::ostream &out, std::span<const ConstParamView> params);

// Reads a block written by write_params into `params`, which must have the
// same names and shapes in the same order. Throws ParseError otherwise.
void read_params(std::istream &in, std::span<const ParamView> params,
                 const std::string &source = "<params>");

// Model checkpoint: "aalstm-checkpoint 1" header, model spec, vocabulary,
// then the parameter block.
void save_checkpoint(std::ostream &out, const Model &model);
void save_checkpoint(const std::filesystem::path &path, const Model &model);
Model load_checkpoint(std::istream &in, const std::string &source = "<checkpoint>");
Model load_checkpoint(const std::filesystem::path &path);

} // namespace aalstm
