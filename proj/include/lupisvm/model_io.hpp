#ifndef LUPISVM_MODEL_IO_HPP
#define LUPISVM_MODEL_IO_HPP

#include "lupisvm/trainers.hpp"

#include <filesystem>
#include <iosfwd>

namespace lupisvm {

// Line-oriented text format:
//
//   lupisvm-model v1
//   method <svm|svm1plus|svm2plus>
//   kernel linear | kernel rbf <gamma> | kernel poly <degree> <gamma> <coef0>
//   features <d>
//   classes <k>
//   then per class:
//     class <label>
//     bias <b>
//     nsv <m>
//     m lines of "<coeff> idx:val ..." (1-based indices)
//
// Numbers use shortest round-trip formatting, so save -> load -> save is byte-identical.
// Training diagnostics are not stored.

void write_model(std::ostream &out, const MulticlassModel &model);
[[nodiscard]] MulticlassModel read_model(std::istream &in, const std::string &source_name = "<stream>");

void save_model(const std::filesystem::path &path, const MulticlassModel &model);
[[nodiscard]] MulticlassModel load_model(const std::filesystem::path &path);

}  // namespace lupisvm

#endif  // LUPISVM_MODEL_IO_HPP
