#ifndef LUPISVM_ERROR_HPP
#define LUPISVM_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace lupisvm {

/// Failure categories raised by the library. The CLI maps these onto exit codes.
enum class errc {
    dimension_mismatch,
    not_positive_definite,
    invalid_spec,
    invalid_hyperparameter,
    invalid_label,
    no_both_classes,
    not_converged,
    alignment_error,
    parse_error,
    non_monotonic_indices,
    empty_file,
    line_count_mismatch,
    empty_corpus,
    single_class_dataset,
    insufficient_class_size,
    io_error,
};

[[nodiscard]] std::string_view to_string(errc code) noexcept;

class error : public std::runtime_error {
  public:
    error(errc code, const std::string &what);

    [[nodiscard]] errc code() const noexcept { return code_; }

  private:
    errc code_;
};

}  // namespace lupisvm

#endif  // LUPISVM_ERROR_HPP
