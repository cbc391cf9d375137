#include "lupisvm/error.hpp"

namespace lupisvm {

std::string_view to_string(const errc code) noexcept {
    switch (code) {
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::not_positive_definite: return "NotPositiveDefinite";
        case errc::invalid_spec: return "InvalidSpec";
        case errc::invalid_hyperparameter: return "InvalidHyperparameter";
        case errc::invalid_label: return "InvalidLabel";
        case errc::no_both_classes: return "NoBothClasses";
        case errc::not_converged: return "NotConverged";
        case errc::alignment_error: return "AlignmentError";
        case errc::parse_error: return "ParseError";
        case errc::non_monotonic_indices: return "NonMonotonicIndices";
        case errc::empty_file: return "EmptyFile";
        case errc::line_count_mismatch: return "LineCountMismatch";
        case errc::empty_corpus: return "EmptyCorpus";
        case errc::single_class_dataset: return "SingleClassDataset";
        case errc::insufficient_class_size: return "InsufficientClassSize";
        case errc::io_error: return "IoError";
    }
    return "Unknown";
}

error::error(const errc code, const std::string &what) :
    std::runtime_error{ std::string{ to_string(code) } + ": " + what },
    code_{ code } {}

}  // namespace lupisvm
