#ifndef LUPISVM_SPARSE_HPP
#define LUPISVM_SPARSE_HPP

#include "lupisvm/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lupisvm {

/// Sparse row with 0-based, strictly increasing indices.
struct SparseVector {
    std::vector<std::uint32_t> index;
    std::vector<double> value;

    [[nodiscard]] std::size_t nnz() const noexcept { return index.size(); }
    /// One past the largest stored index (0 for an empty row).
    [[nodiscard]] std::size_t extent() const noexcept { return index.empty() ? 0 : index.back() + 1; }

    friend bool operator==(const SparseVector &, const SparseVector &) = default;
};

[[nodiscard]] double dot(const SparseVector &a, const SparseVector &b) noexcept;
[[nodiscard]] double squared_distance(const SparseVector &a, const SparseVector &b) noexcept;

/// Drops exact zeros.
[[nodiscard]] SparseVector to_sparse(std::span<const double> dense);
/// Densifies rows into an rows.size() x dim matrix; throws if an index is >= dim.
[[nodiscard]] DenseMatrix to_dense(std::span<const SparseVector> rows, std::size_t dim);
[[nodiscard]] std::vector<SparseVector> to_sparse_rows(const DenseMatrix &m);

}  // namespace lupisvm

#endif  // LUPISVM_SPARSE_HPP
