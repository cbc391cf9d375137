#ifndef LUPISVM_LINALG_HPP
#define LUPISVM_LINALG_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace lupisvm {

/// Row-major dense matrix of doubles.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Builds from nested rows; all rows must have equal length.
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    [[nodiscard]] static DenseMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

    [[nodiscard]] double &operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<double> row(std::size_t i) noexcept { return { data_.data() + i * cols_, cols_ }; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept { return { data_.data() + i * cols_, cols_ }; }

    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    [[nodiscard]] std::span<double> data() noexcept { return data_; }

    /// Largest absolute entry; 0 for an empty matrix.
    [[nodiscard]] double max_abs() const noexcept;
    [[nodiscard]] double trace() const noexcept;
    [[nodiscard]] DenseMatrix transpose() const;
    /// Symmetric within |A_ij - A_ji| <= tol * (1 + |A_ij|).
    [[nodiscard]] bool is_symmetric(double tol = 1e-12) const noexcept;

    friend bool operator==(const DenseMatrix &, const DenseMatrix &) = default;

  private:
    std::size_t rows_{ 0 };
    std::size_t cols_{ 0 };
    std::vector<double> data_;
};

[[nodiscard]] DenseMatrix multiply(const DenseMatrix &a, const DenseMatrix &b);
[[nodiscard]] std::vector<double> multiply(const DenseMatrix &a, std::span<const double> x);
[[nodiscard]] DenseMatrix subtract(const DenseMatrix &a, const DenseMatrix &b);
/// max_ij |a_ij - b_ij|
[[nodiscard]] double max_abs_diff(const DenseMatrix &a, const DenseMatrix &b);
/// Replaces A with (A + A^T) / 2.
void symmetrize(DenseMatrix &a);

/// Lower-triangular factor L with L L^T = A + jitter_applied * I.
struct CholeskyFactor {
    std::size_t n{ 0 };
    DenseMatrix lower;
    double jitter_applied{ 0.0 };
};

/// Default schedule {0, 1e-12, 1e-10, 1e-8, 1e-6} scaled by trace(A)/n.
[[nodiscard]] std::vector<double> default_jitter_schedule(const DenseMatrix &a);

/// Factors A + j I for the first absolute jitter j in the schedule that succeeds.
/// Only the lower triangle of A is read.
/// Throws errc::not_positive_definite when every level fails and
/// errc::dimension_mismatch for non-square input.
[[nodiscard]] CholeskyFactor cholesky(const DenseMatrix &a, std::span<const double> jitter_schedule);
[[nodiscard]] CholeskyFactor cholesky(const DenseMatrix &a);

/// Solves (A + jI) X = B using the factor.
[[nodiscard]] DenseMatrix cholesky_solve(const CholeskyFactor &factor, const DenseMatrix &b);
[[nodiscard]] std::vector<double> cholesky_solve(const CholeskyFactor &factor, std::span<const double> b);

/// Solves A x = b for square, possibly indefinite A by LU with partial pivoting.
/// Empty when a pivot falls below 1e-13 * max|A|.
[[nodiscard]] std::optional<std::vector<double>> lu_solve(const DenseMatrix &a, std::span<const double> b);

/// All eigenvalues of a symmetric matrix via cyclic Jacobi rotations, ascending.
[[nodiscard]] std::vector<double> symmetric_eigenvalues(const DenseMatrix &a);
/// Smallest eigenvalue of a symmetric matrix (cyclic Jacobi).
[[nodiscard]] double min_eigenvalue(const DenseMatrix &a);

}  // namespace lupisvm

#endif  // LUPISVM_LINALG_HPP
