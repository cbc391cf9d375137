#include "lupisvm/sparse.hpp"

#include "lupisvm/error.hpp"

#include <string>

namespace lupisvm {

double dot(const SparseVector &a, const SparseVector &b) noexcept {
    double s = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.nnz() && j < b.nnz()) {
        if (a.index[i] == b.index[j]) {
            s += a.value[i++] * b.value[j++];
        } else if (a.index[i] < b.index[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return s;
}

double squared_distance(const SparseVector &a, const SparseVector &b) noexcept {
    double s = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.nnz() || j < b.nnz()) {
        double diff = 0.0;
        if (j >= b.nnz() || (i < a.nnz() && a.index[i] < b.index[j])) {
            diff = a.value[i++];
        } else if (i >= a.nnz() || b.index[j] < a.index[i]) {
            diff = -b.value[j++];
        } else {
            diff = a.value[i++] - b.value[j++];
        }
        s += diff * diff;
    }
    return s;
}

SparseVector to_sparse(std::span<const double> dense) {
    SparseVector v;
    for (std::size_t k = 0; k < dense.size(); ++k) {
        if (dense[k] != 0.0) {
            v.index.push_back(static_cast<std::uint32_t>(k));
            v.value.push_back(dense[k]);
        }
    }
    return v;
}

DenseMatrix to_dense(std::span<const SparseVector> rows, const std::size_t dim) {
    DenseMatrix m{ rows.size(), dim };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto &r = rows[i];
        for (std::size_t k = 0; k < r.nnz(); ++k) {
            if (r.index[k] >= dim) {
                throw error{ errc::dimension_mismatch,
                             "row " + std::to_string(i) + " has feature index " + std::to_string(r.index[k] + 1) +
                                 " beyond dimension " + std::to_string(dim) };
            }
            m(i, r.index[k]) = r.value[k];
        }
    }
    return m;
}

std::vector<SparseVector> to_sparse_rows(const DenseMatrix &m) {
    std::vector<SparseVector> rows;
    rows.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        rows.push_back(to_sparse(m.row(i)));
    }
    return rows;
}

}  // namespace lupisvm
