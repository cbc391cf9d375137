#include "lupisvm/linalg.hpp"

#include "lupisvm/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lupisvm {

DenseMatrix::DenseMatrix(const std::size_t rows, const std::size_t cols, const double fill) :
    rows_{ rows },
    cols_{ cols },
    data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) :
    rows_{ rows.size() },
    cols_{ rows.size() == 0 ? 0 : rows.begin()->size() } {
    data_.reserve(rows_ * cols_);
    for (const auto &r : rows) {
        if (r.size() != cols_) {
            throw error{ errc::dimension_mismatch, "ragged initializer rows" };
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

DenseMatrix DenseMatrix::identity(const std::size_t n) {
    DenseMatrix m{ n, n };
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

double DenseMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (const double v : data_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double DenseMatrix::trace() const noexcept {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) {
        t += (*this)(i, i);
    }
    return t;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t{ cols_, rows_ };
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

bool DenseMatrix::is_symmetric(const double tol) const noexcept {
    if (!is_square()) {
        return false;
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = i + 1; j < cols_; ++j) {
            const double a = (*this)(i, j);
            if (std::abs(a - (*this)(j, i)) > tol * (1.0 + std::abs(a))) {
                return false;
            }
        }
    }
    return true;
}

DenseMatrix multiply(const DenseMatrix &a, const DenseMatrix &b) {
    if (a.cols() != b.rows()) {
        throw error{ errc::dimension_mismatch, "multiply: inner dimensions differ" };
    }
    DenseMatrix c{ a.rows(), b.cols() };
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ci = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) {
                continue;
            }
            const auto bk = b.row(k);
            for (std::size_t j = 0; j < ci.size(); ++j) {
                ci[j] += aik * bk[j];
            }
        }
    }
    return c;
}

std::vector<double> multiply(const DenseMatrix &a, std::span<const double> x) {
    if (a.cols() != x.size()) {
        throw error{ errc::dimension_mismatch, "multiply: vector length differs from column count" };
    }
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto ai = a.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < ai.size(); ++j) {
            s += ai[j] * x[j];
        }
        y[i] = s;
    }
    return y;
}

DenseMatrix subtract(const DenseMatrix &a, const DenseMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw error{ errc::dimension_mismatch, "subtract: shapes differ" };
    }
    DenseMatrix c = a;
    auto cd = c.data();
    const auto bd = b.data();
    for (std::size_t i = 0; i < cd.size(); ++i) {
        cd[i] -= bd[i];
    }
    return c;
}

double max_abs_diff(const DenseMatrix &a, const DenseMatrix &b) {
    return subtract(a, b).max_abs();
}

void symmetrize(DenseMatrix &a) {
    if (!a.is_square()) {
        throw error{ errc::dimension_mismatch, "symmetrize: matrix is not square" };
    }
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            const double m = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = m;
            a(j, i) = m;
        }
    }
}

std::vector<double> default_jitter_schedule(const DenseMatrix &a) {
    const double scale = a.rows() == 0 ? 0.0 : std::abs(a.trace()) / static_cast<double>(a.rows());
    return { 0.0, 1e-12 * scale, 1e-10 * scale, 1e-8 * scale, 1e-6 * scale };
}

namespace {

// Plain row-oriented Cholesky; returns false on a non-positive pivot.
bool try_factor(const DenseMatrix &a, const double jitter, DenseMatrix &l) {
    const std::size_t n = a.rows();
    l = DenseMatrix{ n, n };
    for (std::size_t i = 0; i < n; ++i) {
        const auto li = l.row(i);
        for (std::size_t j = 0; j <= i; ++j) {
            const auto lj = l.row(j);
            double s = a(i, j);
            if (i == j) {
                s += jitter;
            }
            for (std::size_t k = 0; k < j; ++k) {
                s -= li[k] * lj[k];
            }
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s)) {
                    return false;
                }
                li[i] = std::sqrt(s);
            } else {
                li[j] = s / lj[j];
            }
        }
    }
    return true;
}

}  // namespace

CholeskyFactor cholesky(const DenseMatrix &a, std::span<const double> jitter_schedule) {
    if (!a.is_square()) {
        throw error{ errc::dimension_mismatch, "cholesky: matrix is not square" };
    }
    CholeskyFactor f;
    f.n = a.rows();
    for (const double jitter : jitter_schedule) {
        if (jitter < 0.0) {
            throw error{ errc::invalid_spec, "cholesky: negative jitter in schedule" };
        }
        if (try_factor(a, jitter, f.lower)) {
            f.jitter_applied = jitter;
            return f;
        }
    }
    throw error{ errc::not_positive_definite,
                 "cholesky: factorization failed at every jitter level (n = " + std::to_string(a.rows()) + ")" };
}

CholeskyFactor cholesky(const DenseMatrix &a) {
    const auto schedule = default_jitter_schedule(a);
    return cholesky(a, schedule);
}

DenseMatrix cholesky_solve(const CholeskyFactor &factor, const DenseMatrix &b) {
    if (factor.n != b.rows()) {
        throw error{ errc::dimension_mismatch, "cholesky_solve: factor size differs from right-hand side rows" };
    }
    const std::size_t n = factor.n;
    const std::size_t m = b.cols();
    const DenseMatrix &l = factor.lower;
    DenseMatrix x = b;

    // L Y = B
    for (std::size_t i = 0; i < n; ++i) {
        auto xi = x.row(i);
        for (std::size_t k = 0; k < i; ++k) {
            const double lik = l(i, k);
            if (lik == 0.0) {
                continue;
            }
            const auto xk = x.row(k);
            for (std::size_t j = 0; j < m; ++j) {
                xi[j] -= lik * xk[j];
            }
        }
        const double inv = 1.0 / l(i, i);
        for (std::size_t j = 0; j < m; ++j) {
            xi[j] *= inv;
        }
    }
    // L^T X = Y
    for (std::size_t ii = n; ii-- > 0;) {
        auto xi = x.row(ii);
        for (std::size_t k = ii + 1; k < n; ++k) {
            const double lki = l(k, ii);
            if (lki == 0.0) {
                continue;
            }
            const auto xk = x.row(k);
            for (std::size_t j = 0; j < m; ++j) {
                xi[j] -= lki * xk[j];
            }
        }
        const double inv = 1.0 / l(ii, ii);
        for (std::size_t j = 0; j < m; ++j) {
            xi[j] *= inv;
        }
    }
    return x;
}

std::vector<double> cholesky_solve(const CholeskyFactor &factor, std::span<const double> b) {
    DenseMatrix rhs{ b.size(), 1 };
    std::copy(b.begin(), b.end(), rhs.data().begin());
    const DenseMatrix x = cholesky_solve(factor, rhs);
    return { x.data().begin(), x.data().end() };
}

std::vector<double> symmetric_eigenvalues(const DenseMatrix &a) {
    if (!a.is_square()) {
        throw error{ errc::dimension_mismatch, "symmetric_eigenvalues: matrix is not square" };
    }
    const std::size_t n = a.rows();
    DenseMatrix m = a;
    symmetrize(m);

    double frob = 0.0;
    for (const double v : m.data()) {
        frob += v * v;
    }
    const double stop = 1e-30 * frob;

    constexpr int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += m(p, q) * m(p, q);
            }
        }
        if (2.0 * off <= stop) {
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) {
                    continue;
                }
                // symmetric Schur decomposition of the (p, q) block
                const double tau = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p);
                    const double mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                auto rp = m.row(p);
                auto rq = m.row(q);
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = rp[k];
                    const double mqk = rq[k];
                    rp[k] = c * mpk - s * mqk;
                    rq[k] = s * mpk + c * mqk;
                }
                m(p, q) = 0.0;
                m(q, p) = 0.0;
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) {
        eig[i] = m(i, i);
    }
    std::sort(eig.begin(), eig.end());
    return eig;
}

double min_eigenvalue(const DenseMatrix &a) {
    if (!a.is_square() || a.rows() == 0) {
        throw error{ errc::dimension_mismatch, "min_eigenvalue: matrix must be square and non-empty" };
    }
    return symmetric_eigenvalues(a).front();
}

std::optional<std::vector<double>> lu_solve(const DenseMatrix &a, std::span<const double> b) {
    const std::size_t n = a.rows();
    if (!a.is_square() || b.size() != n) {
        throw error{ errc::dimension_mismatch, "lu_solve: expected square matrix and matching right-hand side" };
    }
    DenseMatrix m = a;
    std::vector<double> x(b.begin(), b.end());
    const double floor = 1e-13 * a.max_abs();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(m(r, col)) > std::abs(m(pivot, col))) {
                pivot = r;
            }
        }
        if (!(std::abs(m(pivot, col)) > floor)) {
            return std::nullopt;
        }
        if (pivot != col) {
            std::swap_ranges(m.row(col).begin(), m.row(col).end(), m.row(pivot).begin());
            std::swap(x[col], x[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = m(r, col) / m(col, col);
            if (f == 0.0) {
                continue;
            }
            for (std::size_t j = col; j < n; ++j) {
                m(r, j) -= f * m(col, j);
            }
            x[r] -= f * x[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            s -= m(i, j) * x[j];
        }
        x[i] = s / m(i, i);
    }
    return x;
}

}  // namespace lupisvm
