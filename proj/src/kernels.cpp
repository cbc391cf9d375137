#include "lupisvm/kernels.hpp"

#include "lupisvm/error.hpp"
#include "lupisvm/format.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace lupisvm {

void KernelSpec::validate() const {
    if (kind == KernelKind::linear) {
        return;
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw error{ errc::invalid_spec, "kernel gamma must be positive and finite" };
    }
    if (kind == KernelKind::polynomial && degree < 1) {
        throw error{ errc::invalid_spec, "polynomial degree must be >= 1" };
    }
    if (!std::isfinite(coef0)) {
        throw error{ errc::invalid_spec, "kernel coef0 must be finite" };
    }
}

namespace {

std::vector<std::string_view> split(std::string_view text, const char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

double require_double(std::string_view text, const std::string &what) {
    const auto v = parse_double(text);
    if (!v) {
        throw error{ errc::invalid_spec, "cannot parse " + what + " '" + std::string{ text } + "'" };
    }
    return *v;
}

double apply_kernel(const KernelSpec &spec, const double inner, const double sq_dist) {
    switch (spec.kind) {
        case KernelKind::linear:
            return inner;
        case KernelKind::rbf:
            return std::exp(-spec.gamma * sq_dist);
        case KernelKind::polynomial:
            return std::pow(spec.gamma * inner + spec.coef0, spec.degree);
    }
    return 0.0;
}

}  // namespace

KernelSpec parse_kernel_spec(const std::string &text) {
    const auto parts = split(text, ':');
    KernelSpec spec;
    if (parts[0] == "linear" && parts.size() == 1) {
        spec = KernelSpec::linear();
    } else if (parts[0] == "rbf" && parts.size() == 2) {
        spec = KernelSpec::rbf(require_double(parts[1], "rbf gamma"));
    } else if (parts[0] == "poly" && parts.size() == 4) {
        const auto degree = parse_integer(parts[1]);
        if (!degree) {
            throw error{ errc::invalid_spec, "cannot parse polynomial degree '" + std::string{ parts[1] } + "'" };
        }
        spec = KernelSpec::polynomial(static_cast<int>(*degree), require_double(parts[2], "polynomial gamma"),
                                      require_double(parts[3], "polynomial coef0"));
    } else {
        throw error{ errc::invalid_spec, "unknown kernel '" + text + "' (expected linear | rbf:g | poly:deg:g:coef0)" };
    }
    spec.validate();
    return spec;
}

std::string format_kernel_spec(const KernelSpec &spec) {
    switch (spec.kind) {
        case KernelKind::linear:
            return "linear";
        case KernelKind::rbf:
            return "rbf:" + format_double(spec.gamma);
        case KernelKind::polynomial:
            return "poly:" + std::to_string(spec.degree) + ":" + format_double(spec.gamma) + ":" + format_double(spec.coef0);
    }
    return {};
}

double evaluate(const KernelSpec &spec, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw error{ errc::dimension_mismatch, "kernel arguments differ in dimension" };
    }
    double inner = 0.0;
    double sq = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        inner += a[k] * b[k];
        const double d = a[k] - b[k];
        sq += d * d;
    }
    return apply_kernel(spec, inner, sq);
}

double evaluate(const KernelSpec &spec, const SparseVector &a, const SparseVector &b) {
    if (spec.kind == KernelKind::rbf) {
        return apply_kernel(spec, 0.0, squared_distance(a, b));
    }
    return apply_kernel(spec, dot(a, b), 0.0);
}

GramMatrix gram(const DenseMatrix &x, const KernelSpec &spec, const FeatureView source) {
    spec.validate();
    if (x.rows() == 0) {
        throw error{ errc::dimension_mismatch, "gram: no rows" };
    }
    const std::size_t n = x.rows();
    GramMatrix g{ DenseMatrix{ n, n }, spec, source };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = evaluate(spec, x.row(i), x.row(j));
            g.matrix(i, j) = v;
            g.matrix(j, i) = v;
        }
    }
    if (spec.kind == KernelKind::rbf) {
        for (std::size_t i = 0; i < n; ++i) {
            g.matrix(i, i) = 1.0;
        }
    }
    return g;
}

DenseMatrix cross_gram(const DenseMatrix &x_train, const DenseMatrix &x_test, const KernelSpec &spec) {
    spec.validate();
    if (x_train.cols() != x_test.cols()) {
        throw error{ errc::dimension_mismatch, "cross_gram: train and test dimensions differ" };
    }
    DenseMatrix k{ x_train.rows(), x_test.rows() };
    for (std::size_t i = 0; i < x_train.rows(); ++i) {
        for (std::size_t j = 0; j < x_test.rows(); ++j) {
            k(i, j) = evaluate(spec, x_train.row(i), x_test.row(j));
        }
    }
    return k;
}

DenseMatrix augment_bias(const DenseMatrix &z) {
    DenseMatrix out{ z.rows(), z.cols() + 1 };
    for (std::size_t i = 0; i < z.rows(); ++i) {
        const auto src = z.row(i);
        auto dst = out.row(i);
        std::copy(src.begin(), src.end(), dst.begin());
        dst[z.cols()] = 1.0;
    }
    return out;
}

bool augments_bias(const KernelSpec &privileged_spec) noexcept {
    return privileged_spec.kind == KernelKind::linear;
}

GramMatrix privileged_gram(const DenseMatrix &z, const KernelSpec &spec) {
    if (augments_bias(spec)) {
        return gram(augment_bias(z), spec, FeatureView::privileged);
    }
    return gram(z, spec, FeatureView::privileged);
}

DeformedKernel deformed_kernel(const GramMatrix &ktilde, const double c, const double lambda) {
    if (!(c > 0.0) || !std::isfinite(c) || !(lambda > 0.0) || !std::isfinite(lambda)) {
        throw error{ errc::invalid_hyperparameter, "C and lambda must be positive and finite" };
    }
    const DenseMatrix &kt = ktilde.matrix;
    if (!kt.is_square()) {
        throw error{ errc::dimension_mismatch, "deformed_kernel: privileged Gram matrix is not square" };
    }
    const std::size_t n = kt.rows();
    DenseMatrix shifted = kt;
    const double ridge = lambda / c;
    for (std::size_t i = 0; i < n; ++i) {
        shifted(i, i) += ridge;
    }
    CholeskyFactor factor = cholesky(shifted);
    // (1/lambda)(Kt - Kt S) = (1/lambda) Kt (I - S) = (1/C) Kt (ridge I + Kt)^{-1} = S / C,
    // which avoids the cancellation in Kt - Kt S when ridge is small.
    DenseMatrix q = cholesky_solve(factor, kt);
    const double inv_c = 1.0 / c;
    for (double &v : q.data()) {
        v *= inv_c;
    }
    symmetrize(q);
    return { std::move(q), c, lambda, std::move(factor) };
}

void check_binary_labels(std::span<const int> y) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 1 && y[i] != -1) {
            throw error{ errc::invalid_label,
                         "label " + std::to_string(y[i]) + " at position " + std::to_string(i) + " is not +1/-1" };
        }
    }
}

DenseMatrix dual_hessian(const DenseMatrix &k, const DenseMatrix &q, std::span<const int> y) {
    if (!k.is_square() || k.rows() != q.rows() || k.cols() != q.cols() || k.rows() != y.size()) {
        throw error{ errc::dimension_mismatch, "dual_hessian: K, Q and y sizes disagree" };
    }
    check_binary_labels(y);
    const std::size_t n = y.size();
    DenseMatrix h{ n, n };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            h(i, j) = k(i, j) + q(i, j) * static_cast<double>(y[i] * y[j]);
        }
    }
    return h;
}

DenseMatrix dual_hessian(const GramMatrix &k, const DeformedKernel &q, std::span<const int> y) {
    return dual_hessian(k.matrix, q.q, y);
}

}  // namespace lupisvm
