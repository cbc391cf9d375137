#ifndef LUPISVM_KERNELS_HPP
#define LUPISVM_KERNELS_HPP

#include "lupisvm/linalg.hpp"
#include "lupisvm/sparse.hpp"

#include <span>
#include <string>

namespace lupisvm {

enum class KernelKind { linear, rbf, polynomial };

/// Kernel family and its hyperparameters.
///   linear:     <a, b>
///   rbf:        exp(-gamma ||a - b||^2)
///   polynomial: (gamma <a, b> + coef0)^degree
struct KernelSpec {
    KernelKind kind{ KernelKind::linear };
    double gamma{ 1.0 };
    int degree{ 3 };
    double coef0{ 0.0 };

    [[nodiscard]] static KernelSpec linear() { return {}; }
    [[nodiscard]] static KernelSpec rbf(double gamma) { return { KernelKind::rbf, gamma, 3, 0.0 }; }
    [[nodiscard]] static KernelSpec polynomial(int degree, double gamma, double coef0) {
        return { KernelKind::polynomial, gamma, degree, coef0 };
    }

    /// Throws errc::invalid_spec when gamma <= 0 or degree < 1 for kernels that use them.
    void validate() const;

    friend bool operator==(const KernelSpec &, const KernelSpec &) = default;
};

/// Parses the command-line form: "linear", "rbf:<gamma>", "poly:<degree>:<gamma>:<coef0>".
[[nodiscard]] KernelSpec parse_kernel_spec(const std::string &text);
[[nodiscard]] std::string format_kernel_spec(const KernelSpec &spec);

[[nodiscard]] double evaluate(const KernelSpec &spec, std::span<const double> a, std::span<const double> b);
[[nodiscard]] double evaluate(const KernelSpec &spec, const SparseVector &a, const SparseVector &b);

enum class FeatureView { main, privileged };

struct GramMatrix {
    DenseMatrix matrix;
    KernelSpec spec;
    FeatureView source{ FeatureView::main };
};

/// Symmetric Gram matrix over the rows of x.
[[nodiscard]] GramMatrix gram(const DenseMatrix &x, const KernelSpec &spec, FeatureView source = FeatureView::main);
/// Entry (i, j) = k(train_i, test_j); shape n_train x n_test.
[[nodiscard]] DenseMatrix cross_gram(const DenseMatrix &x_train, const DenseMatrix &x_test, const KernelSpec &spec);

/// Appends a constant-1 coordinate to every row.
[[nodiscard]] DenseMatrix augment_bias(const DenseMatrix &z);
/// True when the privileged view is bias-augmented before Gram construction (linear kernels only).
[[nodiscard]] bool augments_bias(const KernelSpec &privileged_spec) noexcept;
/// Gram matrix of the privileged view, augmented per augments_bias().
[[nodiscard]] GramMatrix privileged_gram(const DenseMatrix &z, const KernelSpec &spec);

/// The privileged kernel transformed for the squared-hinge dual:
///   Q = (1/lambda) (Kt - Kt (lambda/C I + Kt)^{-1} Kt)
struct DeformedKernel {
    DenseMatrix q;
    double c{ 0.0 };
    double lambda{ 0.0 };
    /// Factor of (Kt + lambda/C I); reused to recover correcting coefficients.
    CholeskyFactor shifted_factor;
};

/// Computes Q from one Cholesky factorization of (lambda/C I + Kt) and a matrix
/// solve S = (lambda/C I + Kt)^{-1} Kt, using the identity Q = S / C, then symmetrizes.
[[nodiscard]] DeformedKernel deformed_kernel(const GramMatrix &ktilde, double c, double lambda);

/// H_ij = K_ij + Q_ij y_i y_j. Labels must be +1 or -1.
[[nodiscard]] DenseMatrix dual_hessian(const GramMatrix &k, const DeformedKernel &q, std::span<const int> y);
[[nodiscard]] DenseMatrix dual_hessian(const DenseMatrix &k, const DenseMatrix &q, std::span<const int> y);

/// Throws errc::invalid_label unless every entry is +1 or -1.
void check_binary_labels(std::span<const int> y);

}  // namespace lupisvm

#endif  // LUPISVM_KERNELS_HPP
