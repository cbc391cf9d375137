#ifndef LUPISVM_TRAINERS_HPP
#define LUPISVM_TRAINERS_HPP

#include "lupisvm/data.hpp"
#include "lupisvm/kernels.hpp"
#include "lupisvm/linalg.hpp"
#include "lupisvm/qp.hpp"
#include "lupisvm/sparse.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lupisvm {

enum class Method {
    svm_hinge,  ///< standard hinge-loss SVM on the main features
    svm1plus,   ///< hinge-loss SVM+ (2n-variable dual)
    svm2plus,   ///< squared-hinge SVM+ (n-variable dual on the deformed kernel)
};

[[nodiscard]] std::string_view to_string(Method m) noexcept;
/// Accepts "svm", "svm1plus", "svm2plus".
[[nodiscard]] Method parse_method(std::string_view text);
[[nodiscard]] bool uses_privileged(Method m) noexcept;

struct Hyperparameters {
    double c{ 1.0 };
    double lambda{ 1.0 };
    KernelSpec kernel_main{};
    KernelSpec kernel_priv{};
    SmoSettings smo{};
    Svm1PlusSettings svm1plus{};

    void validate(Method m) const;
};

/// Multipliers with alpha_i above this are support vectors.
inline constexpr double support_threshold = 1e-8;

struct TrainingDiagnostics {
    /// Slack of every training point under the fitted correcting function (empty for plain SVM).
    std::vector<double> slack;
    /// Expansion coefficients of the correcting function over the privileged rows.
    std::vector<double> correcting_coefficients;
    /// Explicit offset of the correcting function (hinge-loss SVM+ only).
    double correcting_bias{ 0.0 };
    double dual_objective{ 0.0 };
    std::size_t iterations{ 0 };
    bool converged{ true };
    bool cap_hit{ false };
    /// The bias (or correcting offset) came from the min-max KKT fallback.
    bool bias_fallback{ false };
    bool correcting_bias_fallback{ false };
    /// Full multiplier vectors of the training run.
    std::vector<double> alpha;
    std::vector<double> beta;
};

struct BinaryModel {
    Method method{ Method::svm_hinge };
    std::vector<std::size_t> support_indices;
    /// alpha_i * y_i, aligned with support_indices / support_vectors.
    std::vector<double> coefficients;
    double bias{ 0.0 };
    KernelSpec kernel_main{};
    std::vector<SparseVector> support_vectors;
    std::size_t dim{ 0 };
    TrainingDiagnostics diagnostics{};
};

/// Kernel matrices a trainer consumes. Labels do not enter any of them, so
/// one-vs-rest shares a single instance across classes.
struct TrainingKernels {
    GramMatrix k;
    std::optional<GramMatrix> ktilde;
    std::optional<DeformedKernel> deformed;
};

/// Builds K, plus the privileged Gram (and deformed kernel for svm2plus) when the method needs them.
[[nodiscard]] TrainingKernels make_training_kernels(Method m, const DenseMatrix &x, const DenseMatrix *z,
                                                    const Hyperparameters &hp);

/// Trains from precomputed kernels; x supplies the stored support vectors.
[[nodiscard]] BinaryModel train_binary(Method m, const TrainingKernels &kernels, const DenseMatrix &x,
                                       std::span<const int> y, const Hyperparameters &hp);

[[nodiscard]] BinaryModel train_svm(const DenseMatrix &x, std::span<const int> y, const Hyperparameters &hp);
[[nodiscard]] BinaryModel train_svm2plus(const DenseMatrix &x, const DenseMatrix &z, std::span<const int> y,
                                         const Hyperparameters &hp);
[[nodiscard]] BinaryModel train_svm1plus(const DenseMatrix &x, const DenseMatrix &z, std::span<const int> y,
                                         const Hyperparameters &hp);

/// f(x) = sum_i coeff_i k(sv_i, x) + b. Dense input must have model.dim columns.
[[nodiscard]] std::vector<double> decision_values(const BinaryModel &model, const DenseMatrix &x_test);
[[nodiscard]] std::vector<double> decision_values(const BinaryModel &model, std::span<const SparseVector> x_test);

/// Same model for the label-negated problem.
[[nodiscard]] BinaryModel negated(const BinaryModel &model);

struct MulticlassModel {
    Method method{ Method::svm_hinge };
    std::vector<int> classes;
    std::vector<std::size_t> class_counts;
    std::vector<BinaryModel> binaries;

    [[nodiscard]] bool converged() const noexcept;
};

/// One binary per class (label == class -> +1). With two classes the second binary is the
/// exact negation of the first. `jobs` > 1 trains classes on that many threads.
[[nodiscard]] MulticlassModel train_one_vs_rest(const LupiDataset &data, const Hyperparameters &hp, Method m,
                                                std::size_t jobs = 1);

/// Argmax of per-class decision values; ties go to the earliest class in model.classes.
[[nodiscard]] std::vector<int> predict(const MulticlassModel &model, std::span<const SparseVector> x_test);
[[nodiscard]] std::vector<int> predict(const MulticlassModel &model, const DenseMatrix &x_test);

[[nodiscard]] double accuracy(std::span<const int> predicted, std::span<const int> truth);

}  // namespace lupisvm

#endif  // LUPISVM_TRAINERS_HPP
