#ifndef LUPISVM_QP_HPP
#define LUPISVM_QP_HPP

#include "lupisvm/linalg.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace lupisvm {

struct SmoSettings {
    /// Stop once the maximal KKT violation drops to this value.
    double tolerance{ 1e-3 };
    std::size_t max_iterations{ 10'000'000 };
    /// Box on every multiplier; nullopt means unbounded (squared-hinge duals).
    std::optional<double> upper_bound{};
    /// Finite stand-in for an unbounded box.
    double numeric_cap{ 1e12 };
    /// Record the objective after every pair update in DualSolution::objective_history.
    bool record_objective{ false };
};

struct DualSolution {
    std::vector<double> alpha;
    /// Minimized value of 1/2 (a*y)^T H (a*y) - a^T 1.
    double objective{ 0.0 };
    std::size_t iterations{ 0 };
    double kkt_violation{ 0.0 };
    bool converged{ false };
    /// Some multiplier reached numeric_cap while the box was unbounded.
    bool cap_hit{ false };
    std::vector<double> objective_history;
};

/// Minimizes 1/2 (a*y)^T H (a*y) - a^T 1  s.t.  0 <= a <= U, a^T y = 0
/// with SMO using the first-order maximal violating pair (lowest index wins ties).
///
/// Throws errc::no_both_classes when y lacks either sign and errc::dimension_mismatch
/// when H and y disagree. A run that exhausts max_iterations returns its last
/// iterate with converged == false.
[[nodiscard]] DualSolution solve_smo(const DenseMatrix &h, std::span<const int> y, const SmoSettings &settings);

struct Svm1PlusSettings {
    /// Relative objective change that ends the accelerated projected-gradient loop.
    double tolerance{ 1e-9 };
    std::size_t max_iterations{ 100'000 };
    double projection_tolerance{ 1e-10 };
    std::size_t projection_max_passes{ 10'000 };
    int power_iterations{ 50 };
    double lipschitz_safety{ 1.1 };
    /// Support-set re-solves applied after the loop; 0 disables polishing.
    int polish_rounds{ 10 };
};

struct Svm1PlusDualSolution {
    std::vector<double> alpha;
    std::vector<double> beta;
    /// Minimized value of the negated hinge-loss SVM+ dual.
    double objective{ 0.0 };
    std::size_t iterations{ 0 };
    bool converged{ false };
};

/// Value of the negated hinge-loss SVM+ dual
///   1/2 (a*y)^T K (a*y) + 1/(2 lambda) g^T Kt g - a^T 1,  g = a + b - C 1.
[[nodiscard]] double svm1plus_dual_objective(const DenseMatrix &k, const DenseMatrix &ktilde, std::span<const int> y,
                                             double c, double lambda, std::span<const double> alpha,
                                             std::span<const double> beta);

/// Minimizes svm1plus_dual_objective over a, b >= 0 with sum(a + b - C) = 0 and a^T y = 0
/// by accelerated projected gradient (function-value restart, step 1/L from power
/// iteration). Projections use Dykstra's alternating scheme between the orthant
/// and the two hyperplanes. Starts from a = 0, b = C 1.
[[nodiscard]] Svm1PlusDualSolution solve_svm1plus_dual(const DenseMatrix &k, const DenseMatrix &ktilde,
                                                       std::span<const int> y, double c, double lambda,
                                                       const Svm1PlusSettings &settings = {});

/// Dykstra projection of (alpha; beta) onto {a, b >= 0, sum(a + b) = total, a^T y = 0}.
/// Returned point is exactly nonnegative; the equalities hold to the given tolerance.
void project_svm1plus_feasible(std::span<double> alpha, std::span<double> beta, std::span<const int> y, double total,
                               double tolerance, std::size_t max_passes);

}  // namespace lupisvm

#endif  // LUPISVM_QP_HPP
