#include "lupisvm/qp.hpp"

#include "lupisvm/error.hpp"
#include "lupisvm/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>

namespace lupisvm {

namespace {

void require_both_classes(std::span<const int> y) {
    const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
    const bool has_neg = std::find(y.begin(), y.end(), -1) != y.end();
    if (!has_pos || !has_neg) {
        throw error{ errc::no_both_classes, "labels must contain both +1 and -1" };
    }
}

// smallest curvature accepted along a working-pair direction
constexpr double tau = 1e-12;

}  // namespace

DualSolution solve_smo(const DenseMatrix &h, std::span<const int> y, const SmoSettings &settings) {
    const std::size_t n = y.size();
    if (!h.is_square() || h.rows() != n) {
        throw error{ errc::dimension_mismatch, "solve_smo: Hessian is not " + std::to_string(n) + "x" + std::to_string(n) };
    }
    check_binary_labels(y);
    require_both_classes(y);
    if (!(settings.tolerance > 0.0) || !std::isfinite(settings.numeric_cap) || !(settings.numeric_cap > 0.0)) {
        throw error{ errc::invalid_hyperparameter, "solve_smo: tolerance and numeric_cap must be positive and finite" };
    }
    if (settings.upper_bound && !(*settings.upper_bound > 0.0)) {
        throw error{ errc::invalid_hyperparameter, "solve_smo: upper bound must be positive" };
    }
    const bool bounded = settings.upper_bound.has_value();
    const double ub = bounded ? *settings.upper_bound : settings.numeric_cap;

    // signed Hessian Q_ij = y_i y_j H_ij
    DenseMatrix q{ n, n };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            q(i, j) = static_cast<double>(y[i] * y[j]) * h(i, j);
        }
    }

    DualSolution sol;
    sol.alpha.assign(n, 0.0);
    std::vector<double> grad(n, -1.0);
    auto &alpha = sol.alpha;

    const auto in_up = [&](std::size_t t) { return (y[t] == 1 && alpha[t] < ub) || (y[t] == -1 && alpha[t] > 0.0); };
    const auto in_low = [&](std::size_t t) { return (y[t] == 1 && alpha[t] > 0.0) || (y[t] == -1 && alpha[t] < ub); };

    double objective = 0.0;
    while (true) {
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        std::size_t i = n;
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -static_cast<double>(y[t]) * grad[t];
            if (in_up(t) && v > gmax) {
                gmax = v;
                i = t;
            }
            if (in_low(t) && v < gmin) {
                gmin = v;
                j = t;
            }
        }
        sol.kkt_violation = (i == n || j == n) ? 0.0 : std::max(0.0, gmax - gmin);
        if (sol.kkt_violation <= settings.tolerance) {
            sol.converged = true;
            break;
        }
        if (sol.iterations >= settings.max_iterations) {
            break;
        }
        ++sol.iterations;

        const double old_i = alpha[i];
        const double old_j = alpha[j];
        const auto qi = q.row(i);
        const auto qj = q.row(j);
        if (y[i] != y[j]) {
            double quad = qi[i] + qj[j] + 2.0 * qi[j];
            if (quad <= 0.0) {
                quad = tau;
            }
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > ub) {
                    alpha[i] = ub;
                    alpha[j] = ub - diff;
                }
            } else if (alpha[j] > ub) {
                alpha[j] = ub;
                alpha[i] = ub + diff;
            }
        } else {
            double quad = qi[i] + qj[j] - 2.0 * qi[j];
            if (quad <= 0.0) {
                quad = tau;
            }
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > ub) {
                if (alpha[i] > ub) {
                    alpha[i] = ub;
                    alpha[j] = sum - ub;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > ub) {
                if (alpha[j] > ub) {
                    alpha[j] = ub;
                    alpha[i] = sum - ub;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double di = alpha[i] - old_i;
        const double dj = alpha[j] - old_j;
        const double change = grad[i] * di + grad[j] * dj + 0.5 * (qi[i] * di * di + 2.0 * qi[j] * di * dj + qj[j] * dj * dj);
        assert(change <= 1e-12 * (1.0 + std::abs(objective)));
        objective += change;
        if (settings.record_objective) {
            sol.objective_history.push_back(objective);
        }
        for (std::size_t t = 0; t < n; ++t) {
            grad[t] += qi[t] * di + qj[t] * dj;
        }
        if (!bounded && (alpha[i] >= ub || alpha[j] >= ub)) {
            sol.cap_hit = true;
        }
    }

    // final objective from a fresh gradient to shed accumulated drift
    const std::vector<double> qa = multiply(q, alpha);
    double obj = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        obj += alpha[t] * (0.5 * qa[t] - 1.0);
    }
    sol.objective = obj;
    return sol;
}

double svm1plus_dual_objective(const DenseMatrix &k, const DenseMatrix &ktilde, std::span<const int> y, const double c,
                               const double lambda, std::span<const double> alpha, std::span<const double> beta) {
    const std::size_t n = y.size();
    std::vector<double> ay(n);
    std::vector<double> gamma(n);
    double sum_alpha = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ay[i] = alpha[i] * y[i];
        gamma[i] = alpha[i] + beta[i] - c;
        sum_alpha += alpha[i];
    }
    const auto kay = multiply(k, ay);
    const auto ktg = multiply(ktilde, gamma);
    double quad_main = 0.0;
    double quad_priv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        quad_main += ay[i] * kay[i];
        quad_priv += gamma[i] * ktg[i];
    }
    return 0.5 * quad_main + 0.5 / lambda * quad_priv - sum_alpha;
}

void project_svm1plus_feasible(std::span<double> alpha, std::span<double> beta, std::span<const int> y,
                               const double total, const double tolerance, const std::size_t max_passes) {
    const std::size_t n = y.size();
    double sum_y = 0.0;
    for (const int v : y) {
        sum_y += v;
    }
    // Gram of the two constraint normals (1; 1) and (y; 0)
    const double g11 = 2.0 * static_cast<double>(n);
    const double g12 = sum_y;
    const double g22 = static_cast<double>(n);
    const double det = g11 * g22 - g12 * g12;

    std::vector<double> xa(alpha.begin(), alpha.end());
    std::vector<double> xb(beta.begin(), beta.end());
    std::vector<double> pa(n, 0.0);
    std::vector<double> pb(n, 0.0);

    for (std::size_t pass = 0; pass < max_passes; ++pass) {
        // orthant step with Dykstra correction
        for (std::size_t i = 0; i < n; ++i) {
            const double va = xa[i] + pa[i];
            const double vb = xb[i] + pb[i];
            alpha[i] = std::max(0.0, va);
            beta[i] = std::max(0.0, vb);
            pa[i] = va - alpha[i];
            pb[i] = vb - beta[i];
        }
        // affine step; its Dykstra correction lies in the normal space and cancels
        double r1 = -total;
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            r1 += alpha[i] + beta[i];
            r2 += alpha[i] * y[i];
        }
        const double w1 = (g22 * r1 - g12 * r2) / det;
        const double w2 = (g11 * r2 - g12 * r1) / det;
        double moved = 0.0;
        double gap = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double na = alpha[i] - w1 - w2 * y[i];
            const double nb = beta[i] - w1;
            moved = std::max({ moved, std::abs(na - xa[i]), std::abs(nb - xb[i]) });
            gap = std::max({ gap, std::abs(na - alpha[i]), std::abs(nb - beta[i]) });
            xa[i] = na;
            xb[i] = nb;
        }
        if (gap <= tolerance && moved <= tolerance) {
            break;
        }
    }
}

namespace {

struct Iterate {
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> k_ay;   // K (alpha * y)
    std::vector<double> kt_ab;  // Kt (alpha + beta)
    double objective{ 0.0 };
};

class Svm1PlusProblem {
  public:
    Svm1PlusProblem(const DenseMatrix &k, const DenseMatrix &kt, std::span<const int> y, const double c, const double lambda) :
        k_{ k },
        kt_{ kt },
        y_{ y },
        c_{ c },
        lambda_{ lambda },
        kt_ones_(y.size(), 0.0) {
        const std::vector<double> ones(y.size(), 1.0);
        kt_ones_ = multiply(kt_, ones);
    }

    [[nodiscard]] std::size_t size() const noexcept { return y_.size(); }

    void evaluate(Iterate &it) const {
        const std::size_t n = size();
        std::vector<double> ay(n);
        std::vector<double> ab(n);
        for (std::size_t i = 0; i < n; ++i) {
            ay[i] = it.alpha[i] * y_[i];
            ab[i] = it.alpha[i] + it.beta[i];
        }
        it.k_ay = multiply(k_, ay);
        it.kt_ab = multiply(kt_, ab);
        it.objective = objective(it.alpha, it.beta, it.k_ay, it.kt_ab);
    }

    [[nodiscard]] double objective(std::span<const double> alpha, std::span<const double> beta, std::span<const double> k_ay,
                                   std::span<const double> kt_ab) const {
        double quad_main = 0.0;
        double quad_priv = 0.0;
        double sum_alpha = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            quad_main += alpha[i] * y_[i] * k_ay[i];
            quad_priv += (alpha[i] + beta[i] - c_) * (kt_ab[i] - c_ * kt_ones_[i]);
            sum_alpha += alpha[i];
        }
        return 0.5 * quad_main + 0.5 / lambda_ * quad_priv - sum_alpha;
    }

    // gradient from cached products at a (possibly extrapolated) point
    void gradient(std::span<const double> k_ay, std::span<const double> kt_ab, std::span<double> g_alpha,
                  std::span<double> g_beta) const {
        for (std::size_t i = 0; i < size(); ++i) {
            const double priv = (kt_ab[i] - c_ * kt_ones_[i]) / lambda_;
            g_alpha[i] = y_[i] * k_ay[i] + priv - 1.0;
            g_beta[i] = priv;
        }
    }

    // largest Hessian eigenvalue by power iteration
    [[nodiscard]] double lipschitz_estimate(const int iterations) const {
        const std::size_t n = size();
        std::vector<double> va(n);
        std::vector<double> vb(n);
        for (std::size_t i = 0; i < n; ++i) {
            va[i] = 1.0 + 0.25 * std::sin(static_cast<double>(i) + 1.0);
            vb[i] = 1.0 + 0.25 * std::cos(static_cast<double>(i) + 1.0);
        }
        double rayleigh = 0.0;
        std::vector<double> ay(n);
        std::vector<double> ab(n);
        for (int it = 0; it < iterations; ++it) {
            double norm = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                norm += va[i] * va[i] + vb[i] * vb[i];
            }
            norm = std::sqrt(norm);
            if (norm == 0.0) {
                return 0.0;
            }
            for (std::size_t i = 0; i < n; ++i) {
                va[i] /= norm;
                vb[i] /= norm;
                ay[i] = va[i] * y_[i];
                ab[i] = va[i] + vb[i];
            }
            const auto kay = multiply(k_, ay);
            const auto ktab = multiply(kt_, ab);
            rayleigh = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double ha = y_[i] * kay[i] + ktab[i] / lambda_;
                const double hb = ktab[i] / lambda_;
                rayleigh += va[i] * ha + vb[i] * hb;
                va[i] = ha;
                vb[i] = hb;
            }
        }
        return rayleigh;
    }

    // Exact minimizer on the current support: solves the equality-constrained KKT system over
    // the positive variables, dropping any that turn negative. Replaces the iterate only with a
    // feasible point of no larger objective.
    bool polish(Iterate &it, const int rounds) const {
        const std::size_t n = size();
        const double total = static_cast<double>(n) * c_;
        std::vector<std::size_t> vars;  // i < n: alpha_i, else beta_{i-n}
        for (std::size_t i = 0; i < n; ++i) {
            if (it.alpha[i] > 0.0) {
                vars.push_back(i);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (it.beta[i] > 0.0) {
                vars.push_back(n + i);
            }
        }
        for (int round = 0; round < rounds && !vars.empty(); ++round) {
            const std::size_t m = vars.size();
            DenseMatrix kkt{ m + 2, m + 2 };
            std::vector<double> rhs(m + 2, 0.0);
            for (std::size_t a = 0; a < m; ++a) {
                const std::size_t i = vars[a] % n;
                const bool ia = vars[a] < n;
                for (std::size_t b = 0; b < m; ++b) {
                    const std::size_t j = vars[b] % n;
                    double h = kt_(i, j) / lambda_;
                    if (ia && vars[b] < n) {
                        h += y_[i] * y_[j] * k_(i, j);
                    }
                    kkt(a, b) = h;
                }
                rhs[a] = c_ * kt_ones_[i] / lambda_ + (ia ? 1.0 : 0.0);
                kkt(a, m) = kkt(m, a) = ia ? y_[i] : 0.0;
                kkt(a, m + 1) = kkt(m + 1, a) = 1.0;
            }
            rhs[m + 1] = total;
            const auto x = lu_solve(kkt, rhs);
            if (!x) {
                return false;
            }
            std::vector<std::size_t> kept;
            for (std::size_t a = 0; a < m; ++a) {
                if ((*x)[a] > 0.0) {
                    kept.push_back(vars[a]);
                }
            }
            if (kept.size() < m) {
                vars = std::move(kept);
                continue;
            }
            Iterate candidate;
            candidate.alpha.assign(n, 0.0);
            candidate.beta.assign(n, 0.0);
            for (std::size_t a = 0; a < m; ++a) {
                (vars[a] < n ? candidate.alpha[vars[a]] : candidate.beta[vars[a] - n]) = (*x)[a];
            }
            evaluate(candidate);
            if (candidate.objective > it.objective + 1e-12 * std::max(1.0, std::abs(it.objective))) {
                return false;
            }
            it = std::move(candidate);
            return true;
        }
        return false;
    }

  private:
    const DenseMatrix &k_;
    const DenseMatrix &kt_;
    std::span<const int> y_;
    double c_;
    double lambda_;
    std::vector<double> kt_ones_;
};

}  // namespace

Svm1PlusDualSolution solve_svm1plus_dual(const DenseMatrix &k, const DenseMatrix &ktilde, std::span<const int> y,
                                         const double c, const double lambda, const Svm1PlusSettings &settings) {
    const std::size_t n = y.size();
    if (!k.is_square() || k.rows() != n || !ktilde.is_square() || ktilde.rows() != n) {
        throw error{ errc::dimension_mismatch, "solve_svm1plus_dual: kernel sizes disagree with labels" };
    }
    check_binary_labels(y);
    require_both_classes(y);
    if (!(c > 0.0) || !(lambda > 0.0) || !std::isfinite(c) || !std::isfinite(lambda)) {
        throw error{ errc::invalid_hyperparameter, "C and lambda must be positive and finite" };
    }
    if (!(settings.tolerance > 0.0)) {
        throw error{ errc::invalid_hyperparameter, "solve_svm1plus_dual: tolerance must be positive" };
    }

    const Svm1PlusProblem problem{ k, ktilde, y, c, lambda };
    const double total = static_cast<double>(n) * c;

    double lipschitz = settings.lipschitz_safety * problem.lipschitz_estimate(settings.power_iterations);
    if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
        lipschitz = 1.0;
    }

    Iterate current;
    current.alpha.assign(n, 0.0);
    current.beta.assign(n, c);
    problem.evaluate(current);
    Iterate previous = current;

    Svm1PlusDualSolution sol;
    std::vector<double> ga(n);
    std::vector<double> gb(n);
    std::vector<double> ya_k(n);
    std::vector<double> ya_t(n);
    Iterate next;
    next.alpha.resize(n);
    next.beta.resize(n);

    double t = 1.0;
    double momentum = 0.0;
    while (sol.iterations < settings.max_iterations) {
        ++sol.iterations;
        // extrapolated point; cached products are affine in the iterate
        for (std::size_t i = 0; i < n; ++i) {
            ya_k[i] = current.k_ay[i] + momentum * (current.k_ay[i] - previous.k_ay[i]);
            ya_t[i] = current.kt_ab[i] + momentum * (current.kt_ab[i] - previous.kt_ab[i]);
        }
        problem.gradient(ya_k, ya_t, ga, gb);
        for (std::size_t i = 0; i < n; ++i) {
            const double pa = current.alpha[i] + momentum * (current.alpha[i] - previous.alpha[i]);
            const double pb = current.beta[i] + momentum * (current.beta[i] - previous.beta[i]);
            next.alpha[i] = pa - ga[i] / lipschitz;
            next.beta[i] = pb - gb[i] / lipschitz;
        }
        project_svm1plus_feasible(next.alpha, next.beta, y, total, settings.projection_tolerance,
                                  settings.projection_max_passes);
        problem.evaluate(next);

        if (next.objective > current.objective) {
            if (momentum == 0.0) {
                // a plain gradient step went uphill: the curvature estimate is too small
                lipschitz *= 2.0;
            }
            t = 1.0;
            momentum = 0.0;
            previous = current;
            continue;
        }

        const double change = current.objective - next.objective;
        previous = std::move(current);
        current = next;
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        momentum = (t - 1.0) / t_next;
        t = t_next;
        if (change <= settings.tolerance * std::max(1.0, std::abs(current.objective))) {
            sol.converged = true;
            break;
        }
    }

    if (settings.polish_rounds > 0) {
        (void)problem.polish(current, settings.polish_rounds);
    }
    sol.alpha = std::move(current.alpha);
    sol.beta = std::move(current.beta);
    sol.objective = current.objective;
    return sol;
}

}  // namespace lupisvm
