#include "lupisvm/trainers.hpp"

#include "lupisvm/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace lupisvm {

std::string_view to_string(const Method m) noexcept {
    switch (m) {
        case Method::svm_hinge: return "svm";
        case Method::svm1plus: return "svm1plus";
        case Method::svm2plus: return "svm2plus";
    }
    return "unknown";
}

Method parse_method(const std::string_view text) {
    if (text == "svm") {
        return Method::svm_hinge;
    }
    if (text == "svm1plus") {
        return Method::svm1plus;
    }
    if (text == "svm2plus") {
        return Method::svm2plus;
    }
    throw error{ errc::invalid_spec, "unknown method '" + std::string{ text } + "' (expected svm | svm1plus | svm2plus)" };
}

bool uses_privileged(const Method m) noexcept {
    return m != Method::svm_hinge;
}

void Hyperparameters::validate(const Method m) const {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw error{ errc::invalid_hyperparameter, "C must be positive and finite" };
    }
    if (uses_privileged(m) && (!(lambda > 0.0) || !std::isfinite(lambda))) {
        throw error{ errc::invalid_hyperparameter, "lambda must be positive and finite" };
    }
    kernel_main.validate();
    if (uses_privileged(m)) {
        kernel_priv.validate();
    }
}

TrainingKernels make_training_kernels(const Method m, const DenseMatrix &x, const DenseMatrix *z,
                                      const Hyperparameters &hp) {
    hp.validate(m);
    TrainingKernels tk{ gram(x, hp.kernel_main, FeatureView::main), std::nullopt, std::nullopt };
    if (!uses_privileged(m)) {
        return tk;
    }
    if (z == nullptr) {
        throw error{ errc::alignment_error, std::string{ to_string(m) } + " needs privileged features" };
    }
    if (z->rows() != x.rows()) {
        throw error{ errc::alignment_error, "main (" + std::to_string(x.rows()) + ") and privileged (" +
                                                std::to_string(z->rows()) + ") row counts differ" };
    }
    if (m == Method::svm2plus) {
        tk.ktilde = privileged_gram(*z, hp.kernel_priv);
        tk.deformed = deformed_kernel(*tk.ktilde, hp.c, hp.lambda);
    } else {
        // the hinge-loss correcting function carries its own offset, so no augmentation
        tk.ktilde = gram(*z, hp.kernel_priv, FeatureView::privileged);
    }
    return tk;
}

namespace {

template <typename F>
double ternary_minimize(F &&f, double lo, double hi) {
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (f(m1) <= f(m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    return 0.5 * (lo + hi);
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (const double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

// b minimizing max_i (1 - xi_i - y_i (s_i + b)): the most consistent margin offset
double fallback_bias(std::span<const double> s, std::span<const double> slack, std::span<const int> y) {
    const auto worst = [&](const double b) {
        double w = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double xi = slack.empty() ? 0.0 : slack[i];
            w = std::max(w, 1.0 - xi - y[i] * (s[i] + b));
        }
        return w;
    };
    const double span = 2.0 + max_abs(s) + max_abs(slack);
    return ternary_minimize(worst, -span, span);
}

// mean of y_i (1 - xi_i) - s_i over the given points
double margin_bias(std::span<const std::size_t> points, std::span<const double> s, std::span<const double> slack,
                   std::span<const int> y) {
    double sum = 0.0;
    for (const std::size_t i : points) {
        sum += y[i] * (1.0 - slack[i]) - s[i];
    }
    return sum / static_cast<double>(points.size());
}

// bias of the box-constrained hinge SVM: mean over free multipliers, else midpoint of the KKT interval
double hinge_bias(std::span<const double> alpha, std::span<const double> s, std::span<const int> y, const double c,
                  bool &fallback) {
    const double eps = 1e-8 * c;
    double sum = 0.0;
    std::size_t free = 0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - s[i];
        if (alpha[i] > eps && alpha[i] < c - eps) {
            sum += r;
            ++free;
            continue;
        }
        // alpha = 0 needs y f >= 1; alpha = C needs y f <= 1
        const bool at_zero = alpha[i] <= eps;
        const bool is_lower = (y[i] == 1) == at_zero;
        if (is_lower) {
            lower = std::max(lower, r);
        } else {
            upper = std::min(upper, r);
        }
    }
    if (free > 0) {
        fallback = false;
        return sum / static_cast<double>(free);
    }
    fallback = true;
    if (std::isfinite(lower) && std::isfinite(upper)) {
        return 0.5 * (lower + upper);
    }
    return std::isfinite(lower) ? lower : (std::isfinite(upper) ? upper : 0.0);
}

std::vector<double> signed_products(const DenseMatrix &k, std::span<const double> alpha, std::span<const int> y) {
    std::vector<double> ay(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        ay[i] = alpha[i] * y[i];
    }
    return multiply(k, ay);
}

void fill_support(BinaryModel &model, const DenseMatrix &x, std::span<const double> alpha, std::span<const int> y) {
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] > support_threshold) {
            model.support_indices.push_back(i);
            model.coefficients.push_back(alpha[i] * y[i]);
            model.support_vectors.push_back(to_sparse(x.row(i)));
        }
    }
}

void require_both_signs(std::span<const int> y) {
    check_binary_labels(y);
    const bool pos = std::find(y.begin(), y.end(), 1) != y.end();
    const bool neg = std::find(y.begin(), y.end(), -1) != y.end();
    if (!pos || !neg) {
        throw error{ errc::no_both_classes, "training labels must contain both +1 and -1" };
    }
}

}  // namespace

BinaryModel train_binary(const Method m, const TrainingKernels &kernels, const DenseMatrix &x, std::span<const int> y,
                         const Hyperparameters &hp) {
    hp.validate(m);
    const std::size_t n = y.size();
    if (x.rows() != n || kernels.k.matrix.rows() != n) {
        throw error{ errc::alignment_error, "features, kernel and labels disagree in row count" };
    }
    require_both_signs(y);

    BinaryModel model;
    model.method = m;
    model.kernel_main = hp.kernel_main;
    model.dim = x.cols();
    auto &diag = model.diagnostics;
    const DenseMatrix &k = kernels.k.matrix;

    switch (m) {
        case Method::svm_hinge: {
            SmoSettings settings = hp.smo;
            settings.upper_bound = hp.c;
            auto sol = solve_smo(k, y, settings);
            const auto s = signed_products(k, sol.alpha, y);
            model.bias = hinge_bias(sol.alpha, s, y, hp.c, diag.bias_fallback);
            diag.dual_objective = sol.objective;
            diag.iterations = sol.iterations;
            diag.converged = sol.converged;
            diag.alpha = std::move(sol.alpha);
            break;
        }
        case Method::svm2plus: {
            if (!kernels.ktilde || !kernels.deformed) {
                throw error{ errc::alignment_error, "svm2plus needs the privileged and deformed kernels" };
            }
            const DeformedKernel &q = *kernels.deformed;
            if (q.q.rows() != n) {
                throw error{ errc::alignment_error, "deformed kernel size differs from label count" };
            }
            SmoSettings settings = hp.smo;
            settings.upper_bound.reset();
            const DenseMatrix h = dual_hessian(k, q.q, y);
            auto sol = solve_smo(h, y, settings);

            diag.slack = multiply(q.q, sol.alpha);
            if (q.shifted_factor.n == n) {
                // c = (C Kt + lambda I)^{-1} alpha = (Kt + lambda/C I)^{-1} alpha / C
                diag.correcting_coefficients = cholesky_solve(q.shifted_factor, sol.alpha);
                for (double &v : diag.correcting_coefficients) {
                    v /= q.c;
                }
            }
            const auto s = signed_products(k, sol.alpha, y);
            std::vector<std::size_t> active;
            for (std::size_t i = 0; i < n; ++i) {
                if (sol.alpha[i] > support_threshold) {
                    active.push_back(i);
                }
            }
            if (!active.empty()) {
                model.bias = margin_bias(active, s, diag.slack, y);
            } else {
                model.bias = fallback_bias(s, diag.slack, y);
                diag.bias_fallback = true;
            }
            diag.dual_objective = sol.objective;
            diag.iterations = sol.iterations;
            diag.converged = sol.converged;
            diag.cap_hit = sol.cap_hit;
            diag.alpha = std::move(sol.alpha);
            break;
        }
        case Method::svm1plus: {
            if (!kernels.ktilde) {
                throw error{ errc::alignment_error, "svm1plus needs the privileged kernel" };
            }
            const DenseMatrix &kt = kernels.ktilde->matrix;
            auto sol = solve_svm1plus_dual(k, kt, y, hp.c, hp.lambda, hp.svm1plus);

            // v = sum_j (alpha_j + beta_j - C) / lambda z_j
            std::vector<double> coeff(n);
            for (std::size_t i = 0; i < n; ++i) {
                coeff[i] = (sol.alpha[i] + sol.beta[i] - hp.c) / hp.lambda;
            }
            const auto g0 = multiply(kt, coeff);

            const auto s = signed_products(k, sol.alpha, y);

            // Active constraints give equations in (b, rho):
            //   beta_i > 0:  rho = -g0_i
            //   alpha_i > 0: y_i b + rho = 1 - y_i s_i - g0_i
            const double thresh = 1e-6 * hp.c;
            double n_alpha = 0.0;
            double n_beta = 0.0;
            double sum_y = 0.0;
            double rhs_b = 0.0;
            double rhs_rho = 0.0;
            std::vector<std::size_t> active;
            for (std::size_t i = 0; i < n; ++i) {
                if (sol.beta[i] > thresh) {
                    n_beta += 1.0;
                    rhs_rho -= g0[i];
                }
                if (sol.alpha[i] > thresh) {
                    const double r = 1.0 - y[i] * s[i] - g0[i];
                    active.push_back(i);
                    n_alpha += 1.0;
                    sum_y += y[i];
                    rhs_b += y[i] * r;
                    rhs_rho += r;
                }
            }
            // least squares over the normal equations; the determinant is an integer
            const double det = n_alpha * (n_alpha + n_beta) - sum_y * sum_y;
            double rho = 0.0;
            bool solved = false;
            if (det > 0.5) {
                rho = (n_alpha * rhs_rho - sum_y * rhs_b) / det;
                model.bias = ((n_alpha + n_beta) * rhs_b - sum_y * rhs_rho) / det;
                solved = true;
            } else if (n_beta > 0.0) {
                rho = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (sol.beta[i] > thresh) {
                        rho -= g0[i];
                    }
                }
                rho /= n_beta;
            } else {
                // smallest offset leaving every slack nonnegative: |min_i xi_i| is minimal there
                const auto inconsistency = [&](const double r) {
                    double lowest = std::numeric_limits<double>::infinity();
                    for (const double g : g0) {
                        lowest = std::min(lowest, g + r);
                    }
                    return std::abs(lowest);
                };
                const double span = 1.0 + max_abs(g0);
                rho = ternary_minimize(inconsistency, -span, span);
                diag.correcting_bias_fallback = true;
            }
            diag.slack.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                diag.slack[i] = g0[i] + rho;
            }
            if (!solved) {
                if (!active.empty()) {
                    model.bias = margin_bias(active, s, diag.slack, y);
                } else {
                    model.bias = fallback_bias(s, diag.slack, y);
                    diag.bias_fallback = true;
                }
            }
            diag.correcting_coefficients = std::move(coeff);
            diag.correcting_bias = rho;
            diag.dual_objective = sol.objective;
            diag.iterations = sol.iterations;
            diag.converged = sol.converged;
            diag.alpha = std::move(sol.alpha);
            diag.beta = std::move(sol.beta);
            break;
        }
    }
    fill_support(model, x, diag.alpha, y);
    return model;
}

BinaryModel train_svm(const DenseMatrix &x, std::span<const int> y, const Hyperparameters &hp) {
    const auto kernels = make_training_kernels(Method::svm_hinge, x, nullptr, hp);
    return train_binary(Method::svm_hinge, kernels, x, y, hp);
}

BinaryModel train_svm2plus(const DenseMatrix &x, const DenseMatrix &z, std::span<const int> y, const Hyperparameters &hp) {
    const auto kernels = make_training_kernels(Method::svm2plus, x, &z, hp);
    return train_binary(Method::svm2plus, kernels, x, y, hp);
}

BinaryModel train_svm1plus(const DenseMatrix &x, const DenseMatrix &z, std::span<const int> y, const Hyperparameters &hp) {
    const auto kernels = make_training_kernels(Method::svm1plus, x, &z, hp);
    return train_binary(Method::svm1plus, kernels, x, y, hp);
}

std::vector<double> decision_values(const BinaryModel &model, std::span<const SparseVector> x_test) {
    std::vector<double> f(x_test.size(), model.bias);
    for (std::size_t t = 0; t < x_test.size(); ++t) {
        double s = 0.0;
        for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
            s += model.coefficients[i] * evaluate(model.kernel_main, model.support_vectors[i], x_test[t]);
        }
        f[t] += s;
    }
    return f;
}

std::vector<double> decision_values(const BinaryModel &model, const DenseMatrix &x_test) {
    if (x_test.cols() != model.dim) {
        throw error{ errc::dimension_mismatch, "test features have " + std::to_string(x_test.cols()) +
                                                   " columns, model expects " + std::to_string(model.dim) };
    }
    return decision_values(model, to_sparse_rows(x_test));
}

BinaryModel negated(const BinaryModel &model) {
    BinaryModel out = model;
    for (double &c : out.coefficients) {
        c = -c;
    }
    out.bias = -model.bias;
    return out;
}

bool MulticlassModel::converged() const noexcept {
    return std::all_of(binaries.begin(), binaries.end(), [](const BinaryModel &b) { return b.diagnostics.converged; });
}

MulticlassModel train_one_vs_rest(const LupiDataset &data, const Hyperparameters &hp, const Method m,
                                  const std::size_t jobs) {
    data.validate();
    hp.validate(m);
    MulticlassModel model;
    model.method = m;
    model.classes = data.classes();
    if (model.classes.size() < 2) {
        throw error{ errc::single_class_dataset, "one-vs-rest needs at least two classes" };
    }
    for (const int c : model.classes) {
        model.class_counts.push_back(static_cast<std::size_t>(std::count(data.y.begin(), data.y.end(), c)));
    }
    if (uses_privileged(m) && !data.has_privileged()) {
        throw error{ errc::alignment_error, std::string{ to_string(m) } + " needs privileged features" };
    }

    const DenseMatrix x = data.dense_x();
    const std::optional<DenseMatrix> z = data.has_privileged() ? std::optional{ data.dense_z() } : std::nullopt;
    const TrainingKernels kernels = make_training_kernels(m, x, z ? &*z : nullptr, hp);

    const std::size_t n_binaries = model.classes.size() == 2 ? 1 : model.classes.size();
    model.binaries.resize(model.classes.size());

    const auto train_class = [&](const std::size_t ci) {
        std::vector<int> y(data.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] = data.y[i] == model.classes[ci] ? 1 : -1;
        }
        model.binaries[ci] = train_binary(m, kernels, x, y, hp);
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n_binaries));
    if (workers == 1) {
        for (std::size_t ci = 0; ci < n_binaries; ++ci) {
            train_class(ci);
        }
    } else {
        std::atomic<std::size_t> next{ 0 };
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t ci = next++; ci < n_binaries; ci = next++) {
                    try {
                        train_class(ci);
                    } catch (...) {
                        const std::lock_guard lock{ failure_mutex };
                        if (!failure) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
        for (auto &t : pool) {
            t.join();
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    if (model.classes.size() == 2) {
        model.binaries[1] = negated(model.binaries[0]);
    }
    return model;
}

std::vector<int> predict(const MulticlassModel &model, std::span<const SparseVector> x_test) {
    std::vector<int> labels(x_test.size(), model.classes.empty() ? 0 : model.classes.front());
    std::vector<double> best(x_test.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t ci = 0; ci < model.binaries.size(); ++ci) {
        const auto f = decision_values(model.binaries[ci], x_test);
        for (std::size_t t = 0; t < f.size(); ++t) {
            if (f[t] > best[t]) {
                best[t] = f[t];
                labels[t] = model.classes[ci];
            }
        }
    }
    return labels;
}

std::vector<int> predict(const MulticlassModel &model, const DenseMatrix &x_test) {
    for (const auto &b : model.binaries) {
        if (x_test.cols() != b.dim) {
            throw error{ errc::dimension_mismatch, "test features have " + std::to_string(x_test.cols()) +
                                                       " columns, model expects " + std::to_string(b.dim) };
        }
    }
    return predict(model, to_sparse_rows(x_test));
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size() || truth.empty()) {
        throw error{ errc::dimension_mismatch, "accuracy: prediction and truth sizes differ or are empty" };
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        correct += predicted[i] == truth[i] ? 1 : 0;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(truth.size());
}

}  // namespace lupisvm
