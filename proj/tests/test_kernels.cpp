#include "lupisvm/error.hpp"
#include "lupisvm/kernels.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace lupisvm;

namespace {

errc code_of(auto &&fn) {
    try {
        fn();
    } catch (const error &e) {
        return e.code();
    }
    ADD_FAILURE() << "no lupisvm::error thrown";
    return errc::io_error;
}

GramMatrix privileged(DenseMatrix m) {
    return { std::move(m), KernelSpec::linear(), FeatureView::privileged };
}

}  // namespace

TEST(Gram, LinearOrthonormal) {
    const auto g = gram(DenseMatrix{ { 1.0, 0.0 }, { 0.0, 1.0 } }, KernelSpec::linear());
    EXPECT_EQ(g.matrix, DenseMatrix::identity(2));
}

TEST(Gram, RbfOfCoincidentPoints) {
    const auto g = gram(DenseMatrix{ { 1.0, 0.0 }, { 1.0, 0.0 } }, KernelSpec::rbf(1.0));
    EXPECT_EQ(g.matrix, (DenseMatrix{ { 1.0, 1.0 }, { 1.0, 1.0 } }));
}

TEST(Gram, LinearByHand) {
    const auto g = gram(DenseMatrix{ { 1.0, 2.0 }, { 3.0, 4.0 } }, KernelSpec::linear());
    EXPECT_EQ(g.matrix, (DenseMatrix{ { 5.0, 11.0 }, { 11.0, 25.0 } }));
}

TEST(Gram, PolynomialAndRbfFormulas) {
    const DenseMatrix x{ { 1.0, 2.0 }, { -1.0, 0.5 } };
    const auto p = gram(x, KernelSpec::polynomial(2, 0.5, 1.0));
    // inner products 5, 0, 1.25
    EXPECT_DOUBLE_EQ(p.matrix(0, 0), std::pow(0.5 * 5.0 + 1.0, 2));
    EXPECT_DOUBLE_EQ(p.matrix(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(p.matrix(1, 1), std::pow(0.5 * 1.25 + 1.0, 2));
    const auto r = gram(x, KernelSpec::rbf(0.3));
    EXPECT_DOUBLE_EQ(r.matrix(0, 1), std::exp(-0.3 * (4.0 + 2.25)));
    EXPECT_EQ(r.matrix(0, 0), 1.0);
    EXPECT_EQ(r.matrix(1, 1), 1.0);
}

TEST(Gram, RandomGramsSymmetricPsd) {
    oracle::Rng rng{ 8 };
    const KernelSpec specs[] = { KernelSpec::linear(), KernelSpec::rbf(0.7), KernelSpec::polynomial(3, 0.5, 1.0) };
    for (int trial = 0; trial < 10; ++trial) {
        const DenseMatrix x = oracle::random_matrix(rng, 3 + rng.below(10), 1 + rng.below(4));
        for (const auto &spec : specs) {
            const auto g = gram(x, spec);
            EXPECT_TRUE(g.matrix.is_symmetric(0.0));
            EXPECT_GE(min_eigenvalue(g.matrix), -1e-9 * (1.0 + g.matrix.max_abs()));
            if (spec.kind != KernelKind::polynomial) {
                for (std::size_t i = 0; i < x.rows(); ++i) {
                    EXPECT_GE(g.matrix(i, i), 0.0);
                }
            }
        }
    }
}

TEST(Gram, InvalidSpecs) {
    const DenseMatrix x{ { 1.0 } };
    EXPECT_EQ(code_of([&] { (void)gram(x, KernelSpec::rbf(0.0)); }), errc::invalid_spec);
    EXPECT_EQ(code_of([&] { (void)gram(x, KernelSpec::polynomial(0, 1.0, 0.0)); }), errc::invalid_spec);
    EXPECT_EQ(code_of([&] { (void)gram(DenseMatrix{}, KernelSpec::linear()); }), errc::dimension_mismatch);
}

TEST(CrossGram, SelfConsistency) {
    oracle::Rng rng{ 2 };
    const DenseMatrix x = oracle::random_matrix(rng, 5, 3);
    for (const auto &spec : { KernelSpec::linear(), KernelSpec::polynomial(2, 1.0, 0.5) }) {
        EXPECT_EQ(cross_gram(x, x, spec), gram(x, spec).matrix);
    }
    EXPECT_LE(max_abs_diff(cross_gram(x, x, KernelSpec::rbf(0.4)), gram(x, KernelSpec::rbf(0.4)).matrix), 1e-15);
}

TEST(CrossGram, RbfColumnAtTrainingPoint) {
    oracle::Rng rng{ 12 };
    const DenseMatrix x = oracle::random_matrix(rng, 4, 2);
    const DenseMatrix t{ { x(2, 0), x(2, 1) } };
    const DenseMatrix k = cross_gram(x, t, KernelSpec::rbf(1.0));
    ASSERT_EQ(k.rows(), 4u);
    ASSERT_EQ(k.cols(), 1u);
    EXPECT_EQ(k(2, 0), 1.0);
    for (std::size_t i : { 0u, 1u, 3u }) {
        EXPECT_LT(k(i, 0), 1.0);
    }
}

TEST(CrossGram, LinearByHand) {
    EXPECT_EQ(cross_gram(DenseMatrix{ { 1.0, 0.0 } }, DenseMatrix{ { 2.0, 3.0 } }, KernelSpec::linear()),
              DenseMatrix{ { 2.0 } });
}

TEST(CrossGram, DimensionMismatch) {
    EXPECT_EQ(code_of([] { (void)cross_gram(DenseMatrix{ 2, 2 }, DenseMatrix{ 2, 3 }, KernelSpec::linear()); }),
              errc::dimension_mismatch);
}

TEST(KernelSpecText, ParseAndFormat) {
    EXPECT_EQ(parse_kernel_spec("linear"), KernelSpec::linear());
    EXPECT_EQ(parse_kernel_spec("rbf:0.5"), KernelSpec::rbf(0.5));
    EXPECT_EQ(parse_kernel_spec("poly:3:0.1:1"), KernelSpec::polynomial(3, 0.1, 1.0));
    for (const auto &spec : { KernelSpec::linear(), KernelSpec::rbf(0.125), KernelSpec::polynomial(2, 3.0, -0.5) }) {
        EXPECT_EQ(parse_kernel_spec(format_kernel_spec(spec)), spec);
    }
    for (const char *bad : { "", "rbf", "rbf:x", "rbf:-1", "poly:2:1", "poly:0:1:0", "sigmoid", "linear:1" }) {
        EXPECT_EQ(code_of([&] { (void)parse_kernel_spec(bad); }), errc::invalid_spec) << bad;
    }
}

TEST(Privileged, BiasAugmentationOnlyForLinear) {
    const DenseMatrix z{ { 0.0 }, { 0.0 } };
    EXPECT_TRUE(augments_bias(KernelSpec::linear()));
    EXPECT_FALSE(augments_bias(KernelSpec::rbf(1.0)));
    EXPECT_FALSE(augments_bias(KernelSpec::polynomial(2, 1.0, 1.0)));
    // Zero privileged rows still give a nonzero linear kernel.
    const auto g = privileged_gram(z, KernelSpec::linear());
    EXPECT_EQ(g.matrix, (DenseMatrix{ { 1.0, 1.0 }, { 1.0, 1.0 } }));
    EXPECT_EQ(g.source, FeatureView::privileged);
    const auto a = augment_bias(DenseMatrix{ { 2.0, 3.0 } });
    EXPECT_EQ(a, (DenseMatrix{ { 2.0, 3.0, 1.0 } }));
}

TEST(DeformedKernel, Scalar) {
    const auto d = deformed_kernel(privileged(DenseMatrix{ { 1.0 } }), 1.0, 1.0);
    EXPECT_NEAR(d.q(0, 0), 0.5, 1e-15);
}

TEST(DeformedKernel, ZeroKernel) {
    const auto d = deformed_kernel(privileged(DenseMatrix{ 3, 3 }), 2.0, 0.5);
    EXPECT_EQ(d.q.max_abs(), 0.0);
}

TEST(DeformedKernel, ScaledIdentityClosedForm) {
    const auto d = deformed_kernel(privileged(DenseMatrix::identity(2)), 2.0, 2.0);
    EXPECT_LE(max_abs_diff(d.q, DenseMatrix{ { 0.25, 0.0 }, { 0.0, 0.25 } }), 1e-15);
}

TEST(DeformedKernel, RejectsNonPositiveHyperparameters) {
    const auto kt = privileged(DenseMatrix::identity(2));
    for (const auto &[c, l] : { std::pair{ 0.0, 1.0 }, std::pair{ 1.0, 0.0 }, std::pair{ -1.0, 1.0 },
                                std::pair{ 1.0, -2.0 }, std::pair{ std::nan(""), 1.0 } }) {
        EXPECT_EQ(code_of([&] { (void)deformed_kernel(kt, c, l); }), errc::invalid_hyperparameter);
    }
}

TEST(DeformedKernel, MatchesExplicitInverseForm) {
    oracle::Rng rng{ 17 };
    const double grid[] = { 0.1, 1.0, 10.0 };
    int checked = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + rng.below(10);
        const DenseMatrix z = oracle::random_matrix(rng, n, 1 + rng.below(4));
        GramMatrix kt = gram(z, KernelSpec::rbf(0.5 + rng.uniform()), FeatureView::privileged);
        for (std::size_t i = 0; i < n; ++i) {
            kt.matrix(i, i) += 0.1;
        }
        if (min_eigenvalue(kt.matrix) < 1e-6) {
            continue;
        }
        const double c = grid[rng.below(3)];
        const double lambda = grid[rng.below(3)];
        const DenseMatrix q = deformed_kernel(kt, c, lambda).q;
        const DenseMatrix w = oracle::woodbury_deformed(kt.matrix, c, lambda);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                EXPECT_LE(std::abs(q(i, j) - w(i, j)), 1e-8 * w.max_abs()) << i << "," << j;
            }
        }
        ++checked;
    }
    EXPECT_GT(checked, 20);
}

TEST(DeformedKernel, LargePrivilegedKernelLimit) {
    for (const double c : { 0.1, 1.0, 10.0 }) {
        for (const double lambda : { 0.1, 1.0, 10.0 }) {
            DenseMatrix kt = DenseMatrix::identity(4);
            for (double &v : kt.data()) {
                v *= 1e8;
            }
            const DenseMatrix q = deformed_kernel(privileged(kt), c, lambda).q;
            DenseMatrix target = DenseMatrix::identity(4);
            for (double &v : target.data()) {
                v /= c;
            }
            EXPECT_LE(max_abs_diff(q, target), 1e-6 / c) << "C=" << c << " lambda=" << lambda;
        }
    }
}

TEST(DeformedKernel, LargeLambdaVanishes) {
    oracle::Rng rng{ 23 };
    for (int trial = 0; trial < 10; ++trial) {
        const DenseMatrix z = oracle::random_matrix(rng, 8, 2);
        const auto kt = gram(z, KernelSpec::rbf(1.0), FeatureView::privileged);
        ASSERT_LE(kt.matrix.max_abs(), 1.0);
        EXPECT_LE(deformed_kernel(kt, 1.0, 1e8).q.max_abs(), 1e-8);
    }
}

TEST(DeformedKernel, SymmetricPsdAndBounded) {
    oracle::Rng rng{ 29 };
    const double grid[] = { 1e-3, 0.1, 1.0, 10.0, 1e3 };
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + rng.below(20);
        const DenseMatrix z = oracle::random_matrix(rng, n, 1 + rng.below(5));
        const KernelSpec spec = trial % 2 == 0 ? KernelSpec::linear() : KernelSpec::rbf(0.3);
        const auto kt = privileged_gram(z, spec);
        const double c = grid[rng.below(5)];
        const double lambda = grid[rng.below(5)];
        const auto d = deformed_kernel(kt, c, lambda);
        EXPECT_TRUE(d.q.is_symmetric(1e-10));
        EXPECT_GE(min_eigenvalue(d.q), -1e-9 * (1.0 + d.q.max_abs()));
        EXPECT_LE(d.q.max_abs(), kt.matrix.max_abs() / lambda * (1.0 + 1e-12));
        EXPECT_EQ(d.c, c);
        EXPECT_EQ(d.lambda, lambda);
    }
}

TEST(DualHessian, ZeroDeformationIsMainKernel) {
    const DenseMatrix k{ { 2.0, -1.0 }, { -1.0, 3.0 } };
    const std::vector<int> y{ 1, -1 };
    EXPECT_EQ(dual_hessian(k, DenseMatrix{ 2, 2 }, y), k);
}

TEST(DualHessian, PositiveLabelsAddElementwise) {
    const DenseMatrix k{ { 2.0, -1.0 }, { -1.0, 3.0 } };
    const DenseMatrix q{ { 0.5, 0.25 }, { 0.25, 1.0 } };
    const std::vector<int> y{ 1, 1 };
    EXPECT_EQ(dual_hessian(k, q, y), (DenseMatrix{ { 2.5, -0.75 }, { -0.75, 4.0 } }));
}

TEST(DualHessian, MixedLabelsByHand) {
    const DenseMatrix k{ { 1.0, -1.0 }, { -1.0, 1.0 } };
    const DenseMatrix q{ { 0.5, 0.0 }, { 0.0, 0.5 } };
    const std::vector<int> y{ 1, -1 };
    EXPECT_EQ(dual_hessian(k, q, y), (DenseMatrix{ { 1.5, -1.0 }, { -1.0, 1.5 } }));
}

TEST(DualHessian, ErrorContract) {
    const DenseMatrix k = DenseMatrix::identity(2);
    const std::vector<int> bad_label{ 1, 0 };
    const std::vector<int> short_y{ 1 };
    EXPECT_EQ(code_of([&] { (void)dual_hessian(k, k, bad_label); }), errc::invalid_label);
    EXPECT_EQ(code_of([&] { (void)dual_hessian(k, k, short_y); }), errc::dimension_mismatch);
    EXPECT_EQ(code_of([&] { (void)dual_hessian(k, DenseMatrix::identity(3), std::vector<int>{ 1, -1 }); }),
              errc::dimension_mismatch);
}

TEST(DualHessian, PsdForPsdInputs) {
    oracle::Rng rng{ 41 };
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.below(15);
        const auto k = gram(oracle::random_matrix(rng, n, 3), KernelSpec::linear());
        const auto kt = privileged_gram(oracle::random_matrix(rng, n, 2), KernelSpec::linear());
        const auto d = deformed_kernel(kt, 1.0 + rng.uniform(), 0.1 + rng.uniform());
        const auto y = oracle::random_labels(rng, n);
        const DenseMatrix h = dual_hessian(k, d, y);
        EXPECT_GE(min_eigenvalue(h), -1e-9 * h.max_abs());
    }
}
