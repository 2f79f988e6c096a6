#include "test_util.hpp"

using namespace crgeom;
using namespace crgeom::testing;

TEST(MetricDx, Examples)
{
    const ToleranceConfig tol;
    Rng rng = trial_rng(4, "dx", 0);
    const Matrix a = gaussian_matrix(3, 2, rng);
    EXPECT_EQ(metric_dx(a, a, MetricKind::range, tol), 0.0);
    EXPECT_NEAR(metric_dx(identity(2), Matrix(2.0 * identity(2)), MetricKind::range, tol), 1.0, 1e-14);
    EXPECT_NEAR(metric_dx(diag({1, 0}), diag({0, 1}), MetricKind::range, tol), std::sqrt(2.0), 1e-14);
    EXPECT_THROW(metric_dx(identity(2), identity(3), MetricKind::range, tol), DimensionMismatch);
}

TEST(MetricDx, NullspaceMetricIsRangeMetricOfAdjoints)
{
    const ToleranceConfig tol;
    for (int t = 0; t < 100; ++t) {
        Rng rng = trial_rng(4, "dx-adj", t);
        const RandomOperator a = random_operator({}, rng);
        const Matrix b = matrix_with_spectrum(a.a.rows(), a.a.cols(), random_spectrum(1, 0.5, 2.0, rng), rng);
        EXPECT_NEAR(metric_dx(a.a, b, MetricKind::nullspace, tol),
                    metric_dx(Matrix(a.a.adjoint()), Matrix(b.adjoint()), MetricKind::range, tol), 1e-10);
    }
}

TEST(Lemma32, Examples)
{
    const ToleranceConfig tol;
    const Matrix b = identity(2);
    const auto tight = lemma32_certificate(b, b, MetricKind::range, tol);
    ASSERT_TRUE(tight);
    EXPECT_NEAR(tight->lhs, tight->rhs, 1e-15);

    const auto c = lemma32_certificate(diag({1, 1.1}), b, MetricKind::range, tol);
    ASSERT_TRUE(c);
    // gamma(B) = 1, d_R = 0.1, gamma(A) = 1: rhs = sqrt(2) * 0.1 + 1
    EXPECT_NEAR(c->lhs, 1.0, 1e-14);
    EXPECT_NEAR(c->rhs, std::sqrt(2.0) * 0.1 + 1.0, 1e-14);
    EXPECT_TRUE(c->holds);

    EXPECT_FALSE(lemma32_certificate(Matrix::Zero(2, 2), b, MetricKind::range, tol));
}

TEST(Lemma32, RandomPairs)
{
    const ToleranceConfig tol;
    for (int t = 0; t < 1000; ++t) {
        Rng rng = trial_rng(4, "l32", t);
        const Matrix a = matrix_with_spectrum(5, 4, random_spectrum(uniform_index(rng, 1, 4), 0.01, 10.0, rng), rng);
        const Matrix b = matrix_with_spectrum(5, 4, random_spectrum(uniform_index(rng, 1, 4), 0.01, 10.0, rng), rng);
        for (MetricKind k : {MetricKind::range, MetricKind::nullspace}) {
            const auto c = lemma32_certificate(a, b, k, tol);
            ASSERT_TRUE(c);
            EXPECT_TRUE(c->holds) << c->lhs << " > " << c->rhs;
        }
    }
}

TEST(Cor33, Examples)
{
    const ToleranceConfig tol;
    const Matrix b = identity(2);
    EXPECT_TRUE(cor33_certificate(b, b, MetricKind::range, tol).holds);
    Rng rng = trial_rng(4, "c33", 0);
    Matrix e = gaussian_matrix(2, 2, rng);
    e *= 0.1 / op_norm(e);
    const InequalityCertificate c = cor33_certificate(Matrix(b + e), b, MetricKind::range, tol);
    EXPECT_TRUE(c.holds);
    EXPECT_NEAR(c.rhs, 2.0, 1e-14);
    // radius for ||B^+|| = 1 is 1/(2 sqrt 2) ~ 0.354
    EXPECT_THROW(cor33_certificate(Matrix(2.0 * b), b, MetricKind::range, tol), PreconditionError);
}

TEST(Cor34, SymmetricInArguments)
{
    const ToleranceConfig tol;
    for (int t = 0; t < 100; ++t) {
        Rng rng = trial_rng(4, "c34", t);
        const Matrix a = matrix_with_spectrum(3, 3, random_spectrum(2, 0.1, 3.0, rng), rng);
        const Matrix b = matrix_with_spectrum(3, 3, random_spectrum(3, 0.1, 3.0, rng), rng);
        const auto ab = cor34_certificate(a, b, MetricKind::nullspace, tol);
        const auto ba = cor34_certificate(b, a, MetricKind::nullspace, tol);
        ASSERT_TRUE(ab && ba);
        EXPECT_EQ(ab->holds, ba->holds);
        EXPECT_TRUE(ab->holds);
        EXPECT_NEAR(ab->rhs, ba->rhs, 1e-12);
    }
    const auto tight = cor34_certificate(identity(2), identity(2), MetricKind::range, tol);
    EXPECT_EQ(tight->lhs, 0.0);
    EXPECT_EQ(tight->rhs, 0.0);
}

TEST(Membership, Examples)
{
    const ToleranceConfig tol;
    EXPECT_TRUE(rk_membership(identity(2), 1, tol));
    EXPECT_FALSE(rk_membership(diag({1, 0.1}), 5, tol));
    EXPECT_TRUE(rk_membership(diag({1, 0.1}), 10, tol));
    EXPECT_TRUE(rk_membership(Matrix::Zero(2, 2), 3, tol));
    EXPECT_THROW(rk_membership(identity(2), 0, tol), PreconditionError);

    EXPECT_TRUE(m_membership(identity(2), tol));
    EXPECT_FALSE(m_membership(diag({1, 0}), tol));
    EXPECT_TRUE(m_membership(mat({{1, 0, 0}, {0, 1, 0}}), tol));
}

TEST(Lemma38, BoundaryDiagonalPair)
{
    const ToleranceConfig tol;
    // both in R_2, ||A - B|| = 0.499 just below 1/2
    const Matrix a = diag({1.0, 0.5});
    const Matrix b = diag({1.0, 0.999});
    const Lemma38Certificates c = lemma38_certificates(a, b, 2, tol);
    ASSERT_TRUE(c.gamma);
    EXPECT_NEAR(c.gamma->lhs, 0.499, 1e-14);
    EXPECT_NEAR(c.gamma->rhs, 0.499, 1e-14);
    EXPECT_TRUE(c.gamma->holds);
    EXPECT_TRUE(c.range.holds && c.corange.holds);

    const Lemma38Certificates same = lemma38_certificates(a, a, 2, tol);
    EXPECT_EQ(same.range.lhs, 0.0);
    EXPECT_THROW(lemma38_certificates(diag({1, 0.1}), a, 2, tol), PreconditionError);
}

TEST(Cor39AndLemma310, RankPreservingDiagonalPerturbation)
{
    const ToleranceConfig tol;
    const Matrix a = diag({2.0, 1.0, 0.0});
    const Matrix b = diag({2.1, 0.9, 0.0});
    for (MetricKind k : {MetricKind::range, MetricKind::nullspace}) {
        const Cor39Certificates c = cor39_certificate(a, b, 2, k, tol);
        EXPECT_TRUE(c.lower.holds && c.upper.holds);
        EXPECT_NEAR(c.lower.rhs, 0.1, 1e-14); // equal projectors: d_X = ||A - B||
    }
    const InequalityCertificate l = lemma310_certificate(a, b, 2, tol);
    EXPECT_NEAR(l.lhs, 1.0 / 0.9 - 1.0, 1e-14);
    EXPECT_TRUE(l.holds);
}

TEST(Thm36, Examples)
{
    const ToleranceConfig tol;
    const Matrix a10 = thm36_gadget(diag({1, 0}), 10, tol);
    EXPECT_NEAR(reduced_min_modulus(a10, tol), 0.1, 1e-15);
    const Matrix z4 = thm36_gadget(Matrix::Zero(2, 2), 4, tol);
    EXPECT_NEAR(op_norm(z4), 0.25, 1e-15);
    EXPECT_NEAR(reduced_min_modulus(z4, tol), 0.25, 1e-15);
    EXPECT_THROW(thm36_gadget(identity(2), 3, tol), PreconditionError);
}

TEST(Thm36, RandomRankDeficient)
{
    const ToleranceConfig tol;
    for (int t = 0; t < 20; ++t) {
        Rng rng = trial_rng(4, "t36", t);
        const Matrix a = matrix_with_spectrum(5, 5, random_spectrum(uniform_index(rng, 0, 4), 0.1, 5.0, rng), rng);
        for (int n = 2; n <= 50; ++n) {
            const Matrix an = thm36_gadget(a, n, tol);
            EXPECT_LE(reduced_min_modulus(an, tol), 1.0 / n + 1e-10);
            EXPECT_NEAR(op_norm(an - a), 1.0 / n, 1e-12);
        }
    }
}

TEST(Thm312, Examples)
{
    const ToleranceConfig tol;
    const double eps = 1e-3;
    const FlipResult f = thm312_flip(diag({1, eps}), basis_vector(2, 1), tol);
    EXPECT_NEAR(f.operator_gap, 2 * eps, 1e-15);
    EXPECT_NEAR(f.isometry_gap, 2.0, 1e-14);

    const FlipResult g = thm312_flip(identity(2), basis_vector(2, 0), tol);
    EXPECT_MATRIX_NEAR(g.w, diag({-1, 1}), 1e-15);
    EXPECT_NEAR(g.operator_gap, 2.0, 1e-14);

    EXPECT_THROW(thm312_flip(diag({1, 0}), basis_vector(2, 1), tol), PreconditionError);
    EXPECT_THROW(thm312_flip(identity(2), Vector(2.0 * basis_vector(2, 0)), tol), PreconditionError);
}

TEST(Thm312, SmallestSingularDirection)
{
    const ToleranceConfig tol;
    for (int t = 0; t < 50; ++t) {
        Rng rng = trial_rng(4, "t312", t);
        RealVector s = random_spectrum(3, 0.5, 5.0, rng);
        s(2) = log_uniform(rng, 1e-4, 1e-2);
        const Matrix u = haar_unitary(4, rng);
        const Matrix v = haar_unitary(3, rng);
        Matrix d = Matrix::Zero(4, 3);
        for (Index i = 0; i < 3; ++i)
            d(i, i) = s(i);
        const FlipResult f = thm312_flip(Matrix(u * d * v.adjoint()), v.col(2), tol);
        EXPECT_NEAR(f.operator_gap, 2 * s(2), 1e-12);
        EXPECT_NEAR(f.isometry_gap, 2.0, 1e-8);
    }
}

TEST(Certificates, DigestIsStableAndInputSensitive)
{
    const Matrix a = identity(2);
    const Matrix b = diag({1, 2});
    EXPECT_EQ(digest({&a, &b}), digest({&a, &b}));
    EXPECT_NE(digest({&a, &b}), digest({&b, &a}));
    EXPECT_EQ(digest({&a}).size(), 16u);
}
