#include "test_util.hpp"

using namespace crgeom;
using namespace crgeom::testing;

namespace {

// sup |<x, y>| over unit x in span(a), y in span(b) for lines, by a grid over phases.
double grid_cosine(const Vector& a, const Vector& b)
{
    const Vector ua = a / a.norm();
    const Vector ub = b / b.norm();
    double best = 0.0;
    for (int i = 0; i < 720; ++i)
        for (int j = 0; j < 720; ++j) {
            const Complex pa = std::polar(1.0, 2 * M_PI * i / 720);
            const Complex pb = std::polar(1.0, 2 * M_PI * j / 720);
            best = std::max(best, std::abs((pa * ua).dot(pb * ub).real()));
        }
    return best;
}

} // namespace

TEST(CosC0, Examples)
{
    const ToleranceConfig tol;
    const Vector e1 = basis_vector(2, 0);
    const Vector e2 = basis_vector(2, 1);
    EXPECT_NEAR(cos_c0(line(e1), line(e2), tol), 0.0, 1e-15);
    EXPECT_NEAR(cos_c0(line(e1), line(e1), tol), 1.0, 1e-15);
    const Vector diag = e1 + e2;
    const double grid = grid_cosine(e1, diag);
    EXPECT_NEAR(grid, std::sqrt(0.5), 1e-6);
    EXPECT_NEAR(cos_c0(line(e1), line(diag), tol), grid, 1e-6);
}

TEST(CosC0, ZeroSubspaceGivesZero)
{
    const ToleranceConfig tol;
    EXPECT_EQ(cos_c0(Subspace::zero(3), Subspace::full(3), tol), 0.0);
}

TEST(Intersect, Examples)
{
    const ToleranceConfig tol;
    const Subspace m = line(basis_vector(3, 0));
    EXPECT_TRUE(same_subspace(intersect(m, m, tol), m, tol));
    EXPECT_EQ(intersect(line(basis_vector(2, 0)), line(basis_vector(2, 1)), tol).dim(), 0);

    // two planes in C^3 built around a known common vector
    Rng rng = trial_rng(2, "planes", 0);
    const Vector common = random_unit_vector(3, rng);
    Matrix p1(3, 2), p2(3, 2);
    p1 << common, gaussian_vector(3, rng);
    p2 << common, gaussian_vector(3, rng);
    const Subspace s = intersect(span_of(p1, tol), span_of(p2, tol), tol);
    ASSERT_EQ(s.dim(), 1);
    EXPECT_MATRIX_NEAR(s.projector(), Matrix(common * common.adjoint()), 1e-10);
}

TEST(CosC, Examples)
{
    const ToleranceConfig tol;
    const Vector e1 = basis_vector(2, 0);
    const Vector e2 = basis_vector(2, 1);
    EXPECT_NEAR(cos_c(line(e1), line(e1), tol), 0.0, 1e-15);
    EXPECT_NEAR(cos_c(line(e1), line(e2), tol), 0.0, 1e-15);
    EXPECT_NEAR(cos_c(line(e1), line(Vector(e1 + e2)), tol), std::sqrt(0.5), 1e-14);
    EXPECT_NEAR(angle(line(e1), line(e1), tol), M_PI / 2, 1e-12);
    EXPECT_NEAR(angle(line(e1), line(e2), tol), M_PI / 2, 1e-12);
    EXPECT_NEAR(angle(line(e1), line(Vector(e1 + e2)), tol), M_PI / 4, 1e-12);
}

TEST(CosC, ComplementSymmetry)
{
    const ToleranceConfig tol;
    for (int t = 0; t < 200; ++t) {
        Rng rng = trial_rng(2, "perp", t);
        const Index n = uniform_index(rng, 2, 7);
        const Subspace m1 = Subspace::from_orthonormal(random_orthonormal(n, uniform_index(rng, 0, n), rng), 1e-12);
        const Subspace m2 = Subspace::from_orthonormal(random_orthonormal(n, uniform_index(rng, 0, n), rng), 1e-12);
        EXPECT_NEAR(cos_c(m1, m2, tol), cos_c(orthogonal_complement(m1, tol), orthogonal_complement(m2, tol), tol), 1e-9);
    }
}

TEST(Prop22, Examples)
{
    const ToleranceConfig tol;
    const Subspace a = line(basis_vector(2, 0));
    const Subspace b = line(Vector(basis_vector(2, 0) + basis_vector(2, 1)));
    const SumVerdict complementary = prop22_verdict(a, b, tol);
    EXPECT_TRUE(complementary.sum_is_everything);
    EXPECT_TRUE(complementary.c0_perp_lt_1);
    const SumVerdict same = prop22_verdict(a, a, tol);
    EXPECT_FALSE(same.sum_is_everything);
    EXPECT_FALSE(same.c0_perp_lt_1);
}

TEST(Prop22, DimensionCountOracle)
{
    const ToleranceConfig tol;
    for (int t = 0; t < 500; ++t) {
        Rng rng = trial_rng(2, "prop22", t);
        const Index d1 = uniform_index(rng, 0, 5);
        const Index d2 = uniform_index(rng, 0, 5);
        const Subspace m1 = Subspace::from_orthonormal(random_orthonormal(5, d1, rng), 1e-12);
        const Subspace m2 = Subspace::from_orthonormal(random_orthonormal(5, d2, rng), 1e-12);
        // generic subspaces: dim(M + N) = min(5, d1 + d2)
        const SumVerdict v = prop22_verdict(m1, m2, tol);
        EXPECT_EQ(v.sum_is_everything, d1 + d2 >= 5);
        EXPECT_TRUE(v.agree());
        EXPECT_EQ(sum_dimension(m1, m2, tol), std::min<Index>(5, d1 + d2));
    }
}

TEST(Prop23, Examples)
{
    const ToleranceConfig tol;
    const Matrix b = diag({1, 0});
    const NullspaceTransversality same = prop23_verdicts(b, b, tol);
    EXPECT_TRUE(same.projector_gap_lt_1 && same.sum_is_domain && same.c0_lt_1 && same.projection_onto);

    const NullspaceTransversality orth = prop23_verdicts(diag({1, 0}), diag({0, 1}), tol);
    EXPECT_FALSE(orth.projector_gap_lt_1);
    EXPECT_NEAR(orth.projector_gap, 1.0, 1e-15);
}

TEST(Prop23, SmallNullspaceRotationKeepsAllTrue)
{
    const ToleranceConfig tol;
    for (int t = 0; t < 100; ++t) {
        Rng rng = trial_rng(2, "prop23", t);
        const Index n = uniform_index(rng, 3, 6);
        const Matrix b = matrix_with_spectrum(4, n, random_spectrum(2, 0.5, 2.0, rng), rng);
        // C = B Rot(theta) with a small unitary rotation
        const double theta = uniform(rng, 1e-3, 0.2);
        Matrix skew = gaussian_matrix(n, n, rng);
        skew = 0.5 * (skew - Matrix(skew.adjoint()));
        skew /= op_norm(skew);
        const SvdFactorization f = svd(Matrix(identity(n) + theta * skew));
        const Matrix rot = f.u * f.v.adjoint();
        const NullspaceTransversality v = prop23_verdicts(b, Matrix(b * rot), tol);
        EXPECT_TRUE(v.projector_gap_lt_1);
        EXPECT_TRUE(v.sum_is_domain);
        EXPECT_TRUE(v.c0_lt_1);
        EXPECT_TRUE(v.projection_onto);
    }
}

TEST(Prop23, ProjectorGapConditionNeedsNullityNotToGrow)
{
    // B = I, C = 0: the sum, angle and projection conditions hold, the projector gap is 1.
    const ToleranceConfig tol;
    const NullspaceTransversality v = prop23_verdicts(identity(2), Matrix::Zero(2, 2), tol);
    EXPECT_TRUE(v.sum_is_domain);
    EXPECT_TRUE(v.c0_lt_1);
    EXPECT_TRUE(v.projection_onto);
    EXPECT_FALSE(v.projector_gap_lt_1);
}

TEST(ImageOf, MapsBasis)
{
    const ToleranceConfig tol;
    const Subspace s = line(basis_vector(2, 0));
    EXPECT_TRUE(same_subspace(image_of(mat({{0, 0}, {1, 0}}), s, tol), line(basis_vector(2, 1)), tol));
    EXPECT_EQ(image_of(Matrix::Zero(2, 2), s, tol).dim(), 0);
}
