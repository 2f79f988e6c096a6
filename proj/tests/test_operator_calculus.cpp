#include "test_util.hpp"

#include <numeric>

using namespace crgeom;
using namespace crgeom::testing;

namespace {

// Exact rational arithmetic for the small hand examples.
struct Q {
    long long num = 0;
    long long den = 1;
    Q(long long n = 0, long long d = 1) : num(n), den(d)
    {
        const long long g = std::gcd(num, den);
        num /= g;
        den /= g;
        if (den < 0) {
            num = -num;
            den = -den;
        }
    }
    friend Q operator+(Q a, Q b) { return Q(a.num * b.den + b.num * a.den, a.den * b.den); }
    friend Q operator*(Q a, Q b) { return Q(a.num * b.num, a.den * b.den); }
    friend bool operator==(Q a, Q b) { return a.num == b.num && a.den == b.den; }
};

using Q2 = std::array<std::array<Q, 2>, 2>;

Q2 mul(const Q2& a, const Q2& b)
{
    Q2 c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
}

Q2 transpose(const Q2& a) { return {{{a[0][0], a[1][0]}, {a[0][1], a[1][1]}}}; }

} // namespace

TEST(Analyze, Identity)
{
    const OperatorAnalysis x = analyze(identity(2), {});
    EXPECT_MATRIX_NEAR(x.pinv, identity(2), 1e-15);
    EXPECT_NEAR(x.gamma, 1.0, 1e-15);
    EXPECT_EQ(x.signature, (OrbitSignature{0, 2, 0}));
}

TEST(Analyze, RankOneOnesMatrixMatchesExactPseudoinverse)
{
    // The candidate [[1/4,1/4],[1/4,1/4]] satisfies all four Penrose equations exactly.
    const Q2 a{{{Q(1), Q(1)}, {Q(1), Q(1)}}};
    const Q2 x{{{Q(1, 4), Q(1, 4)}, {Q(1, 4), Q(1, 4)}}};
    EXPECT_EQ(mul(mul(a, x), a), a);
    EXPECT_EQ(mul(mul(x, a), x), x);
    EXPECT_EQ(transpose(mul(a, x)), mul(a, x));
    EXPECT_EQ(transpose(mul(x, a)), mul(x, a));

    const OperatorAnalysis r = analyze(mat({{1, 1}, {1, 1}}), {});
    EXPECT_MATRIX_NEAR(r.pinv, mat({{0.25, 0.25}, {0.25, 0.25}}), 1e-15);
    EXPECT_NEAR(r.gamma, 2.0, 1e-14);
    EXPECT_EQ(r.rank, 1);
}

TEST(Analyze, ZeroOperator)
{
    const OperatorAnalysis x = analyze(Matrix::Zero(2, 3), {});
    EXPECT_EQ(x.pinv.rows(), 3);
    EXPECT_EQ(x.pinv.cols(), 2);
    EXPECT_EQ(op_norm(x.pinv), 0.0);
    EXPECT_TRUE(std::isinf(x.gamma));
    EXPECT_EQ(x.signature, (OrbitSignature{3, 0, 2}));
}

TEST(Analyze, PseudoinverseMatchesEigenOracleOnFullRank)
{
    for (int t = 0; t < 100; ++t) {
        Rng rng = trial_rng(5, "cod", t);
        const Index m = uniform_index(rng, 1, 7);
        const Index n = uniform_index(rng, 1, 7);
        const Matrix a = matrix_with_spectrum(m, n, random_spectrum(std::min(m, n), 0.1, 10.0, rng), rng);
        const Matrix oracle = a.completeOrthogonalDecomposition().pseudoInverse();
        EXPECT_MATRIX_NEAR(pinv(a, {}), oracle, 1e-10);
    }
}

TEST(ReducedMinModulus, Examples)
{
    const ToleranceConfig tol;
    EXPECT_NEAR(reduced_min_modulus(diag({3, 2}), tol), 2.0, 1e-15);
    EXPECT_NEAR(reduced_min_modulus(diag({5, 0}), tol), 5.0, 1e-15);
    EXPECT_TRUE(std::isinf(reduced_min_modulus(Matrix::Zero(3, 2), tol)));
}

TEST(ReducedMinModulus, InfimumOverUnitSphereOfCorange)
{
    // brute force: min ||A x|| over random unit x in N(A)^⊥ never undercuts gamma and gets close
    Rng rng = trial_rng(5, "inf", 0);
    const Matrix a = matrix_with_spectrum(4, 3, (RealVector(2) << 2.0, 0.5).finished(), rng);
    const ToleranceConfig tol;
    const double g = reduced_min_modulus(a, tol);
    const Matrix corange = orthogonal_complement(nullspace_basis(a, tol), tol).basis();
    double best = kInfinity;
    for (int i = 0; i < 20000; ++i) {
        const Vector x = corange * random_unit_vector(corange.cols(), rng);
        best = std::min(best, (a * x).norm());
    }
    EXPECT_GE(best, g - 1e-12);
    EXPECT_NEAR(best, g, 1e-2);
}

TEST(Polar, Examples)
{
    const ToleranceConfig tol;
    Rng rng = trial_rng(5, "polar", 0);
    const Matrix u = haar_unitary(3, rng);
    const PolarParts pu = polar_decompose(u, tol);
    EXPECT_MATRIX_NEAR(pu.v, u, 1e-13);
    EXPECT_MATRIX_NEAR(pu.abs_a, identity(3), 1e-13);

    const PolarParts pd = polar_decompose(diag({2, 0}), tol);
    EXPECT_MATRIX_NEAR(pd.v, diag({1, 0}), 1e-15);
    EXPECT_MATRIX_NEAR(pd.abs_a, diag({2, 0}), 1e-15);

    const PolarParts pz = polar_decompose(Matrix::Zero(2, 2), tol);
    EXPECT_EQ(op_norm(pz.v), 0.0);
    EXPECT_EQ(op_norm(pz.abs_a), 0.0);
}

TEST(Polar, FactorizationsShareTheIsometry)
{
    const ToleranceConfig tol;
    for (int t = 0; t < 100; ++t) {
        Rng rng = trial_rng(5, "polar-random", t);
        const RandomOperator op = random_operator({}, rng);
        const OperatorAnalysis x = analyze(op.a, tol);
        const PolarParts p = polar_decompose(op.a, tol);
        const double s = 1e-12 * (1 + x.norm());
        EXPECT_MATRIX_NEAR(Matrix(p.v * p.abs_a), op.a, s);
        EXPECT_MATRIX_NEAR(Matrix(p.abs_a_star * p.v), op.a, s);
        EXPECT_MATRIX_NEAR(Matrix(p.v.adjoint() * p.v), x.p_corange, 1e-11);
        EXPECT_MATRIX_NEAR(Matrix(p.v * p.v.adjoint()), x.p_range, 1e-11);
        EXPECT_TRUE(is_partial_isometry(p.v, tol));
        // V_B = (B*)^+ |B|
        EXPECT_MATRIX_NEAR(Matrix(pinv(Matrix(op.a.adjoint()), tol) * p.abs_a), p.v, 1e-9);
    }
}

TEST(PartialIsometry, Examples)
{
    const ToleranceConfig tol;
    EXPECT_TRUE(is_partial_isometry(identity(3), tol));
    EXPECT_TRUE(is_partial_isometry(diag({1, 0}), tol));
    EXPECT_FALSE(is_partial_isometry(diag({2, 0}), tol));
}

TEST(PinvDifferenceIdentity, Examples)
{
    const ToleranceConfig tol;
    EXPECT_LE(pinv_difference_identity(identity(2), identity(2), tol), 1e-15);
    EXPECT_LE(pinv_difference_identity(identity(2), Matrix(2.0 * identity(2)), tol), 1e-12);
    for (int t = 0; t < 500; ++t) {
        Rng rng = trial_rng(5, "pdi", t);
        const Matrix a = matrix_with_spectrum(4, 3, random_spectrum(uniform_index(rng, 0, 3), 0.1, 10.0, rng), rng);
        const Matrix b = matrix_with_spectrum(4, 3, random_spectrum(uniform_index(rng, 0, 3), 0.1, 10.0, rng), rng);
        EXPECT_LE(pinv_difference_identity(a, b, tol), 1e-10);
    }
}

TEST(GeneralizedInverse, Examples)
{
    const ToleranceConfig tol;
    Rng rng = trial_rng(5, "gi", 0);
    const Matrix b = matrix_with_spectrum(3, 4, (RealVector(2) << 3.0, 0.2).finished(), rng);
    EXPECT_TRUE(check_generalized_inverse(b, pinv(b, tol), tol));
    EXPECT_FALSE(check_generalized_inverse(identity(2), Matrix(2.0 * identity(2)), tol));
    for (double c : {-3.0, 0.0, 7.5})
        EXPECT_TRUE(check_generalized_inverse(diag({1, 0}), mat({{1, 0}, {0, c}}), tol));
}

TEST(Signature, FromRank)
{
    const OrbitSignature s = signature_from_rank(2, 3, 2);
    EXPECT_EQ(s, (OrbitSignature{1, 2, 0}));
    EXPECT_EQ(s.index(), 1);
}
