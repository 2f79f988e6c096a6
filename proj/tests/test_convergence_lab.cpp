#include "test_util.hpp"

using namespace crgeom;
using namespace crgeom::testing;

namespace {

bool all_verdicts(const ConvergenceReport& r, bool value)
{
    for (const auto& [id, v] : r.verdicts)
        if (v != value)
            return false;
    return true;
}

} // namespace

TEST(GenerateSequence, RankPreservingOnIdentity)
{
    const ToleranceConfig tol;
    const PerturbationSequence s = generate_sequence(SequenceKind::rank_preserving, identity(2), {}, 1, tol);
    ASSERT_EQ(s.length(), 50);
    double previous = kInfinity;
    for (const Matrix& b : s.terms) {
        EXPECT_EQ(numerical_rank(b, tol), 2);
        const double d = metric_dx(b, identity(2), MetricKind::range, tol);
        EXPECT_LE(d, previous * 1.5);
        previous = d;
    }
    EXPECT_LE(previous, 0.02);
}

TEST(GenerateSequence, PinvBlowupOnDiagonal)
{
    const ToleranceConfig tol;
    const PerturbationSequence s = generate_sequence(SequenceKind::pinv_blowup, diag({1, 0}), {}, 1, tol);
    for (int n = 1; n <= s.length(); ++n) {
        const Matrix& b = s.terms[n - 1];
        // B_n = diag(1, 1/n) up to the phase of the null vectors
        EXPECT_NEAR(std::abs(b(1, 1)), 1.0 / n, 1e-15);
        EXPECT_NEAR(op_norm(pinv(b, tol)), n, 1e-12 * n);
    }
}

TEST(GenerateSequence, IsometryFlipKeepsIsometriesApart)
{
    const ToleranceConfig tol;
    Rng rng = trial_rng(10, "flip", 0);
    const Matrix b = matrix_with_spectrum(4, 3, random_spectrum(2, 1.0, 2.0, rng), rng);
    const PerturbationSequence s = generate_sequence(SequenceKind::isometry_flip, b, {20, 0.25}, 3, tol);
    ASSERT_EQ(s.companions.size(), s.terms.size());
    for (std::size_t i = 0; i < s.terms.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const Matrix vn = polar_decompose(s.terms[i], tol).v;
        const Matrix vc = polar_decompose(s.companions[i], tol).v;
        EXPECT_NEAR(op_norm(vn - vc), 2.0, 1e-8);
        EXPECT_NEAR(op_norm(s.terms[i] - s.companions[i]), 2.0 / n, 1e-12);
        EXPECT_NEAR(op_norm(s.terms[i] - b), 1.0 / n, 1e-12);
    }
}

TEST(GenerateSequence, IncompatibleKinds)
{
    const ToleranceConfig tol;
    EXPECT_THROW(generate_sequence(SequenceKind::rank_dropping, identity(2), {}, 1, tol), PreconditionError);
    EXPECT_THROW(generate_sequence(SequenceKind::pinv_blowup, mat({{1, 0, 0}, {0, 1, 0}}), {}, 1, tol), PreconditionError);
    EXPECT_THROW(generate_sequence(SequenceKind::rank_preserving, identity(2), {50, 1.5}, 1, tol), PreconditionError);
    EXPECT_THROW(sequence_kind_from_string("spiral"), ParseError);
}

TEST(Thm48Report, Examples)
{
    const ToleranceConfig tol;
    Rng rng = trial_rng(10, "t48", 0);
    const Matrix b = matrix_with_spectrum(4, 5, random_spectrum(2, 1.0, 2.0, rng), rng);

    const PerturbationSequence conv = generate_sequence(SequenceKind::rank_preserving, b, {}, 5, tol);
    const ConvergenceReport r1 = thm48_report(conv, tol);
    EXPECT_TRUE(r1.consistent);
    EXPECT_TRUE(all_verdicts(r1, true));
    EXPECT_EQ(r1.verdicts.size(), 13u);
    EXPECT_EQ(r1.tail_index, 37);

    const PerturbationSequence blow = generate_sequence(SequenceKind::pinv_blowup, b, {}, 5, tol);
    const ConvergenceReport r2 = thm48_report(blow, tol);
    EXPECT_TRUE(r2.consistent);
    EXPECT_TRUE(all_verdicts(r2, false));
    EXPECT_LE(r2.evidence.at("norm_distance"), 0.03);

    PerturbationSequence constant;
    constant.base = b;
    constant.terms.assign(10, b);
    const ConvergenceReport r3 = thm48_report(constant, tol);
    EXPECT_TRUE(all_verdicts(r3, true));

    const ConvergenceReport z1 = izumino_report(conv, tol);
    const ConvergenceReport z2 = izumino_report(blow, tol);
    const ConvergenceReport z3 = izumino_report(constant, tol);
    EXPECT_TRUE(all_verdicts(z1, true));
    EXPECT_TRUE(all_verdicts(z2, false));
    EXPECT_TRUE(all_verdicts(z3, true));
    EXPECT_EQ(z1.verdicts.size(), 6u);
    EXPECT_TRUE(reports_agree(r1, z1) && reports_agree(r2, z2) && reports_agree(r3, z3));

    EXPECT_THROW(thm48_report(PerturbationSequence{}, tol), PreconditionError);
}

TEST(Thm48Report, ShadowsOnConvergentSequences)
{
    const ToleranceConfig tol;
    for (int t = 0; t < 20; ++t) {
        Rng rng = trial_rng(10, "shadow", t);
        const Index m = uniform_index(rng, 2, 6);
        const Index n = uniform_index(rng, 2, 6);
        const Matrix b = matrix_with_spectrum(m, n, random_spectrum(uniform_index(rng, 1, std::min(m, n)), 1.0, 2.0, rng), rng);
        const PerturbationSequence s = generate_sequence(SequenceKind::rank_preserving, b, {}, t, tol);
        const OperatorAnalysis xb = analyze(b, tol);
        // ||B_n^+ - B^+|| <= K ||B_n - B|| with K depending only on ||B^+||
        const double k = 3.0 * std::pow(std::max(1.0, 2.0 * xb.pinv_norm()), 2);
        for (const Matrix& bn : s.terms) {
            const double dist = op_norm(bn - b);
            EXPECT_LE(op_norm(pinv(bn, tol) - xb.pinv), k * dist + 1e-12);
        }
        const ConvergenceReport r = thm48_report(s, tol);
        EXPECT_LE(r.evidence.at("polar_gap"), 0.1);
        EXPECT_LT(r.evidence.at("xi"), 1.0 - tol.angle_one_tol); // one angle bound across the tail
        EXPECT_EQ(r.verdicts.at("i"), r.verdicts.at("ii"));
    }
}

TEST(BuildGeneralizedInverse, Examples)
{
    const ToleranceConfig tol;
    Rng rng = trial_rng(10, "gi", 0);
    const Matrix b = matrix_with_spectrum(3, 4, random_spectrum(2, 0.5, 2.0, rng), rng);
    const GeneralizedInverseResult same = build_generalized_inverse(b, b, tol);
    EXPECT_MATRIX_NEAR(same.a_n, pinv(b, tol), 1e-14);

    const double delta = 0.1;
    const GeneralizedInverseResult d = build_generalized_inverse(diag({1, 0}), diag({1 + delta, 0}), tol);
    EXPECT_MATRIX_NEAR(d.a_n, diag({1 / (1 + delta), 0}), 1e-15);
    EXPECT_LE(d.inner_residual, 1e-15);
    EXPECT_LE(d.outer_residual, 1e-15);

    EXPECT_THROW(build_generalized_inverse(diag({1, 0}), diag({1, 0.1}), tol), PreconditionError);
    EXPECT_THROW(build_generalized_inverse(diag({1, 0}), diag({3, 0}), tol), PreconditionError);
}

TEST(BuildGeneralizedInverse, RandomRankPreservingPairs)
{
    const ToleranceConfig tol;
    for (int t = 0; t < 200; ++t) {
        Rng rng = trial_rng(10, "gi-rand", t);
        const Index m = uniform_index(rng, 2, 6);
        const Index n = uniform_index(rng, 2, 6);
        const Matrix b = matrix_with_spectrum(m, n, random_spectrum(uniform_index(rng, 0, std::min(m, n)), 0.5, 2.0, rng), rng);
        const double c = uniform(rng, 0.001, 0.05);
        const Matrix bn = (identity(m) + c * gaussian_matrix(m, m, rng) / std::sqrt(double(m))) * b;
        const GeneralizedInverseResult g = build_generalized_inverse(b, bn, tol);
        EXPECT_LE(g.inner_residual, 1e-9);
        EXPECT_LE(g.outer_residual, 1e-9);
        EXPECT_LE(g.norm, g.bound + 1e-9);
        EXPECT_LE(g.commute_residual, 1e-9);
    }
}

TEST(DiscontinuityDemo, Examples)
{
    const ToleranceConfig tol;
    const DiscontinuityReport d = discontinuity_demo(diag({1, 0}), 20, tol);
    EXPECT_TRUE(d.certified);
    for (const DiscontinuityRow& row : d.rows) {
        EXPECT_NEAR(row.pinv_norm, row.n, 1e-12 * row.n);
        EXPECT_NEAR(row.projector_gap, 1.0, 1e-14);
    }
    const DiscontinuityReport z = discontinuity_demo(Matrix::Zero(2, 2), 10, tol);
    EXPECT_TRUE(z.certified);
    EXPECT_NEAR(z.rows.back().pinv_norm, 10.0, 1e-12);

    Matrix defect = Matrix::Zero(4, 4);
    defect.topLeftCorner(3, 3) = diag({1, 1, 0});
    EXPECT_TRUE(discontinuity_demo(defect, 15, tol).certified);

    EXPECT_THROW(discontinuity_demo(identity(2), 5, tol), PreconditionError);
}
