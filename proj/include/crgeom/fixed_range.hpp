#pragma once

// Operators with a prescribed range S: the slice CR_S, its factorization into
// a positive part with range S and a partial isometry onto S, Thompson
// components, and the actions and section on the factors.

#include "crgeom/orbit_geometry.hpp"

#include <Eigen/Eigenvalues>

namespace crgeom {

/// The fixed range S ⊆ K together with P = P_S.
struct FixedRangeContext {
    Subspace s;
    Matrix p;

    explicit FixedRangeContext(Subspace range) : s(std::move(range)), p(s.projector()) {}

    Index ambient_dim() const { return s.ambient_dim(); }
};

/// B ∈ CR_S  iff  B B^+ = P_S within eq_tol.
inline bool crs_membership(const Matrix& b, const FixedRangeContext& ctx, const ToleranceConfig& tol)
{
    if (b.rows() != ctx.ambient_dim())
        throw DimensionMismatch("crs_membership: B must map into the ambient space of S");
    return op_norm(analyze(b, tol).p_range - ctx.p) <= tol.eq_tol;
}

inline bool is_hermitian_psd(const Matrix& a, const ToleranceConfig& tol)
{
    if (a.rows() != a.cols())
        return false;
    const double scale = std::max(tol.eq_tol, 1e-12) * (1.0 + op_norm(a));
    if (op_norm(a - a.adjoint()) > scale)
        return false;
    const Matrix herm = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -scale;
}

/// Verdict and the domination constants A <= beta B, B <= alpha A on the common range.
struct ThompsonVerdict {
    bool same_component = false;
    double alpha = kInfinity;
    double beta = kInfinity;
};

/// Positive A, B share a Thompson component iff their ranges agree.
inline ThompsonVerdict thompson_same_component(const Matrix& a, const Matrix& b, const ToleranceConfig& tol)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("thompson_same_component: operands must have the same shape");
    if (!is_hermitian_psd(a, tol) || !is_hermitian_psd(b, tol))
        throw PreconditionError("thompson_same_component: operands must be positive semidefinite");

    const Subspace ra = range_basis(a, tol);
    const Subspace rb = range_basis(b, tol);
    ThompsonVerdict v;
    v.same_component = op_norm(ra.projector() - rb.projector()) <= std::max(tol.eq_tol, 1e-12);
    if (!v.same_component)
        return v;
    if (ra.is_zero()) {
        v.alpha = v.beta = 1.0;
        return v;
    }
    // Compress to the common range, where both are positive definite, and read
    // the extreme generalized eigenvalues of A x = lambda B x.
    const Matrix ac = ra.basis().adjoint() * a * ra.basis();
    const Matrix bc = ra.basis().adjoint() * b * ra.basis();
    Eigen::SelfAdjointEigenSolver<Matrix> eb(Matrix(0.5 * (bc + bc.adjoint())));
    const Matrix b_inv_sqrt = eb.eigenvectors() * eb.eigenvalues().cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal()
        * eb.eigenvectors().adjoint();
    const Matrix pencil = b_inv_sqrt * ac * b_inv_sqrt;
    Eigen::SelfAdjointEigenSolver<Matrix> ep(Matrix(0.5 * (pencil + pencil.adjoint())), Eigen::EigenvaluesOnly);
    v.beta = ep.eigenvalues().maxCoeff();
    v.alpha = 1.0 / ep.eigenvalues().minCoeff();
    return v;
}

/// A ∈ C_P: positive with range S.
inline bool in_positive_component(const Matrix& a, const FixedRangeContext& ctx, const ToleranceConfig& tol)
{
    if (a.rows() != ctx.ambient_dim() || !is_hermitian_psd(a, tol))
        return false;
    return op_norm(range_projector(a, tol) - ctx.p) <= tol.eq_tol;
}

/// V ∈ PI_S: partial isometry with V V^* = P_S.
inline bool in_partial_isometries(const Matrix& v, const FixedRangeContext& ctx, const ToleranceConfig& tol)
{
    if (v.rows() != ctx.ambient_dim())
        return false;
    return op_norm(v * v.adjoint() - ctx.p) <= tol.eq_tol;
}

/// f(B) = (|B^*|, |B^*|^+ B).
struct RangeFactorization {
    Matrix abs_b_star;
    Matrix v;
};

inline RangeFactorization factorize_f(const Matrix& b, const FixedRangeContext& ctx, const ToleranceConfig& tol)
{
    if (!crs_membership(b, ctx, tol))
        throw PreconditionError("factorize_f: B does not have range S");
    const PolarParts polar = polar_decompose(b, tol);
    return {polar.abs_a_star, pinv(polar.abs_a_star, tol) * b};
}

/// f^{-1}(A, V) = A V.
inline Matrix factorize_f_inverse(const Matrix& a, const Matrix& v, const FixedRangeContext& ctx, const ToleranceConfig& tol)
{
    if (!in_positive_component(a, ctx, tol))
        throw PreconditionError("factorize_f_inverse: A is not positive with range S");
    if (!in_partial_isometries(v, ctx, tol))
        throw PreconditionError("factorize_f_inverse: V is not a partial isometry onto S");
    return a * v;
}

/// G' = Q_S G Q_S^* + (I - P): acts as G on S and as the identity on S^⊥.
inline Matrix embed_on_range(const Matrix& block, const FixedRangeContext& ctx)
{
    if (block.rows() != ctx.s.dim() || block.cols() != ctx.s.dim())
        throw DimensionMismatch("embed_on_range: block must be dim(S) x dim(S)");
    const Matrix& q = ctx.s.basis();
    return q * block * q.adjoint() + identity(ctx.ambient_dim()) - ctx.p;
}

/// G ∈ G_S: invertible, maps S onto S and fixes S^⊥ pointwise.
inline bool in_range_group(const Matrix& g, const FixedRangeContext& ctx, const ToleranceConfig& tol)
{
    const Index n = ctx.ambient_dim();
    if (g.rows() != n || g.cols() != n)
        return false;
    const Matrix off = identity(n) - ctx.p;
    const double scale = tol.eq_tol * (1.0 + op_norm(g));
    return op_norm(g * off - off) <= scale && op_norm(off * g * ctx.p) <= scale
        && smallest_singular_value(g) > tol.eq_tol;
}

/// L_1(G, B) = G B G^*.
inline Matrix action_l1(const Matrix& g, const Matrix& b) { return g * b * g.adjoint(); }

/// L_2(U, V) = V U^*.
inline Matrix action_l2(const Matrix& u, const Matrix& v) { return v * u.adjoint(); }

/// Local section of pi(G, U) = (G P G^*, W U^*) at (P, W).
struct RangeSection {
    Matrix g;              // B^{1/2} + I - P
    Matrix u;              // unitary part of V^*W + (I - V^*V)(I - W^*W)
    Matrix u_raw;          // V^*W + (I - V^*V)(I - W^*W)
    double residual = 0.0; // max(||g P g^* - B||, ||W u^* - V||)
    double unitarity = 0.0; // ||u^* u - I||
};

/// sigma(B, V) = (B^{1/2} + I - P, V^*W + (I - V^*V)(I - W^*W)). The second factor
/// is invertible near W but unitary only when N(V) = N(W); its unitary polar
/// factor is returned, which leaves W u^* = V intact.
inline RangeSection section_pi(const Matrix& bpos, const Matrix& v, const FixedRangeContext& ctx, const Matrix& w,
                               const ToleranceConfig& tol)
{
    if (!in_positive_component(bpos, ctx, tol))
        throw PreconditionError("section_pi: B is not positive with range S");
    if (!in_partial_isometries(v, ctx, tol) || !in_partial_isometries(w, ctx, tol))
        throw PreconditionError("section_pi: V and W must be partial isometries onto S");
    if (v.cols() != w.cols())
        throw DimensionMismatch("section_pi: V and W must share a domain");
    const Index n = v.cols();
    const Index k = ctx.ambient_dim();

    RangeSection out;
    out.g = psd_sqrt(bpos) + identity(k) - ctx.p;
    const Matrix vv = v.adjoint() * v;
    const Matrix ww = w.adjoint() * w;
    out.u_raw = v.adjoint() * w + (identity(n) - vv) * (identity(n) - ww);
    const SvdFactorization f = svd(out.u_raw);
    if (!(f.singular_values(n - 1) > tol.eq_tol))
        throw OutsideNeighborhood("section_pi: V is outside the section neighbourhood of W");
    out.u = f.u * f.v.adjoint();
    out.residual = std::max(op_norm(out.g * ctx.p * out.g.adjoint() - bpos), op_norm(w * out.u.adjoint() - v));
    out.unitarity = op_norm(out.u.adjoint() * out.u - identity(n));
    return out;
}

} // namespace crgeom
