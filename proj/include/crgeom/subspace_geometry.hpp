#pragma once

// Cosines and angles between subspaces, intersections, and the sum and
// nullspace-transversality criteria built on them.

#include <numbers>

#include "crgeom/operator_calculus.hpp"

namespace crgeom {

namespace detail {

inline void require_same_ambient(const Subspace& m, const Subspace& n, const char* who)
{
    if (m.ambient_dim() != n.ambient_dim())
        throw DimensionMismatch(std::string(who) + ": ambient dimensions differ");
}

} // namespace detail

/// c0(M, N) = sup |<x, y>| over unit x in M, y in N.
inline double cos_c0(const Subspace& m, const Subspace& n, const ToleranceConfig& = {})
{
    detail::require_same_ambient(m, n, "cos_c0");
    if (m.is_zero() || n.is_zero())
        return 0.0;
    const double c = svd(Matrix(m.basis().adjoint() * n.basis())).largest();
    return std::min(c, 1.0);
}

/// The principal-vector decomposition of a pair of subspaces, split at the
/// cosine threshold 1 - angle_one_tol.
struct PrincipalSplit {
    Subspace intersection;
    Subspace m_reduced; // M ∩ (M ∩ N)^⊥
    Subspace n_reduced; // N ∩ (M ∩ N)^⊥
};

inline PrincipalSplit principal_split(const Subspace& m, const Subspace& n, const ToleranceConfig& tol)
{
    detail::require_same_ambient(m, n, "principal_split");
    const Index amb = m.ambient_dim();
    if (m.is_zero() || n.is_zero())
        return {Subspace::zero(amb), m, n};

    const SvdFactorization f = svd(Matrix(m.basis().adjoint() * n.basis()));
    Index k = 0;
    while (k < f.singular_values.size() && f.singular_values(k) >= 1.0 - tol.angle_one_tol)
        ++k;
    const Matrix mx = m.basis() * f.u;
    const Matrix ny = n.basis() * f.v;
    const double eps = std::max(tol.eq_tol, 1e-10);
    return {
        Subspace::from_orthonormal(mx.leftCols(k), eps),
        Subspace::from_orthonormal(mx.rightCols(m.dim() - k), eps),
        Subspace::from_orthonormal(ny.rightCols(n.dim() - k), eps),
    };
}

/// M ∩ N: principal directions of M with cosine at least 1 - angle_one_tol.
inline Subspace intersect(const Subspace& m, const Subspace& n, const ToleranceConfig& tol)
{
    return principal_split(m, n, tol).intersection;
}

/// c(M, N): c0 of the two subspaces with their intersection removed.
inline double cos_c(const Subspace& m, const Subspace& n, const ToleranceConfig& tol)
{
    const PrincipalSplit s = principal_split(m, n, tol);
    return cos_c0(s.m_reduced, s.n_reduced, tol);
}

/// Angle in [0, pi/2] whose cosine is c(M, N).
inline double angle(const Subspace& m, const Subspace& n, const ToleranceConfig& tol)
{
    return std::acos(std::clamp(cos_c(m, n, tol), 0.0, 1.0));
}

/// dim(M + N). The singular values of [Q_M Q_N] are sqrt(1 -+ cos) of the
/// principal angles, so directions with cosine >= 1 - angle_one_tol are
/// counted once, matching intersect().
inline Index sum_dimension(const Subspace& m, const Subspace& n, const ToleranceConfig& tol)
{
    detail::require_same_ambient(m, n, "sum_dimension");
    Matrix both(m.ambient_dim(), m.dim() + n.dim());
    both << m.basis(), n.basis();
    if (both.cols() == 0)
        return 0;
    const SvdFactorization f = svd(both);
    const double cutoff = std::sqrt(tol.angle_one_tol);
    return (f.singular_values.array() > cutoff).count();
}

/// True iff P_target maps `source` onto `target`, i.e. every principal cosine
/// between them exceeds the sine threshold implied by angle_one_tol.
inline bool projection_covers(const Subspace& target, const Subspace& source, const ToleranceConfig& tol)
{
    detail::require_same_ambient(target, source, "projection_covers");
    if (target.is_zero())
        return true;
    if (source.dim() < target.dim())
        return false;
    const double c = 1.0 - tol.angle_one_tol;
    const double cutoff = std::sqrt(1.0 - c * c);
    const SvdFactorization f = svd(Matrix(target.basis().adjoint() * source.basis()));
    return f.singular_values(target.dim() - 1) > cutoff;
}

/// ||P_M - P_{N^⊥}||. Reported next to c(M, N) but not identified with it:
/// the two disagree for M = N proper and nontrivial.
inline double projector_gap_cosine(const Subspace& m, const Subspace& n, const ToleranceConfig& tol)
{
    detail::require_same_ambient(m, n, "projector_gap_cosine");
    return op_norm(m.projector() - orthogonal_complement(n, tol).projector());
}

/// True iff `inner` ⊆ `outer` within eq_tol.
inline bool contained_in(const Subspace& inner, const Subspace& outer, const ToleranceConfig& tol)
{
    detail::require_same_ambient(inner, outer, "contained_in");
    if (inner.is_zero())
        return true;
    const Matrix residual = inner.basis() - outer.projector() * inner.basis();
    return op_norm(residual) <= std::max(tol.eq_tol, tol.angle_one_tol);
}

/// Subspace equality as equal dimension plus mutual containment.
inline bool same_subspace(const Subspace& a, const Subspace& b, const ToleranceConfig& tol)
{
    return a.dim() == b.dim() && contained_in(a, b, tol) && contained_in(b, a, tol);
}

/// Image of a subspace under a linear map.
inline Subspace image_of(const Matrix& map, const Subspace& s, const ToleranceConfig& tol)
{
    if (map.cols() != s.ambient_dim())
        throw DimensionMismatch("image_of: map domain does not match subspace ambient dimension");
    if (s.is_zero())
        return Subspace::zero(map.rows());
    return span_of(map * s.basis(), tol);
}

struct SumVerdict {
    bool sum_is_everything = false; // M + N = whole space (dimension count)
    bool c0_perp_lt_1 = false;      // c0(M^⊥, N^⊥) < 1
    bool agree() const { return sum_is_everything == c0_perp_lt_1; }
};

inline SumVerdict prop22_verdict(const Subspace& m, const Subspace& n, const ToleranceConfig& tol)
{
    detail::require_same_ambient(m, n, "prop22_verdict");
    SumVerdict v;
    v.sum_is_everything = sum_dimension(m, n, tol) == m.ambient_dim();
    const double c = cos_c0(orthogonal_complement(m, tol), orthogonal_complement(n, tol), tol);
    v.c0_perp_lt_1 = c < 1.0 - tol.angle_one_tol;
    return v;
}

/// The four nullspace-transversality conditions for a pair (B, C) of operators.
struct NullspaceTransversality {
    bool projector_gap_lt_1 = false; // ||P_{N(B)} - P_{N(C)}|| < 1
    bool sum_is_domain = false;      // N(C) + R(B^+) = H
    bool c0_lt_1 = false;            // c0(N(B), R(C^+)) < 1
    bool projection_onto = false;    // N(B) = P_{N(B)}(N(C))
    double projector_gap = 0.0;
    double c0 = 0.0;
};

inline NullspaceTransversality prop23_verdicts(const Matrix& b, const Matrix& c, const ToleranceConfig& tol)
{
    if (b.rows() != c.rows() || b.cols() != c.cols())
        throw DimensionMismatch("prop23_verdicts: B and C must have the same shape");
    const SvdFactorization fb = svd(b);
    const SvdFactorization fc = svd(c);
    const Subspace nb = nullspace_basis(fb, tol);
    const Subspace nc = nullspace_basis(fc, tol);
    // R(X^+) = R(X*) = N(X)^⊥
    const Subspace rb_pinv = orthogonal_complement(nb, tol);
    const Subspace rc_pinv = orthogonal_complement(nc, tol);

    NullspaceTransversality v;
    v.projector_gap = op_norm(nb.projector() - nc.projector());
    v.projector_gap_lt_1 = v.projector_gap < 1.0 - tol.angle_one_tol;
    v.sum_is_domain = sum_dimension(nc, rb_pinv, tol) == b.cols();
    v.c0 = cos_c0(nb, rc_pinv, tol);
    v.c0_lt_1 = v.c0 < 1.0 - tol.angle_one_tol;
    v.projection_onto = projection_covers(nb, nc, tol);
    return v;
}

} // namespace crgeom
