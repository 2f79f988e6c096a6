#pragma once

// Moore-Penrose inverse, reduced minimum modulus, canonical projectors and
// the forward/reverse polar decompositions.

#include <limits>
#include <compare>
#include <ostream>

#include "crgeom/numeric_core.hpp"

namespace crgeom {

/// (nullity, rank, defect): the complete invariant of an orbit under A -> G A H^{-1}.
struct OrbitSignature {
    Index nullity = 0;
    Index rank = 0;
    Index defect = 0;

    /// Semi-Fredholm index dim N - codim R.
    Index index() const { return nullity - defect; }

    auto operator<=>(const OrbitSignature&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const OrbitSignature& s)
{
    return os << '(' << s.nullity << ',' << s.rank << ',' << s.defect << ')';
}

inline OrbitSignature signature_from_rank(Index rows, Index cols, Index rank)
{
    return {cols - rank, rank, rows - rank};
}

inline Matrix diag_real(const RealVector& d)
{
    return d.cast<Complex>().asDiagonal();
}

/// Pseudoinverse from an existing factorization, inverting exactly the retained singular values.
inline Matrix pinv(const SvdFactorization& f, const ToleranceConfig& tol)
{
    const Index r = numerical_rank(f, tol);
    RealVector inv = f.singular_values.head(r).cwiseInverse();
    return f.v.leftCols(r) * diag_real(inv) * f.u.leftCols(r).adjoint();
}

inline Matrix pinv(const Matrix& a, const ToleranceConfig& tol) { return pinv(svd(a), tol); }

/// Everything the other modules need to know about a single operator.
struct OperatorAnalysis {
    Matrix a;
    Matrix pinv;
    Matrix p_range;   // P_{R(A)} = A A^+
    Matrix p_corange; // P_{R(A*)} = A^+ A
    Matrix p_null;    // P_{N(A)} = I - A^+ A
    double gamma = kInfinity;
    OrbitSignature signature;
    SvdFactorization factorization;
    Index rank = 0;

    double norm() const { return factorization.largest(); }
    /// ||A^+||; zero for the zero operator.
    double pinv_norm() const { return rank == 0 ? 0.0 : 1.0 / gamma; }
};

inline OperatorAnalysis analyze(const Matrix& a, const ToleranceConfig& tol)
{
    OperatorAnalysis out;
    out.a = a;
    out.factorization = svd(a);
    const SvdFactorization& f = out.factorization;
    out.rank = numerical_rank(f, tol);
    out.pinv = pinv(f, tol);
    const Matrix ur = f.u.leftCols(out.rank);
    const Matrix vr = f.v.leftCols(out.rank);
    out.p_range = ur * ur.adjoint();
    out.p_corange = vr * vr.adjoint();
    out.p_null = identity(a.cols()) - out.p_corange;
    out.gamma = out.rank == 0 ? kInfinity : f.singular_values(out.rank - 1);
    out.signature = signature_from_rank(a.rows(), a.cols(), out.rank);
    return out;
}

/// gamma(A): smallest retained singular value, +inf for the zero operator.
inline double reduced_min_modulus(const Matrix& a, const ToleranceConfig& tol)
{
    const SvdFactorization f = svd(a);
    const Index r = numerical_rank(f, tol);
    return r == 0 ? kInfinity : f.singular_values(r - 1);
}

inline Matrix range_projector(const Matrix& a, const ToleranceConfig& tol)
{
    return range_basis(a, tol).projector();
}

inline Matrix nullspace_projector(const Matrix& a, const ToleranceConfig& tol)
{
    return nullspace_basis(a, tol).projector();
}

/// A = V |A| = |A*| V with V the canonical partial isometry.
struct PolarParts {
    Matrix v;
    Matrix abs_a;
    Matrix abs_a_star;
};

inline PolarParts polar_decompose(const SvdFactorization& f, const ToleranceConfig& tol)
{
    const Index r = numerical_rank(f, tol);
    const Index m = f.rows();
    const Index n = f.cols();
    RealVector sig_n = RealVector::Zero(n);
    RealVector sig_m = RealVector::Zero(m);
    sig_n.head(r) = f.singular_values.head(r);
    sig_m.head(r) = f.singular_values.head(r);
    PolarParts p;
    p.v = f.u.leftCols(r) * f.v.leftCols(r).adjoint();
    p.abs_a = f.v * diag_real(sig_n) * f.v.adjoint();
    p.abs_a_star = f.u * diag_real(sig_m) * f.u.adjoint();
    return p;
}

inline PolarParts polar_decompose(const Matrix& a, const ToleranceConfig& tol)
{
    return polar_decompose(svd(a), tol);
}

/// Principal square root of a Hermitian positive semidefinite matrix.
inline Matrix psd_sqrt(const Matrix& b)
{
    const SvdFactorization f = svd(b);
    RealVector s = f.singular_values;
    // roundoff-level values would otherwise come out near sqrt(eps)
    const double floor = s.size() ? s(0) * std::numeric_limits<double>::epsilon() * double(b.rows()) : 0.0;
    for (Index i = 0; i < s.size(); ++i)
        s(i) = s(i) <= floor ? 0.0 : std::sqrt(s(i));
    return f.v * diag_real(s) * f.v.adjoint();
}

/// True iff V^*V is idempotent within eq_tol.
inline bool is_partial_isometry(const Matrix& v, const ToleranceConfig& tol)
{
    const Matrix g = v.adjoint() * v;
    return op_norm(g * g - g) <= tol.eq_tol;
}

/// Residual of the three-term expansion of A^+ - B^+ in terms of A - B.
inline double pinv_difference_identity(const Matrix& a, const Matrix& b, const ToleranceConfig& tol)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("pinv_difference_identity: shapes differ");
    const Matrix ap = pinv(a, tol);
    const Matrix bp = pinv(b, tol);
    const Matrix d = a - b;
    const Matrix ds = d.adjoint();
    const Matrix ap_star = ap.adjoint(); // (A*)^+
    const Matrix bp_star = bp.adjoint(); // (B*)^+
    const Matrix rhs = -ap * d * bp
        + ap * ap_star * ds * (identity(a.rows()) - b * bp)
        + (identity(a.cols()) - ap * a) * ds * bp_star * bp;
    return op_norm((ap - bp) - rhs);
}

/// True iff B Bp B = B within eq_tol (1 + ||B||).
inline bool check_generalized_inverse(const Matrix& b, const Matrix& bp, const ToleranceConfig& tol)
{
    if (bp.rows() != b.cols() || bp.cols() != b.rows())
        throw DimensionMismatch("check_generalized_inverse: Bp must be cols x rows of B");
    return op_norm(b * bp * b - b) <= tol.eq_tol * (1.0 + op_norm(b));
}

} // namespace crgeom
