#pragma once

// Dense complex matrix substrate: one-sided Jacobi SVD, numerical rank and
// orthonormal bases of ranges and nullspaces.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "crgeom/errors.hpp"

namespace crgeom {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Numerical cutoffs standing in for exact closed-range arithmetic.
struct ToleranceConfig {
    /// Singular values at or below rank_tol_rel * sigma_1 * max(rows, cols) count as zero.
    double rank_tol_rel = 1e-12;
    /// Threshold for "this matrix identity holds".
    double eq_tol = 1e-9;
    /// Cosines within this distance of 1 count as intersection directions.
    double angle_one_tol = 1e-8;

    /// Throws PreconditionError on an invalid configuration. eq_tol = 0 is
    /// accepted so that exact comparisons can be requested explicitly.
    void validate() const
    {
        if (!(rank_tol_rel > 0.0 && rank_tol_rel < 1.0))
            throw PreconditionError("rank_tol_rel must lie in (0, 1)");
        if (!(eq_tol >= 0.0) || !std::isfinite(eq_tol))
            throw PreconditionError("eq_tol must be finite and non-negative");
        if (!(angle_one_tol > 0.0 && angle_one_tol < 1.0))
            throw PreconditionError("angle_one_tol must lie in (0, 1)");
    }
};

struct SvdOptions {
    int max_sweeps = 60;
    /// A column pair is treated as orthogonal once |<a_p, a_q>| <= threshold * |a_p| |a_q|.
    /// Zero selects rows * machine epsilon.
    double threshold = 0.0;
};

/// A = U diag(singular_values) V^*, U and V square unitary, values descending.
struct SvdFactorization {
    Matrix u;
    RealVector singular_values;
    Matrix v;

    Index rows() const { return u.rows(); }
    Index cols() const { return v.rows(); }
    double largest() const { return singular_values.size() ? singular_values(0) : 0.0; }
};

inline Matrix identity(Index n) { return Matrix::Identity(n, n); }

inline bool all_finite(const Matrix& a)
{
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag()))
                return false;
    return true;
}

namespace detail {

// Orthonormal columns spanning the complement of the columns of q (q has orthonormal columns).
inline Matrix complete_basis(const Matrix& q, Index total)
{
    const Index k = q.cols();
    if (k == 0)
        return identity(total);
    Eigen::HouseholderQR<Matrix> qr(q);
    Matrix full = qr.householderQ() * identity(total);
    Matrix out(total, total);
    out.leftCols(k) = q;
    out.rightCols(total - k) = full.rightCols(total - k);
    return out;
}

// Hestenes one-sided Jacobi on a tall matrix (rows >= cols).
inline SvdFactorization jacobi_svd_tall(const Matrix& a, const SvdOptions& opts)
{
    const Index m = a.rows();
    const Index n = a.cols();
    const double thr = opts.threshold > 0.0
        ? opts.threshold
        : static_cast<double>(m) * std::numeric_limits<double>::epsilon();

    Matrix work = a;
    Matrix v = identity(n);

    bool converged = n < 2;
    double off = 0.0;
    for (int sweep = 0; sweep < opts.max_sweeps && !converged; ++sweep) {
        bool rotated = false;
        off = 0.0;
        for (Index p = 0; p + 1 < n; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                const double alpha = work.col(p).squaredNorm();
                const double beta = work.col(q).squaredNorm();
                const Complex g = work.col(p).dot(work.col(q));
                const double ag = std::abs(g);
                if (ag == 0.0 || alpha == 0.0 || beta == 0.0)
                    continue;
                const double cosine = ag / std::sqrt(alpha * beta);
                if (cosine <= thr)
                    continue;
                off = std::max(off, cosine);
                rotated = true;

                // Rotate the phase of column q so the pair's inner product is real.
                const Complex phase = std::conj(g / ag);
                work.col(q) *= phase;
                v.col(q) *= phase;

                const double zeta = (beta - alpha) / (2.0 * ag);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;

                for (Matrix* target : {&work, &v}) {
                    Vector cp = target->col(p);
                    Vector cq = target->col(q);
                    target->col(p) = c * cp - s * cq;
                    target->col(q) = s * cp + c * cq;
                }
            }
        }
        converged = !rotated;
    }
    if (!converged)
        throw ConvergenceFailure("one-sided Jacobi SVD did not converge", off);

    RealVector norms(n);
    for (Index j = 0; j < n; ++j)
        norms(j) = work.col(j).norm();

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return norms(x) > norms(y); });

    SvdFactorization f;
    f.singular_values.resize(n);
    f.v.resize(n, n);
    Matrix left(m, n);
    Index nonzero = 0;
    for (Index j = 0; j < n; ++j) {
        const Index src = order[static_cast<std::size_t>(j)];
        f.singular_values(j) = norms(src);
        f.v.col(j) = v.col(src);
        if (norms(src) > std::numeric_limits<double>::min()) {
            left.col(nonzero) = work.col(src) / norms(src);
            ++nonzero;
        }
    }
    f.u = complete_basis(left.leftCols(nonzero), m);
    return f;
}

} // namespace detail

/// Full SVD by one-sided Jacobi. Throws ConvergenceFailure when the sweep budget is exhausted.
inline SvdFactorization svd(const Matrix& a, const SvdOptions& opts = {})
{
    if (a.rows() < 1 || a.cols() < 1)
        throw DimensionMismatch("svd: matrix must have at least one row and one column");
    if (!all_finite(a))
        throw PreconditionError("svd: matrix has non-finite entries");
    if (a.rows() >= a.cols())
        return detail::jacobi_svd_tall(a, opts);
    SvdFactorization t = detail::jacobi_svd_tall(a.adjoint(), opts);
    return {std::move(t.v), std::move(t.singular_values), std::move(t.u)};
}

/// Spectral norm. Empty matrices have norm 0.
inline double op_norm(const Matrix& a)
{
    if (a.size() == 0)
        return 0.0;
    return svd(a).largest();
}

/// Smallest singular value of a square matrix; used as an invertibility margin.
inline double smallest_singular_value(const Matrix& a)
{
    const SvdFactorization f = svd(a);
    return f.singular_values(f.singular_values.size() - 1);
}

/// Number of singular values above rank_tol_rel * sigma_1 * max(rows, cols).
inline Index numerical_rank(const SvdFactorization& f, const ToleranceConfig& tol)
{
    const double top = f.largest();
    if (top == 0.0)
        return 0;
    const double cutoff = tol.rank_tol_rel * top * static_cast<double>(std::max(f.rows(), f.cols()));
    Index r = 0;
    while (r < f.singular_values.size() && f.singular_values(r) > cutoff)
        ++r;
    return r;
}

inline Index numerical_rank(const Matrix& a, const ToleranceConfig& tol)
{
    if (a.size() == 0)
        return 0;
    return numerical_rank(svd(a), tol);
}

/// A subspace of C^n carried by an orthonormal basis. The zero subspace has an n x 0 basis.
class Subspace {
public:
    /// Wraps a basis that is orthonormal up to eq_tol.
    static Subspace from_orthonormal(Matrix basis, double eq_tol)
    {
        if (basis.rows() < 1)
            throw DimensionMismatch("Subspace: ambient dimension must be positive");
        if (basis.cols() > basis.rows())
            throw DimensionMismatch("Subspace: more basis vectors than ambient dimensions");
        if (basis.cols() > 0) {
            const double dev = (basis.adjoint() * basis - identity(basis.cols())).cwiseAbs().maxCoeff();
            if (dev > std::max(eq_tol, 1e-12))
                throw PreconditionError("Subspace: basis is not orthonormal");
        }
        return Subspace(std::move(basis));
    }

    static Subspace zero(Index ambient) { return Subspace(Matrix(ambient, 0)); }
    static Subspace full(Index ambient) { return Subspace(identity(ambient)); }

    Index ambient_dim() const { return basis_.rows(); }
    Index dim() const { return basis_.cols(); }
    bool is_zero() const { return basis_.cols() == 0; }
    const Matrix& basis() const { return basis_; }

    Matrix projector() const { return basis_ * basis_.adjoint(); }

private:
    explicit Subspace(Matrix basis) : basis_(std::move(basis)) {}
    friend Subspace range_basis(const SvdFactorization&, const ToleranceConfig&);
    friend Subspace nullspace_basis(const SvdFactorization&, const ToleranceConfig&);

    Matrix basis_;
};

inline Subspace range_basis(const SvdFactorization& f, const ToleranceConfig& tol)
{
    return Subspace(f.u.leftCols(numerical_rank(f, tol)));
}

inline Subspace nullspace_basis(const SvdFactorization& f, const ToleranceConfig& tol)
{
    const Index r = numerical_rank(f, tol);
    return Subspace(f.v.rightCols(f.cols() - r));
}

inline Subspace range_basis(const Matrix& a, const ToleranceConfig& tol) { return range_basis(svd(a), tol); }
inline Subspace nullspace_basis(const Matrix& a, const ToleranceConfig& tol) { return nullspace_basis(svd(a), tol); }

/// Orthonormal basis of the span of the columns of `spanning` (an ambient x k matrix, k may be 0).
inline Subspace span_of(const Matrix& spanning, const ToleranceConfig& tol)
{
    if (spanning.cols() == 0)
        return Subspace::zero(spanning.rows());
    return range_basis(spanning, tol);
}

/// Orthogonal complement within the ambient space.
inline Subspace orthogonal_complement(const Subspace& s, const ToleranceConfig& tol)
{
    if (s.is_zero())
        return Subspace::full(s.ambient_dim());
    if (s.dim() == s.ambient_dim())
        return Subspace::zero(s.ambient_dim());
    return nullspace_basis(Matrix(s.basis().adjoint()), tol);
}

} // namespace crgeom
