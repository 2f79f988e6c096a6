#pragma once

// Range and nullspace metrics d_R, d_N and the perturbation inequalities that
// tie them to the reduced minimum modulus and the pseudoinverse.

#include <array>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <optional>
#include <string>

#include "crgeom/subspace_geometry.hpp"

namespace crgeom {

enum class MetricKind { range, nullspace };

inline const char* to_string(MetricKind k) { return k == MetricKind::range ? "R" : "N"; }

/// Outcome of checking lhs <= rhs. `holds` is lhs <= rhs + eq_tol.
struct InequalityCertificate {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool holds = false;
    std::string inputs_digest;
};

/// FNV-1a over the raw entries and shapes; identifies the inputs of a certificate.
inline std::string digest(std::initializer_list<const Matrix*> mats)
{
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](const void* p, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ULL;
        }
    };
    for (const Matrix* m : mats) {
        const std::int64_t shape[2] = {m->rows(), m->cols()};
        mix(shape, sizeof shape);
        mix(m->data(), sizeof(Complex) * static_cast<std::size_t>(m->size()));
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline InequalityCertificate make_certificate(double lhs, double rhs, const ToleranceConfig& tol, std::string inputs_digest = {})
{
    return {lhs, rhs, rhs - lhs, lhs <= rhs + tol.eq_tol, std::move(inputs_digest)};
}

namespace detail {

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* who)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch(std::string(who) + ": operands must have the same shape");
}

inline const Matrix& kind_projector(const OperatorAnalysis& x, MetricKind kind)
{
    return kind == MetricKind::range ? x.p_range : x.p_null;
}

} // namespace detail

inline double metric_dx(const OperatorAnalysis& a, const OperatorAnalysis& b, MetricKind kind)
{
    detail::require_same_shape(a.a, b.a, "metric_dx");
    const double gap = op_norm(detail::kind_projector(a, kind) - detail::kind_projector(b, kind));
    const double dist = op_norm(a.a - b.a);
    return std::hypot(gap, dist);
}

/// d_X(A, B) = (||P_X(A) - P_X(B)||^2 + ||A - B||^2)^{1/2}, X the range or the nullspace.
inline double metric_dx(const Matrix& a, const Matrix& b, MetricKind kind, const ToleranceConfig& tol)
{
    detail::require_same_shape(a, b, "metric_dx");
    return metric_dx(analyze(a, tol), analyze(b, tol), kind);
}

/// gamma(B) <= sqrt(1 + gamma(B)^2) d_X(A, B) + gamma(A). Empty when either gamma is +inf.
inline std::optional<InequalityCertificate> lemma32_certificate(const Matrix& a, const Matrix& b, MetricKind kind, const ToleranceConfig& tol)
{
    detail::require_same_shape(a, b, "lemma32_certificate");
    const OperatorAnalysis aa = analyze(a, tol);
    const OperatorAnalysis ab = analyze(b, tol);
    if (!std::isfinite(ab.gamma) || !std::isfinite(aa.gamma))
        return std::nullopt;
    const double d = metric_dx(aa, ab, kind);
    return make_certificate(ab.gamma, std::sqrt(1.0 + ab.gamma * ab.gamma) * d + aa.gamma, tol, digest({&a, &b}));
}

/// Radius of the d_X ball around B inside which ||A^+|| <= 2 ||B^+|| is guaranteed.
inline double cor33_radius(double b_pinv_norm)
{
    return 1.0 / (2.0 * std::sqrt(1.0 + b_pinv_norm * b_pinv_norm));
}

/// ||A^+|| <= 2 ||B^+|| whenever d_X(A, B) < 1 / (2 sqrt(1 + ||B^+||^2)).
/// Throws PreconditionError when d_X is not inside the radius by at least eq_tol.
inline InequalityCertificate cor33_certificate(const Matrix& a, const Matrix& b, MetricKind kind, const ToleranceConfig& tol)
{
    detail::require_same_shape(a, b, "cor33_certificate");
    const OperatorAnalysis aa = analyze(a, tol);
    const OperatorAnalysis ab = analyze(b, tol);
    const double d = metric_dx(aa, ab, kind);
    if (!(d < cor33_radius(ab.pinv_norm()) - tol.eq_tol))
        throw PreconditionError("cor33_certificate: d_X(A, B) is outside the admissible radius");
    return make_certificate(aa.pinv_norm(), 2.0 * ab.pinv_norm(), tol, digest({&a, &b}));
}

/// |gamma(B) - gamma(A)| <= sqrt(1 + gamma(B)^2) sqrt(1 + gamma(A)^2) d_X(A, B).
inline std::optional<InequalityCertificate> cor34_certificate(const Matrix& a, const Matrix& b, MetricKind kind, const ToleranceConfig& tol)
{
    detail::require_same_shape(a, b, "cor34_certificate");
    const OperatorAnalysis aa = analyze(a, tol);
    const OperatorAnalysis ab = analyze(b, tol);
    if (!std::isfinite(aa.gamma) || !std::isfinite(ab.gamma))
        return std::nullopt;
    const double d = metric_dx(aa, ab, kind);
    const double rhs = std::sqrt(1.0 + ab.gamma * ab.gamma) * std::sqrt(1.0 + aa.gamma * aa.gamma) * d;
    return make_certificate(std::abs(ab.gamma - aa.gamma), rhs, tol, digest({&a, &b}));
}

/// A ∈ R_k  iff  gamma(A) >= 1/k (the zero operator belongs to every R_k).
inline bool rk_membership(const Matrix& a, int k, const ToleranceConfig& tol)
{
    if (k < 1)
        throw PreconditionError("rk_membership: k must be a positive integer");
    return reduced_min_modulus(a, tol) >= 1.0 / k - tol.eq_tol;
}

/// A ∈ M  iff  A is injective or surjective.
inline bool m_membership(const Matrix& a, const ToleranceConfig& tol)
{
    const Index r = numerical_rank(a, tol);
    return r == a.cols() || r == a.rows();
}

/// Projector and gamma Lipschitz bounds on R_k. The third certificate is
/// present only when ||A - B|| < 1/k.
struct Lemma38Certificates {
    InequalityCertificate corange;
    InequalityCertificate range;
    std::optional<InequalityCertificate> gamma;
};

namespace detail {

inline void require_rk(const Matrix& a, const Matrix& b, int k, const ToleranceConfig& tol, const char* who)
{
    require_same_shape(a, b, who);
    if (!rk_membership(a, k, tol) || !rk_membership(b, k, tol))
        throw PreconditionError(std::string(who) + ": operands are not in R_k");
}

} // namespace detail

inline Lemma38Certificates lemma38_certificates(const Matrix& a, const Matrix& b, int k, const ToleranceConfig& tol)
{
    detail::require_rk(a, b, k, tol, "lemma38_certificates");
    const OperatorAnalysis aa = analyze(a, tol);
    const OperatorAnalysis ab = analyze(b, tol);
    const double dist = op_norm(a - b);
    const std::string dig = digest({&a, &b});
    Lemma38Certificates out{
        make_certificate(op_norm(aa.p_corange - ab.p_corange), k * dist, tol, dig),
        make_certificate(op_norm(aa.p_range - ab.p_range), k * dist, tol, dig),
        std::nullopt,
    };
    if (dist < 1.0 / k - tol.eq_tol && std::isfinite(aa.gamma) && std::isfinite(ab.gamma))
        out.gamma = make_certificate(std::abs(aa.gamma - ab.gamma), dist, tol, dig);
    return out;
}

/// ||A - B|| <= d_X(A, B) <= sqrt(1 + k^2) ||A - B|| on R_k.
struct Cor39Certificates {
    InequalityCertificate lower;
    InequalityCertificate upper;
};

inline Cor39Certificates cor39_certificate(const Matrix& a, const Matrix& b, int k, MetricKind kind, const ToleranceConfig& tol)
{
    detail::require_rk(a, b, k, tol, "cor39_certificate");
    const double dist = op_norm(a - b);
    const double d = metric_dx(a, b, kind, tol);
    const std::string dig = digest({&a, &b});
    return {
        make_certificate(dist, d, tol, dig),
        make_certificate(d, std::sqrt(1.0 + double(k) * k) * dist, tol, dig),
    };
}

/// ||A^+ - B^+|| <= 3 k^2 ||A - B|| on R_k.
inline InequalityCertificate lemma310_certificate(const Matrix& a, const Matrix& b, int k, const ToleranceConfig& tol)
{
    detail::require_rk(a, b, k, tol, "lemma310_certificate");
    return make_certificate(op_norm(pinv(a, tol) - pinv(b, tol)), 3.0 * k * k * op_norm(a - b), tol, digest({&a, &b}));
}

/// Rank-one perturbation A + (1/n) v u^* with unit u ∈ N(A), v ∈ N(A^*).
/// Adds the singular value 1/n, so gamma collapses to at most 1/n.
inline Matrix thm36_gadget(const Matrix& a, int n, const Vector& u, const Vector& v)
{
    if (n < 1)
        throw PreconditionError("thm36_gadget: n must be a positive integer");
    if (u.size() != a.cols() || v.size() != a.rows())
        throw DimensionMismatch("thm36_gadget: u must live in the domain and v in the codomain");
    return a + (1.0 / n) * v * u.adjoint();
}

/// Same gadget with u, v the leading basis vectors of N(A) and N(A^*).
/// Throws PreconditionError when A is injective or surjective.
inline Matrix thm36_gadget(const Matrix& a, int n, const ToleranceConfig& tol)
{
    const SvdFactorization f = svd(a);
    const Index r = numerical_rank(f, tol);
    if (r == a.cols() || r == a.rows())
        throw PreconditionError("thm36_gadget: A is injective or surjective");
    return thm36_gadget(a, n, f.v.col(r), f.u.col(r));
}

/// Partial-isometry flip W = V_B (I - 2 x0 x0^*), B~ = |B^*| W.
struct FlipResult {
    Matrix w;
    Matrix b_tilde;
    Matrix v_b;
    double isometry_gap = 0.0; // ||V_B - W||, equal to 2
    double operator_gap = 0.0; // ||B - B~||, equal to 2 ||B P||
    double bp_norm = 0.0;      // ||B P||
    double bx0_norm = 0.0;     // ||B x0||
};

inline FlipResult thm312_flip(const Matrix& b, const Vector& x0, const ToleranceConfig& tol)
{
    if (x0.size() != b.cols())
        throw DimensionMismatch("thm312_flip: x0 must live in the domain of B");
    const double eps = std::max(tol.eq_tol, 1e-12);
    if (std::abs(x0.norm() - 1.0) > eps)
        throw PreconditionError("thm312_flip: x0 must be a unit vector");
    const SvdFactorization f = svd(b);
    const Subspace null = nullspace_basis(f, tol);
    if (!null.is_zero() && (null.projector() * x0).norm() > eps)
        throw PreconditionError("thm312_flip: x0 is not orthogonal to N(B)");

    const PolarParts polar = polar_decompose(f, tol);
    const Matrix p = x0 * x0.adjoint();
    FlipResult out;
    out.v_b = polar.v;
    out.w = polar.v * (identity(b.cols()) - 2.0 * p);
    out.b_tilde = polar.abs_a_star * out.w;
    out.isometry_gap = op_norm(out.v_b - out.w);
    out.operator_gap = op_norm(b - out.b_tilde);
    out.bp_norm = op_norm(b * p);
    out.bx0_norm = (b * x0).norm();
    return out;
}

} // namespace crgeom
