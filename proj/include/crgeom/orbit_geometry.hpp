#pragma once

// The two-sided action A -> G A H^{-1}, its orbits, intertwiners between
// orbit members, and the projector maps phi and Pi_A with their local sections.

#include <random>
#include <string>
#include <utility>

#include "crgeom/metrics_perturbation.hpp"

namespace crgeom {

namespace detail {

inline void require_invertible(const Matrix& g, const ToleranceConfig& tol, const char* who)
{
    if (g.rows() != g.cols())
        throw DimensionMismatch(std::string(who) + ": group element must be square");
    if (!(smallest_singular_value(g) > tol.eq_tol))
        throw PreconditionError(std::string(who) + ": group element is singular");
}

inline Matrix inverse(const Matrix& g) { return g.fullPivLu().inverse(); }

} // namespace detail

/// L((G, H), A) = G A H^{-1}.
inline Matrix apply_action(const Matrix& g, const Matrix& h, const Matrix& a, const ToleranceConfig& tol)
{
    if (g.rows() != a.rows() || h.rows() != a.cols())
        throw DimensionMismatch("apply_action: G must act on the codomain and H on the domain");
    detail::require_invertible(g, tol, "apply_action");
    detail::require_invertible(h, tol, "apply_action");
    return g * a * detail::inverse(h);
}

inline OrbitSignature signature(const Matrix& a, const ToleranceConfig& tol)
{
    return signature_from_rank(a.rows(), a.cols(), numerical_rank(a, tol));
}

inline Index sf_index(const Matrix& a, const ToleranceConfig& tol) { return signature(a, tol).index(); }

inline bool same_orbit(const Matrix& a, const Matrix& b, const ToleranceConfig& tol)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("same_orbit: operands must have the same shape");
    return signature(a, tol) == signature(b, tol);
}

/// Invertible pair (G, H) with G A H^{-1} = B.
struct Intertwiner {
    Matrix g;
    Matrix h;
    double residual = 0.0;
};

/// Builds G = W P_{R(A)} + V'(I - P_{R(A)}) and H = U P_{R(A*)} + U'(I - P_{R(A*)})
/// from basis-matching unitaries between the singular bases of A and B.
inline Intertwiner build_intertwiner(const Matrix& a, const Matrix& b, const ToleranceConfig& tol)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("build_intertwiner: operands must have the same shape");
    const SvdFactorization fa = svd(a);
    const SvdFactorization fb = svd(b);
    const Index r = numerical_rank(fa, tol);
    if (r != numerical_rank(fb, tol))
        throw PreconditionError("build_intertwiner: A and B lie in different orbits");
    const Index m = a.rows();
    const Index n = a.cols();

    // U: N(A)^⊥ -> N(B)^⊥ and U': N(A) -> N(B)
    const Matrix u_co = fb.v.leftCols(r) * fa.v.leftCols(r).adjoint();
    const Matrix u_null = fb.v.rightCols(n - r) * fa.v.rightCols(n - r).adjoint();
    // V': R(A)^⊥ -> R(B)^⊥
    const Matrix v_def = fb.u.rightCols(m - r) * fa.u.rightCols(m - r).adjoint();

    const Matrix a_pinv = pinv(fa, tol);
    const Matrix p_range = fa.u.leftCols(r) * fa.u.leftCols(r).adjoint();
    const Matrix p_corange = fa.v.leftCols(r) * fa.v.leftCols(r).adjoint();
    const Matrix w = b * u_co * a_pinv;

    Intertwiner out;
    out.g = w * p_range + v_def * (identity(m) - p_range);
    out.h = u_co * p_corange + u_null * (identity(n) - p_corange);
    out.residual = op_norm(out.g * a * detail::inverse(out.h) - b);
    return out;
}

/// phi(B) = (B B^+, B^+ B) = (P_{R(B)}, P_{R(B*)}).
struct ProjectorPair {
    Matrix p;
    Matrix q;
};

inline ProjectorPair phi(const Matrix& b, const ToleranceConfig& tol)
{
    const OperatorAnalysis x = analyze(b, tol);
    return {x.p_range, x.p_corange};
}

/// Three equivalent descriptions of "B lies in the orbit of A".
struct OrbitCriteria {
    bool same_signature = false;      // B ∈ O_A
    bool projectors_congruent = false; // P_{R(B)}, P_{R(B*)} unitarily equivalent to those of A
    bool isometries_congruent = false; // V_B ∈ UO_{V_A}
    bool agree() const { return same_signature == projectors_congruent && projectors_congruent == isometries_congruent; }
};

inline OrbitCriteria prop53_verdicts(const Matrix& a, const Matrix& b, const ToleranceConfig& tol)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("prop53_verdicts: operands must have the same shape");
    const OperatorAnalysis xa = analyze(a, tol);
    const OperatorAnalysis xb = analyze(b, tol);
    // Orthogonal projections of one space are unitarily equivalent iff their ranks agree.
    auto proj_rank = [&](const Matrix& p) { return numerical_rank(p, tol); };
    OrbitCriteria c;
    c.same_signature = xa.signature == xb.signature;
    c.projectors_congruent = proj_rank(xa.p_range) == proj_rank(xb.p_range)
        && proj_rank(xa.p_corange) == proj_rank(xb.p_corange);
    const Matrix va = polar_decompose(xa.factorization, tol).v;
    const Matrix vb = polar_decompose(xb.factorization, tol).v;
    c.isometries_congruent = signature(va, tol) == signature(vb, tol);
    return c;
}

/// G = |A^+| + I - P_{R(A)} maps A onto its polar partial isometry.
struct PolarIntertwiner {
    Matrix g;
    Matrix g_inverse;          // |A*| + I - P_{R(A)}
    double residual = 0.0;     // ||G A - V_A||
    double inverse_residual = 0.0; // ||G G^{-1} - I||
};

inline PolarIntertwiner cor54_construction(const Matrix& a, const ToleranceConfig& tol)
{
    const OperatorAnalysis x = analyze(a, tol);
    const PolarParts polar = polar_decompose(x.factorization, tol);
    const Index m = a.rows();
    // |A^+| = (A^{+*} A^+)^{1/2} = |A*|^+ acts on the codomain of A.
    const Matrix abs_pinv = polar_decompose(x.pinv, tol).abs_a;
    PolarIntertwiner out;
    out.g = abs_pinv + identity(m) - x.p_range;
    out.g_inverse = polar.abs_a_star + identity(m) - x.p_range;
    out.residual = op_norm(out.g * a - polar.v);
    out.inverse_residual = op_norm(out.g * out.g_inverse - identity(m));
    return out;
}

/// Orthogonal projector onto G(S) from the idempotent Q = G P_S G^{-1}:
/// P = Q Q^* (I - (Q - Q^*)^2)^{-1}.
inline Matrix projection_under_g(const Matrix& g, const Subspace& s, const ToleranceConfig& tol)
{
    if (g.rows() != g.cols() || g.cols() != s.ambient_dim())
        throw DimensionMismatch("projection_under_g: G must be square on the ambient space of S");
    detail::require_invertible(g, tol, "projection_under_g");
    const Index n = g.rows();
    const Matrix q = g * s.projector() * detail::inverse(g);
    const Matrix skew = q - q.adjoint();
    const Matrix denom = identity(n) - skew * skew;
    if (!(smallest_singular_value(denom) > tol.eq_tol))
        throw PreconditionError("projection_under_g: I - (Q - Q*)^2 is singular");
    return q * q.adjoint() * detail::inverse(denom);
}

/// Pi_A(G, H) = (P_{G(R(A))}, P_{(H N(A))^⊥}); equals phi(G A H^{-1}).
inline ProjectorPair projector_pair_under_action(const Matrix& g, const Matrix& h, const Matrix& a, const ToleranceConfig& tol)
{
    const SvdFactorization f = svd(a);
    const Subspace range = range_basis(f, tol);
    const Subspace corange = orthogonal_complement(nullspace_basis(f, tol), tol);
    // (H N(A))^⊥ = H^{-*} (N(A)^⊥)
    return {projection_under_g(g, range, tol), projection_under_g(Matrix(detail::inverse(h).adjoint()), corange, tol)};
}

/// Local cross section of pi_A(G, H) = G A H^{-1} around A:
/// G = B A^+ + (I - P_{R(B)})(I - P_{R(A)}), H = P_{R(B^+)} P_{R(A^+)} + (I - P_{R(B*)})(I - P_{R(A*)}).
/// Throws OutsideNeighborhood when either factor is singular.
inline Intertwiner local_section_sigma(const Matrix& a, const Matrix& b, const ToleranceConfig& tol)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("local_section_sigma: operands must have the same shape");
    const OperatorAnalysis xa = analyze(a, tol);
    const OperatorAnalysis xb = analyze(b, tol);
    const Index m = a.rows();
    const Index n = a.cols();
    Intertwiner out;
    out.g = b * xa.pinv + (identity(m) - xb.p_range) * (identity(m) - xa.p_range);
    // R(X^+) = R(X*)
    out.h = xb.p_corange * xa.p_corange + (identity(n) - xb.p_corange) * (identity(n) - xa.p_corange);
    if (!(smallest_singular_value(out.g) > tol.eq_tol) || !(smallest_singular_value(out.h) > tol.eq_tol))
        throw OutsideNeighborhood("local_section_sigma: B is outside the section neighbourhood of A");
    out.residual = op_norm(out.g * a * detail::inverse(out.h) - b);
    return out;
}

/// Evidence for the distance-1 branch between orbits of different rank.
struct OrbitDistanceWitness {
    bool lower_bound_is_one = false;
    double witness_dx = 0.0;
    double min_gap = 0.0; // over sampled representatives, of the kind's projector gap
    double max_gap = 0.0;
    int samples = 0;
};

/// Samples orbit representatives A' = G A H^{-1}, B' = G' B H'^{-1} and checks that
/// their projector gap is 1, then scales one pair by eps / (2(||A'|| + ||B'||)) to
/// exhibit d_X(A'', B'') within eps of 1. The nullspace kind runs on A*, B*.
template <class Rng>
OrbitDistanceWitness orbit_distance_witness(const Matrix& a, const Matrix& b, MetricKind kind, double epsilon,
                                            Rng& rng, int samples, const ToleranceConfig& tol)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("orbit_distance_witness: operands must have the same shape");
    if (same_orbit(a, b, tol))
        throw PreconditionError("orbit_distance_witness: A and B lie in the same orbit");
    if (!(epsilon > 0.0) || samples < 1)
        throw PreconditionError("orbit_distance_witness: epsilon and samples must be positive");

    const Matrix aa = kind == MetricKind::range ? a : Matrix(a.adjoint());
    const Matrix bb = kind == MetricKind::range ? b : Matrix(b.adjoint());
    const Index m = aa.rows();
    const Index n = aa.cols();

    std::normal_distribution<double> normal;
    auto invertible = [&](Index d) {
        // I + E with ||E|| < 1 keeps every sample safely invertible.
        Matrix e(d, d);
        for (Index j = 0; j < d; ++j)
            for (Index i = 0; i < d; ++i)
                e(i, j) = Complex(normal(rng), normal(rng));
        return Matrix(identity(d) + (0.5 / op_norm(e)) * e);
    };

    OrbitDistanceWitness w;
    w.samples = samples;
    w.min_gap = kInfinity;
    Matrix a1, b1;
    for (int s = 0; s < samples; ++s) {
        a1 = apply_action(invertible(m), invertible(n), aa, tol);
        b1 = apply_action(invertible(m), invertible(n), bb, tol);
        const double gap = op_norm(range_projector(a1, tol) - range_projector(b1, tol));
        w.min_gap = std::min(w.min_gap, gap);
        w.max_gap = std::max(w.max_gap, gap);
    }
    w.lower_bound_is_one = std::abs(w.min_gap - 1.0) <= std::max(tol.eq_tol, 1e-12)
        && std::abs(w.max_gap - 1.0) <= std::max(tol.eq_tol, 1e-12);

    const double scale = epsilon / (2.0 * (op_norm(a1) + op_norm(b1)));
    w.witness_dx = metric_dx(Matrix(scale * a1), Matrix(scale * b1), MetricKind::range, tol);
    return w;
}

} // namespace crgeom
