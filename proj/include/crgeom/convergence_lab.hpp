#pragma once

// Perturbation sequences and the battery of equivalent convergence
// conditions evaluated on their tails.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "crgeom/metrics_perturbation.hpp"
#include "crgeom/random.hpp"

namespace crgeom {

enum class SequenceKind { rank_preserving, rank_dropping, isometry_flip, pinv_blowup };

inline const char* to_string(SequenceKind k)
{
    switch (k) {
    case SequenceKind::rank_preserving: return "rank_preserving";
    case SequenceKind::rank_dropping: return "rank_dropping";
    case SequenceKind::isometry_flip: return "isometry_flip";
    case SequenceKind::pinv_blowup: return "pinv_blowup";
    }
    return "?";
}

inline SequenceKind sequence_kind_from_string(const std::string& s)
{
    for (SequenceKind k : {SequenceKind::rank_preserving, SequenceKind::rank_dropping, SequenceKind::isometry_flip,
                           SequenceKind::pinv_blowup})
        if (s == to_string(k))
            return k;
    throw ParseError("unknown sequence kind: " + s);
}

struct SequenceParams {
    int length = 50;
    /// Decay constant of the rank-preserving generator: ||G_n - I||, ||H_n - I|| <= c/n. Must be < 1.
    double c = 0.25;
};

/// B_1 ... B_N converging (or not) to `base`. For isometry_flip, companions[n]
/// is the unflipped operator whose polar isometry sits at distance 2 from that of terms[n].
struct PerturbationSequence {
    SequenceKind kind = SequenceKind::rank_preserving;
    Matrix base;
    std::vector<Matrix> terms;
    std::vector<Matrix> companions;
    SequenceParams params;
    std::uint64_t seed = 0;

    Index length() const { return static_cast<Index>(terms.size()); }
};

inline PerturbationSequence generate_sequence(SequenceKind kind, const Matrix& b, const SequenceParams& params,
                                              std::uint64_t seed, const ToleranceConfig& tol = {})
{
    if (params.length < 1)
        throw PreconditionError("generate_sequence: length must be positive");
    if (!all_finite(b))
        throw PreconditionError("generate_sequence: base has non-finite entries");

    PerturbationSequence seq;
    seq.kind = kind;
    seq.base = b;
    seq.params = params;
    seq.seed = seed;
    Rng rng = trial_rng(seed, to_string(kind), 0);
    const Index m = b.rows();
    const Index n = b.cols();

    if (kind == SequenceKind::rank_preserving) {
        if (!(params.c > 0.0 && params.c < 1.0))
            throw PreconditionError("generate_sequence: rank_preserving needs 0 < c < 1");
        Matrix eg = gaussian_matrix(m, m, rng);
        Matrix eh = gaussian_matrix(n, n, rng);
        eg /= op_norm(eg);
        eh /= op_norm(eh);
        for (int k = 1; k <= params.length; ++k) {
            const double t = params.c / k;
            seq.terms.push_back((identity(m) + t * eg) * b * (identity(n) + t * eh));
        }
        return seq;
    }

    const SvdFactorization f = svd(b);
    const Index r = numerical_rank(f, tol);
    if (r == n || r == m)
        throw PreconditionError(std::string("generate_sequence: ") + to_string(kind)
                                + " needs a base that is neither injective nor surjective");
    Vector u = f.v.col(r);
    Vector v = f.u.col(r);
    if (kind == SequenceKind::rank_dropping) {
        // random unit directions inside N(B) and N(B*)
        u = f.v.rightCols(n - r) * random_unit_vector(n - r, rng);
        v = f.u.rightCols(m - r) * random_unit_vector(m - r, rng);
    }
    for (int k = 1; k <= params.length; ++k) {
        Matrix bk = b + (1.0 / k) * v * u.adjoint();
        if (kind == SequenceKind::isometry_flip) {
            seq.companions.push_back(bk);
            bk = thm312_flip(bk, u, tol).b_tilde;
        }
        seq.terms.push_back(std::move(bk));
    }
    return seq;
}

/// Cutoffs that turn limit statements into tail checks.
struct ConvergenceThresholds {
    /// A quantity "tends to 0" when its maximum over the tail is at most this.
    double vanish = 0.1;
    /// Fraction of the sequence treated as "n large enough".
    double tail_fraction = 0.25;
    /// Boundedness conditions use M = bound_factor * ||B^+||.
    double bound_factor = 2.0;
    /// Lower bound conditions use K = gamma_floor_factor * gamma(B).
    double gamma_floor_factor = 0.5;
    /// Tolerance on the inner-inverse identities of the constructed generalized inverse.
    double inner_inverse_tol = 1e-9;
};

/// Generalized inverse A_n = G1^{-1} B^+ of a perturbation Bn of B, G1 = I + B^+(Bn - B).
struct GeneralizedInverseResult {
    Matrix a_n;
    double inner_residual = 0.0;   // ||Bn A_n Bn - Bn||
    double outer_residual = 0.0;   // ||A_n Bn A_n - A_n||
    double norm = 0.0;             // ||A_n||
    double bound = 0.0;            // 2 ||B^+||
    double commute_residual = 0.0; // ||G1^{-1} B^+ - B^+ G2^{-1}||
};

/// Throws PreconditionError ("construction inapplicable") unless ||Bn - B|| < 1/(2||B^+||)
/// and R(Bn) ∩ N(B^+) = {0}.
inline GeneralizedInverseResult build_generalized_inverse(const Matrix& b, const Matrix& bn, const ToleranceConfig& tol)
{
    if (b.rows() != bn.rows() || b.cols() != bn.cols())
        throw DimensionMismatch("build_generalized_inverse: B and Bn must have the same shape");
    const OperatorAnalysis xb = analyze(b, tol);
    const double bp = xb.pinv_norm();
    const Matrix delta = bn - b;
    if (bp > 0.0 && !(op_norm(delta) < 1.0 / (2.0 * bp) - tol.eq_tol))
        throw PreconditionError("build_generalized_inverse: construction inapplicable (||Bn - B|| too large)");
    const Subspace range_bn = range_basis(bn, tol);
    const Subspace null_bp = orthogonal_complement(range_basis(xb.factorization, tol), tol);
    if (!(cos_c0(range_bn, null_bp, tol) < 1.0 - tol.angle_one_tol))
        throw PreconditionError("build_generalized_inverse: construction inapplicable (R(Bn) meets N(B^+))");

    const Matrix g1 = identity(b.cols()) + xb.pinv * delta;
    const Matrix g2 = identity(b.rows()) + delta * xb.pinv;
    GeneralizedInverseResult out;
    out.a_n = g1.fullPivLu().solve(xb.pinv);
    const Matrix alt = g2.adjoint().fullPivLu().solve(Matrix(xb.pinv.adjoint())).adjoint(); // B^+ G2^{-1}
    out.inner_residual = op_norm(bn * out.a_n * bn - bn);
    out.outer_residual = op_norm(out.a_n * bn * out.a_n - out.a_n);
    out.norm = op_norm(out.a_n);
    out.bound = 2.0 * bp;
    out.commute_residual = op_norm(out.a_n - alt);
    return out;
}

/// Per-condition verdicts with the measured quantity behind each.
struct ConvergenceReport {
    std::map<std::string, bool> verdicts;
    std::map<std::string, double> evidence;
    Index tail_index = 0;
    ConvergenceThresholds thresholds;
    bool consistent = false;
};

inline const std::vector<std::string>& thm48_condition_ids()
{
    static const std::vector<std::string> ids{"i", "ii", "iii", "iv", "v", "vi", "vii",
                                              "viii", "ix", "x", "xi", "xii", "xiii"};
    return ids;
}

inline const std::vector<std::string>& izumino_condition_ids()
{
    static const std::vector<std::string> ids{"iz1", "iz2", "iz3", "iz4", "iz5", "iz6"};
    return ids;
}

namespace detail {

// Tail maxima (or minima) of every quantity the conditions refer to.
struct TailMeasurements {
    Index tail_index = 0;
    double dist = 0.0;
    double d_n = 0.0;
    double d_r = 0.0;
    double d_n_pinv = 0.0;
    double d_r_pinv = 0.0;
    double pinv_dist = 0.0;
    double range_gap = 0.0;   // ||B_n B_n^+ - B B^+||
    double corange_gap = 0.0; // ||B_n^+ B_n - B^+ B||
    double pinv_norm = 0.0;
    double gamma_min = kInfinity;
    double gamma_dev = 0.0;
    double inner_inverse_norm = 0.0;
    double inner_inverse_residual = 0.0;
    bool inner_inverse_applicable = true;
    bool sum_is_domain = true;     // dim(N(B_n) + R(B^+)) = dim H
    double c0_pinv_null = 0.0;     // c0(R(B_n^+), N(B))
    bool nullspace_covered = true; // N(B) = (I - B^+B) N(B_n)
    double c0_range_null = 0.0;    // c0(R(B_n), N(B^+))
    double polar_gap = 0.0;        // ||V_{B_n} - V_B||
    double b_pinv_norm = 0.0;
    double b_gamma = kInfinity;
};

inline double gamma_gap(double a, double b)
{
    if (std::isinf(a) && std::isinf(b))
        return 0.0;
    if (std::isinf(a) || std::isinf(b))
        return kInfinity;
    return std::abs(a - b);
}

inline TailMeasurements measure_tail(const PerturbationSequence& seq, const ConvergenceThresholds& th,
                                     const ToleranceConfig& tol)
{
    if (seq.terms.empty())
        throw PreconditionError("convergence report: empty sequence");
    TailMeasurements t;
    const Index len = seq.length();
    t.tail_index = std::min<Index>(len - 1, static_cast<Index>(std::floor(len * (1.0 - th.tail_fraction))));

    const OperatorAnalysis xb = analyze(seq.base, tol);
    const OperatorAnalysis xb_pinv = analyze(xb.pinv, tol);
    const Matrix vb = polar_decompose(xb.factorization, tol).v;
    const Subspace null_b = nullspace_basis(xb.factorization, tol);
    const Subspace range_b_pinv = orthogonal_complement(null_b, tol);
    const Subspace null_b_pinv = orthogonal_complement(range_basis(xb.factorization, tol), tol);
    const Index h_dim = seq.base.cols();
    t.b_pinv_norm = xb.pinv_norm();
    t.b_gamma = xb.gamma;

    for (Index k = t.tail_index; k < len; ++k) {
        const Matrix& bn = seq.terms[static_cast<std::size_t>(k)];
        const OperatorAnalysis xn = analyze(bn, tol);
        const OperatorAnalysis xn_pinv = analyze(xn.pinv, tol);
        t.dist = std::max(t.dist, op_norm(bn - seq.base));
        t.d_n = std::max(t.d_n, metric_dx(xn, xb, MetricKind::nullspace));
        t.d_r = std::max(t.d_r, metric_dx(xn, xb, MetricKind::range));
        t.d_n_pinv = std::max(t.d_n_pinv, metric_dx(xn_pinv, xb_pinv, MetricKind::nullspace));
        t.d_r_pinv = std::max(t.d_r_pinv, metric_dx(xn_pinv, xb_pinv, MetricKind::range));
        t.pinv_dist = std::max(t.pinv_dist, op_norm(xn.pinv - xb.pinv));
        t.range_gap = std::max(t.range_gap, op_norm(xn.p_range - xb.p_range));
        t.corange_gap = std::max(t.corange_gap, op_norm(xn.p_corange - xb.p_corange));
        t.pinv_norm = std::max(t.pinv_norm, xn.pinv_norm());
        t.gamma_min = std::min(t.gamma_min, xn.gamma);
        t.gamma_dev = std::max(t.gamma_dev, gamma_gap(xn.gamma, xb.gamma));

        try {
            const GeneralizedInverseResult g = build_generalized_inverse(seq.base, bn, tol);
            t.inner_inverse_norm = std::max(t.inner_inverse_norm, g.norm);
            t.inner_inverse_residual = std::max({t.inner_inverse_residual, g.inner_residual, g.outer_residual});
        } catch (const PreconditionError&) {
            t.inner_inverse_applicable = false;
        }

        const Subspace null_n = nullspace_basis(xn.factorization, tol);
        t.sum_is_domain = t.sum_is_domain && sum_dimension(null_n, range_b_pinv, tol) == h_dim;
        t.c0_pinv_null = std::max(t.c0_pinv_null, cos_c0(orthogonal_complement(null_n, tol), null_b, tol));
        t.nullspace_covered = t.nullspace_covered && projection_covers(null_b, null_n, tol);
        t.c0_range_null = std::max(t.c0_range_null, cos_c0(range_basis(xn.factorization, tol), null_b_pinv, tol));
        t.polar_gap = std::max(t.polar_gap, op_norm(polar_decompose(xn.factorization, tol).v - vb));
    }
    return t;
}

} // namespace detail

/// Evaluates the thirteen equivalent conditions for B_n -> B on the tail of the sequence.
inline ConvergenceReport thm48_report(const PerturbationSequence& seq, const ToleranceConfig& tol,
                                      const ConvergenceThresholds& th = {})
{
    const detail::TailMeasurements t = detail::measure_tail(seq, th, tol);
    const double vanish = th.vanish;
    const double bound = th.bound_factor * t.b_pinv_norm;
    const double floor = th.gamma_floor_factor * t.b_gamma;
    const bool norm_conv = t.dist <= vanish;
    const double c_max = 1.0 - tol.angle_one_tol;

    ConvergenceReport r;
    r.tail_index = t.tail_index;
    r.thresholds = th;
    auto put = [&](const std::string& id, bool verdict, double evidence) {
        r.verdicts[id] = verdict;
        r.evidence[id] = evidence;
    };
    put("i", t.d_n <= vanish, t.d_n);
    put("ii", t.d_r <= vanish, t.d_r);
    put("iii", t.d_n_pinv <= vanish, t.d_n_pinv);
    put("iv", t.d_r_pinv <= vanish, t.d_r_pinv);
    put("v", norm_conv && t.pinv_dist <= vanish, t.pinv_dist);
    put("vi", norm_conv && t.pinv_norm <= bound + tol.eq_tol, t.pinv_norm);
    put("vii", norm_conv && t.inner_inverse_applicable && t.inner_inverse_residual <= th.inner_inverse_tol
                   && t.inner_inverse_norm <= bound + th.inner_inverse_tol,
        t.inner_inverse_applicable ? t.inner_inverse_norm : kInfinity);
    put("viii", norm_conv && t.gamma_min >= floor - tol.eq_tol, t.gamma_min);
    put("ix", norm_conv && t.gamma_dev <= vanish, t.gamma_dev);
    put("x", norm_conv && t.sum_is_domain, t.sum_is_domain ? 1.0 : 0.0);
    put("xi", norm_conv && t.c0_pinv_null < c_max, t.c0_pinv_null);
    put("xii", norm_conv && t.nullspace_covered, t.nullspace_covered ? 1.0 : 0.0);
    put("xiii", norm_conv && t.c0_range_null < c_max, t.c0_range_null);
    r.evidence["norm_distance"] = t.dist;
    r.evidence["polar_gap"] = t.polar_gap;
    r.evidence["inner_inverse_residual"] = t.inner_inverse_residual;

    r.consistent = true;
    for (const auto& id : thm48_condition_ids())
        r.consistent = r.consistent && r.verdicts.at(id) == r.verdicts.at("i");
    return r;
}

/// The six classical conditions, each conjoined with norm convergence (their standing hypothesis).
inline ConvergenceReport izumino_report(const PerturbationSequence& seq, const ToleranceConfig& tol,
                                        const ConvergenceThresholds& th = {})
{
    const detail::TailMeasurements t = detail::measure_tail(seq, th, tol);
    const bool norm_conv = t.dist <= th.vanish;
    const double bound = th.bound_factor * t.b_pinv_norm;

    ConvergenceReport r;
    r.tail_index = t.tail_index;
    r.thresholds = th;
    auto put = [&](const std::string& id, bool verdict, double evidence) {
        r.verdicts[id] = norm_conv && verdict;
        r.evidence[id] = evidence;
    };
    put("iz1", t.pinv_dist <= th.vanish, t.pinv_dist);
    put("iz2", t.range_gap <= th.vanish, t.range_gap);
    put("iz3", t.corange_gap <= th.vanish, t.corange_gap);
    put("iz4", t.pinv_norm <= bound + tol.eq_tol, t.pinv_norm);
    put("iz5", t.gamma_dev <= th.vanish, t.gamma_dev);
    put("iz6", t.c0_range_null < 1.0 - tol.angle_one_tol, t.c0_range_null);
    r.evidence["norm_distance"] = t.dist;

    r.consistent = true;
    for (const auto& id : izumino_condition_ids())
        r.consistent = r.consistent && r.verdicts.at(id) == r.verdicts.at("iz1");
    return r;
}

/// True iff both reports are internally unanimous and agree with each other.
inline bool reports_agree(const ConvergenceReport& thm48, const ConvergenceReport& izumino)
{
    return thm48.consistent && izumino.consistent && thm48.verdicts.at("i") == izumino.verdicts.at("iz1");
}

/// One row of the pseudoinverse blow-up along B_n = B + (1/n) v u^*.
struct DiscontinuityRow {
    int n = 0;
    double norm_gap = 0.0;      // ||B_n - B|| = 1/n
    double pinv_norm = 0.0;     // ||B_n^+|| = n
    double pinv_gap = 0.0;      // ||B_n^+ - B^+||
    double lower_bound = 0.0;   // n - ||B^+||
    double projector_gap = 0.0; // ||P_{R(B_n)} - P_{R(B)}|| = 1
    double d_r = 0.0;
};

struct DiscontinuityReport {
    std::vector<DiscontinuityRow> rows;
    bool certified = false;
};

/// Throws PreconditionError when B is injective or surjective (the pseudoinverse is continuous there).
inline DiscontinuityReport discontinuity_demo(const Matrix& b, int n_max, const ToleranceConfig& tol)
{
    if (n_max < 1)
        throw PreconditionError("discontinuity_demo: n_max must be positive");
    if (m_membership(b, tol))
        throw PreconditionError("discontinuity_demo: B is injective or surjective, so the pseudoinverse is continuous at B");
    const PerturbationSequence seq = generate_sequence(SequenceKind::pinv_blowup, b, {n_max, 0.25}, 0, tol);
    const OperatorAnalysis xb = analyze(b, tol);
    const double eps = std::max(tol.eq_tol, 1e-12);

    DiscontinuityReport rep;
    rep.certified = true;
    for (int k = 1; k <= n_max; ++k) {
        const OperatorAnalysis xn = analyze(seq.terms[static_cast<std::size_t>(k - 1)], tol);
        DiscontinuityRow row;
        row.n = k;
        row.norm_gap = op_norm(xn.a - b);
        row.pinv_norm = xn.pinv_norm();
        row.pinv_gap = op_norm(xn.pinv - xb.pinv);
        row.lower_bound = k - xb.pinv_norm();
        row.projector_gap = op_norm(xn.p_range - xb.p_range);
        row.d_r = metric_dx(xn, xb, MetricKind::range);
        rep.certified = rep.certified && std::abs(row.norm_gap - 1.0 / k) <= eps * k
            && row.pinv_gap >= row.lower_bound - eps * k && std::abs(row.projector_gap - 1.0) <= eps
            && row.d_r >= 1.0 - eps;
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace crgeom
