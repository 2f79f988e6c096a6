#pragma once

// Property suites over seeded random ensembles. Every check becomes a
// CaseRecord (lhs <= rhs up to an allowance); a run passes when no record fails.

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "crgeom/io.hpp"

namespace crgeom {

struct SuiteConfig {
    std::uint64_t seed = 1;
    /// Trials per suite; each suite's own default when empty.
    std::optional<int> trials;
    int max_dim = 8;
    ToleranceConfig tolerances;
    /// Suite ids to run; all suites when empty.
    std::vector<std::string> suites;
    std::string output_path;
    std::string format = "json";

    void validate() const
    {
        if (max_dim < 2)
            throw PreconditionError("max_dim must be at least 2");
        if (trials && *trials < 1)
            throw PreconditionError("trials must be at least 1");
        if (format != "json" && format != "csv")
            throw PreconditionError("format must be json or csv");
        tolerances.validate();
    }
};

struct CaseRecord {
    std::string suite;
    std::string case_id;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool verdict = false;
};

struct SuiteResult {
    std::string suite;
    int trials = 0;
    std::vector<CaseRecord> cases;

    std::size_t violations() const
    {
        std::size_t v = 0;
        for (const auto& c : cases)
            v += c.verdict ? 0 : 1;
        return v;
    }
    /// Most negative slack over all records.
    double worst_slack() const
    {
        double w = kInfinity;
        for (const auto& c : cases)
            w = std::min(w, c.slack);
        return w;
    }
};

struct VerifyReport {
    SuiteConfig config;
    std::vector<SuiteResult> suites;

    std::size_t violations() const
    {
        std::size_t v = 0;
        for (const auto& s : suites)
            v += s.violations();
        return v;
    }
};

namespace detail {

constexpr double kReferenceEqTol = 1e-9;

// Collects the records of one suite.
class Recorder {
public:
    Recorder(std::string suite, const ToleranceConfig& tol) : tol_(tol) { result_.suite = std::move(suite); }

    /// Fixed acceptance bound, tightened (never loosened) when eq_tol is set below its default.
    double bound(double fixed) const { return fixed * std::min(1.0, tol_.eq_tol / kReferenceEqTol); }

    /// lhs <= rhs + allowance.
    void le(const std::string& id, double lhs, double rhs, double allowance = 0.0)
    {
        const double slack = rhs - lhs;
        const bool ok = !std::isnan(lhs) && !std::isnan(rhs) && slack >= -allowance;
        result_.cases.push_back({result_.suite, prefix_ + id, lhs, rhs, slack, ok});
    }
    /// |value - target| <= fixed acceptance bound.
    void near(const std::string& id, double value, double target, double fixed)
    {
        le(id, std::abs(value - target), bound(fixed));
    }
    void flag(const std::string& id, bool ok) { le(id, ok ? 0.0 : 1.0, 0.0); }

    void trial(int t) { prefix_ = std::to_string(t) + "/"; }
    void count_trial() { ++result_.trials; }
    SuiteResult take() { return std::move(result_); }

private:
    const ToleranceConfig& tol_;
    SuiteResult result_;
    std::string prefix_;
};

// Runs one trial body; an unexpected library error becomes a failed record.
template <class F>
void guarded(Recorder& rec, int t, F&& body)
{
    rec.trial(t);
    rec.count_trial();
    try {
        body();
    } catch (const std::exception& e) {
        rec.flag(std::string("error: ") + e.what(), false);
    }
}

struct Shape {
    Index m;
    Index n;
};

inline Shape random_shape(Rng& rng, int max_dim)
{
    return {uniform_index(rng, 2, max_dim), uniform_index(rng, 2, max_dim)};
}

// Operator with prescribed rank and spectrum plus its exact singular bases.
struct Planted {
    Matrix a;
    Matrix u;
    Matrix v;
    RealVector sigma;
    Index rank() const { return sigma.size(); }
};

inline Planted plant(Index m, Index n, const RealVector& sigma, Rng& rng)
{
    Planted p{Matrix(), haar_unitary(m, rng), haar_unitary(n, rng), sigma};
    Matrix d = Matrix::Zero(m, n);
    for (Index i = 0; i < sigma.size(); ++i)
        d(i, i) = sigma(i);
    p.a = p.u * d * p.v.adjoint();
    return p;
}

inline Matrix unit_norm(Matrix e)
{
    const double s = op_norm(e);
    return s > 0.0 ? Matrix(e / s) : e;
}

// Unitary at distance about eps from the identity.
inline Matrix near_identity_unitary(Index n, double eps, Rng& rng)
{
    const SvdFactorization f = svd(Matrix(identity(n) + eps * unit_norm(gaussian_matrix(n, n, rng))));
    return f.u * f.v.adjoint();
}

inline double cond(const Matrix& g)
{
    const SvdFactorization f = svd(g);
    const double lo = f.singular_values(f.singular_values.size() - 1);
    return lo > 0.0 ? f.largest() / lo : kInfinity;
}

} // namespace detail

// ---------------------------------------------------------------- suites

/// Penrose equations and the projector identities on planted operators.
inline SuiteResult suite_penrose(const SuiteConfig& cfg, int trials)
{
    const ToleranceConfig& tol = cfg.tolerances;
    detail::Recorder rec("penrose", tol);
    for (int t = 0; t < trials; ++t) {
        detail::guarded(rec, t, [&] {
            Rng rng = trial_rng(cfg.seed, "penrose", t);
            const auto [m, n] = detail::random_shape(rng, cfg.max_dim);
            const Index full = std::min(m, n);
            const Index r = uniform_index(rng, 0, t % 2 ? full - 1 : full);
            const detail::Planted p = detail::plant(m, n, random_spectrum(r, 1e-2, 10.0, rng), rng);
            const OperatorAnalysis x = analyze(p.a, tol);
            const Matrix& a = p.a;
            const Matrix& ap = x.pinv;
            const double b = rec.bound(1e-10) * (1.0 + op_norm(a));
            rec.flag("rank", x.rank == r);
            rec.le("AXA=A", op_norm(a * ap * a - a), b);
            rec.le("XAX=X", op_norm(ap * a * ap - ap), b);
            rec.le("(AX)*=AX", op_norm(Matrix((a * ap).adjoint()) - a * ap), b);
            rec.le("(XA)*=XA", op_norm(Matrix((ap * a).adjoint()) - ap * a), b);
            const Matrix pr = p.u.leftCols(r) * p.u.leftCols(r).adjoint();
            const Matrix pc = p.v.leftCols(r) * p.v.leftCols(r).adjoint();
            rec.le("AA+=P_R(A)", op_norm(a * ap - pr), b);
            rec.le("A+A=P_R(A*)", op_norm(ap * a - pc), b);
            rec.le("(A+)+=A", op_norm(pinv(ap, tol) - a), b);
        });
    }
    return rec.take();
}

/// Reduced minimum modulus against the planted smallest singular value and its identities.
inline SuiteResult suite_gamma(const SuiteConfig& cfg, int trials)
{
    const ToleranceConfig& tol = cfg.tolerances;
    detail::Recorder rec("gamma", tol);
    for (int t = 0; t < trials; ++t) {
        detail::guarded(rec, t, [&] {
            Rng rng = trial_rng(cfg.seed, "gamma", t);
            const auto [m, n] = detail::random_shape(rng, cfg.max_dim);
            const Index r = t % 50 == 49 ? 0 : uniform_index(rng, 1, std::min(m, n));
            const detail::Planted p = detail::plant(m, n, random_spectrum(r, 1e-4, 1.0, rng), rng);
            const Matrix& a = p.a;
            const double g = reduced_min_modulus(a, tol);
            const double g_adj = reduced_min_modulus(Matrix(a.adjoint()), tol);
            const double g_abs = reduced_min_modulus(polar_decompose(a, tol).abs_a, tol);
            const double g_gram = reduced_min_modulus(Matrix(a.adjoint() * a), tol);
            if (r == 0) {
                rec.flag("zero: gamma=+inf", std::isinf(g) && std::isinf(g_adj) && std::isinf(g_abs) && std::isinf(g_gram));
                return;
            }
            rec.near("gamma=1/|A+|", g, 1.0 / op_norm(pinv(a, tol)), 1e-10);
            rec.near("gamma=sigma_min", g, p.sigma(r - 1), 1e-10);
            rec.near("gamma(A*)", g_adj, g, 1e-8);
            rec.near("gamma(|A|)", g_abs, g, 1e-8);
            rec.near("gamma^2=gamma(A*A)", g * g, g_gram, 1e-8);
        });
    }
    return rec.take();
}

namespace detail {

// A(t) = (I + t E1) B (I + t E2) with d_X(A(t), B) placed in [0.9, 0.99] of the certificate radius 1/(2 sqrt2 ||B^+||).
inline std::optional<Matrix> boundary_partner(const Matrix& b, MetricKind kind, Rng& rng, const ToleranceConfig& tol)
{
    const Index m = b.rows();
    const Index n = b.cols();
    const Matrix e1 = unit_norm(gaussian_matrix(m, m, rng));
    const Matrix e2 = unit_norm(gaussian_matrix(n, n, rng));
    const OperatorAnalysis xb = analyze(b, tol);
    const double radius = cor33_radius(xb.pinv_norm());
    auto at = [&](double t) { return Matrix((identity(m) + t * e1) * b * (identity(n) + t * e2)); };
    auto dist = [&](double t) { return metric_dx(analyze(at(t), tol), xb, kind); };

    double lo = 0.0;
    double hi = 1e-4;
    while (dist(hi) < 0.99 * radius && hi < 0.5)
        hi *= 2.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double d = dist(mid);
        if (d >= 0.9 * radius && d <= 0.99 * radius)
            return at(mid);
        (d < 0.9 * radius ? lo : hi) = mid;
    }
    return std::nullopt;
}

} // namespace detail

/// gamma and pseudoinverse-norm certificates for both metric kinds.
inline SuiteResult suite_certificates(const SuiteConfig& cfg, int trials)
{
    const ToleranceConfig& tol = cfg.tolerances;
    detail::Recorder rec("certificates", tol);
    const double allow = rec.bound(1e-10);
    for (int t = 0; t < trials; ++t) {
        detail::guarded(rec, t, [&] {
            Rng rng = trial_rng(cfg.seed, "certificates", t);
            const auto [m, n] = detail::random_shape(rng, cfg.max_dim);
            const Index full = std::min(m, n);
            const int type = t % 4;
            const Index r = uniform_index(rng, type == 0 ? 0 : 1, full);
            RealVector sigma = random_spectrum(r, 1e-2, 10.0, rng);
            if (type == 3) // near rank-deficient: gamma down to 1e-6
                sigma(r - 1) = log_uniform(rng, 1e-6, 1e-4);
            const Matrix b = detail::plant(m, n, sigma, rng).a;

            for (MetricKind kind : {MetricKind::range, MetricKind::nullspace}) {
                const std::string k = to_string(kind);
                Matrix a;
                if (type == 0) {
                    const Index ra = uniform_index(rng, 0, full);
                    a = detail::plant(m, n, random_spectrum(ra, 1e-2, 10.0, rng), rng).a;
                } else if (type == 2) {
                    const auto partner = detail::boundary_partner(b, kind, rng, tol);
                    rec.flag(k + ":boundary pair found", partner.has_value());
                    if (!partner)
                        continue;
                    a = *partner;
                } else {
                    const double delta = log_uniform(rng, 1e-8, 1e-1) * (type == 3 ? sigma(r - 1) : 1.0);
                    a = b + delta * detail::unit_norm(gaussian_matrix(m, n, rng));
                }

                if (const auto c = lemma32_certificate(a, b, kind, tol))
                    rec.le(k + ":lemma32", c->lhs, c->rhs, allow);
                if (const auto c = cor34_certificate(a, b, kind, tol))
                    rec.le(k + ":cor34", c->lhs, c->rhs, allow);
                const double d = metric_dx(a, b, kind, tol);
                const double radius = cor33_radius(analyze(b, tol).pinv_norm());
                if (type == 2)
                    rec.le(k + ":cor33 inside radius", d, radius - tol.eq_tol);
                if (d < radius - tol.eq_tol) {
                    const InequalityCertificate c = cor33_certificate(a, b, kind, tol);
                    rec.le(k + ":cor33", c.lhs, c.rhs, allow);
                }
            }
        });
    }
    return rec.take();
}

/// R_k gamma, distance and Lipschitz certificates for k in {1, 2, 5}; `trials` pairs per k.
inline SuiteResult suite_rk(const SuiteConfig& cfg, int trials)
{
    const ToleranceConfig& tol = cfg.tolerances;
    detail::Recorder rec("rk", tol);
    const double allow = rec.bound(1e-10);
    int id = 0;
    for (int k : {1, 2, 5}) {
        for (int t = 0; t < trials; ++t, ++id) {
            detail::guarded(rec, id, [&] {
                Rng rng = trial_rng(cfg.seed, "rk" + std::to_string(k), t);
                const auto [m, n] = detail::random_shape(rng, cfg.max_dim);
                const Index full = std::min(m, n);
                const double lo = 1.0 / k;
                const Index rb = uniform_index(rng, 0, full);
                const Matrix b = detail::plant(m, n, random_spectrum(rb, lo, 10.0, rng), rng).a;
                Matrix a;
                if (t % 2 == 0) {
                    const Index ra = uniform_index(rng, 0, full);
                    a = detail::plant(m, n, random_spectrum(ra, lo, 10.0, rng), rng).a;
                } else {
                    const double eps = uniform(rng, 1e-4, 0.01 / k);
                    const double grow = 1.0 + uniform(rng, 0.0, 0.01 / k);
                    a = detail::near_identity_unitary(m, eps, rng) * (grow * b) * detail::near_identity_unitary(n, eps, rng);
                }
                const std::string kk = "k" + std::to_string(k) + ":";
                const Lemma38Certificates l38 = lemma38_certificates(a, b, k, tol);
                rec.le(kk + "lemma38 corange", l38.corange.lhs, l38.corange.rhs, allow);
                rec.le(kk + "lemma38 range", l38.range.lhs, l38.range.rhs, allow);
                if (l38.gamma)
                    rec.le(kk + "lemma38 gamma", l38.gamma->lhs, l38.gamma->rhs, allow);
                for (MetricKind kind : {MetricKind::range, MetricKind::nullspace}) {
                    const Cor39Certificates c = cor39_certificate(a, b, k, kind, tol);
                    rec.le(kk + "cor39 lower " + to_string(kind), c.lower.lhs, c.lower.rhs, allow);
                    rec.le(kk + "cor39 upper " + to_string(kind), c.upper.lhs, c.upper.rhs, allow);
                }
                const InequalityCertificate l310 = lemma310_certificate(a, b, k, tol);
                rec.le(kk + "lemma310", l310.lhs, l310.rhs, allow);
            });
        }
    }
    return rec.take();
}

/// Gamma collapse along A + (1/n) v u^*, n = 2..50.
inline SuiteResult suite_thm36(const SuiteConfig& cfg, int trials)
{
    const ToleranceConfig& tol = cfg.tolerances;
    detail::Recorder rec("thm36", tol);
    for (int t = 0; t < trials; ++t) {
        detail::guarded(rec, t, [&] {
            Rng rng = trial_rng(cfg.seed, "thm36", t);
            const auto [m, n] = detail::random_shape(rng, cfg.max_dim);
            const Index r = uniform_index(rng, 0, std::min(m, n) - 1);
            const Matrix a = detail::plant(m, n, random_spectrum(r, 1e-2, 10.0, rng), rng).a;
            rec.flag("A not in M", !m_membership(a, tol));
            for (int k = 2; k <= 50; ++k) {
                const Matrix ak = thm36_gadget(a, k, tol);
                const std::string id = "n" + std::to_string(k);
                rec.le(id + ":gamma<=1/n", reduced_min_modulus(ak, tol), 1.0 / k, rec.bound(1e-10));
                rec.near(id + ":|An-A|=1/n", op_norm(ak - a), 1.0 / k, 1e-12);
            }
        });
    }
    return rec.take();
}

/// Partial-isometry flip: isometry gap 2 against operator gap 2 ||B P||.
inline SuiteResult suite_thm312(const SuiteConfig& cfg, int trials)
{
    const ToleranceConfig& tol = cfg.tolerances;
    detail::Recorder rec("thm312", tol);
    for (int t = 0; t < trials; ++t) {
        detail::guarded(rec, t, [&] {
            Rng rng = trial_rng(cfg.seed, "thm312", t);
            const auto [m, n] = detail::random_shape(rng, cfg.max_dim);
            const Index r = uniform_index(rng, 1, std::min(m, n));
            RealVector sigma = random_spectrum(r, 1e-4, 10.0, rng);
            if (t % 5 == 0)
                sigma(r - 1) = 1e-4;
            const detail::Planted p = detail::plant(m, n, sigma, rng);
            const Vector x0 = p.v.leftCols(r) * random_unit_vector(r, rng);
            const FlipResult f = thm312_flip(p.a, x0, tol);
            rec.near("|V_B-W|=2", f.isometry_gap, 2.0, 1e-8);
            rec.near("|B-B~|=2|BP|", f.operator_gap, 2.0 * f.bp_norm, 1e-10);
            rec.near("|BP|=|Bx0|", f.bp_norm, f.bx0_norm, 1e-10);
        });
    }
    return rec.take();
}

/// Unanimity of the thirteen convergence conditions and agreement with the six classical ones.
inline SuiteResult suite_thm48(const SuiteConfig& cfg, int trials)
{
    const ToleranceConfig& tol = cfg.tolerances;
    detail::Recorder rec("thm48", tol);
    const SequenceKind divergent[] = {SequenceKind::rank_dropping, SequenceKind::isometry_flip, SequenceKind::pinv_blowup};
    for (int t = 0; t < trials; ++t) {
        detail::guarded(rec, t, [&] {
            Rng rng = trial_rng(cfg.seed, "thm48", t);
            const bool convergent = t % 2 == 0;
            const SequenceKind kind = convergent ? SequenceKind::rank_preserving : divergent[(t / 2) % 3];
            const auto [m, n] = detail::random_shape(rng, cfg.max_dim);
            const Index full = std::min(m, n);
            const Index r = uniform_index(rng, 0, convergent ? full : full - 1);
            const Matrix b = detail::plant(m, n, random_spectrum(r, 1.0, 2.0, rng), rng).a;
            const PerturbationSequence seq = generate_sequence(kind, b, {50, 0.25}, rng(), tol);
            const ConvergenceReport r48 = thm48_report(seq, tol);
            const ConvergenceReport riz = izumino_report(seq, tol);
            const std::string k = std::string(to_string(kind)) + ":";
            rec.flag(k + "thirteen unanimous", r48.consistent);
            rec.flag(k + "six unanimous", riz.consistent);
            rec.flag(k + "agree", reports_agree(r48, riz));
            rec.flag(k + "expected verdict", r48.verdicts.at("i") == convergent);
            if (convergent)
                rec.le(k + "polar isometries converge", r48.evidence.at("polar_gap"), r48.thresholds.vanish);

            const double bp = analyze(b, tol).pinv_norm();
            const double allow = rec.bound(1e-9);
            for (Index j = 0; j < seq.length(); ++j) {
                try {
                    const GeneralizedInverseResult g = build_generalized_inverse(b, seq.terms[j], tol);
                    const std::string id = k + "n" + std::to_string(j + 1);
                    rec.le(id + ":BnAnBn=Bn", g.inner_residual, allow);
                    rec.le(id + ":AnBnAn=An", g.outer_residual, allow);
                    rec.le(id + ":|An|<=2|B+|", g.norm, 2.0 * bp, allow);
                    rec.le(id + ":G1^-1B+=B+G2^-1", g.commute_residual, allow * (1.0 + bp));
                } catch (const PreconditionError&) {
                }
            }
        });
    }
    return rec.take();
}

/// Intertwiners for same-signature pairs and signature invariance under the action.
inline SuiteResult suite_thm51(const SuiteConfig& cfg, int trials)
{
    const ToleranceConfig& tol = cfg.tolerances;
    detail::Recorder rec("thm51", tol);
    for (int t = 0; t < trials; ++t) {
        detail::guarded(rec, t, [&] {
            Rng rng = trial_rng(cfg.seed, "thm51", t);
            const auto [m, n] = detail::random_shape(rng, cfg.max_dim);
            const Index r = uniform_index(rng, 0, std::min(m, n));
            const Matrix a = detail::plant(m, n, random_spectrum(r, 1e-2, 10.0, rng), rng).a;
            const Matrix b = detail::plant(m, n, random_spectrum(r, 1e-2, 10.0, rng), rng).a;
            const Intertwiner w = build_intertwiner(a, b, tol);
            rec.le("GAH^-1=B", w.residual, rec.bound(1e-8) * (1.0 + op_norm(b)));
            rec.le("cond(G)", detail::cond(w.g), 1e12);
            rec.le("cond(H)", detail::cond(w.h), 1e12);
        });
    }
    const int actions = std::max(1, trials * 5 / 2);
    for (int t = 0; t < actions; ++t) {
        detail::guarded(rec, trials + t, [&] {
            Rng rng = trial_rng(cfg.seed, "thm51/action", t);
            const auto [m, n] = detail::random_shape(rng, cfg.max_dim);
            const Index r = uniform_index(rng, 0, std::min(m, n));
            const Matrix a = detail::plant(m, n, random_spectrum(r, 1e-2, 10.0, rng), rng).a;
            const Matrix moved = apply_action(random_invertible(m, rng), random_invertible(n, rng), a, tol);
            rec.flag("signature invariant", signature(moved, tol) == signature(a, tol));
        });
    }
    return rec.take();
}

/// Orthogonal projector onto G(S) against an orthonormalization oracle, and the local section.
inline SuiteResult suite_prop57(const SuiteConfig& cfg, int trials)
{
    const ToleranceConfig& tol = cfg.tolerances;
    detail::Recorder rec("prop57", tol);
    for (int t = 0; t < trials; ++t) {
        detail::guarded(rec, t, [&] {
            Rng rng = trial_rng(cfg.seed, "prop57", t);
            const Index n = uniform_index(rng, 2, cfg.max_dim);
            const Index d = uniform_index(rng, 0, n);
            const Subspace s = Subspace::from_orthonormal(random_orthonormal(n, d, rng), tol.eq_tol);
            const Matrix g = random_invertible(n, rng, 0.2, 5.0);
            Matrix oracle = Matrix::Zero(n, n);
            if (d > 0) {
                Eigen::HouseholderQR<Matrix> qr(g * s.basis());
                const Matrix q = qr.householderQ() * Matrix::Identity(n, d);
                oracle = q * q.adjoint();
            }
            rec.le("P_G(S)", op_norm(projection_under_g(g, s, tol) - oracle), rec.bound(1e-9));

            // local section around A for B in a small orbit neighbourhood
            const Index m = uniform_index(rng, 2, cfg.max_dim);
            const Index r = uniform_index(rng, 0, std::min(m, n));
            const Matrix a = detail::plant(m, n, random_spectrum(r, 0.5, 2.0, rng), rng).a;
            const double eps = uniform(rng, 1e-3, 0.05);
            const Matrix gm = identity(m) + eps * detail::unit_norm(gaussian_matrix(m, m, rng));
            const Matrix hn = identity(n) + eps * detail::unit_norm(gaussian_matrix(n, n, rng));
            const Matrix b = apply_action(gm, hn, a, tol);
            const Intertwiner sec = local_section_sigma(a, b, tol);
            rec.le("pi_A(sigma(B))=B", sec.residual, rec.bound(1e-8));
            const ProjectorPair pp = projector_pair_under_action(gm, hn, a, tol);
            const ProjectorPair direct = phi(b, tol);
            rec.le("Pi_A=phi(GAH^-1) range", op_norm(pp.p - direct.p), rec.bound(1e-9));
            rec.le("Pi_A=phi(GAH^-1) corange", op_norm(pp.q - direct.q), rec.bound(1e-9));
        });
    }
    return rec.take();
}

/// Different-rank orbits sit at distance one.
inline SuiteResult suite_thm511(const SuiteConfig& cfg, int trials)
{
    const ToleranceConfig& tol = cfg.tolerances;
    detail::Recorder rec("thm511", tol);
    for (int t = 0; t < trials; ++t) {
        detail::guarded(rec, t, [&] {
            Rng rng = trial_rng(cfg.seed, "thm511", t);
            const auto [m, n] = detail::random_shape(rng, cfg.max_dim);
            const Index full = std::min(m, n);
            const Index ra = uniform_index(rng, 0, full);
            Index rb = uniform_index(rng, 0, full - 1);
            if (rb >= ra)
                ++rb;
            const Matrix a = detail::plant(m, n, random_spectrum(ra, 1e-2, 10.0, rng), rng).a;
            const Matrix b = detail::plant(m, n, random_spectrum(rb, 1e-2, 10.0, rng), rng).a;
            for (MetricKind kind : {MetricKind::range, MetricKind::nullspace}) {
                for (double eps : {0.1, 0.01}) {
                    const OrbitDistanceWitness w = orbit_distance_witness(a, b, kind, eps, rng, 4, tol);
                    const std::string id = std::string(to_string(kind)) + ":eps" + (eps == 0.1 ? "0.1" : "0.01") + ":";
                    rec.near(id + "min gap=1", w.min_gap, 1.0, 1e-8);
                    rec.near(id + "max gap=1", w.max_gap, 1.0, 1e-8);
                    rec.le(id + "|d_X-1|<=eps", std::abs(w.witness_dx - 1.0), eps, rec.bound(1e-8));
                }
            }
        });
    }
    return rec.take();
}

/// Operators with fixed range S: factorization round trip, section, actions and the metric.
inline SuiteResult suite_fixed_range(const SuiteConfig& cfg, int trials)
{
    const ToleranceConfig& tol = cfg.tolerances;
    detail::Recorder rec("fixed_range", tol);
    const int groups = std::min(5, trials);
    int id = 0;
    for (int grp = 0; grp < groups; ++grp) {
        Rng rng = trial_rng(cfg.seed, "fixed_range", static_cast<std::uint64_t>(grp));
        const Index k = uniform_index(rng, 2, cfg.max_dim);
        const Index sd = uniform_index(rng, 1, k);
        const Index n = uniform_index(rng, sd, cfg.max_dim);
        const FixedRangeContext ctx(Subspace::from_orthonormal(random_orthonormal(k, sd, rng), tol.eq_tol));
        auto member = [&] { return Matrix(ctx.s.basis() * matrix_with_spectrum(sd, n, random_spectrum(sd, 0.1, 10.0, rng), rng)); };
        Matrix previous = member();
        const int count = trials / groups + (grp < trials % groups ? 1 : 0);
        for (int t = 0; t < count; ++t, ++id) {
            detail::guarded(rec, id, [&] {
                const Matrix b = member();
                rec.flag("B in CR_S", crs_membership(b, ctx, tol));
                const RangeFactorization f = factorize_f(b, ctx, tol);
                rec.flag("|B*| in C_P", in_positive_component(f.abs_b_star, ctx, tol));
                rec.flag("V in PI_S", in_partial_isometries(f.v, ctx, tol));
                rec.le("f^-1(f(B))=B", op_norm(factorize_f_inverse(f.abs_b_star, f.v, ctx, tol) - b), rec.bound(1e-9));
                const RangeFactorization back = factorize_f(factorize_f_inverse(f.abs_b_star, f.v, ctx, tol), ctx, tol);
                rec.le("f(f^-1(A,V))=(A,V)",
                       std::max(op_norm(back.abs_b_star - f.abs_b_star), op_norm(back.v - f.v)), rec.bound(1e-9));

                // section around W = V_prev for V = W U, U near the identity
                const Matrix w = factorize_f(previous, ctx, tol).v;
                const Matrix v = w * detail::near_identity_unitary(n, uniform(rng, 1e-3, 0.1), rng);
                const RangeSection sec = section_pi(f.abs_b_star, v, ctx, w, tol);
                rec.le("section residual", sec.residual, rec.bound(1e-8));
                rec.le("section unitary", sec.unitarity, rec.bound(1e-8));

                const double gap = std::abs(metric_dx(b, previous, MetricKind::range, tol) - op_norm(b - previous));
                rec.le("d_R=|A-B|", gap, rec.bound(1e-12) * (1.0 + op_norm(b - previous)));

                const Matrix g = embed_on_range(random_invertible(sd, rng), ctx);
                rec.flag("G in G_S", in_range_group(g, ctx, tol));
                const Matrix moved = action_l1(g, f.abs_b_star);
                rec.flag("L1 stays in C_P", in_positive_component(moved, ctx, tol));
                rec.flag("Thompson component of L1", thompson_same_component(moved, f.abs_b_star, tol).same_component);
                rec.flag("L2 stays in PI_S", in_partial_isometries(action_l2(haar_unitary(n, rng), f.v), ctx, tol));
                rec.flag("GBH^-1 stays in CR_S",
                         crs_membership(apply_action(g, random_invertible(n, rng), b, tol), ctx, tol));
                rec.flag("nullity", numerical_rank(b, tol) == sd);
                previous = b;
            });
        }
    }
    return rec.take();
}

/// Minimal-angle bookkeeping: symmetry, complements, sum and nullspace transversality.
inline SuiteResult suite_subspace(const SuiteConfig& cfg, int trials)
{
    const ToleranceConfig& tol = cfg.tolerances;
    detail::Recorder rec("subspace", tol);
    for (int t = 0; t < trials; ++t) {
        detail::guarded(rec, t, [&] {
            Rng rng = trial_rng(cfg.seed, "subspace", t);
            const Index n = uniform_index(rng, 2, cfg.max_dim);
            const Subspace m1 = Subspace::from_orthonormal(random_orthonormal(n, uniform_index(rng, 0, n), rng), tol.eq_tol);
            const Subspace m2 = Subspace::from_orthonormal(random_orthonormal(n, uniform_index(rng, 0, n), rng), tol.eq_tol);
            rec.near("c0 symmetric", cos_c0(m1, m2, tol), cos_c0(m2, m1, tol), 1e-12);
            rec.near("c(M,N)=c(M^,N^)", cos_c(m1, m2, tol),
                     cos_c(orthogonal_complement(m1, tol), orthogonal_complement(m2, tol), tol), 1e-9);
            rec.flag("sum vs c0 of complements", prop22_verdict(m1, m2, tol).agree());

            const Index rows = uniform_index(rng, 2, cfg.max_dim);
            const Index full = std::min(rows, n);
            const Index rb = uniform_index(rng, 0, full);
            const Index rc = uniform_index(rng, 0, full);
            const Matrix b = detail::plant(rows, n, random_spectrum(rb, 0.1, 10.0, rng), rng).a;
            const Matrix c = t % 3 == 0 ? Matrix(b + 1e-3 * detail::unit_norm(gaussian_matrix(rows, n, rng)))
                                        : detail::plant(rows, n, random_spectrum(rc, 0.1, 10.0, rng), rng).a;
            const NullspaceTransversality v = prop23_verdicts(b, c, tol);
            rec.flag("transversality (ii)=(iii)", v.sum_is_domain == v.c0_lt_1);
            rec.flag("transversality (ii)=(iv)", v.sum_is_domain == v.projection_onto);
            if (n - numerical_rank(c, tol) <= n - numerical_rank(b, tol))
                rec.flag("transversality (i)=(ii)", v.projector_gap_lt_1 == v.sum_is_domain);
        });
    }
    return rec.take();
}

/// Orbit criteria agreement and the polar intertwiner.
inline SuiteResult suite_orbit(const SuiteConfig& cfg, int trials)
{
    const ToleranceConfig& tol = cfg.tolerances;
    detail::Recorder rec("orbit", tol);
    for (int t = 0; t < trials; ++t) {
        detail::guarded(rec, t, [&] {
            Rng rng = trial_rng(cfg.seed, "orbit", t);
            const auto [m, n] = detail::random_shape(rng, cfg.max_dim);
            const Index full = std::min(m, n);
            const Index ra = uniform_index(rng, 0, full);
            const Index rb = t % 2 ? ra : uniform_index(rng, 0, full);
            const Matrix a = detail::plant(m, n, random_spectrum(ra, 1e-2, 10.0, rng), rng).a;
            const Matrix b = detail::plant(m, n, random_spectrum(rb, 1e-2, 10.0, rng), rng).a;
            const OrbitCriteria c = prop53_verdicts(a, b, tol);
            rec.flag("orbit criteria agree", c.agree());
            rec.flag("same orbit iff same rank", c.same_signature == (ra == rb));
            const PolarIntertwiner p = cor54_construction(a, tol);
            rec.le("GA=V_A", p.residual, rec.bound(1e-8) * (1.0 + op_norm(a)));
            rec.le("G G^-1=I", p.inverse_residual, rec.bound(1e-8) * (1.0 + op_norm(a)));
        });
    }
    return rec.take();
}

// ---------------------------------------------------------------- registry

struct SuiteEntry {
    const char* id;
    int default_trials;
    SuiteResult (*run)(const SuiteConfig&, int);
};

inline const std::vector<SuiteEntry>& suite_registry()
{
    static const std::vector<SuiteEntry> suites{
        {"penrose", 1000, suite_penrose},
        {"gamma", 500, suite_gamma},
        {"certificates", 1000, suite_certificates},
        {"rk", 500, suite_rk},
        {"thm36", 50, suite_thm36},
        {"thm312", 100, suite_thm312},
        {"thm48", 100, suite_thm48},
        {"thm51", 200, suite_thm51},
        {"prop57", 300, suite_prop57},
        {"thm511", 100, suite_thm511},
        {"fixed_range", 200, suite_fixed_range},
        {"subspace", 300, suite_subspace},
        {"orbit", 200, suite_orbit},
    };
    return suites;
}

inline const SuiteEntry* find_suite(const std::string& id)
{
    for (const auto& s : suite_registry())
        if (id == s.id)
            return &s;
    return nullptr;
}

/// Runs the configured suites in registry order. Throws PreconditionError on an unknown suite id.
inline VerifyReport run_verify(const SuiteConfig& cfg)
{
    cfg.validate();
    std::vector<const SuiteEntry*> selected;
    if (cfg.suites.empty()) {
        for (const auto& s : suite_registry())
            selected.push_back(&s);
    } else {
        for (const auto& id : cfg.suites) {
            const SuiteEntry* s = find_suite(id);
            if (!s)
                throw PreconditionError("unknown suite id: " + id);
            selected.push_back(s);
        }
    }
    VerifyReport report;
    report.config = cfg;
    for (const SuiteEntry* s : selected)
        report.suites.push_back(s->run(cfg, cfg.trials.value_or(s->default_trials)));
    return report;
}

inline json to_json(const ToleranceConfig& t)
{
    return {{"rank_tol_rel", t.rank_tol_rel}, {"eq_tol", t.eq_tol}, {"angle_one_tol", t.angle_one_tol}};
}

inline json to_json(const VerifyReport& r)
{
    json suites = json::array();
    for (const auto& s : r.suites) {
        json records = json::array();
        for (const auto& c : s.cases)
            records.push_back({{"case_id", c.case_id},
                               {"lhs", real_to_json(c.lhs)},
                               {"rhs", real_to_json(c.rhs)},
                               {"slack", real_to_json(c.slack)},
                               {"verdict", c.verdict}});
        suites.push_back({{"suite", s.suite},
                          {"trials", s.trials},
                          {"cases", s.cases.size()},
                          {"violations", s.violations()},
                          {"records", std::move(records)}});
    }
    return {{"seed", r.config.seed},
            {"max_dim", r.config.max_dim},
            {"tolerances", to_json(r.config.tolerances)},
            {"violations", r.violations()},
            {"suites", std::move(suites)}};
}

inline std::string csv_real(double x)
{
    if (std::isinf(x))
        return x > 0 ? "+inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_csv(std::ostream& out, const VerifyReport& r)
{
    out << "suite,case_id,lhs,rhs,slack,verdict\n";
    for (const auto& s : r.suites)
        for (const auto& c : s.cases) {
            std::string id = c.case_id;
            if (id.find_first_of(",\"") != std::string::npos) {
                std::string q = "\"";
                for (char ch : id)
                    q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
                id = q + "\"";
            }
            out << c.suite << ',' << id << ',' << csv_real(c.lhs) << ',' << csv_real(c.rhs) << ','
                << csv_real(c.slack) << ',' << (c.verdict ? "pass" : "fail") << '\n';
        }
}

} // namespace crgeom
