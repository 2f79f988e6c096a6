// crgeom command-line driver.
//
// Exit codes: 0 success, 1 verification violation or inconsistent report,
// 2 usage, parse or precondition error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crgeom.hpp"

namespace {

using namespace crgeom;

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

ToleranceConfig parse_tolerances(const std::vector<std::string>& items)
{
    ToleranceConfig tol;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw PreconditionError("--tol expects key=value, got " + item);
        const std::string key = item.substr(0, eq);
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1)
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw PreconditionError("--tol: bad number in " + item);
        }
        if (key == "rank_tol_rel")
            tol.rank_tol_rel = value;
        else if (key == "eq_tol")
            tol.eq_tol = value;
        else if (key == "angle_one_tol")
            tol.angle_one_tol = value;
        else
            throw PreconditionError("--tol: unknown key " + key);
    }
    tol.validate();
    return tol;
}

void emit(const json& j, const std::string& out)
{
    if (out.empty() || out == "-")
        std::cout << j.dump(2) << '\n';
    else
        write_json_file(out, j);
}

int cmd_analyze(const std::string& file, const ToleranceConfig& tol)
{
    const Matrix a = read_matrix_file(file);
    const OperatorAnalysis x = analyze(a, tol);
    std::cout << to_json(x, polar_decompose(x.factorization, tol)).dump(2) << '\n';
    return kOk;
}

int cmd_verify(const SuiteConfig& cfg)
{
    const VerifyReport report = run_verify(cfg);
    for (const auto& s : report.suites)
        std::cerr << s.suite << ": " << s.trials << " trials, " << s.cases.size() << " checks, " << s.violations()
                  << " violations\n";
    if (!cfg.output_path.empty()) {
        if (cfg.format == "csv") {
            std::ofstream out(cfg.output_path);
            if (!out)
                throw Error("cannot write " + cfg.output_path);
            write_csv(out, report);
        } else {
            write_json_file(cfg.output_path, to_json(report));
        }
    }
    const std::size_t v = report.violations();
    std::cerr << (v == 0 ? "verify: all checks passed" : "verify: " + std::to_string(v) + " violations") << '\n';
    return v == 0 ? kOk : kViolation;
}

int cmd_orbit(const std::string& file_a, const std::string& file_b, const std::string& out, std::uint64_t seed,
              const ToleranceConfig& tol)
{
    const Matrix a = read_matrix_file(file_a);
    const Matrix b = read_matrix_file(file_b);
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("orbit: operands must have the same shape");
    json j;
    j["a"] = to_json(signature(a, tol));
    j["b"] = to_json(signature(b, tol));
    const bool same = same_orbit(a, b, tol);
    j["same_orbit"] = same;
    if (same) {
        const Intertwiner w = build_intertwiner(a, b, tol);
        j["intertwiner"] = {{"g", matrix_to_json(w.g)}, {"h", matrix_to_json(w.h)}, {"residual", w.residual}};
    } else {
        Rng rng = trial_rng(seed, "orbit", 0);
        json witness = json::array();
        for (MetricKind kind : {MetricKind::range, MetricKind::nullspace})
            for (double eps : {0.1, 0.01}) {
                const OrbitDistanceWitness w = orbit_distance_witness(a, b, kind, eps, rng, 8, tol);
                witness.push_back({{"metric", std::string("d_") + to_string(kind)},
                                   {"epsilon", eps},
                                   {"distance_lower_bound", 1.0},
                                   {"lower_bound_is_one", w.lower_bound_is_one},
                                   {"min_gap", w.min_gap},
                                   {"max_gap", w.max_gap},
                                   {"witness_dx", w.witness_dx},
                                   {"samples", w.samples}});
            }
        j["distance"] = 1.0;
        j["witness"] = std::move(witness);
    }
    emit(j, out);
    return kOk;
}

int cmd_converge(const std::string& kind_name, int length, std::uint64_t seed, const std::string& base_file,
                 const ConvergenceThresholds& th, const std::string& out, const ToleranceConfig& tol)
{
    const SequenceKind kind = sequence_kind_from_string(kind_name);
    Matrix base;
    if (!base_file.empty()) {
        base = read_matrix_file(base_file);
    } else {
        Rng rng = trial_rng(seed, "converge/base", 0);
        base = matrix_with_spectrum(4, 4, random_spectrum(2, 1.0, 2.0, rng), rng);
    }
    const PerturbationSequence seq = generate_sequence(kind, base, {length, 0.25}, seed, tol);
    const ConvergenceReport r48 = thm48_report(seq, tol, th);
    const ConvergenceReport riz = izumino_report(seq, tol, th);
    const bool agree = reports_agree(r48, riz);
    json j;
    j["kind"] = to_string(kind);
    j["length"] = length;
    j["seed"] = seed;
    j["base"] = matrix_to_json(base);
    j["thm48"] = to_json(r48);
    j["izumino"] = to_json(riz);
    j["agree"] = agree;
    emit(j, out);
    return agree ? kOk : kViolation;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Closed-range operator geometry: analysis, orbits, convergence battery, property suites"};
    app.require_subcommand(1);

    std::vector<std::string> tol_items;
    app.add_option("--tol", tol_items, "Tolerance override key=value (rank_tol_rel, eq_tol, angle_one_tol)")
        ->take_all();
    app.fallthrough();

    auto* analyze_cmd = app.add_subcommand("analyze", "Pseudoinverse, gamma, orbit signature and polar parts of a matrix");
    std::string analyze_file;
    analyze_cmd->add_option("file", analyze_file, "Matrix JSON file")->required();

    auto* verify_cmd = app.add_subcommand("verify", "Run the property suites");
    SuiteConfig cfg;
    int trials = 0;
    verify_cmd->add_option("--suites", cfg.suites, "Suite ids (default: all)");
    verify_cmd->add_option("--seed", cfg.seed, "Base seed");
    verify_cmd->add_option("--trials", trials, "Trials per suite (default: per-suite)");
    verify_cmd->add_option("--max-dim", cfg.max_dim, "Largest dimension drawn");
    verify_cmd->add_option("--out", cfg.output_path, "Report file");
    verify_cmd->add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    bool list_suites = false;
    verify_cmd->add_flag("--list", list_suites, "List suite ids and exit");

    auto* orbit_cmd = app.add_subcommand("orbit", "Orbit comparison of two matrices");
    std::string orbit_a, orbit_b, orbit_out;
    std::uint64_t orbit_seed = 1;
    orbit_cmd->add_option("fileA", orbit_a)->required();
    orbit_cmd->add_option("fileB", orbit_b)->required();
    orbit_cmd->add_option("--out", orbit_out, "Write the intertwiner or witness here instead of stdout");
    orbit_cmd->add_option("--seed", orbit_seed, "Seed for sampled orbit representatives");

    auto* converge_cmd = app.add_subcommand("converge", "Evaluate the convergence battery on a generated sequence");
    std::string kind = "rank_preserving", base_file, converge_out;
    int length = 50;
    std::uint64_t converge_seed = 1;
    ConvergenceThresholds th;
    converge_cmd->add_option("--kind", kind, "rank_preserving | rank_dropping | isometry_flip | pinv_blowup");
    converge_cmd->add_option("--length", length, "Sequence length")->check(CLI::PositiveNumber);
    converge_cmd->add_option("--seed", converge_seed, "Seed");
    converge_cmd->add_option("--base", base_file, "Base operator matrix file (default: seeded 4x4 of rank 2)");
    converge_cmd->add_option("--vanish", th.vanish, "Tail threshold for limits");
    converge_cmd->add_option("--tail", th.tail_fraction, "Fraction of the sequence treated as the tail");
    converge_cmd->add_option("--out", converge_out, "Report file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        const ToleranceConfig tol = parse_tolerances(tol_items);
        if (*analyze_cmd)
            return cmd_analyze(analyze_file, tol);
        if (*verify_cmd) {
            if (list_suites) {
                for (const auto& s : suite_registry())
                    std::cout << s.id << " (" << s.default_trials << " trials)\n";
                return kOk;
            }
            if (verify_cmd->count("--trials"))
                cfg.trials = trials;
            cfg.tolerances = tol;
            return cmd_verify(cfg);
        }
        if (*orbit_cmd)
            return cmd_orbit(orbit_a, orbit_b, orbit_out, orbit_seed, tol);
        if (*converge_cmd)
            return cmd_converge(kind, length, converge_seed, base_file, th, converge_out, tol);
    } catch (const crgeom::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
