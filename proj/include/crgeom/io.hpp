#pragma once

// JSON for matrices and reports. Matrices are {"rows": m, "cols": n,
// "entries": [[re, im], ...]} in row-major order. Infinite reals are written
// as the strings "+inf" / "-inf".

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "crgeom/convergence_lab.hpp"
#include "crgeom/fixed_range.hpp"

namespace crgeom {

using json = nlohmann::ordered_json;

inline json real_to_json(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "+inf" : "-inf";
    return x;
}

inline double real_from_json(const json& j)
{
    if (j.is_number())
        return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "+inf" || s == "inf")
            return kInfinity;
        if (s == "-inf")
            return -kInfinity;
    }
    throw ParseError("expected a real number, got " + j.dump());
}

inline Matrix matrix_from_json(const json& j)
{
    if (!j.is_object())
        throw ParseError("matrix: expected a JSON object");
    for (const char* key : {"rows", "cols", "entries"})
        if (!j.contains(key))
            throw ParseError(std::string("matrix: missing field '") + key + "'");
    if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer())
        throw ParseError("matrix: rows and cols must be integers");
    const long long rows = j["rows"].get<long long>();
    const long long cols = j["cols"].get<long long>();
    if (rows < 1 || cols < 1)
        throw ParseError("matrix: rows and cols must be positive");
    const json& entries = j["entries"];
    if (!entries.is_array())
        throw ParseError("matrix: entries must be an array");
    if (static_cast<long long>(entries.size()) != rows * cols)
        throw ParseError("matrix: expected " + std::to_string(rows * cols) + " entries, found "
                         + std::to_string(entries.size()));
    Matrix m(rows, cols);
    for (long long k = 0; k < rows * cols; ++k) {
        const json& e = entries[static_cast<std::size_t>(k)];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw ParseError("matrix: entry " + std::to_string(k) + " must be [re, im]");
        m(k / cols, k % cols) = Complex(e[0].get<double>(), e[1].get<double>());
    }
    if (!all_finite(m))
        throw ParseError("matrix: entries must be finite");
    return m;
}

inline json matrix_to_json(const Matrix& m)
{
    json entries = json::array();
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            entries.push_back({m(i, j).real(), m(i, j).imag()});
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

inline Matrix parse_matrix(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("matrix: invalid JSON: ") + e.what());
    }
    return matrix_from_json(j);
}

inline Matrix read_matrix_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_matrix(ss.str());
}

inline void write_json_file(const std::string& path, const json& j)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    out << j.dump(2) << '\n';
}

inline json to_json(const InequalityCertificate& c)
{
    return {{"lhs", real_to_json(c.lhs)},
            {"rhs", real_to_json(c.rhs)},
            {"slack", real_to_json(c.slack)},
            {"holds", c.holds},
            {"inputs_digest", c.inputs_digest}};
}

inline std::string orbit_id(const OrbitSignature& s)
{
    return "O(" + std::to_string(s.nullity) + "," + std::to_string(s.rank) + "," + std::to_string(s.defect) + ")";
}

inline json to_json(const OrbitSignature& s)
{
    return {{"signature", {s.nullity, s.rank, s.defect}}, {"index", s.index()}, {"orbit_id", orbit_id(s)}};
}

inline json singular_values_json(const RealVector& s)
{
    json out = json::array();
    for (Index i = 0; i < s.size(); ++i)
        out.push_back(s(i));
    return out;
}

inline json to_json(const OperatorAnalysis& x, const PolarParts& polar)
{
    json j;
    j["rows"] = x.a.rows();
    j["cols"] = x.a.cols();
    j["rank"] = x.rank;
    j["singular_values"] = singular_values_json(x.factorization.singular_values);
    j["norm"] = x.norm();
    j["gamma"] = real_to_json(x.gamma);
    j["pinv_norm"] = x.pinv_norm();
    j["orbit"] = to_json(x.signature);
    j["pinv"] = matrix_to_json(x.pinv);
    j["range_projector"] = matrix_to_json(x.p_range);
    j["corange_projector"] = matrix_to_json(x.p_corange);
    j["polar"] = {{"v", matrix_to_json(polar.v)},
                  {"abs_a", matrix_to_json(polar.abs_a)},
                  {"abs_a_star", matrix_to_json(polar.abs_a_star)}};
    return j;
}

inline json to_json(const ConvergenceThresholds& t)
{
    return {{"vanish", t.vanish},
            {"tail_fraction", t.tail_fraction},
            {"bound_factor", t.bound_factor},
            {"gamma_floor_factor", t.gamma_floor_factor},
            {"inner_inverse_tol", t.inner_inverse_tol}};
}

inline json to_json(const ConvergenceReport& r)
{
    json conditions = json::object();
    for (const auto& [id, verdict] : r.verdicts)
        conditions[id] = {{"verdict", verdict}, {"evidence", real_to_json(r.evidence.at(id))}};
    json extra = json::object();
    for (const auto& [id, value] : r.evidence)
        if (!r.verdicts.count(id))
            extra[id] = real_to_json(value);
    return {{"conditions", std::move(conditions)},
            {"measurements", std::move(extra)},
            {"tail_index", r.tail_index},
            {"thresholds", to_json(r.thresholds)},
            {"consistent", r.consistent}};
}

} // namespace crgeom
