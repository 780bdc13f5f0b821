#include "fockforge/spec_io.hpp"

#include <cmath>
#include <fstream>

namespace fockforge {

using nlohmann::json;

json complex_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

json matrix_to_json(const CMatrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const CVector& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v(i)));
    return arr;
}

cplx json_to_complex(const json& j, const std::string& what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw SpecError(what + ": expected a number or [re, im]");
    const cplx c{j[0].get<double>(), j[1].get<double>()};
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw SpecError(what + ": not finite");
    return c;
}

CMatrix json_to_matrix(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw SpecError(what + ": expected a nested array");
    const Index rows = static_cast<Index>(j.size()), cols = static_cast<Index>(j[0].size());
    CMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        if (!j[r].is_array() || static_cast<Index>(j[r].size()) != cols)
            throw SpecError(what + ": ragged rows");
        for (Index c = 0; c < cols; ++c)
            m(r, c) = json_to_complex(j[r][c], what + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    return m;
}

namespace {

const json& field(const json& j, const char* key) {
    if (!j.contains(key)) throw SpecError(std::string("missing field '") + key + "'");
    return j.at(key);
}

int int_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_integer()) throw SpecError(std::string("field '") + key + "' must be an integer");
    return v.get<int>();
}

std::pair<int, int> pair_key(const json& e, const char* what) {
    if (!e.is_object()) throw SpecError(std::string(what) + ": entries must be objects");
    return {int_field(e, "x"), int_field(e, "y")};
}

} // namespace

LoadedSpec parse_spec(const json& j) {
    if (!j.is_object()) throw SpecError("spec must be a JSON object");
    LoadedSpec s;
    const json& mode = field(j, "mode");
    if (!mode.is_string()) throw SpecError("field 'mode' must be a string");
    s.mode = mode.get<std::string>();
    if (j.contains("n_max")) s.n_max = int_field(j, "n_max");
    if (j.contains("tol")) {
        if (!j["tol"].is_number()) throw SpecError("field 'tol' must be a number");
        s.tol = j["tol"].get<double>();
    }
    if (j.contains("rank_tol")) {
        if (!j["rank_tol"].is_number()) throw SpecError("field 'rank_tol' must be a number");
        s.rank_tol = j["rank_tol"].get<double>();
    }
    if (j.contains("name") && j["name"].is_string()) s.name = j["name"].get<std::string>();
    if (s.n_max < 1) throw SpecError("n_max must be at least 1");
    if (!(s.tol > 0) || !(s.rank_tol > 0)) throw SpecError("tolerances must be positive");

    if (s.mode == "abstract") {
        s.h_dim = int_field(j, "h_dim");
        if (s.h_dim < 1) throw SpecError("h_dim must be positive");
        s.t = json_to_matrix(field(j, "T"), "T");
        if (s.t.rows() != static_cast<Index>(s.h_dim) * s.h_dim || s.t.cols() != s.t.rows())
            throw SpecError("T must be h_dim^2 x h_dim^2");
        return s;
    }
    if (s.mode != "multicomponent") throw SpecError("mode must be 'abstract' or 'multicomponent'");

    MultiSpec& m = s.multi;
    m.sites.n_sites = int_field(j, "n_sites");
    m.sites.internal_dim = int_field(j, "internal_dim");
    m.tol = s.rank_tol;
    const json& rule = field(j, "rule");
    if (!rule.is_object()) throw SpecError("field 'rule' must be an object");
    const json& kind = field(rule, "kind");
    if (!kind.is_string()) throw SpecError("rule kind must be a string");
    m.rule.kind = rule_kind_from(kind.get<std::string>());
    switch (m.rule.kind) {
    case RuleKind::Constant:
    case RuleKind::SignSplit: m.rule.c = json_to_matrix(field(rule, "C"), "rule.C"); break;
    case RuleKind::PerPair:
        for (const json& e : field(rule, "blocks"))
            m.rule.per_pair[pair_key(e, "rule.blocks")] = json_to_matrix(field(e, "C"), "rule.blocks.C");
        break;
    case RuleKind::ScalarPair:
        for (const json& e : field(rule, "Q1")) m.rule.q1[pair_key(e, "rule.Q1")] = json_to_complex(field(e, "value"), "rule.Q1");
        for (const json& e : field(rule, "Q2")) m.rule.q2[pair_key(e, "rule.Q2")] = json_to_complex(field(e, "value"), "rule.Q2");
        break;
    }
    s.h_dim = m.sites.h_dim();
    validate(m);
    return s;
}

LoadedSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot read spec file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SpecError("spec file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_spec(j);
}

json spec_to_json(const LoadedSpec& s) {
    json j;
    j["mode"] = s.mode;
    if (!s.name.empty()) j["name"] = s.name;
    j["n_max"] = s.n_max;
    j["tol"] = s.tol;
    j["rank_tol"] = s.rank_tol;
    if (!s.is_multi()) {
        j["h_dim"] = s.h_dim;
        j["T"] = matrix_to_json(s.t);
        return j;
    }
    const MultiSpec& m = s.multi;
    j["n_sites"] = m.sites.n_sites;
    j["internal_dim"] = m.sites.internal_dim;
    json rule;
    rule["kind"] = to_string(m.rule.kind);
    switch (m.rule.kind) {
    case RuleKind::Constant:
    case RuleKind::SignSplit: rule["C"] = matrix_to_json(m.rule.c); break;
    case RuleKind::PerPair:
        rule["blocks"] = json::array();
        for (const auto& [k, c] : m.rule.per_pair)
            rule["blocks"].push_back({{"x", k.first}, {"y", k.second}, {"C", matrix_to_json(c)}});
        break;
    case RuleKind::ScalarPair:
        rule["Q1"] = json::array();
        rule["Q2"] = json::array();
        for (const auto& [k, q] : m.rule.q1)
            rule["Q1"].push_back({{"x", k.first}, {"y", k.second}, {"value", complex_to_json(q)}});
        for (const auto& [k, q] : m.rule.q2)
            rule["Q2"].push_back({{"x", k.first}, {"y", k.second}, {"value", complex_to_json(q)}});
        break;
    }
    j["rule"] = rule;
    return j;
}

DeformationOperator spec_deformation(const LoadedSpec& s) {
    if (s.is_multi()) return build_T(s.multi);
    return make_deformation(s.t, s.h_dim, s.rank_tol);
}

} // namespace fockforge
