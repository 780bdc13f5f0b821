#pragma once

#include <string>

#include <json.hpp>

#include "fockforge/multi_component.hpp"

namespace fockforge {

/// Row-major nested arrays of [re, im] pairs.
nlohmann::json matrix_to_json(const CMatrix& m);
nlohmann::json vector_to_json(const CVector& v);
nlohmann::json complex_to_json(cplx c);

/// Inverse of the encoders above; SpecError on malformed input.
CMatrix json_to_matrix(const nlohmann::json& j, const std::string& what);
cplx json_to_complex(const nlohmann::json& j, const std::string& what);

/// A parsed spec file. Abstract specs carry T directly; multicomponent specs carry
/// the site model and rule, and T is built from them.
struct LoadedSpec {
    std::string mode;          // "abstract" or "multicomponent"
    int h_dim = 0;
    CMatrix t;                 // abstract only
    MultiSpec multi;           // multicomponent only
    int n_max = 3;
    double tol = 1e-8;         // pass/fail threshold
    double rank_tol = 1e-9;    // rank decisions
    std::string name;          // optional label, echoed in reports

    bool is_multi() const { return mode == "multicomponent"; }
};

LoadedSpec parse_spec(const nlohmann::json& j);
LoadedSpec load_spec(const std::string& path);
nlohmann::json spec_to_json(const LoadedSpec& s);

/// T of the spec; validation failures surface as SpecError.
DeformationOperator spec_deformation(const LoadedSpec& s);

} // namespace fockforge
