#pragma once

#include <string>
#include <vector>

#include "fockforge/fixtures.hpp"

namespace fockforge {

/// One scalar check. Informational checks are reported but do not decide the verdict.
struct CheckResult {
    std::string name;
    double residual = 0;
    double tol = 0;
    bool pass = false;
    bool skipped = false;
    bool gating = true;
    std::string note;
};

struct VerificationRun {
    nlohmann::json header;                  // spec parameters and settings
    std::vector<CheckResult> checks;
    std::vector<RelationReport> relations;
    double wall_time = 0;                   // seconds; kept out of the JSON for byte stability

    bool passed() const;
    std::vector<std::string> failures() const;
    nlohmann::json to_json() const;
};

struct RunOptions {
    int threads = 1;
    int random_pairs = 5;
    unsigned seed = 20240611;
    DimensionBudget budget{};
    bool keep_relations = true;   // store every discovered relation in the run
};

/// Full check suite on a spec. SpecError and SizeError propagate to the caller.
VerificationRun run_checks(const LoadedSpec& spec, const RunOptions& opt = {});

/// run_checks on the fixture plus its example-specific checks.
VerificationRun run_fixture(FixtureId id, const FixtureParams& p, const RunOptions& opt = {});

/// One line per check: "[pass] name residual tol".
std::string summary_text(const VerificationRun& run);

} // namespace fockforge
