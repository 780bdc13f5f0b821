// fockforge: check, emit and relations on a spec file; fixtures runs the built-in examples.
// Exit codes: 0 all checks pass, 1 a check failed, 2 malformed input, 3 size budget exceeded.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fockforge/verification.hpp"

using namespace fockforge;
using nlohmann::json;

namespace {

struct Common {
    std::string spec_path;
    std::string fixture;
    std::optional<int> n_max;
    std::optional<double> tol, rank_tol;
    std::optional<int> threads;
    std::string json_path;
    bool big = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--spec", c.spec_path, "spec file (JSON)");
    cmd->add_option("--fixture", c.fixture, "use a built-in fixture instead of a spec file");
    cmd->add_option("--n-max", c.n_max, "highest Fock level");
    cmd->add_option("--tol", c.tol, "pass/fail tolerance");
    cmd->add_option("--rank-tol", c.rank_tol, "relative rank threshold");
    cmd->add_option("--threads", c.threads, "worker threads (default FOCKFORGE_THREADS or 1)");
    cmd->add_option("--json", c.json_path, "write the JSON report here");
    cmd->add_flag("--big", c.big, "N = 4 sites, n_max = 4, raised dimension budget");
}

int thread_count(const Common& c) { return c.threads ? std::max(1, *c.threads) : default_thread_count(); }

FixtureParams params_for(const Common& c) {
    FixtureParams p = default_params();
    if (c.big) {
        p.n_sites = 4;
        p.n_max = 4;
    }
    if (c.n_max) p.n_max = *c.n_max;
    if (c.tol) p.tol = *c.tol;
    if (c.rank_tol) p.rank_tol = *c.rank_tol;
    return p;
}

RunOptions options_for(const Common& c) {
    RunOptions o;
    o.threads = thread_count(c);
    if (c.big) o.budget.max_tensor_dim = 4096;
    return o;
}

LoadedSpec resolve_spec(const Common& c) {
    if (!c.fixture.empty() && !c.spec_path.empty()) throw SpecError("give either --spec or --fixture, not both");
    LoadedSpec s;
    if (!c.fixture.empty()) {
        s = fixture_loaded(fixture_from(c.fixture), params_for(c));
    } else {
        if (c.spec_path.empty()) throw SpecError("--spec or --fixture is required");
        s = load_spec(c.spec_path);
        if (c.n_max) s.n_max = *c.n_max;
        if (c.tol) s.tol = *c.tol;
        if (c.rank_tol) {
            s.rank_tol = *c.rank_tol;
            s.multi.tol = *c.rank_tol;
        }
    }
    return s;
}

void write_json(const Common& c, const json& j) {
    const std::string text = j.dump(2) + "\n";
    if (c.json_path.empty() || c.json_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(c.json_path);
    if (!out) throw SpecError("cannot write '" + c.json_path + "'");
    out << text;
}

int cmd_check(const Common& c) {
    const LoadedSpec spec = resolve_spec(c);
    const VerificationRun run = spec.name.empty() || c.fixture.empty()
                                    ? run_checks(spec, options_for(c))
                                    : run_fixture(fixture_from(c.fixture), params_for(c), options_for(c));
    std::cerr << summary_text(run);
    std::fprintf(stderr, "%s in %.2f s\n", run.passed() ? "all checks pass" : "checks failed", run.wall_time);
    if (!c.json_path.empty()) write_json(c, run.to_json());
    return run.passed() ? 0 : 1;
}

int cmd_emit(const Common& c, const std::string& what, int n) {
    const LoadedSpec spec = resolve_spec(c);
    const DeformationOperator d = spec_deformation(spec);
    const RunOptions opt = options_for(c);
    json j;
    j["artifact"] = what;
    j["spec"] = spec_to_json(spec);
    if (what == "T") {
        j["matrix"] = matrix_to_json(d.t);
    } else if (what == "T_tilde") {
        j["matrix"] = matrix_to_json(shuffled(d.t, d.h_dim).t_tilde);
    } else if (what == "P_n" || what == "proj_n" || what == "fock_basis") {
        if (n < 0) throw SpecError("emit " + what + " needs --n");
        j["n"] = n;
        const FockLevel lv = fock_level(d, n, spec.rank_tol, opt.threads, opt.budget);
        if (what == "P_n")
            j["matrix"] = matrix_to_json(lv.p_n);
        else if (what == "proj_n")
            j["matrix"] = matrix_to_json(projection(lv));
        else
            j["level"] = level_to_json(lv);
    } else {
        throw SpecError("unknown artifact '" + what + "' (expected P_n, proj_n, T, T_tilde, fock_basis)");
    }
    write_json(c, j);
    return 0;
}

int cmd_relations(const Common& c) {
    const LoadedSpec spec = resolve_spec(c);
    if (!spec.is_multi()) throw SpecError("relations needs a multicomponent spec");
    const DeformationOperator d = spec_deformation(spec);
    if (!d.ybe) {
        std::cerr << "braid relation fails (residual " << d.ybe_residual << "); no Fock space to compute in\n";
        return 1;
    }
    const RunOptions opt = options_for(c);
    const FockTruncation tr = build_truncation(d, spec.n_max, spec.rank_tol, opt.threads, opt.budget);
    const auto found = relation_discovery(spec.multi, d, tr, spec.tol);
    bool ok = true;
    json j;
    j["spec"] = spec_to_json(spec);
    j["discovered"] = to_json(found);
    for (const auto& r : found) {
        std::printf("[%s] %-22s %-70s %.2e\n", r.pass ? "ok" : "FAIL", r.relation_id.c_str(), r.formula.c_str(),
                    r.residual);
        ok = ok && r.pass;
    }
    std::optional<FixtureId> fid;
    if (!spec.name.empty()) {
        for (FixtureId id : all_fixtures())
            if (fixture_name(id) == spec.name) fid = id;
    }
    if (fid) {
        const PointOperators ops = point_operators(spec.multi.sites, tr);
        json table = json::array();
        std::printf("\nDisplayed relations of %s:\n", spec.name.c_str());
        const auto reading = *fid == FixtureId::ex_spatial ? ExchangeReading::Reversed : ExchangeReading::AsDisplayed;
        for (const auto& rel : printed_relations(*fid, spec.multi, reading)) {
            const PrintedCheck pc = check_printed(ops, tr, rel, spec.tol);
            std::string cond = rel.condition_text.empty() ? "" : "  if " + rel.condition_text;
            std::printf("[%s] %s%s   residual %.2e", pc.report.pass ? "ok" : "MISMATCH", rel.text.c_str(),
                        cond.c_str(), pc.report.residual);
            if (pc.fitted_available && std::abs(pc.fitted - pc.displayed) > 1e-9)
                std::printf("   fitted coefficient %s at (x1,x2)", format_coef(pc.fitted).c_str());
            std::printf("\n");
            table.push_back(to_json(pc.report));
        }
        j["displayed"] = table;
    }
    if (!c.json_path.empty()) write_json(c, j);
    return ok ? 0 : 1;
}

int cmd_fixtures(const Common& c, const std::string& filter) {
    const FixtureParams p = params_for(c);
    const RunOptions opt = options_for(c);
    json all = json::array();
    std::vector<std::string> failed;
    for (FixtureId id : all_fixtures()) {
        if (!filter.empty() && fixture_name(id) != filter) continue;
        const VerificationRun run = run_fixture(id, p, opt);
        std::printf("== %s\n%s", fixture_name(id).c_str(), summary_text(run).c_str());
        std::printf("%s: %s (%.2f s)\n\n", fixture_name(id).c_str(), run.passed() ? "pass" : "FAIL", run.wall_time);
        if (!run.passed()) failed.push_back(fixture_name(id));
        all.push_back(run.to_json());
    }
    if (all.empty()) throw SpecError("no fixture named '" + filter + "'");
    if (!c.json_path.empty()) write_json(c, all);
    for (const auto& f : failed) std::printf("failed: %s\n", f.c_str());
    return failed.empty() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Yang-Baxter deformed Fock spaces: construction and verification"};
    app.require_subcommand(1);
    Common common;
    std::string artifact, filter;
    int level = -1;

    auto* check = app.add_subcommand("check", "run the full check suite");
    add_common(check, common);
    auto* emit = app.add_subcommand("emit", "write one artifact as JSON");
    add_common(emit, common);
    emit->add_option("what", artifact, "P_n | proj_n | T | T_tilde | fock_basis")->required();
    emit->add_option("--n", level, "level for P_n, proj_n, fock_basis");
    auto* rel = app.add_subcommand("relations", "discover and print commutation relations");
    add_common(rel, common);
    auto* fix = app.add_subcommand("fixtures", "run the built-in examples");
    add_common(fix, common);
    fix->add_option("filter", filter, "run only this fixture");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*check) return cmd_check(common);
        if (*emit) return cmd_emit(common, artifact, level);
        if (*rel) return cmd_relations(common);
        if (*fix) return cmd_fixtures(common, filter);
    } catch (const SpecError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const SizeError& e) {
        std::cerr << "size budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const YbeViolation& e) {
        std::cerr << "braid relation fails: " << e.what() << "\n";
        return 1;
    } catch (const VerificationFailure& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
