#include "fockforge/verification.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

namespace fockforge {

using nlohmann::json;

bool VerificationRun::passed() const {
    for (const auto& c : checks)
        if (c.gating && !c.skipped && !c.pass) return false;
    return true;
}

std::vector<std::string> VerificationRun::failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (c.gating && !c.skipped && !c.pass) out.push_back(c.name);
    return out;
}

json VerificationRun::to_json() const {
    json j;
    j["header"] = header;
    json cs = json::array();
    for (const auto& c : checks) {
        json e{{"name", c.name}, {"residual", c.residual}, {"tol", c.tol}, {"pass", c.pass}};
        if (c.skipped) e["skipped"] = true;
        if (!c.gating) e["gating"] = false;
        if (!c.note.empty()) e["note"] = c.note;
        cs.push_back(std::move(e));
    }
    j["checks"] = cs;
    j["relations"] = fockforge::to_json(relations);
    j["passed"] = passed();
    return j;
}

std::string summary_text(const VerificationRun& run) {
    std::string out;
    char buf[512];
    for (const auto& c : run.checks) {
        const char* tag = c.skipped ? "skip" : (c.pass ? "pass" : (c.gating ? "FAIL" : "info"));
        std::snprintf(buf, sizeof buf, "[%s] %-44s residual %.3e  tol %.1e%s%s\n", tag, c.name.c_str(), c.residual,
                      c.tol, c.note.empty() ? "" : "  ", c.note.c_str());
        out += buf;
    }
    return out;
}

namespace {

class Recorder {
public:
    explicit Recorder(VerificationRun& run) : run_(run) {}

    CheckResult& add(std::string name, double residual, double tol, std::string note = {}) {
        CheckResult c;
        c.name = std::move(name);
        c.residual = residual;
        c.tol = tol;
        c.pass = std::isfinite(residual) && residual <= tol;
        c.note = std::move(note);
        run_.checks.push_back(std::move(c));
        return run_.checks.back();
    }

    void info(std::string name, double residual, double tol, std::string note = {}) {
        add(std::move(name), residual, tol, std::move(note)).gating = false;
    }

    void skip(std::string name, std::string reason) {
        CheckResult c;
        c.name = std::move(name);
        c.skipped = true;
        c.note = std::move(reason);
        run_.checks.push_back(std::move(c));
    }

    void flag(std::string name, bool ok, std::string note = {}) { add(std::move(name), ok ? 0.0 : 1.0, 0.0, std::move(note)); }

private:
    VerificationRun& run_;
};

std::string at_n(const char* name, int n) { return std::string(name) + "[n=" + std::to_string(n) + "]"; }

double factorial(int n) {
    double f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

CVector random_vector(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
    return v;
}

void relation_checks(Recorder& rec, VerificationRun& run, const DeformationOperator& d, const FockTruncation& tr,
                     double tol, const RunOptions& opt, std::mt19937_64& rng) {
    const int h = d.h_dim;
    if (tr.n_max < 2) {
        rec.skip("main_relation", "n_max < 2");
        return;
    }
    double gap = 0, main = 0;
    for (int s = 0; s < opt.random_pairs; ++s) {
        const CVector f = random_vector(h, rng), g = random_vector(h, rng);
        gap = std::max(gap, a_minus_path_gap(f, tr));
        main = std::max(main, verify_main_relation(d, tr, f, g, tol).residual);
    }
    rec.add("annihilation_paths_agree", gap, tol);
    rec.add("main_relation", main, tol, std::to_string(opt.random_pairs) + " random pairs");

    auto push = [&](const std::vector<RelationReport>& rs) {
        for (const auto& r : rs) {
            rec.add(r.relation_id, r.residual, r.relation_id == "pair_nonzero_complement" ? 0.0 : tol);
            if (opt.keep_relations) run.relations.push_back(r);
        }
    };
    push(verify_pair_relations(d, tr, tol));
    push(verify_basis_relations(d, tr, tol));
    push(verify_pair_adjoints(tr, random_vector(static_cast<Index>(h) * h, rng), tol));
}

void multi_checks(Recorder& rec, VerificationRun& run, const MultiSpec& ms, const DeformationOperator& d,
                  const FockTruncation& tr, double tol, const RunOptions& opt, std::mt19937_64& rng) {
    const SiteModel& s = ms.sites;
    if (tr.n_max >= 2)
        rec.add("pair_projection_assembly", op_norm(assembled_projection(ms) - tr.proj[2]), tol);
    rec.add("ker_one_plus_T_constructive", check_ker_one_plus_T(ms, d), tol);
    rec.add("shuffled_block_assembly", shuffled_assembly_residual(ms, d), tol);
    double bij = 0, equiv = 0;
    for (int x = 0; x < s.n_sites; ++x)
        for (int y = 0; y < s.n_sites; ++y) {
            if (x == y) continue;
            const CMatrix c = rule_block(ms, x, y);
            bij = std::max(bij, kernel_bijection_residual(c, ms.tol));
            // Members built as u = Cv + (1 - CC^*)w must pass both directions; random pairs
            // must get matching verdicts.
            const Index m2 = c.rows();
            const CVector v = random_vector(m2, rng), w = random_vector(m2, rng);
            const CVector u = c * v + (identity(m2) - c * c.adjoint()) * w;
            const auto in = range_condition_pair(c, u, v, ms.tol);
            equiv = std::max({equiv, in.first, in.second});
            const auto out = range_condition_pair(c, random_vector(m2, rng), v, ms.tol);
            if ((out.first <= 1e-9) != (out.second <= 1e-9)) equiv = std::max(equiv, 1.0);
        }
    rec.add("kernel_bijection", bij, 1e-9);
    rec.add("range_condition_equivalence", equiv, 1e-9);
    double leak = 0;
    for (int n = 2; n <= std::min(tr.n_max, 3); ++n) leak = std::max(leak, sector_leakage(s, d, n));
    rec.add("distinct_sector_invariance", leak, 0.0);

    bool agree = true, orient = true;
    double member_res = 0;
    for (int n = 2; n <= std::min(tr.n_max, s.n_sites); ++n) {
        const auto idx = distinct_sector(s, n);
        const FockLevel& lv = tr.level(n);
        CVector r = CVector::Zero(lv.p_n.rows());
        const CVector vals = random_vector(static_cast<Index>(idx.size()), rng);
        for (std::size_t k = 0; k < idx.size(); ++k) r(idx[k]) = vals(static_cast<Index>(k));
        const CVector member = tr.proj[n] * r;
        const MultiMembership a = check_membership_multicomponent(ms, d, lv, member, tol);
        const MultiMembership b = check_membership_multicomponent(ms, d, lv, r, tol);
        member_res = std::max({member_res, a.residual_ordered, a.residual_reversed});
        agree = agree && a.agrees_with_t && b.agrees_with_t && a.member;
        orient = orient && a.orientations_agree && b.orientations_agree;
    }
    rec.add("pointwise_membership_of_projected", member_res, tol);
    rec.flag("pointwise_membership_matches_T", agree);
    rec.flag("pointwise_membership_orientations_agree", orient);

    if (tr.n_max < 2) return;
    const auto reps = relation_discovery(ms, d, tr, 1e-9);
    std::map<std::string, double> worst;
    std::map<std::string, int> count;
    for (const auto& r : reps) {
        worst[r.relation_id] = std::max(worst[r.relation_id], r.residual);
        ++count[r.relation_id];
        if (opt.keep_relations) run.relations.push_back(r);
    }
    for (const char* fam : {"annihilation_creation", "creation_exchange", "annihilation_exchange", "contact"})
        if (count.count(fam))
            rec.add(std::string("discovered_") + fam, worst[fam], tol, std::to_string(count[fam]) + " instances");
        else
            rec.skip(std::string("discovered_") + fam, "no instances (kernel of 1 - CC^* is trivial)");
}

} // namespace

VerificationRun run_checks(const LoadedSpec& spec, const RunOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    VerificationRun run;
    Recorder rec(run);
    const double tol = spec.tol;
    run.header = spec_to_json(spec);
    run.header["threads"] = opt.threads;
    run.header["seed"] = opt.seed;
    run.header["random_pairs"] = opt.random_pairs;
    std::mt19937_64 rng(opt.seed);

    const DeformationOperator d = spec_deformation(spec);
    rec.add("self_adjoint", d.hermitian_residual, tol);
    rec.add("contraction", std::max(0.0, d.norm - 1.0), tol, "norm " + std::to_string(d.norm));
    rec.add("braid_relation", d.ybe_residual, tol);
    if (spec.is_multi()) {
        if (spec.multi.sites.n_sites >= 3) {
            const double q = check_spectral_qybe(spec.multi);
            rec.add("spectral_qybe", q, tol);
            rec.flag("qybe_tests_agree", (q <= tol) == d.ybe,
                     "pointwise and operator-level braid tests give the same verdict");
        } else {
            rec.skip("spectral_qybe", "fewer than three sites");
        }
    }
    if (!d.ybe) {
        bool refused = false;
        try {
            t_sigma(d, 2, reduced_word({2, 1}));
        } catch (const YbeViolation&) {
            refused = true;
        }
        rec.add("t_sigma_refused", refused ? 0.0 : 1.0, 0.0, "T_sigma is undefined without the braid relation")
            .gating = false;
        rec.skip("fock_levels", "braid relation fails; P_n is not defined");
        run.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return run;
    }

    const FockTruncation tr = build_truncation(d, spec.n_max, spec.rank_tol, opt.threads, opt.budget);
    for (int n = 2; n <= spec.n_max; ++n) {
        const FockLevel& lv = tr.level(n);
        rec.add(at_n("positivity", n), std::max(0.0, -lv.min_eigenvalue / lv.lambda_max), 1e-9,
                "dim F_n = " + std::to_string(lv.subspace.dim()));
        if (d.norm < 1.0 - 1e-12) rec.add(at_n("strict_positivity", n), lv.max_dropped, 0.0);
        const CMatrix rec_p = p_n_recursive(d, n, opt.budget);
        rec.add(at_n("recursion_matches_sum", n), (lv.p_n - rec_p).norm(), 1e-9 * factorial(n));
        rec.add(at_n("gram_identity", n), gram_identity_residual(lv), tol);
        rec.add(at_n("kernel_sum", n), check_kernel_sum_formula(d, lv), tol);
        if (n >= 3) {
            rec.add(at_n("range_intersection", n), check_range_intersection(d, lv), tol);
            const ParallelSumReport ps = check_parallel_sum_prop(d, tr.levels, n);
            rec.add(at_n("parallel_sum", n), ps.parallel_sum, tol);
            rec.add(at_n("projection_factorization", n), ps.factorization, tol);
        }
        const CVector r = random_vector(lv.p_n.rows(), rng);
        const MembershipVerdict in = check_membership_theorem(d, lv, tr.proj[n] * r, tol);
        const MembershipVerdict out = check_membership_theorem(d, lv, r, tol);
        rec.flag(at_n("membership_theorem", n), in.agree() && in.direct && out.agree());
    }
    rec.add("kerrT_lemma", check_kerrT_lemma(d, spec.rank_tol), tol);
    relation_checks(rec, run, d, tr, tol, opt, rng);
    if (spec.is_multi()) multi_checks(rec, run, spec.multi, d, tr, tol, opt, rng);
    run.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

VerificationRun run_fixture(FixtureId id, const FixtureParams& p, const RunOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const LoadedSpec spec = fixture_loaded(id, p);
    VerificationRun run = run_checks(spec, opt);
    run.header["fixture"] = params_to_json(id, p);
    Recorder rec(run);
    const MultiSpec& ms = spec.multi;
    const CMatrix& c = ms.rule.c;

    if (id == FixtureId::ex_kq || id == FixtureId::ex_pw || id == FixtureId::ex_offdiag) {
        const GoldenSpans g = golden_spans(id, p);
        const CMatrix defect = identity(4) - c * c.adjoint();
        rec.add("displayed_kernel", subspace_distance(kernel_basis(defect, p.rank_tol), g.ker), 1e-8);
        rec.add("displayed_range", subspace_distance(range_basis(defect, p.rank_tol), g.ran), 1e-8);
    }
    const ShuffledOperators sh = shuffled_C(ms.sites.n_sites >= 2 ? rule_block(ms, 0, 1) : c, 2);
    switch (id) {
    case FixtureId::ex_kq:
        rec.add("shuffle_is_conjugate", max_abs_diff(sh.t_tilde, c.conjugate()), 1e-12,
                "C~ equals C with conjugated entries");
        break;
    case FixtureId::ex_pw:
        rec.add("shuffle_matches_display", max_abs_diff(sh.t_tilde.transpose(), pw_tilde_display(p.mu)), 1e-12);
        break;
    case FixtureId::ex_offdiag:
        rec.add("shuffle_matches_display", max_abs_diff(sh.t_tilde.transpose(), offdiag_tilde_display(p.k, p.q)),
                1e-12);
        break;
    case FixtureId::ex_anyon4:
        rec.add("shuffle_transpose_identity", max_abs_diff(c, sh.t_tilde.transpose()), 1e-12, "C = C~^T");
        rec.add("shuffle_adjoint_identity", max_abs_diff(c.adjoint(), CMatrix(sh.t_tilde.adjoint()).transpose()),
                1e-12, "C^* = (C~^*)^T");
        break;
    case FixtureId::ex_spatial: break;
    }

    if (spec.n_max >= 2) {
        const DeformationOperator d = build_T(ms);
        const FockTruncation tr = build_truncation(d, spec.n_max, spec.rank_tol, opt.threads, opt.budget);
        const PointOperators ops = point_operators(ms.sites, tr);
        auto table = [&](ExchangeReading reading, const std::string& prefix, bool gating) {
            for (const auto& rel : printed_relations(id, ms, reading)) {
                const PrintedCheck pc = check_printed(ops, tr, rel, 1e-9);
                std::string note = rel.text;
                if (pc.fitted_available && std::abs(pc.fitted - pc.displayed) > 1e-9)
                    note += "  [fitted " + format_coef(pc.fitted) + " vs displayed " + format_coef(pc.displayed) + "]";
                CheckResult& cr = rec.add(prefix + rel.label, pc.report.residual, 1e-9, note);
                cr.gating = gating;
                RelationReport r = pc.report;
                r.relation_id = prefix + r.relation_id;
                run.relations.push_back(r);
                if (rel.condition && pc.off_condition >= 0)
                    rec.info(prefix + rel.label + "_outside_condition", pc.off_condition, 1e-9,
                             "expected to fail where " + rel.condition_text + " does not hold");
            }
        };
        if (id == FixtureId::ex_spatial) {
            table(ExchangeReading::Reversed, "table_", true);
            table(ExchangeReading::AsDisplayed, "table_as_displayed_", false);
        } else {
            // The anyon table is reported, not asserted: its mixed-component coefficients
            // depend on how the displayed C is oriented.
            table(ExchangeReading::AsDisplayed, "table_", id != FixtureId::ex_anyon4);
        }
    }

    if (id == FixtureId::ex_anyon4 || ms.rule.kind == RuleKind::SignSplit) {
        const DeformationOperator d = build_T(ms);
        for (int n = 2; n <= std::min(spec.n_max, ms.sites.n_sites); ++n) {
            const SectorLevel sl = sector_level(ms.sites, d, n, spec.rank_tol);
            rec.add(at_n("sector_projection_is_Pn_over_factorial", n), sector_unitary_residual(sl), 1e-9);
            rec.add(at_n("sector_fixed_points", n), sector_fixed_point_distance(sl, spec.rank_tol), 1e-8);
        }
        const SectorLevel s2 = sector_level(ms.sites, d, 2, spec.rank_tol);
        const CMatrix t = s2.t_local.at(0);
        rec.add("sector_T_squared_identity", max_abs_diff(t * t, identity(t.rows())), 1e-12);
    }

    if (id == FixtureId::ex_kq) {
        const RealizationReport rr = realization_check(p, 2, 3);
        rec.info("realization_as_displayed", rr.literal_vs_displayed, 1e-9, "U = q^n against Q(1,2) = conj q");
        rec.add("realization_empirical_orientation",
                std::min(rr.literal_vs_displayed, rr.literal_vs_conjugate), 1e-9, rr.orientation);
        rec.add("realization_conjugate_phase", rr.conjugate_vs_displayed, 1e-9, "U = conj(q)^n against Q(1,2) = conj q");

        FixtureParams small = p;
        small.n_sites = 2;
        small.n_max = 4;
        const MultiSpec s2 = fixture_spec(FixtureId::ex_kq, small);
        const FockTruncation tr = build_truncation(build_T(s2), small.n_max, p.rank_tol, opt.threads, opt.budget);
        const auto series = norm_ratio_series(s2.sites, tr, CVector::Ones(2));
        const double bound = 1.0 / std::sqrt(1.0 - p.k);
        double excess = 0, drop = 0;
        for (std::size_t i = 0; i < series.size(); ++i) {
            excess = std::max(excess, series[i] - bound);
            if (i) drop = std::max(drop, series[i - 1] - series[i]);
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "ratio at n_max=%zu: %.6f", series.size(), series.back());
        rec.add("norm_ratio_below_bound", std::max(0.0, excess), 1e-8, buf);
        rec.add("norm_ratio_nondecreasing", drop, 0.0);
    }
    run.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

} // namespace fockforge
