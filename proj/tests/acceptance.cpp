// Acceptance gate: one line per criterion, exit status 1 if any criterion fails.
// Sizes: every fixture on 3 sites with n <= 3 and on 2 sites with n <= 4 (m = 2).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fockforge/verification.hpp"

using namespace fockforge;

namespace {

// Pinned tolerances.
constexpr double kPositivity = 1e-9;       // relative to lambda_max
constexpr double kOracle = 1e-9;           // times n!
constexpr double kSubspace = 1e-8;
constexpr double kRelation = 1e-9;
constexpr double kNonzero = 1e-3;
constexpr double kEntry = 1e-12;
constexpr double kUnitary = 1e-9;
constexpr double kBound = 1e-8;
constexpr double kRankTol = 1e-9;
constexpr int kRandomPairs = 20;

struct Criterion {
    int id;
    std::string title;
    double worst = 0;
    double tol = 0;
    bool pass = true;
    std::string detail;

    void residual(double r, double t) {
        worst = std::max(worst, r);
        tol = t;
        if (!(std::isfinite(r) && r <= t)) pass = false;
    }
    void require(bool ok, const std::string& why) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += why;
        }
    }
};

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

struct Case {
    FixtureId id;
    MultiSpec spec;
    DeformationOperator d;
    FockTruncation tr;
};

Case make_case(FixtureId id, int n_sites, int n_max) {
    FixtureParams p = default_params();
    p.n_sites = n_sites;
    p.n_max = n_max;
    Case c{id, fixture_spec(id, p), {}, {}};
    c.d = build_T(c.spec);
    c.tr = build_truncation(c.d, n_max, kRankTol, default_thread_count());
    return c;
}

// q-Fock on C^2: T = qF with q = 0.5, the one case in the suite with ||T|| < 1.
DeformationOperator q_fock(double q) {
    CMatrix t = CMatrix::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) t(i * 2 + j, j * 2 + i) = q;
    return make_deformation(t, 2);
}

// SignSplit rule on m = 3 with C e_w (x) e_u = phase(u,w) e_u (x) e_w; unitary and braided.
MultiSpec phase_sign_split(int n_sites) {
    const int m = 3;
    CMatrix c = CMatrix::Zero(m * m, m * m);
    for (int u = 0; u < m; ++u)
        for (int w = 0; w < m; ++w) c(u * m + w, w * m + u) = std::polar(1.0, std::acos(-1.0) * (u + 2 * w + 1) / 7.0);
    MultiSpec s;
    s.sites = {n_sites, m};
    s.rule.kind = RuleKind::SignSplit;
    s.rule.c = c;
    return s;
}

void print(const Criterion& c) {
    std::printf("criterion %2d %-34s %s  worst %.3e  tol %.1e%s%s\n", c.id, c.title.c_str(), c.pass ? "PASS" : "FAIL",
                c.worst, c.tol, c.detail.empty() ? "" : "  ", c.detail.c_str());
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240611);
    const FixtureParams params = default_params();

    std::vector<Case> three, two;
    for (FixtureId id : all_fixtures()) {
        three.push_back(make_case(id, 3, 3));
        two.push_back(make_case(id, 2, 4));
    }
    // (case, n) pairs covering n = 2..4.
    std::vector<std::pair<const Case*, int>> levels;
    for (const Case& c : three)
        for (int n = 2; n <= 3; ++n) levels.push_back({&c, n});
    for (const Case& c : two) levels.push_back({&c, 4});

    std::vector<Criterion> out;

    {
        Criterion c{1, "positivity of P_n"};
        for (auto [cs, n] : levels) {
            const FockLevel& lv = cs->tr.level(n);
            c.residual(std::max(0.0, -lv.min_eigenvalue / lv.lambda_max), kPositivity);
        }
        const DeformationOperator q = q_fock(0.5);
        const FockTruncation tq = build_truncation(q, 4, kRankTol);
        for (int n = 2; n <= 4; ++n) {
            const FockLevel& lv = tq.level(n);
            c.residual(std::max(0.0, -lv.min_eigenvalue / lv.lambda_max), kPositivity);
            c.require(lv.min_eigenvalue > 0 && lv.subspace.dim() == lv.p_n.rows(),
                      "P_" + std::to_string(n) + " not strictly positive for ||T|| < 1");
        }
        out.push_back(c);
    }
    {
        Criterion c{2, "direct sum equals recursion"};
        for (auto [cs, n] : levels) {
            const CMatrix rec = p_n_recursive(cs->d, n);
            c.residual((cs->tr.level(n).p_n - rec).norm() / factorial(n), kOracle);
        }
        out.push_back(c);
    }
    {
        Criterion c{3, "ker P_n = sum of ker(1+T_i)"};
        for (auto [cs, n] : levels) c.residual(check_kernel_sum_formula(cs->d, cs->tr.level(n)), kSubspace);
        out.push_back(c);
    }
    {
        Criterion c{4, "parallel sum and factorization"};
        for (auto [cs, n] : levels) {
            if (n < 3) continue;
            const ParallelSumReport r = check_parallel_sum_prop(cs->d, cs->tr.levels, n);
            c.residual(std::max({r.parallel_sum, r.factorization, r.q1_defect, r.q2_defect}), kSubspace);
        }
        out.push_back(c);
    }
    {
        Criterion c{5, "main commutation relation"};
        for (const Case& cs : three)
            for (int s = 0; s < kRandomPairs; ++s) {
                const CVector f = random_vector(cs.d.h_dim, rng), g = random_vector(cs.d.h_dim, rng);
                c.residual(verify_main_relation(cs.d, cs.tr, f, g, kRelation).residual, kRelation);
            }
        c.detail = std::to_string(kRandomPairs) + " pairs per fixture, interior blocks";
        out.push_back(c);
    }
    {
        Criterion c{6, "a++ kernel and complement"};
        double smallest = 1e300;
        for (const Case& cs : three)
            for (const RelationReport& r : verify_pair_relations(cs.d, cs.tr, kRelation)) {
                if (r.relation_id == "pair_annihilated_kernel") c.residual(r.residual, kRelation);
                if (r.relation_id == "pair_nonzero_complement")
                    smallest = std::min(smallest, r.inputs.at("min_norm").get<double>());
            }
        char buf[96];
        std::snprintf(buf, sizeof buf, "min ||a++(f2)|| off the kernel %.3f (>= %.0e)", smallest, kNonzero);
        c.detail = buf;
        c.require(smallest >= kNonzero, "a++ too small off ker(1+T)");
        out.push_back(c);
    }
    {
        Criterion c{7, "golden kernels, ranges, reshuffles"};
        for (FixtureId id : {FixtureId::ex_kq, FixtureId::ex_pw}) {
            const CMatrix cm = fixture_spec(id, params).rule.c;
            const GoldenSpans g = golden_spans(id, params);
            const CMatrix defect = identity(4) - cm * cm.adjoint();
            c.residual(subspace_distance(kernel_basis(defect, kRankTol), g.ker), kSubspace);
            c.residual(subspace_distance(range_basis(defect, kRankTol), g.ran), kSubspace);
        }
        double entry = 0;
        const CMatrix kq = fixture_spec(FixtureId::ex_kq, params).rule.c;
        entry = std::max(entry, max_abs_diff(shuffled_C(kq, 2).t_tilde, kq.conjugate()));
        const CMatrix pw = fixture_spec(FixtureId::ex_pw, params).rule.c;
        entry = std::max(entry, max_abs_diff(shuffled_C(pw, 2).t_tilde.transpose(), pw_tilde_display(params.mu)));
        char buf[64];
        std::snprintf(buf, sizeof buf, "reshuffle entries %.1e (tol %.0e)", entry, kEntry);
        c.detail = buf;
        c.require(entry <= kEntry, "reshuffled C does not match");
        out.push_back(c);
    }
    {
        Criterion c{8, "relation tables"};
        int count = 0;
        double displayed_spatial = 0;
        for (const Case& cs : three) {
            if (cs.id != FixtureId::ex_kq && cs.id != FixtureId::ex_offdiag && cs.id != FixtureId::ex_spatial) continue;
            const PointOperators ops = point_operators(cs.spec.sites, cs.tr);
            const auto reading = cs.id == FixtureId::ex_spatial ? ExchangeReading::Reversed : ExchangeReading::AsDisplayed;
            for (const PrintedRelation& rel : printed_relations(cs.id, cs.spec, reading)) {
                const PrintedCheck pc = check_printed(ops, cs.tr, rel, kRelation);
                c.residual(pc.report.residual, kRelation);
                ++count;
            }
            if (cs.id == FixtureId::ex_spatial)
                for (const PrintedRelation& rel : printed_relations(cs.id, cs.spec, ExchangeReading::AsDisplayed))
                    displayed_spatial =
                        std::max(displayed_spatial, check_printed(ops, cs.tr, rel, kRelation).report.residual);
        }
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "%d relations; spatial exchanges read with Q(y,x), literal Q(x,y) reading gives %.2e", count,
                      displayed_spatial);
        c.detail = buf;
        out.push_back(c);
    }
    {
        Criterion c{9, "unitary regime"};
        FixtureParams p4 = params;
        p4.n_sites = 4;
        std::vector<MultiSpec> specs = {fixture_spec(FixtureId::ex_anyon4, p4), phase_sign_split(3)};
        for (const MultiSpec& s : specs) {
            const DeformationOperator d = build_T(s);
            c.require(d.ybe, "braid relation fails for a unitary rule");
            const int top = std::min(4, s.sites.n_sites);
            for (int n = 2; n <= top; ++n) {
                const SectorLevel sl = sector_level(s.sites, d, n, kRankTol);
                c.residual(sector_unitary_residual(sl), kUnitary);
                c.residual(sector_fixed_point_distance(sl, kRankTol), kSubspace);
            }
        }
        c.detail = "anyon rule on 4 sites, n <= 4; m = 3 phase rule on 3 sites";
        out.push_back(c);
    }
    {
        Criterion c{10, "norm bound and realization"};
        FixtureParams small = params;
        small.n_sites = 2;
        small.n_max = 4;
        const MultiSpec s2 = fixture_spec(FixtureId::ex_kq, small);
        const FockTruncation tr = build_truncation(build_T(s2), small.n_max, kRankTol);
        const auto series = norm_ratio_series(s2.sites, tr, CVector::Ones(2));
        const double bound = 1.0 / std::sqrt(1.0 - params.k);
        for (std::size_t i = 0; i < series.size(); ++i) {
            c.residual(std::max(0.0, series[i] - bound), kBound);
            if (i) c.require(series[i] >= series[i - 1], "norm ratio decreases");
        }
        const RealizationReport rr = realization_check(params, 2, 3);
        c.residual(std::min(rr.literal_vs_displayed, rr.literal_vs_conjugate), kRelation);
        char buf[200];
        std::snprintf(buf, sizeof buf, "ratio %.6f at n_max=%zu, bound %.6f; %s", series.back(), series.size(), bound,
                      rr.orientation.c_str());
        c.detail = buf;
        out.push_back(c);
    }

    bool all = true;
    for (const Criterion& c : out) {
        print(c);
        all = all && c.pass;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s (%zu criteria, %.1f s)\n", all ? "ACCEPTED" : "REJECTED", out.size(), secs);
    return all ? 0 : 1;
}
