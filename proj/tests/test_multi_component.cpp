#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fockforge/fixtures.hpp"

using namespace fockforge;

namespace {

CVector random_vector(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
    return v;
}

// T = R^* [sum_{x != y} |x><y| (x) |y><x| (x) C_{x,y}] R, with R reordering
// (site1, u1, site2, u2) -> (site1, site2, u1, u2).
CMatrix t_oracle(const MultiSpec& s) {
    const int n = s.sites.n_sites, m = s.sites.internal_dim;
    const Index h = s.sites.h_dim();
    CMatrix inner = CMatrix::Zero(h * h, h * h);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y) continue;
            CMatrix exy = CMatrix::Zero(n, n), eyx = CMatrix::Zero(n, n);
            exy(x, y) = 1;
            eyx(y, x) = 1;
            inner += kron(kron(exy, eyx), rule_block(s, x, y));
        }
    CMatrix r = CMatrix::Zero(h * h, h * h);
    for (int s1 = 0; s1 < n; ++s1)
        for (int u1 = 0; u1 < m; ++u1)
            for (int s2 = 0; s2 < n; ++s2)
                for (int u2 = 0; u2 < m; ++u2)
                    r(((s1 * n + s2) * m + u1) * m + u2, ((s1 * m + u1) * n + s2) * m + u2) = 1;
    return r.adjoint() * inner * r;
}

MultiSpec per_pair_random(int n_sites, unsigned seed) {
    std::mt19937_64 rng(seed);
    MultiSpec s;
    s.sites = {n_sites, 2};
    s.rule.kind = RuleKind::PerPair;
    for (int x = 0; x < n_sites; ++x)
        for (int y = x + 1; y < n_sites; ++y) {
            CMatrix c(4, 4);
            for (Index j = 0; j < 4; ++j) c.col(j) = random_vector(4, rng);
            s.rule.per_pair[{x, y}] = c / (1.1 * op_norm(c));
        }
    return s;
}

} // namespace

TEST_CASE("T assembled from blocks matches the tensor-product oracle") {
    FixtureParams p = default_params();
    for (FixtureId id : all_fixtures()) {
        const MultiSpec s = fixture_spec(id, p);
        INFO(fixture_name(id));
        CHECK(max_abs_diff(build_t_matrix(s), t_oracle(s)) < 1e-15);
    }
    const MultiSpec r = per_pair_random(3, 9);
    CHECK(max_abs_diff(build_t_matrix(r), t_oracle(r)) < 1e-15);
}

TEST_CASE("coinciding sites are mapped to zero") {
    const MultiSpec s = fixture_spec(FixtureId::ex_kq, default_params());
    const CMatrix t = build_t_matrix(s);
    const int h = s.sites.h_dim();
    for (int x = 0; x < s.sites.n_sites; ++x)
        for (int u = 0; u < 2; ++u)
            for (int w = 0; w < 2; ++w) {
                const Index k = s.sites.index(x, u) * h + s.sites.index(x, w);
                CHECK(t.col(k).norm() == 0.0);
                CHECK(t.row(k).norm() == 0.0);
            }
}

TEST_CASE("rule kinds and Hermitian extension") {
    CHECK(rule_kind_from("SignSplit") == RuleKind::SignSplit);
    CHECK(to_string(RuleKind::ScalarPair) == "ScalarPair");
    CHECK_THROWS_AS(rule_kind_from("Diagonal"), SpecError);

    const MultiSpec sp = fixture_spec(FixtureId::ex_spatial, default_params());
    CHECK(scalar_q1(sp, 2, 0) == std::conj(scalar_q1(sp, 0, 2)));
    CHECK(max_abs_diff(rule_block(sp, 1, 0), rule_block(sp, 0, 1).adjoint()) < 1e-15);
    CHECK(in_y_sector(sp, 0, 1));
    CHECK_FALSE(in_y_sector(sp, 0, 2));
    CHECK_THROWS_AS(rule_block(sp, 1, 1), ContractViolation);

    const MultiSpec an = fixture_spec(FixtureId::ex_anyon4, default_params());
    CHECK(max_abs_diff(rule_block(an, 2, 1), an.rule.c.adjoint()) == 0.0);
    CHECK(max_abs_diff(scalar_pair_block(2.0, 3.0).diagonal(), CVector((CVector(4) << 0, 3, 3, 0).finished())) == 0);
}

TEST_CASE("validation rejects bad rules") {
    MultiSpec s = fixture_spec(FixtureId::ex_kq, default_params());
    s.rule.c *= 1.5;
    CHECK_THROWS_AS(validate(s), SpecError);

    MultiSpec nsa = fixture_spec(FixtureId::ex_kq, default_params());
    nsa.rule.c(0, 1) = 0.3;   // Constant rules must be self-adjoint
    CHECK_THROWS_AS(validate(nsa), SpecError);

    MultiSpec missing = fixture_spec(FixtureId::ex_spatial, default_params());
    missing.rule.q1.erase({0, 2});
    CHECK_THROWS_AS(validate(missing), SpecError);

    MultiSpec shape = per_pair_random(3, 1);
    shape.rule.per_pair[{0, 1}] = CMatrix::Identity(3, 3);
    CHECK_THROWS_AS(validate(shape), SpecError);
}

TEST_CASE("pointwise and operator braid tests agree") {
    for (FixtureId id : all_fixtures()) {
        const MultiSpec s = fixture_spec(id, default_params());
        CHECK(check_spectral_qybe(s) < 1e-12);
        CHECK(build_T(s).ybe);
    }
    const MultiSpec r = per_pair_random(3, 4);
    CHECK(check_spectral_qybe(r) > 1e-3);
    CHECK_FALSE(build_T(r).ybe);
}

TEST_CASE("pair projections assemble PP_2") {
    for (FixtureId id : all_fixtures()) {
        const MultiSpec s = fixture_spec(id, default_params());
        const DeformationOperator d = build_T(s);
        const FockTruncation tr = build_truncation(d, 2);
        INFO(fixture_name(id));
        CHECK(op_norm(assembled_projection(s) - tr.proj[2]) < 1e-10);
        CHECK(check_ker_one_plus_T(s, d) < 1e-10);
        CHECK(shuffled_assembly_residual(s, d) < 1e-12);
    }
    CHECK_THROWS_AS(pair_projection(fixture_spec(FixtureId::ex_kq, default_params()), 1, 0), ContractViolation);
}

TEST_CASE("kernel bijection and range condition") {
    std::mt19937_64 rng(8);
    const MultiSpec s = per_pair_random(2, 5);
    const CMatrix c = rule_block(s, 0, 1);
    CHECK(kernel_bijection_residual(c) < 1e-10);
    const CMatrix kq = fixture_spec(FixtureId::ex_kq, default_params()).rule.c;
    CHECK(kernel_bijection_residual(kq) < 1e-12);
    const CVector v = random_vector(4, rng), w = random_vector(4, rng);
    const CVector u = kq * v + (identity(4) - kq * kq.adjoint()) * w;
    const auto in = range_condition_pair(kq, u, v);
    CHECK(in.first < 1e-12);
    CHECK(in.second < 1e-12);
}

TEST_CASE("distinct-site sector") {
    const SiteModel sites{3, 2};
    CHECK(distinct_sector(sites, 2).size() == 6 * 4);
    CHECK(distinct_sector(sites, 3).size() == 6 * 8);
    CHECK(distinct_sector(sites, 4).empty());
    const DeformationOperator d = build_T(fixture_spec(FixtureId::ex_spatial, default_params()));
    CHECK(sector_leakage(sites, d, 2) == 0.0);
    CHECK(sector_leakage(sites, d, 3) == 0.0);
}

TEST_CASE("unitary rules: sector projection is P_n / n! onto fixed points") {
    FixtureParams p = default_params();
    p.n_sites = 3;
    const MultiSpec s = fixture_spec(FixtureId::ex_anyon4, p);
    const DeformationOperator d = build_T(s);
    for (int n = 2; n <= 3; ++n) {
        const SectorLevel sl = sector_level(s.sites, d, n);
        CHECK(sl.indices.size() == distinct_sector(s.sites, n).size());
        CHECK(sector_unitary_residual(sl) < 1e-10);
        CHECK(sector_fixed_point_distance(sl) < 1e-8);
    }
}

TEST_CASE("pointwise membership agrees with T") {
    std::mt19937_64 rng(6);
    const MultiSpec s = fixture_spec(FixtureId::ex_offdiag, default_params());
    const DeformationOperator d = build_T(s);
    const FockTruncation tr = build_truncation(d, 3);
    const auto idx = distinct_sector(s.sites, 3);
    CVector r = CVector::Zero(tr.level(3).p_n.rows());
    for (Index k : idx) r(k) = random_vector(1, rng)(0);
    const MultiMembership in = check_membership_multicomponent(s, d, tr.level(3), tr.proj[3] * r);
    const MultiMembership out = check_membership_multicomponent(s, d, tr.level(3), r);
    CHECK(in.member);
    CHECK(in.agrees_with_t);
    CHECK_FALSE(out.member);
    CHECK(out.agrees_with_t);
    CVector diag = CVector::Zero(r.size());
    diag(0) = 1;   // both particles on site 0
    CHECK_THROWS_AS(check_membership_multicomponent(s, d, tr.level(3), diag), ContractViolation);
}

TEST_CASE("relation discovery on ex_kq") {
    const MultiSpec s = fixture_spec(FixtureId::ex_kq, default_params());
    const DeformationOperator d = build_T(s);
    const FockTruncation tr = build_truncation(d, 3);
    const auto found = relation_discovery(s, d, tr);
    CHECK(!found.empty());
    int contact = 0;
    for (const auto& r : found) {
        CHECK_MESSAGE(r.pass, r.relation_id, ": ", r.formula);
        if (r.relation_id == "contact") ++contact;
    }
    CHECK(contact == 3 * 4);
}

TEST_CASE("coefficient and monomial formatting") {
    CHECK(format_coef(1.0) == "1");
    CHECK(format_coef(cplx(0, -1)) == "-1i");
    CHECK(format_coef(cplx(0.5, 0.25)) == "(0.5+0.25i)");
    CHECK(format_coef(cplx(1e-14, 2)) == "2i");
    const Monomial t{cplx(-1, 0), {'+', 1, 1}, {'-', 0, 0}};
    CHECK(format_monomial(t) == "-a_2^+(y)a_1^-(x)");
    CHECK(format_terms({}) == "0");
}
