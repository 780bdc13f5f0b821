#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fockforge/fixtures.hpp"

using namespace fockforge;

namespace {

CMatrix flip(int h, cplx q) {
    CMatrix t = CMatrix::Zero(h * h, h * h);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j) t(i * h + j, j * h + i) = q;
    return t;
}

CVector random_vector(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
    return v;
}

double dense_gap(const BlockOperator& a, const BlockOperator& b) { return max_abs_diff(to_dense(a), to_dense(b)); }

} // namespace

TEST_CASE("q-commutation relation for T = qF") {
    std::mt19937_64 rng(1);
    const double q = 0.5;
    const DeformationOperator d = make_deformation(flip(2, q), 2);
    const FockTruncation tr = build_truncation(d, 4);
    for (int s = 0; s < 4; ++s) {
        const CVector f = random_vector(2, rng), g = random_vector(2, rng);
        const BlockOperator lhs = a_minus(f, tr) * a_plus(g, tr) - cplx(q) * (a_plus(g, tr) * a_minus(f, tr));
        const cplx pairing = (f.transpose() * g)(0, 0);   // bilinear, no conjugation
        const BlockOperator rhs = pairing * identity_operator(level_dims(tr));
        CHECK(interior_norm(lhs - rhs) < 1e-12);
        CHECK(verify_main_relation(d, tr, f, g).pass);
    }
}

TEST_CASE("creation norms are q-integers") {
    // ||a^+(e_1)|| from level n to n+1 is sqrt(1 + q + ... + q^n).
    const double q = 0.5;
    const DeformationOperator d = make_deformation(flip(2, q), 2);
    const FockTruncation tr = build_truncation(d, 4);
    const BlockOperator ap = a_plus(basis_vector(2, 0), tr);
    for (int n = 0; n < 4; ++n) {
        const double qint = (1 - std::pow(q, n + 1)) / (1 - q);
        CHECK(op_norm(*ap.find(n + 1, n)) == doctest::Approx(std::sqrt(qint)).epsilon(1e-12));
    }
    CHECK(ap.find(4, 4) == nullptr);
}

TEST_CASE("annihilation is the adjoint of creation through J") {
    std::mt19937_64 rng(2);
    const DeformationOperator d = build_T(fixture_spec(FixtureId::ex_pw, default_params()));
    const FockTruncation tr = build_truncation(d, 3);
    const CVector f = random_vector(d.h_dim, rng);
    CHECK(dense_gap(a_minus(f, tr), adjoint(a_plus(apply_j(f), tr))) < 1e-13);
    CHECK(a_minus_path_gap(f, tr) < 1e-10);
}

TEST_CASE("reshuffle entry patterns") {
    std::mt19937_64 rng(3);
    const int h = 3;
    CMatrix t(h * h, h * h);
    for (Index i = 0; i < t.rows(); ++i) t.col(i) = random_vector(h * h, rng);
    const ShuffledOperators s = shuffled(t, h);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j)
            for (int k = 0; k < h; ++k)
                for (int l = 0; l < h; ++l) {
                    CHECK(s.t_tilde(k * h + l, i * h + j) == t(i * h + k, j * h + l));
                    CHECK(s.t_hat(k * h + l, i * h + j) == std::conj(t(l * h + k, j * h + i)));
                }
}

TEST_CASE("swap_conj is antilinear and swaps factors") {
    CVector f = CVector::Zero(4);
    f(1) = cplx(2, 3);   // e_0 (x) e_1
    const CVector s = swap_conj(f, 2);
    CHECK(s(2) == cplx(2, -3));
    CHECK(s(1) == cplx(0, 0));
    CHECK(swap_conj(cplx(0, 1) * f, 2)(2) == cplx(0, -1) * s(2));
}

TEST_CASE("block operator algebra matches dense algebra") {
    std::mt19937_64 rng(4);
    const DeformationOperator d = build_T(fixture_spec(FixtureId::ex_offdiag, default_params()));
    const FockTruncation tr = build_truncation(d, 3);
    const BlockOperator a = a_plus(random_vector(d.h_dim, rng), tr);
    const BlockOperator b = a_minus(random_vector(d.h_dim, rng), tr);
    CHECK(max_abs_diff(to_dense(a * b), to_dense(a) * to_dense(b)) < 1e-12);
    CHECK(max_abs_diff(to_dense(a + b), to_dense(a) + to_dense(b)) < 1e-15);
    CHECK(dense_gap(adjoint(adjoint(a)), a) == 0.0);
    CHECK(dense_gap(identity_operator(level_dims(tr)) * a, a) < 1e-15);
    CHECK(block_norm(zero_operator(level_dims(tr)), 3) == 0.0);
    BlockOperator bad = zero_operator(level_dims(tr));
    CHECK_THROWS_AS(bad.add_block(0, 1, CMatrix::Zero(2, 2)), ContractViolation);
}

TEST_CASE("pair, basis and adjoint relations hold on every fixture") {
    std::mt19937_64 rng(5);
    FixtureParams p = default_params();
    p.n_sites = 2;
    for (FixtureId id : all_fixtures()) {
        const DeformationOperator d = build_T(fixture_spec(id, p));
        const FockTruncation tr = build_truncation(d, 3);
        INFO(fixture_name(id));
        for (const auto& r : verify_pair_relations(d, tr)) CHECK_MESSAGE(r.pass, r.relation_id);
        for (const auto& r : verify_basis_relations(d, tr)) CHECK_MESSAGE(r.pass, r.relation_id);
        const CVector f2 = random_vector(static_cast<Index>(d.h_dim) * d.h_dim, rng);
        for (const auto& r : verify_pair_adjoints(tr, f2)) CHECK_MESSAGE(r.pass, r.relation_id);
    }
}

TEST_CASE("relation report JSON") {
    RelationReport r{"main", "a-a+ = ...", {{"seed", 1}}, 1e-15, true};
    const auto j = to_json(r);
    CHECK(j.at("relation_id") == "main");
    CHECK(j.at("pass") == true);
    CHECK(j.contains("formula"));
    CHECK(to_json(std::vector<RelationReport>{r, r}).size() == 2);
}
