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

struct Frozen {
    FixtureId id;
    int n_sites;
    int n;
    Index dim;
    double lambda_max;
};

// From a numpy brute force (T assembled entrywise from the displayed blocks,
// P_n summed over bubble-sort words), eigenvalues kept above 1e-9 lambda_max.
const Frozen kFrozen[] = {
    {FixtureId::ex_kq, 2, 2, 14, 2.0},        {FixtureId::ex_kq, 2, 3, 48, 3.0},
    {FixtureId::ex_kq, 2, 4, 164, 6.0},       {FixtureId::ex_pw, 2, 2, 15, 2.0},
    {FixtureId::ex_pw, 2, 3, 56, 2.46058230480331}, {FixtureId::ex_pw, 2, 4, 209, 4.55751732407959},
    {FixtureId::ex_offdiag, 2, 4, 164, 6.0},  {FixtureId::ex_anyon4, 2, 2, 12, 2.0},
    {FixtureId::ex_anyon4, 2, 3, 32, 3.0},    {FixtureId::ex_anyon4, 2, 4, 80, 6.0},
    {FixtureId::ex_kq, 3, 2, 30, 2.0},        {FixtureId::ex_kq, 3, 3, 144, 4.5},
    {FixtureId::ex_pw, 3, 3, 180, 3.0},       {FixtureId::ex_anyon4, 3, 3, 80, 6.0},
    {FixtureId::ex_spatial, 3, 2, 26, 2.0},   {FixtureId::ex_spatial, 3, 3, 100, 6.0},
};

} // namespace

TEST_CASE("frozen Fock dimensions and top eigenvalues of the fixtures") {
    for (const Frozen& f : kFrozen) {
        FixtureParams p = default_params();
        p.n_sites = f.n_sites;
        const DeformationOperator d = build_T(fixture_spec(f.id, p));
        const FockLevel lv = fock_level(d, f.n);
        INFO(fixture_name(f.id), " N=", f.n_sites, " n=", f.n);
        CHECK(lv.subspace.dim() == f.dim);
        CHECK(lv.lambda_max == doctest::Approx(f.lambda_max).epsilon(1e-12));
        CHECK(lv.min_eigenvalue >= -1e-9 * lv.lambda_max);
    }
}

TEST_CASE("Bose and Fermi limits") {
    // T = F: F_n is the symmetric power; T = -F: the antisymmetric one.
    const DeformationOperator bose = make_deformation(flip(3, 1.0), 3);
    const DeformationOperator fermi = make_deformation(flip(3, -1.0), 3);
    CHECK(fock_level(bose, 2).subspace.dim() == 6);
    CHECK(fock_level(bose, 3).subspace.dim() == 10);
    CHECK(fock_level(fermi, 2).subspace.dim() == 3);
    CHECK(fock_level(fermi, 3).subspace.dim() == 1);
    for (int n = 2; n <= 3; ++n) {
        CHECK(unitary_projection_residual(fock_level(bose, n)) < 1e-12);
        CHECK(fixed_point_distance(bose, fock_level(bose, n)) < 1e-10);
    }
}

TEST_CASE("truncation levels and deformed frames") {
    const DeformationOperator d = make_deformation(flip(2, 0.5), 2);
    const FockTruncation tr = build_truncation(d, 3);
    CHECK(tr.levels.size() == 4);
    CHECK(tr.dim(0) == 1);
    CHECK(tr.dim(1) == 2);
    CHECK(tr.dim(3) == 8);
    for (int n = 0; n <= 3; ++n) {
        CHECK(gram_identity_residual(tr.level(n)) < 1e-12);
        CHECK(projection_defect(tr.proj[n]) < 1e-12);
    }
    // ||T|| < 1: P_n is invertible, so F_n is the whole tensor power.
    CHECK(tr.level(3).max_dropped == 0.0);
    CHECK(tr.level(3).min_eigenvalue == doctest::Approx(0.375));
}

TEST_CASE("kernel sum, range intersection and parallel sums on the fixtures") {
    for (FixtureId id : all_fixtures()) {
        FixtureParams p = default_params();
        p.n_sites = 2;
        const DeformationOperator d = build_T(fixture_spec(id, p));
        const FockTruncation tr = build_truncation(d, 4);
        INFO(fixture_name(id));
        for (int n = 2; n <= 4; ++n) CHECK(check_kernel_sum_formula(d, tr.level(n)) < 1e-8);
        for (int n = 3; n <= 4; ++n) {
            CHECK(check_range_intersection(d, tr.level(n)) < 1e-8);
            const ParallelSumReport r = check_parallel_sum_prop(d, tr.levels, n);
            CHECK(r.worst() < 1e-8);
        }
        CHECK(check_kerrT_lemma(d) < 1e-8);
    }
}

TEST_CASE("membership theorem agrees with direct projection") {
    std::mt19937_64 rng(7);
    FixtureParams p = default_params();
    const DeformationOperator d = build_T(fixture_spec(FixtureId::ex_offdiag, p));
    const FockTruncation tr = build_truncation(d, 3);
    for (int n = 2; n <= 3; ++n) {
        const CVector r = random_vector(tr.level(n).p_n.rows(), rng);
        const MembershipVerdict in = check_membership_theorem(d, tr.level(n), tr.proj[n] * r);
        const MembershipVerdict out = check_membership_theorem(d, tr.level(n), r);
        CHECK(in.direct);
        CHECK(in.theorem);
        CHECK_FALSE(out.direct);
        CHECK(out.agree());
    }
}

TEST_CASE("level_to_json layout") {
    const DeformationOperator d = make_deformation(flip(2, -1.0), 2);
    const auto j = level_to_json(fock_level(d, 2));
    CHECK(j.at("n") == 2);
    CHECK(j.at("dim") == 1);
    CHECK(j.at("eigenvalues").size() == 1);
    CHECK(j.at("eigenvalues")[0].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("block-diagonal P_n is split before diagonalising") {
    const DeformationOperator d = build_T(fixture_spec(FixtureId::ex_kq, default_params()));
    CHECK(fock_level(d, 2).blocks > 1);
}
