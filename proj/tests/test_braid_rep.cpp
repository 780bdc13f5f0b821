#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

#include "fockforge/braid_rep.hpp"

using namespace fockforge;

namespace {

CMatrix flip(int h, cplx q) {
    CMatrix t = CMatrix::Zero(h * h, h * h);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j) t(i * h + j, j * h + i) = q;
    return t;
}

// Brute-force oracle for T = qF: P_n = sum over sigma of q^inv(sigma) times the
// operator permuting tensor factors. Built from index arithmetic, no braid words.
CMatrix q_symmetrizer(int h, int n, double q) {
    Index dim = 1;
    for (int k = 0; k < n; ++k) dim *= h;
    CMatrix p = CMatrix::Zero(dim, dim);
    std::vector<int> perm(n);
    for (int k = 0; k < n; ++k) perm[k] = k;
    std::vector<int> digits(n), moved(n);
    do {
        int inv = 0;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (perm[a] > perm[b]) ++inv;
        const double w = std::pow(q, inv);
        for (Index col = 0; col < dim; ++col) {
            Index rest = col;
            for (int k = n - 1; k >= 0; --k) {
                digits[k] = static_cast<int>(rest % h);
                rest /= h;
            }
            for (int k = 0; k < n; ++k) moved[k] = digits[perm[k]];
            Index row = 0;
            for (int k = 0; k < n; ++k) row = row * h + moved[k];
            p(row, col) += w;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return p;
}

std::vector<double> sorted_eigenvalues(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end());
    return ev;
}

} // namespace

TEST_CASE("reduced words realise every permutation with minimal length") {
    for (int n = 1; n <= 5; ++n)
        for (const Permutation& p : all_permutations(n)) {
            const ReducedWord a = reduced_word(p), b = reduced_word_bubble(p);
            CHECK(static_cast<int>(a.letters.size()) == inversion_count(p));
            CHECK(static_cast<int>(b.letters.size()) == inversion_count(p));
            CHECK(word_permutation(a) == p);
            CHECK(word_permutation(b) == p);
        }
    CHECK(all_permutations(4).size() == 24);
    CHECK(inversion_count({3, 2, 1}) == 3);
    CHECK_FALSE(is_permutation({1, 1, 3}));
    CHECK_THROWS_AS(reduced_word({2, 3}), ContractViolation);
    CHECK_THROWS_AS(word_permutation(ReducedWord{3, {3}}), ContractViolation);
}

TEST_CASE("make_deformation validates its input") {
    CHECK_THROWS_AS(make_deformation(flip(2, 1.5), 2), SpecError);
    CMatrix skew = flip(2, 0.5);
    skew(0, 1) = 0.1;
    CHECK_THROWS_AS(make_deformation(skew, 2), SpecError);
    CHECK_THROWS_AS(make_deformation(CMatrix::Identity(3, 3), 2), SpecError);

    const DeformationOperator d = make_deformation(flip(3, 0.5), 3);
    CHECK(d.self_adjoint);
    CHECK(d.contraction);
    CHECK(d.ybe);
    CHECK_FALSE(d.unitary);
    CHECK(d.norm == doctest::Approx(0.5));
    CHECK(make_deformation(flip(2, -1.0), 2).unitary);
}

TEST_CASE("non-braided operators are refused") {
    // A generic Hermitian contraction on C^2 (x) C^2 fails the braid relation.
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    CMatrix a(4, 4);
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j) a(i, j) = {g(rng), g(rng)};
    CMatrix t = a + a.adjoint();
    t /= 1.01 * op_norm(t);
    const DeformationOperator d = make_deformation(t, 2);
    CHECK_FALSE(d.ybe);
    CHECK(d.ybe_residual > 1e-3);
    CHECK_THROWS_AS(t_sigma(d, 2, reduced_word({2, 1})), YbeViolation);
    CHECK_THROWS_AS(p_n_direct(d, 2), YbeViolation);
}

TEST_CASE("P_n for T = qF matches the brute-force symmetrizer") {
    for (double q : {0.5, -0.3, 1.0}) {
        const DeformationOperator d = make_deformation(flip(2, q), 2);
        for (int n = 2; n <= 4; ++n) {
            const CMatrix oracle = q_symmetrizer(2, n, q);
            CHECK(max_abs_diff(p_n_direct(d, n), oracle) < 1e-12);
            CHECK(max_abs_diff(p_n_recursive(d, n), oracle) < 1e-12);
        }
    }
}

TEST_CASE("frozen spectra of P_2 and P_3 for T = 0.5 F on C^2") {
    // Eigenvalues from the brute-force oracle, rounded to 12 digits.
    const DeformationOperator d = make_deformation(flip(2, 0.5), 2);
    const std::vector<double> p2 = {0.5, 1.5, 1.5, 1.5};
    const std::vector<double> p3 = {0.375, 0.375, 1.125, 1.125, 2.625, 2.625, 2.625, 2.625};
    const auto e2 = sorted_eigenvalues(p_n_direct(d, 2));
    const auto e3 = sorted_eigenvalues(p_n_direct(d, 3));
    for (std::size_t i = 0; i < p2.size(); ++i) CHECK(e2[i] == doctest::Approx(p2[i]).epsilon(1e-12));
    for (std::size_t i = 0; i < p3.size(); ++i) CHECK(e3[i] == doctest::Approx(p3[i]).epsilon(1e-12));
}

TEST_CASE("T_sigma does not depend on the reduced word") {
    const DeformationOperator d = make_deformation(flip(2, cplx(0.3, 0.0)), 2);
    for (const Permutation& p : all_permutations(4))
        CHECK(max_abs_diff(t_sigma(d, 4, reduced_word(p)), t_sigma(d, 4, reduced_word_bubble(p))) < 1e-14);
}

TEST_CASE("local operators and threaded sums") {
    const DeformationOperator d = make_deformation(flip(3, 0.4), 3);
    CMatrix m = CMatrix::Identity(27, 27);
    apply_local(d.t, 3, 3, 2, m);
    CHECK(max_abs_diff(m, local_operator(d.t, 3, 3, 2)) < 1e-15);
    CHECK(max_abs_diff(local_operator(d.t, 3, 3, 1), kron(d.t, identity(3))) < 1e-15);
    CHECK(max_abs_diff(p_n_direct(d, 3, 1), p_n_direct(d, 3, 4)) < 1e-13);
    CHECK(max_abs_diff(bb_t_n(d, 2), identity(9) + d.t) < 1e-15);
}

TEST_CASE("dimension budget") {
    CHECK(tensor_dim(6, 4) == 1296);
    CHECK_THROWS_AS(tensor_dim(6, 5), SizeError);
    CHECK(tensor_dim(6, 5, DimensionBudget{8000}) == 7776);
    const DeformationOperator d = make_deformation(flip(6, 0.5), 6);
    CHECK_THROWS_AS(p_n_direct(d, 5), SizeError);
}
