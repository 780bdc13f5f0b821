#pragma once

#include <cstdint>
#include <vector>

#include "fockforge/tensor_core.hpp"

namespace fockforge {

/// One-line notation, values 1..n: perm[k-1] is the image of k.
using Permutation = std::vector<int>;

struct ReducedWord {
    int n = 0;
    std::vector<int> letters;   // adjacent transposition indices in 1..n-1
};

bool is_permutation(const Permutation& p);
int inversion_count(const Permutation& p);

/// Word from insertion sort; length equals the inversion count.
ReducedWord reduced_word(const Permutation& p);
/// Independent word from right-to-left bubble passes (used for well-definedness tests).
ReducedWord reduced_word_bubble(const Permutation& p);
/// Permutation obtained by composing the letters left to right as s_{j1} s_{j2} ...
Permutation word_permutation(const ReducedWord& w);

/// Caps on h^n. The default covers the desk-scale presets; --big raises it.
struct DimensionBudget {
    std::size_t max_tensor_dim = 1296;
};

/// h^n, or SizeError if it exceeds the budget.
std::size_t tensor_dim(int h, int n, const DimensionBudget& budget = {});

/// Self-adjoint contraction T on H (x) H with cached diagnostics.
struct DeformationOperator {
    int h_dim = 0;
    CMatrix t;
    double tol = kDefaultRankTol;
    double hermitian_residual = 0;
    double norm = 0;
    double ybe_residual = 0;
    double unitary_residual = 0;
    bool self_adjoint = false;
    bool contraction = false;
    bool ybe = false;
    bool unitary = false;
};

/// Validates Hermiticity and ||t|| <= 1 + tol (SpecError otherwise) and caches the
/// braid-relation and unitarity residuals. A failing braid relation is recorded,
/// not thrown; t_sigma and the Fock constructions refuse such operators.
DeformationOperator make_deformation(const CMatrix& t, int h_dim, double tol = 1e-9);

/// ||T1 T2 T1 - T2 T1 T2|| (max-abs) on H^{(x)3}.
double ybe_residual(const CMatrix& t, int h_dim);

/// Dense 1^{(x)(i-1)} (x) T (x) 1^{(x)(n-i-1)}.
CMatrix local_operator(const CMatrix& t, int h_dim, int n, int i);

/// m <- (1^{(x)(i-1)} (x) op (x) 1^{(x)(n-i-1)}) m without forming the Kronecker product.
/// op acts on H (x) H.
void apply_local(const CMatrix& op, int h_dim, int n, int i, CMatrix& m);

/// T_{j1} ... T_{jm} on H^{(x)n}; throws YbeViolation if d.ybe is false.
CMatrix t_sigma(const DeformationOperator& d, int n, const ReducedWord& w);

/// Sum of T_sigma over S_n in lexicographic order. threads > 1 splits the
/// permutation list into contiguous chunks and reduces the partial sums pairwise.
CMatrix p_n_direct(const DeformationOperator& d, int n, int threads = 1,
                   const DimensionBudget& budget = {});

/// 1 + T1 + T1 T2 + ... + T1...T_{n-1}.
CMatrix bb_t_n(const DeformationOperator& d, int n, const DimensionBudget& budget = {});

/// P_n = (1 (x) P_{n-1}) TT_n with P_1 = 1. Independent oracle for p_n_direct.
CMatrix p_n_recursive(const DeformationOperator& d, int n, const DimensionBudget& budget = {});

/// All permutations of {1..n} in lexicographic order.
std::vector<Permutation> all_permutations(int n);

/// Thread count from FOCKFORGE_THREADS, or 1.
int default_thread_count();

} // namespace fockforge
