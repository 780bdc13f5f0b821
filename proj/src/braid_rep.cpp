#include "fockforge/braid_rep.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <string>
#include <thread>

namespace fockforge {

bool is_permutation(const Permutation& p) {
    std::vector<char> seen(p.size() + 1, 0);
    for (int v : p) {
        if (v < 1 || v > static_cast<int>(p.size()) || seen[v]) return false;
        seen[v] = 1;
    }
    return true;
}

int inversion_count(const Permutation& p) {
    int inv = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) ++inv;
    return inv;
}

namespace {

void require_perm(const Permutation& p) {
    if (!is_permutation(p)) throw ContractViolation("not a permutation in one-line notation");
}

// Sorting p by position swaps s_a gives p s_{a1} s_{a2} ... = e, hence
// p = ... s_{a2} s_{a1}: the word is the swap list reversed.
ReducedWord from_swaps(int n, std::vector<int> swaps) {
    std::reverse(swaps.begin(), swaps.end());
    return ReducedWord{n, std::move(swaps)};
}

} // namespace

ReducedWord reduced_word(const Permutation& p) {
    require_perm(p);
    Permutation a = p;
    std::vector<int> swaps;
    for (std::size_t k = 1; k < a.size(); ++k)
        for (std::size_t j = k; j > 0 && a[j - 1] > a[j]; --j) {
            std::swap(a[j - 1], a[j]);
            swaps.push_back(static_cast<int>(j));
        }
    return from_swaps(static_cast<int>(p.size()), std::move(swaps));
}

ReducedWord reduced_word_bubble(const Permutation& p) {
    require_perm(p);
    Permutation a = p;
    std::vector<int> swaps;
    const std::size_t n = a.size();
    for (std::size_t pass = 0; pass + 1 < n; ++pass)
        for (std::size_t j = n - 1; j > pass; --j)
            if (a[j - 1] > a[j]) {
                std::swap(a[j - 1], a[j]);
                swaps.push_back(static_cast<int>(j));
            }
    return from_swaps(static_cast<int>(n), std::move(swaps));
}

Permutation word_permutation(const ReducedWord& w) {
    Permutation p(w.n);
    std::iota(p.begin(), p.end(), 1);
    for (int j : w.letters) {
        if (j < 1 || j >= w.n) throw ContractViolation("word letter out of range");
        std::swap(p[j - 1], p[j]);
    }
    return p;
}

std::size_t tensor_dim(int h, int n, const DimensionBudget& budget) {
    if (h < 1 || n < 0) throw ContractViolation("tensor_dim: bad arguments");
    std::size_t d = 1;
    for (int k = 0; k < n; ++k) {
        d = checked_product(d, static_cast<std::size_t>(h));
        if (d > budget.max_tensor_dim)
            throw SizeError("dim H^" + std::to_string(n) + " with dim H = " + std::to_string(h) +
                            " exceeds the budget of " + std::to_string(budget.max_tensor_dim));
    }
    return d;
}

double ybe_residual(const CMatrix& t, int h_dim) {
    CMatrix lhs = identity(static_cast<Index>(h_dim) * h_dim * h_dim);
    CMatrix rhs = lhs;
    apply_local(t, h_dim, 3, 1, lhs);
    apply_local(t, h_dim, 3, 2, lhs);
    apply_local(t, h_dim, 3, 1, lhs);
    apply_local(t, h_dim, 3, 2, rhs);
    apply_local(t, h_dim, 3, 1, rhs);
    apply_local(t, h_dim, 3, 2, rhs);
    return max_abs_diff(lhs, rhs);
}

DeformationOperator make_deformation(const CMatrix& t, int h_dim, double tol) {
    const Index h2 = static_cast<Index>(h_dim) * h_dim;
    if (h_dim < 1 || t.rows() != h2 || t.cols() != h2)
        throw SpecError("deformation operator must be (dim H)^2 square");
    require_finite(t, "deformation operator");
    DeformationOperator d;
    d.h_dim = h_dim;
    d.t = t;
    d.tol = tol;
    d.hermitian_residual = max_abs_diff(t, t.adjoint());
    d.self_adjoint = d.hermitian_residual <= std::max(tol, 1e-12);
    if (!d.self_adjoint)
        throw SpecError("deformation operator is not self-adjoint (residual " +
                        std::to_string(d.hermitian_residual) + ")");
    d.norm = op_norm(t);
    d.contraction = d.norm <= 1.0 + tol;
    if (!d.contraction)
        throw SpecError("deformation operator is not a contraction (norm " +
                        std::to_string(d.norm) + ")");
    d.ybe_residual = ybe_residual(t, h_dim);
    d.ybe = d.ybe_residual <= std::max(tol, 1e-12);
    d.unitary_residual = max_abs_diff(t * t.adjoint(), identity(h2));
    d.unitary = d.unitary_residual <= std::max(tol, 1e-12);
    return d;
}

CMatrix local_operator(const CMatrix& t, int h_dim, int n, int i) {
    CMatrix m = identity(static_cast<Index>(tensor_dim(h_dim, n, {kMaxEntries})));
    apply_local(t, h_dim, n, i, m);
    return m;
}

void apply_local(const CMatrix& op, int h_dim, int n, int i, CMatrix& m) {
    const Index h2 = static_cast<Index>(h_dim) * h_dim;
    if (i < 1 || i > n - 1) throw ContractViolation("apply_local: site index out of range");
    if (op.rows() != h2 || op.cols() != h2) throw ContractViolation("apply_local: operator size");
    Index before = 1, after = 1;
    for (int k = 1; k < i; ++k) before *= h_dim;
    for (int k = i + 2; k <= n; ++k) after *= h_dim;
    if (m.rows() != before * h2 * after) throw ContractViolation("apply_local: vector size");
    CMatrix out = CMatrix::Zero(m.rows(), m.cols());
    for (Index b = 0; b < h2; ++b)
        for (Index bp = 0; bp < h2; ++bp) {
            const cplx c = op(b, bp);
            if (c == cplx(0.0, 0.0)) continue;
            for (Index a = 0; a < before; ++a)
                out.middleRows((a * h2 + b) * after, after).noalias() +=
                    c * m.middleRows((a * h2 + bp) * after, after);
        }
    m.swap(out);
}

namespace {

void require_ybe(const DeformationOperator& d) {
    if (!d.ybe)
        throw YbeViolation("T does not satisfy the braid relation (residual " +
                           std::to_string(d.ybe_residual) + "); T_sigma is not well defined");
}

// T_sigma applied to m in place (rightmost letter acts first).
void apply_word(const DeformationOperator& d, int n, const ReducedWord& w, CMatrix& m) {
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
        apply_local(d.t, d.h_dim, n, *it, m);
}

} // namespace

CMatrix t_sigma(const DeformationOperator& d, int n, const ReducedWord& w) {
    require_ybe(d);
    if (w.n != n) throw ContractViolation("t_sigma: word degree mismatch");
    CMatrix m = identity(static_cast<Index>(tensor_dim(d.h_dim, n, {kMaxEntries})));
    apply_word(d, n, w, m);
    return m;
}

std::vector<Permutation> all_permutations(int n) {
    std::vector<Permutation> out;
    Permutation p(n);
    std::iota(p.begin(), p.end(), 1);
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

CMatrix p_n_direct(const DeformationOperator& d, int n, int threads, const DimensionBudget& budget) {
    if (n < 1) throw ContractViolation("p_n_direct: n >= 1 required");
    require_ybe(d);
    const Index dim = static_cast<Index>(tensor_dim(d.h_dim, n, budget));
    if (n == 1) return identity(dim);
    const auto perms = all_permutations(n);
    auto chunk_sum = [&](std::size_t lo, std::size_t hi) {
        CMatrix acc = CMatrix::Zero(dim, dim);
        for (std::size_t k = lo; k < hi; ++k) {
            CMatrix m = identity(dim);
            apply_word(d, n, reduced_word(perms[k]), m);
            acc += m;
        }
        return acc;
    };
    threads = std::max(1, std::min<int>(threads, static_cast<int>(perms.size())));
    if (threads == 1) return chunk_sum(0, perms.size());

    std::vector<CMatrix> partial(threads);
    std::vector<std::thread> pool;
    const std::size_t per = (perms.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::size_t lo = std::min(perms.size(), t * per);
        const std::size_t hi = std::min(perms.size(), lo + per);
        pool.emplace_back([&, t, lo, hi] { partial[t] = chunk_sum(lo, hi); });
    }
    for (auto& th : pool) th.join();
    for (std::size_t stride = 1; stride < partial.size(); stride *= 2)
        for (std::size_t k = 0; k + stride < partial.size(); k += 2 * stride)
            partial[k] += partial[k + stride];
    return partial[0];
}

CMatrix bb_t_n(const DeformationOperator& d, int n, const DimensionBudget& budget) {
    if (n < 1) throw ContractViolation("bb_t_n: n >= 1 required");
    const Index dim = static_cast<Index>(tensor_dim(d.h_dim, n, budget));
    // Horner form: 1 + T1 (1 + T2 (1 + ... (1 + T_{n-1}))).
    CMatrix acc = identity(dim);
    for (int i = n - 1; i >= 1; --i) {
        apply_local(d.t, d.h_dim, n, i, acc);
        acc += identity(dim);
    }
    return acc;
}

CMatrix p_n_recursive(const DeformationOperator& d, int n, const DimensionBudget& budget) {
    if (n < 1) throw ContractViolation("p_n_recursive: n >= 1 required");
    require_ybe(d);
    tensor_dim(d.h_dim, n, budget);
    CMatrix p = identity(d.h_dim);
    for (int k = 2; k <= n; ++k) p = kron(identity(d.h_dim), p) * bb_t_n(d, k, budget);
    return p;
}

int default_thread_count() {
    if (const char* env = std::getenv("FOCKFORGE_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

} // namespace fockforge
