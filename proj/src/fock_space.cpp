#include "fockforge/fock_space.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fockforge/spec_io.hpp"

namespace fockforge {

namespace {

struct UnionFind {
    std::vector<Index> parent;
    explicit UnionFind(Index n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    Index find(Index x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void join(Index a, Index b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

// Connected components of the sparsity graph, each listed in increasing index order.
std::vector<std::vector<Index>> sparsity_blocks(const CMatrix& a) {
    const Index n = a.rows();
    UnionFind uf(n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            if (a(i, j) != cplx(0.0, 0.0)) uf.join(i, j);
    std::vector<std::vector<Index>> blocks;
    std::vector<Index> slot(n, -1);
    for (Index i = 0; i < n; ++i) {
        const Index r = uf.find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<Index>(blocks.size());
            blocks.emplace_back();
        }
        blocks[slot[r]].push_back(i);
    }
    return blocks;
}

struct Eigenpair {
    double value;
    std::size_t block;
    Index column;
};

CMatrix promote(const CMatrix& local, int h, int n, int i) {
    // 1^{(x)(i-1)} (x) local (x) 1^{(x)(n-i-1)} for a matrix acting on H (x) H or a frame in it.
    Index before = 1, after = 1;
    for (int k = 1; k < i; ++k) before *= h;
    for (int k = i + 2; k <= n; ++k) after *= h;
    return kron(identity(before), kron(local, identity(after)));
}

} // namespace

FockLevel fock_level_from(const CMatrix& p_n, int h_dim, int n, double tol) {
    if (p_n.rows() != p_n.cols()) throw ContractViolation("fock_level_from: P_n must be square");
    FockLevel lv;
    lv.n = n;
    lv.h_dim = h_dim;
    lv.p_n = p_n;
    const Index dim = p_n.rows();

    const auto blocks = sparsity_blocks(p_n);
    lv.blocks = static_cast<int>(blocks.size());
    std::vector<Eigen::SelfAdjointEigenSolver<CMatrix>> solvers(blocks.size());
    std::vector<Eigenpair> pairs;
    pairs.reserve(dim);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& idx = blocks[b];
        const Index k = static_cast<Index>(idx.size());
        CMatrix sub(k, k);
        for (Index c = 0; c < k; ++c)
            for (Index r = 0; r < k; ++r) sub(r, c) = p_n(idx[r], idx[c]);
        solvers[b].compute(sub);
        for (Index c = 0; c < k; ++c) pairs.push_back({solvers[b].eigenvalues()(c), b, c});
    }
    double lmax = 0, lmin = pairs.empty() ? 0.0 : pairs.front().value;
    for (const auto& p : pairs) {
        lmax = std::max(lmax, p.value);
        lmin = std::min(lmin, p.value);
    }
    lv.lambda_max = lmax;
    lv.min_eigenvalue = lmin;
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const Eigenpair& a, const Eigenpair& b) { return a.value > b.value; });

    const double cut = tol * lmax;
    std::vector<Eigenpair> kept;
    double max_dropped = 0;
    for (const auto& p : pairs) {
        if (p.value > cut && lmax > 0)
            kept.push_back(p);
        else
            max_dropped = std::max(max_dropped, std::abs(p.value));
    }
    lv.max_dropped = lmax > 0 ? max_dropped / lmax : 0.0;
    lv.min_kept = kept.empty() ? 0.0 : kept.back().value / lmax;

    CMatrix frame = CMatrix::Zero(dim, static_cast<Index>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c) {
        const auto& p = kept[c];
        const auto& idx = blocks[p.block];
        const auto vec = solvers[p.block].eigenvectors().col(p.column);
        for (std::size_t r = 0; r < idx.size(); ++r) frame(idx[r], static_cast<Index>(c)) = vec(r);
        lv.eigenvalues.push_back(p.value);
    }
    fix_column_phases(frame);
    lv.subspace = Subspace{dim, frame, tol};
    lv.gram_root = frame;
    for (std::size_t c = 0; c < kept.size(); ++c)
        lv.gram_root.col(static_cast<Index>(c)) /= std::sqrt(kept[c].value);
    return lv;
}

FockLevel fock_level(const DeformationOperator& d, int n, double tol, int threads,
                     const DimensionBudget& budget) {
    if (n < 0) throw ContractViolation("fock_level: n >= 0 required");
    const Index dim = static_cast<Index>(tensor_dim(d.h_dim, n, budget));
    if (n <= 1) return fock_level_from(identity(dim), d.h_dim, n, tol);
    return fock_level_from(p_n_direct(d, n, threads, budget), d.h_dim, n, tol);
}

FockTruncation build_truncation(const DeformationOperator& d, int n_max, double tol, int threads,
                                const DimensionBudget& budget) {
    if (n_max < 1) throw ContractViolation("build_truncation: n_max >= 1 required");
    tensor_dim(d.h_dim, n_max, budget);   // refuse before building the lower levels
    FockTruncation tr;
    tr.h_dim = d.h_dim;
    tr.n_max = n_max;
    tr.tol = tol;
    for (int n = 0; n <= n_max; ++n) {
        tr.levels.push_back(fock_level(d, n, tol, threads, budget));
        tr.bb_t.push_back(n <= 1 ? identity(static_cast<Index>(tensor_dim(d.h_dim, n, budget)))
                                 : bb_t_n(d, n, budget));
        const FockLevel& lv = tr.levels.back();
        tr.coord.push_back(lv.gram_root.adjoint() * lv.p_n);
        tr.proj.push_back(projection(lv));
    }
    return tr;
}

CMatrix projection(const FockLevel& level) { return projector(level.subspace); }

double check_kernel_sum_formula(const DeformationOperator& d, const FockLevel& level) {
    const int n = level.n, h = d.h_dim;
    const Index dim = level.p_n.rows();
    const Subspace k1 = kernel_basis(identity(d.t.rows()) + d.t, d.tol);
    CMatrix gens(dim, 0);
    for (int i = 1; i <= n - 1; ++i) {
        if (k1.dim() == 0) break;
        const CMatrix piece = promote(k1.frame, h, n, i);
        CMatrix next(dim, gens.cols() + piece.cols());
        next << gens, piece;
        gens.swap(next);
    }
    const Subspace span = gens.cols() == 0 ? zero_subspace(dim) : range_basis(gens, d.tol);
    const CMatrix ker_proj = identity(dim) - projection(level);
    return op_norm(ker_proj - projector(span));
}

double check_kernel_sum_formula(const DeformationOperator& d, int n, double tol) {
    return check_kernel_sum_formula(d, fock_level(d, n, tol));
}

double check_range_intersection(const DeformationOperator& d, const FockLevel& level) {
    const int n = level.n, h = d.h_dim;
    const Subspace r1 = range_basis(identity(d.t.rows()) + d.t, d.tol);
    const CMatrix local = projector(r1);
    CMatrix inter = promote(local, h, n, 1);
    for (int i = 2; i <= n - 1; ++i)
        inter = parallel_sum_projection(inter, promote(local, h, n, i), d.tol);
    return op_norm(projection(level) - inter);
}

double check_range_intersection(const DeformationOperator& d, int n, double tol) {
    return check_range_intersection(d, fock_level(d, n, tol));
}

double ParallelSumReport::worst() const {
    return std::max({q1_defect, q2_defect, parallel_sum, factorization});
}

ParallelSumReport check_parallel_sum_prop(const DeformationOperator& d,
                                          const std::vector<FockLevel>& levels, int n) {
    if (n < 3) throw ContractViolation("check_parallel_sum_prop: n >= 3 required");
    const int h = d.h_dim;
    const CMatrix p2 = projection(levels.at(2));
    const Index dim = levels.at(n).p_n.rows();
    CMatrix q1 = identity(dim), q2 = identity(dim);
    for (int i = 1; i <= n - 1; ++i) (i % 2 ? q1 : q2) = (i % 2 ? q1 : q2) * promote(p2, h, n, i);
    ParallelSumReport rep;
    rep.q1_defect = projection_defect(q1);
    rep.q2_defect = projection_defect(q2);
    const CMatrix pn = projection(levels.at(n));
    rep.parallel_sum = op_norm(pn - parallel_sum_projection(q1, q2, d.tol));
    for (int m = 2; m <= n - 1; ++m) {
        Index rest = 1;
        for (int k = m; k < n; ++k) rest *= h;
        const CMatrix pm = projection(levels.at(m));
        const double left = op_norm(pn - pn * kron(pm, identity(rest)));
        const double right = op_norm(pn - pn * kron(identity(rest), pm));
        rep.factorization = std::max({rep.factorization, left, right});
    }
    return rep;
}

ParallelSumReport check_parallel_sum_prop(const DeformationOperator& d, int n, double tol) {
    std::vector<FockLevel> levels;
    for (int k = 0; k <= n; ++k) levels.push_back(fock_level(d, k, tol));
    return check_parallel_sum_prop(d, levels, n);
}

MembershipVerdict check_membership_theorem(const DeformationOperator& d, const FockLevel& level,
                                           const CVector& f, double tol) {
    const int n = level.n, h = d.h_dim;
    if (f.size() != level.p_n.rows()) throw ContractViolation("membership: vector size");
    MembershipVerdict v;
    const double nf = f.norm();
    if (nf == 0.0) {
        v.theorem = v.direct = true;
        return v;
    }
    if (n >= 2) {
        const CMatrix one = identity(d.t.rows());
        const CMatrix ran_proj = projector(range_basis(one - d.t * d.t, d.tol));
        for (int i = 1; i <= n - 1; ++i) {
            CMatrix r = f;
            CMatrix tr = f;
            apply_local(d.t, h, n, i, tr);
            r -= tr;
            CMatrix pr = r;
            apply_local(ran_proj, h, n, i, pr);
            v.theorem_residual = std::max(v.theorem_residual, (r - pr).norm() / nf);
        }
    }
    const CVector pf = projection(level) * f;
    v.direct_residual = (f - pf).norm() / nf;
    v.theorem = v.theorem_residual <= tol;
    v.direct = v.direct_residual <= tol;
    return v;
}

double check_kerrT_lemma(const DeformationOperator& d, double tol) {
    const CMatrix one = identity(d.t.rows());
    const Subspace lhs = kernel_basis(one + d.t, tol);
    const Subspace k2 = kernel_basis(one - d.t * d.t, tol);
    const Subspace rhs = k2.dim() == 0 ? zero_subspace(one.rows())
                                       : range_basis((one - d.t) * k2.frame, tol);
    return subspace_distance(lhs, rhs);
}

double unitary_projection_residual(const FockLevel& level) {
    double fact = 1;
    for (int k = 2; k <= level.n; ++k) fact *= k;
    return op_norm(projection(level) - level.p_n / fact);
}

double fixed_point_distance(const DeformationOperator& d, const FockLevel& level) {
    const int n = level.n;
    const Index dim = level.p_n.rows();
    if (n < 2) return 0.0;
    CMatrix stacked(dim * (n - 1), dim);
    for (int i = 1; i <= n - 1; ++i) {
        CMatrix ti = identity(dim);
        apply_local(d.t, d.h_dim, n, i, ti);
        stacked.middleRows((i - 1) * dim, dim) = ti - identity(dim);
    }
    return subspace_distance(level.subspace, kernel_basis(stacked, d.tol));
}

double gram_identity_residual(const FockLevel& level) {
    const Index k = level.gram_root.cols();
    if (k == 0) return 0.0;
    return max_abs_diff(level.gram_root.adjoint() * level.p_n * level.gram_root, identity(k));
}

nlohmann::json level_to_json(const FockLevel& level) {
    nlohmann::json j;
    j["n"] = level.n;
    j["dim"] = level.subspace.dim();
    j["eigenvalues"] = level.eigenvalues;
    j["frame"] = matrix_to_json(level.subspace.frame);
    return j;
}

} // namespace fockforge
