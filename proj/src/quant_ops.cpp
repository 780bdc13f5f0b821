#include "fockforge/quant_ops.hpp"

#include <algorithm>
#include <cmath>

namespace fockforge {

void BlockOperator::add_block(int target, int source, const CMatrix& m) {
    if (target < 0 || source < 0 || target > n_max() || source > n_max())
        throw ContractViolation("BlockOperator: level out of range");
    if (m.rows() != dims[target] || m.cols() != dims[source])
        throw ContractViolation("BlockOperator: block shape does not match level dims");
    auto key = std::make_pair(target, source);
    auto it = blocks.find(key);
    if (it == blocks.end())
        blocks.emplace(key, m);
    else
        it->second += m;
}

const CMatrix* BlockOperator::find(int target, int source) const {
    auto it = blocks.find({target, source});
    return it == blocks.end() ? nullptr : &it->second;
}

BlockOperator zero_operator(const std::vector<Index>& dims) { return BlockOperator{dims, {}}; }

BlockOperator identity_operator(const std::vector<Index>& dims) {
    BlockOperator op{dims, {}};
    for (int n = 0; n < static_cast<int>(dims.size()); ++n) op.add_block(n, n, identity(dims[n]));
    return op;
}

namespace {
void require_same(const BlockOperator& a, const BlockOperator& b) {
    if (a.dims != b.dims) throw ContractViolation("BlockOperator: truncations differ");
}
} // namespace

BlockOperator operator*(const BlockOperator& a, const BlockOperator& b) {
    require_same(a, b);
    BlockOperator out{a.dims, {}};
    for (const auto& [kb, mb] : b.blocks)
        for (const auto& [ka, ma] : a.blocks)
            if (ka.second == kb.first) out.add_block(ka.first, kb.second, ma * mb);
    return out;
}

BlockOperator operator+(const BlockOperator& a, const BlockOperator& b) {
    require_same(a, b);
    BlockOperator out = a;
    for (const auto& [k, m] : b.blocks) out.add_block(k.first, k.second, m);
    return out;
}

BlockOperator operator*(cplx c, const BlockOperator& a) {
    BlockOperator out = a;
    for (auto& [k, m] : out.blocks) m *= c;
    return out;
}

BlockOperator operator-(const BlockOperator& a, const BlockOperator& b) {
    return a + cplx(-1.0, 0.0) * b;
}

BlockOperator adjoint(const BlockOperator& a) {
    BlockOperator out{a.dims, {}};
    for (const auto& [k, m] : a.blocks) out.add_block(k.second, k.first, m.adjoint());
    return out;
}

double block_norm(const BlockOperator& a, int max_level) {
    double worst = 0;
    for (const auto& [k, m] : a.blocks)
        if (k.first <= max_level && k.second <= max_level && m.size() > 0)
            worst = std::max(worst, op_norm(m));
    return worst;
}

double interior_norm(const BlockOperator& a) { return block_norm(a, a.n_max() - 1); }

CMatrix to_dense(const BlockOperator& a) {
    std::vector<Index> offset(a.dims.size() + 1, 0);
    for (std::size_t k = 0; k < a.dims.size(); ++k) offset[k + 1] = offset[k] + a.dims[k];
    CMatrix out = CMatrix::Zero(offset.back(), offset.back());
    for (const auto& [key, b] : a.blocks)
        out.block(offset[key.first], offset[key.second], b.rows(), b.cols()) = b;
    return out;
}

std::vector<Index> level_dims(const FockTruncation& tr) {
    std::vector<Index> dims;
    for (int n = 0; n <= tr.n_max; ++n) dims.push_back(tr.dim(n));
    return dims;
}

CVector basis_vector(Index n, Index i) {
    CVector v = CVector::Zero(n);
    v(i) = 1.0;
    return v;
}

namespace {

std::vector<Index> raw_dims(const FockTruncation& tr) {
    std::vector<Index> dims;
    for (int n = 0; n <= tr.n_max; ++n) dims.push_back(tr.levels[n].p_n.rows());
    return dims;
}

CMatrix as_column(const CVector& v) { return CMatrix(v); }

// l^-(f) on H^{(x)n}: g1 (x) rest -> <f, g1> rest, bilinear pairing.
CMatrix lminus_matrix(const CVector& f, Index rest) {
    return kron(CMatrix(f.transpose()), identity(rest));
}

void require_vector(const CVector& f, int h, const char* what) {
    if (f.size() != h) throw ContractViolation(std::string(what) + ": vector must lie in H");
}

} // namespace

BlockOperator left_creation(const CVector& f, const FockTruncation& tr) {
    require_vector(f, tr.h_dim, "left_creation");
    BlockOperator op{raw_dims(tr), {}};
    for (int n = 0; n < tr.n_max; ++n)
        op.add_block(n + 1, n, kron(as_column(f), identity(op.dims[n])));
    return op;
}

BlockOperator left_annihilation(const CVector& f, const FockTruncation& tr) {
    require_vector(f, tr.h_dim, "left_annihilation");
    BlockOperator op{raw_dims(tr), {}};
    for (int n = 1; n <= tr.n_max; ++n) op.add_block(n - 1, n, lminus_matrix(f, op.dims[n - 1]));
    return op;
}

BlockOperator a_plus(const CVector& f, const FockTruncation& tr) {
    require_vector(f, tr.h_dim, "a_plus");
    BlockOperator op{level_dims(tr), {}};
    for (int n = 0; n < tr.n_max; ++n)
        op.add_block(n + 1, n, tr.coord[n + 1] * kron(as_column(f), tr.levels[n].gram_root));
    return op;
}

BlockOperator a_minus(const CVector& f, const FockTruncation& tr) {
    return adjoint(a_plus(apply_j(f), tr));
}

BlockOperator a_minus_explicit(const CVector& f, const FockTruncation& tr) {
    require_vector(f, tr.h_dim, "a_minus_explicit");
    BlockOperator op{level_dims(tr), {}};
    for (int n = 1; n <= tr.n_max; ++n) {
        const Index rest = tr.levels[n - 1].p_n.rows();
        op.add_block(n - 1, n,
                     tr.coord[n - 1] * lminus_matrix(f, rest) * tr.bb_t[n] * tr.levels[n].gram_root);
    }
    return op;
}

double a_minus_path_gap(const CVector& f, const FockTruncation& tr) {
    return block_norm(a_minus(f, tr) - a_minus_explicit(f, tr), tr.n_max);
}

ShuffledOperators shuffled(const CMatrix& t, int h) {
    const Index h2 = static_cast<Index>(h) * h;
    if (t.rows() != h2 || t.cols() != h2) throw ContractViolation("shuffled: size");
    ShuffledOperators s{CMatrix(h2, h2), CMatrix(h2, h2)};
    for (Index i = 0; i < h; ++i)
        for (Index j = 0; j < h; ++j)
            for (Index k = 0; k < h; ++k)
                for (Index l = 0; l < h; ++l) {
                    s.t_tilde(k * h + l, i * h + j) = t(i * h + k, j * h + l);
                    s.t_hat(k * h + l, i * h + j) = std::conj(t(l * h + k, j * h + i));
                }
    return s;
}

CVector swap_conj(const CVector& f2, int h) {
    CVector out(f2.size());
    for (Index a = 0; a < h; ++a)
        for (Index b = 0; b < h; ++b) out(b * h + a) = std::conj(f2(a * h + b));
    return out;
}

PairOperators pair_operators(const CVector& f2, const FockTruncation& tr) {
    const int h = tr.h_dim;
    if (f2.size() != static_cast<Index>(h) * h)
        throw ContractViolation("pair_operators: vector must lie in H (x) H");
    const auto dims = level_dims(tr);
    PairOperators p{BlockOperator{dims, {}}, BlockOperator{dims, {}}, BlockOperator{dims, {}}};

    // l^{+-}(f2) = kron(F, 1) with F[a][b] = f2[a h + b].
    CMatrix fmat(h, h);
    for (Index a = 0; a < h; ++a)
        for (Index b = 0; b < h; ++b) fmat(a, b) = f2(a * h + b);
    // l^{--}(f2) = kron(row, 1) with row[(g1,g2)] = f2[g2 h + g1].
    CMatrix row(1, static_cast<Index>(h) * h);
    for (Index g1 = 0; g1 < h; ++g1)
        for (Index g2 = 0; g2 < h; ++g2) row(0, g1 * h + g2) = f2(g2 * h + g1);

    for (int n = 1; n <= tr.n_max; ++n) {
        const Index rest = tr.levels[n - 1].p_n.rows();
        p.plus_minus.add_block(n, n, tr.coord[n] * kron(fmat, identity(rest)) * tr.bb_t[n] *
                                         tr.levels[n].gram_root);
    }
    for (int n = 0; n + 2 <= tr.n_max; ++n)
        p.plus_plus.add_block(n + 2, n, tr.coord[n + 2] * kron(as_column(f2), tr.levels[n].gram_root));
    for (int n = 2; n <= tr.n_max; ++n) {
        const Index rest = tr.levels[n - 2].p_n.rows();
        const CMatrix inner = kron(identity(h), tr.bb_t[n - 1] * tr.proj[n - 1]);
        p.minus_minus.add_block(n - 2, n, tr.coord[n - 2] * kron(row, identity(rest)) * inner *
                                              tr.bb_t[n] * tr.levels[n].gram_root);
    }
    return p;
}

nlohmann::json to_json(const RelationReport& r) {
    return {{"relation_id", r.relation_id}, {"formula", r.formula}, {"inputs", r.inputs},
            {"residual", r.residual},       {"pass", r.pass}};
}

nlohmann::json to_json(const std::vector<RelationReport>& rs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rs) arr.push_back(to_json(r));
    return arr;
}

namespace {

nlohmann::json vec_json(const CVector& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back({v(i).real(), v(i).imag()});
    return arr;
}

RelationReport make_report(std::string id, std::string eq, nlohmann::json inputs, double residual,
                           double tol) {
    return RelationReport{std::move(id), std::move(eq), std::move(inputs), residual, residual <= tol};
}

} // namespace

RelationReport verify_main_relation(const DeformationOperator& d, const FockTruncation& tr,
                                    const CVector& f, const CVector& g, double tol) {
    if (tr.n_max < 2) throw ContractViolation("verify_main_relation: n_max >= 2 required");
    const auto sh = shuffled(d.t, d.h_dim);
    const CVector fg = kron(f, g);
    const cplx pairing = (f.transpose() * g)(0, 0);
    const auto dims = level_dims(tr);
    const BlockOperator lhs = a_minus(f, tr) * a_plus(g, tr);
    const BlockOperator rhs =
        pair_operators(sh.t_tilde * fg, tr).plus_minus + pairing * identity_operator(dims);
    return make_report("main_relation", "a-(f)a+(g) = a+-(T~ f(x)g) + <f,g>", {{"f", vec_json(f)}, {"g", vec_json(g)}},
                       interior_norm(lhs - rhs), tol);
}

std::vector<RelationReport> verify_pair_relations(const DeformationOperator& d,
                                                  const FockTruncation& tr, double tol) {
    const int h = d.h_dim;
    const Index h2 = static_cast<Index>(h) * h;
    const CMatrix one = identity(h2);
    const auto sh = shuffled(d.t, h);
    const Subspace ker_plus = kernel_basis(one + d.t, d.tol);
    const Subspace complement = range_basis(one + d.t, d.tol);
    const Subspace ker_sq = kernel_basis(one - d.t * d.t, d.tol);
    const int top = tr.n_max;
    std::vector<RelationReport> out;

    double vanish = 0, vanish_mm = 0;
    for (Index c = 0; c < ker_plus.dim(); ++c) {
        const CVector k = ker_plus.frame.col(c);
        vanish = std::max(vanish, block_norm(pair_operators(k, tr).plus_plus, top));
        vanish_mm = std::max(vanish_mm, block_norm(pair_operators(swap_conj(k, h), tr).minus_minus, top));
    }
    out.push_back(make_report("pair_annihilated_kernel", "a++(f2) = 0 for f2 in ker(1+T)",
                              {{"basis_size", ker_plus.dim()}}, vanish, tol));
    out.push_back(make_report("pair_annihilated_kernel_dual", "a--(f2) = 0 for S f2 in ker(1+T)",
                              {{"basis_size", ker_plus.dim()}}, vanish_mm, tol));

    // Converse: a++ is nonzero off the kernel. The residual is the shortfall below 1e-3.
    double smallest = complement.dim() ? 1e300 : 1.0;
    for (Index c = 0; c < complement.dim(); ++c) {
        const CVector v = complement.frame.col(c);
        smallest = std::min(smallest, block_norm(pair_operators(v, tr).plus_plus, top));
    }
    out.push_back(make_report("pair_nonzero_complement", "||a++(f2)|| >= 1e-3 for unit f2 in ran(1+T)",
                              {{"basis_size", complement.dim()}, {"min_norm", smallest}},
                              std::max(0.0, 1e-3 - smallest), 0.0));

    double exch = 0, exch_mm = 0;
    for (Index c = 0; c < ker_sq.dim(); ++c) {
        const CVector v = ker_sq.frame.col(c);
        exch = std::max(exch, block_norm(pair_operators(v, tr).plus_plus -
                                             pair_operators(d.t * v, tr).plus_plus, top));
        const CVector w = swap_conj(v, h);
        exch_mm = std::max(exch_mm, block_norm(pair_operators(w, tr).minus_minus -
                                                   pair_operators(sh.t_hat * w, tr).minus_minus, top));
    }
    out.push_back(make_report("pair_creation_exchange", "a++(f2) = a++(T f2)",
                              {{"basis_size", ker_sq.dim()}}, exch, tol));
    out.push_back(make_report("pair_annihilation_exchange", "a--(f2) = a--(T^ f2)",
                              {{"basis_size", ker_sq.dim()}}, exch_mm, tol));
    return out;
}

std::vector<RelationReport> verify_basis_relations(const DeformationOperator& d,
                                                   const FockTruncation& tr, double tol) {
    const int h = d.h_dim;
    const Index h2 = static_cast<Index>(h) * h;
    const auto sh = shuffled(d.t, h);
    const CMatrix defect = identity(h2) - d.t * d.t;
    const auto dims = level_dims(tr);
    std::vector<BlockOperator> ap, am;
    for (Index i = 0; i < h; ++i) {
        ap.push_back(a_plus(basis_vector(h, i), tr));
        am.push_back(a_minus(basis_vector(h, i), tr));
    }
    double main = 0, cre = 0, ann = 0;
    int cre_count = 0;
    for (Index i = 0; i < h; ++i)
        for (Index j = 0; j < h; ++j) {
            BlockOperator rhs = (i == j ? 1.0 : 0.0) * identity_operator(dims);
            for (Index k = 0; k < h; ++k)
                for (Index l = 0; l < h; ++l) {
                    const cplx c = sh.t_tilde(k * h + l, i * h + j);
                    if (c != cplx(0.0, 0.0)) rhs = rhs + c * (ap[k] * am[l]);
                }
            main = std::max(main, interior_norm(am[i] * ap[j] - rhs));

            if (defect.col(i * h + j).cwiseAbs().maxCoeff() > 1e-12) continue;
            ++cre_count;
            BlockOperator cr = zero_operator(dims), an = zero_operator(dims);
            for (Index k = 0; k < h; ++k)
                for (Index l = 0; l < h; ++l) {
                    const cplx c = d.t(k * h + l, i * h + j);
                    if (c != cplx(0.0, 0.0)) cr = cr + c * (ap[k] * ap[l]);
                    const cplx e = sh.t_hat(k * h + l, j * h + i);
                    if (e != cplx(0.0, 0.0)) an = an + e * (am[k] * am[l]);
                }
            cre = std::max(cre, block_norm(ap[i] * ap[j] - cr, tr.n_max));
            ann = std::max(ann, block_norm(am[j] * am[i] - an, tr.n_max));
        }
    std::vector<RelationReport> out;
    out.push_back(make_report("basis_main", "a-(e_i)a+(e_j) = sum_kl T~[kl,ij] a+(e_k)a-(e_l) + delta_ij",
                              {{"pairs", h * h}}, main, tol));
    out.push_back(make_report("basis_creation_exchange", "a+(e_i)a+(e_j) = sum_kl T[kl,ij] a+(e_k)a+(e_l) if e_i(x)e_j in ker(1-T^2)",
                              {{"pairs", cre_count}}, cre, tol));
    out.push_back(make_report("basis_annihilation_exchange", "a-(e_j)a-(e_i) = sum_kl T^[kl,ji] a-(e_k)a-(e_l) if e_i(x)e_j in ker(1-T^2)",
                              {{"pairs", cre_count}}, ann, tol));
    return out;
}

std::vector<RelationReport> verify_pair_adjoints(const FockTruncation& tr, const CVector& f2,
                                                 double tol) {
    const int h = tr.h_dim;
    const PairOperators p = pair_operators(f2, tr);
    const PairOperators s = pair_operators(swap_conj(f2, h), tr);
    std::vector<RelationReport> out;
    out.push_back(make_report("pair_adjoint_plus_minus", "a+-(f2)^* = a+-(S f2)", {{"f2", vec_json(f2)}},
                              block_norm(adjoint(p.plus_minus) - s.plus_minus, tr.n_max), tol));
    out.push_back(make_report("pair_adjoint_plus_plus", "a++(f2)^* = a--(S f2)", {{"f2", vec_json(f2)}},
                              block_norm(adjoint(p.plus_plus) - s.minus_minus, tr.n_max), tol));
    return out;
}

} // namespace fockforge
