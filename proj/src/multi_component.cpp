#include "fockforge/multi_component.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace fockforge {

std::string to_string(RuleKind k) {
    switch (k) {
    case RuleKind::Constant: return "Constant";
    case RuleKind::SignSplit: return "SignSplit";
    case RuleKind::PerPair: return "PerPair";
    case RuleKind::ScalarPair: return "ScalarPair";
    }
    return "?";
}

RuleKind rule_kind_from(const std::string& s) {
    if (s == "Constant") return RuleKind::Constant;
    if (s == "SignSplit") return RuleKind::SignSplit;
    if (s == "PerPair") return RuleKind::PerPair;
    if (s == "ScalarPair") return RuleKind::ScalarPair;
    throw SpecError("unknown rule kind '" + s + "'");
}

CMatrix scalar_pair_block(cplx q1, cplx q2) {
    CMatrix c = CMatrix::Zero(4, 4);
    c(0, 3) = q1;
    c(3, 0) = q1;
    c(1, 1) = q2;
    c(2, 2) = q2;
    return c;
}

namespace {

cplx scalar_lookup(const std::map<std::pair<int, int>, cplx>& table, int x, int y, const char* name) {
    const bool swap = x > y;
    const auto it = table.find(swap ? std::make_pair(y, x) : std::make_pair(x, y));
    if (it == table.end())
        throw SpecError(std::string(name) + " has no entry for sites (" + std::to_string(std::min(x, y)) +
                        ", " + std::to_string(std::max(x, y)) + ")");
    return swap ? std::conj(it->second) : it->second;
}

void require_sites(const MultiSpec& spec, int x, int y) {
    const int n = spec.sites.n_sites;
    if (x < 0 || y < 0 || x >= n || y >= n) throw ContractViolation("site index out of range");
    if (x == y) throw ContractViolation("C_{x,y} is only defined for distinct sites");
}

Index pow_index(Index base, int e) {
    Index r = 1;
    for (int k = 0; k < e; ++k) r *= base;
    return r;
}

// Sites and internal labels of a level-n basis index.
void decode(const SiteModel& s, int n, Index idx, std::vector<int>& site, std::vector<int>& comp) {
    site.assign(n, 0);
    comp.assign(n, 0);
    const Index h = s.h_dim();
    for (int k = n - 1; k >= 0; --k) {
        const Index one = idx % h;
        idx /= h;
        site[k] = static_cast<int>(one / s.internal_dim);
        comp[k] = static_cast<int>(one % s.internal_dim);
    }
}

Index encode(const SiteModel& s, const std::vector<int>& site, const std::vector<int>& comp) {
    Index idx = 0;
    for (std::size_t k = 0; k < site.size(); ++k) idx = idx * s.h_dim() + s.index(site[k], comp[k]);
    return idx;
}

CMatrix embed_pair(const CMatrix& c, int m, int n, int i) {
    return kron(identity(pow_index(m, i - 1)), kron(c, identity(pow_index(m, n - i - 1))));
}

} // namespace

cplx scalar_q1(const MultiSpec& spec, int x, int y) { return scalar_lookup(spec.rule.q1, x, y, "Q1"); }
cplx scalar_q2(const MultiSpec& spec, int x, int y) { return scalar_lookup(spec.rule.q2, x, y, "Q2"); }

CMatrix rule_block(const MultiSpec& spec, int x, int y) {
    require_sites(spec, x, y);
    const CRule& r = spec.rule;
    switch (r.kind) {
    case RuleKind::Constant: return r.c;
    case RuleKind::SignSplit: return x < y ? r.c : CMatrix(r.c.adjoint());
    case RuleKind::PerPair: {
        const auto it = r.per_pair.find({std::min(x, y), std::max(x, y)});
        if (it == r.per_pair.end())
            throw SpecError("PerPair rule has no block for sites (" + std::to_string(std::min(x, y)) + ", " +
                            std::to_string(std::max(x, y)) + ")");
        return x < y ? it->second : CMatrix(it->second.adjoint());
    }
    case RuleKind::ScalarPair: return scalar_pair_block(scalar_q1(spec, x, y), scalar_q2(spec, x, y));
    }
    throw ContractViolation("rule_block: unknown kind");
}

void validate(const MultiSpec& spec) {
    const int n = spec.sites.n_sites, m = spec.sites.internal_dim;
    if (n < 1) throw SpecError("n_sites must be at least 1");
    if (m < 2) throw SpecError("internal_dim must be at least 2");
    if (!(spec.tol > 0) || !std::isfinite(spec.tol)) throw SpecError("tol must be positive");
    if (spec.rule.kind == RuleKind::ScalarPair && m != 2)
        throw SpecError("ScalarPair rules require internal_dim = 2");
    const Index m2 = static_cast<Index>(m) * m;
    const double tol = std::max(spec.tol, 1e-12);
    if (spec.rule.kind == RuleKind::Constant || spec.rule.kind == RuleKind::SignSplit) {
        if (spec.rule.c.rows() != m2 || spec.rule.c.cols() != m2)
            throw SpecError("rule matrix must be m^2 x m^2");
        require_finite(spec.rule.c, "rule matrix");
    }
    if (spec.rule.kind == RuleKind::PerPair)
        for (const auto& [key, c] : spec.rule.per_pair) {
            if (key.first >= key.second || key.first < 0 || key.second >= n)
                throw SpecError("PerPair keys must be site pairs i < j within range");
            if (c.rows() != m2 || c.cols() != m2) throw SpecError("PerPair block must be m^2 x m^2");
            require_finite(c, "PerPair block");
        }
    if (spec.rule.kind == RuleKind::ScalarPair)
        for (const auto* table : {&spec.rule.q1, &spec.rule.q2})
            for (const auto& [key, q] : *table) {
                if (key.first >= key.second || key.first < 0 || key.second >= n)
                    throw SpecError("ScalarPair keys must be site pairs i < j within range");
                if (!std::isfinite(q.real()) || !std::isfinite(q.imag()))
                    throw SpecError("ScalarPair entry is not finite");
            }
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            const CMatrix cxy = rule_block(spec, x, y);
            const CMatrix cyx = rule_block(spec, y, x);
            const double herm = max_abs_diff(cxy.adjoint(), cyx);
            if (herm > tol)
                throw SpecError("C_{x,y}^* != C_{y,x} for sites (" + std::to_string(x) + ", " +
                                std::to_string(y) + "), residual " + std::to_string(herm));
            const double nrm = op_norm(cxy);
            if (nrm > 1.0 + tol)
                throw SpecError("||C_{x,y}|| = " + std::to_string(nrm) + " exceeds 1 for sites (" +
                                std::to_string(x) + ", " + std::to_string(y) + ")");
        }
    // Constant rules must also be self-adjoint, since C_{x,y} = C_{y,x} = C.
    if (spec.rule.kind == RuleKind::Constant && max_abs_diff(spec.rule.c, spec.rule.c.adjoint()) > tol)
        throw SpecError("Constant rule matrix must be self-adjoint");
}

CMatrix build_t_matrix(const MultiSpec& spec) {
    validate(spec);
    const SiteModel& s = spec.sites;
    const int m = s.internal_dim;
    const Index h = s.h_dim();
    CMatrix t = CMatrix::Zero(h * h, h * h);
    for (int x = 0; x < s.n_sites; ++x)
        for (int y = 0; y < s.n_sites; ++y) {
            if (x == y) continue;
            const CMatrix c = rule_block(spec, x, y);
            for (int u = 0; u < m; ++u)
                for (int w = 0; w < m; ++w)
                    for (int u2 = 0; u2 < m; ++u2)
                        for (int w2 = 0; w2 < m; ++w2)
                            t(s.index(x, u) * h + s.index(y, w), s.index(y, u2) * h + s.index(x, w2)) +=
                                c(u * m + w, u2 * m + w2);
        }
    return t;
}

DeformationOperator build_T(const MultiSpec& spec) {
    return make_deformation(build_t_matrix(spec), spec.sites.h_dim(), spec.tol);
}

double check_spectral_qybe(const MultiSpec& spec) {
    const int n = spec.sites.n_sites, m = spec.sites.internal_dim;
    const CMatrix one = identity(m);
    double worst = 0;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z) {
                if (x == y || y == z || x == z) continue;
                const CMatrix cxy = rule_block(spec, x, y), cxz = rule_block(spec, x, z),
                              cyz = rule_block(spec, y, z);
                const CMatrix lhs = kron(cxy, one) * kron(one, cxz) * kron(cyz, one);
                const CMatrix rhs = kron(one, cyz) * kron(cxz, one) * kron(one, cxy);
                worst = std::max(worst, max_abs_diff(lhs, rhs));
            }
    return worst;
}

PairProjection pair_projection(const MultiSpec& spec, int x, int y) {
    require_sites(spec, x, y);
    if (!(x < y)) throw ContractViolation("pair_projection: x < y required");
    const CMatrix c = rule_block(spec, x, y);
    const Index m2 = c.rows();
    const CMatrix one = identity(m2);
    const CMatrix ran = projector(range_basis(one - c * c.adjoint(), spec.tol));
    CMatrix cond(m2, 2 * m2);
    cond << one, -c;
    const Subspace w = kernel_basis((one - ran) * cond, spec.tol);
    PairProjection p;
    p.p = projector(w);
    p.p1 = p.p.topRows(m2);
    p.p2 = p.p.bottomRows(m2);
    return p;
}

CMatrix assembled_projection(const MultiSpec& spec) {
    const SiteModel& s = spec.sites;
    const int m = s.internal_dim;
    const Index h = s.h_dim(), m2 = static_cast<Index>(m) * m;
    CMatrix out = CMatrix::Zero(h * h, h * h);
    for (int x = 0; x < s.n_sites; ++x)
        for (int u = 0; u < m; ++u)
            for (int w = 0; w < m; ++w) {
                const Index k = s.index(x, u) * h + s.index(x, w);
                out(k, k) = 1.0;
            }
    for (int x = 0; x < s.n_sites; ++x)
        for (int y = x + 1; y < s.n_sites; ++y) {
            const PairProjection p = pair_projection(spec, x, y);
            // Row/column r < m2 is (x,y) with internal r, r >= m2 is (y,x).
            auto full = [&](Index r) {
                const Index iu = r % m2;
                const int u = static_cast<int>(iu / m), w = static_cast<int>(iu % m);
                return r < m2 ? s.index(x, u) * h + s.index(y, w) : s.index(y, u) * h + s.index(x, w);
            };
            for (Index r = 0; r < 2 * m2; ++r)
                for (Index c = 0; c < 2 * m2; ++c) out(full(r), full(c)) = p.p(r, c);
        }
    return out;
}

MultiMembership check_membership_multicomponent(const MultiSpec& spec, const DeformationOperator& d,
                                                const FockLevel& level, const CVector& f, double tol) {
    const SiteModel& s = spec.sites;
    const int n = level.n, m = s.internal_dim;
    if (f.size() != level.p_n.rows()) throw ContractViolation("membership: vector size");
    const double nf = f.norm();
    const auto sector = distinct_sector(s, n);
    CVector outside = f;
    for (Index k : sector) outside(k) = 0.0;
    if (nf > 0 && outside.norm() > 1e-10 * nf)
        throw ContractViolation("membership: f must lie in the distinct-site sector");

    MultiMembership out;
    if (nf > 0 && n >= 2) {
        const Index mi = pow_index(m, n);
        std::vector<int> site, comp;
        std::vector<std::vector<int>> tuples;
        for (Index k = 0; k < static_cast<Index>(sector.size()); k += mi) {
            decode(s, n, sector[k], site, comp);
            tuples.push_back(site);
        }
        std::vector<int> u(n);
        auto internal = [&](const std::vector<int>& st) {
            CVector v(mi);
            for (Index a = 0; a < mi; ++a) {
                Index rest = a;
                for (int k = n - 1; k >= 0; --k) {
                    u[k] = static_cast<int>(rest % m);
                    rest /= m;
                }
                v(a) = f(encode(s, st, u));
            }
            return v;
        };
        for (int i = 1; i <= n - 1; ++i)
            for (const auto& st : tuples) {
                const int xi = st[i - 1], xj = st[i];
                const CMatrix c = rule_block(spec, xi, xj);
                const Index m2 = c.rows();
                const CMatrix ran = projector(range_basis(identity(m2) - c * c.adjoint(), spec.tol));
                std::vector<int> sw = st;
                std::swap(sw[i - 1], sw[i]);
                const CVector r = internal(st) - embed_pair(c, m, n, i) * internal(sw);
                const double out_of_range = (r - embed_pair(ran, m, n, i) * r).norm() / nf;
                double& slot = xi < xj ? out.residual_ordered : out.residual_reversed;
                slot = std::max(slot, out_of_range);
            }
    }
    const bool ordered_ok = out.residual_ordered <= tol, reversed_ok = out.residual_reversed <= tol;
    out.member = ordered_ok && reversed_ok;
    out.orientations_agree = ordered_ok == reversed_ok;
    out.agrees_with_t = check_membership_theorem(d, level, f, tol).theorem == out.member;
    return out;
}

double check_ker_one_plus_T(const MultiSpec& spec, const DeformationOperator& d) {
    const SiteModel& s = spec.sites;
    const int m = s.internal_dim;
    const Index h = s.h_dim(), h2 = h * h;
    std::vector<CVector> gens;
    for (int x = 0; x < s.n_sites; ++x)
        for (int y = x + 1; y < s.n_sites; ++y) {
            const CMatrix c = rule_block(spec, x, y);
            const Subspace k = kernel_basis(identity(c.rows()) - c * c.adjoint(), spec.tol);
            for (Index col = 0; col < k.dim(); ++col) {
                CVector f = CVector::Zero(h2);
                for (int u = 0; u < m; ++u)
                    for (int w = 0; w < m; ++w) f(s.index(x, u) * h + s.index(y, w)) = k.frame(u * m + w, col);
                gens.push_back(f - d.t * f);
            }
        }
    Subspace built = zero_subspace(h2);
    if (!gens.empty()) {
        CMatrix g(h2, static_cast<Index>(gens.size()));
        for (std::size_t c = 0; c < gens.size(); ++c) g.col(static_cast<Index>(c)) = gens[c];
        built = range_basis(g, spec.tol);
    }
    return subspace_distance(built, kernel_basis(identity(h2) + d.t, spec.tol));
}

ShuffledOperators shuffled_C(const CMatrix& c, int m) {
    if (c.rows() != static_cast<Index>(m) * m || c.cols() != c.rows())
        throw ContractViolation("shuffled_C: block must be m^2 x m^2");
    return shuffled(c, m);
}

double shuffled_assembly_residual(const MultiSpec& spec, const DeformationOperator& d) {
    const SiteModel& s = spec.sites;
    const int m = s.internal_dim;
    const Index h = s.h_dim();
    CMatrix tt = CMatrix::Zero(h * h, h * h), th = tt;
    for (int x = 0; x < s.n_sites; ++x)
        for (int y = 0; y < s.n_sites; ++y) {
            if (x == y) continue;
            const ShuffledOperators sc = shuffled_C(rule_block(spec, y, x), m);
            for (int u = 0; u < m; ++u)
                for (int w = 0; w < m; ++w)
                    for (int u2 = 0; u2 < m; ++u2)
                        for (int w2 = 0; w2 < m; ++w2) {
                            const Index r = s.index(x, u) * h + s.index(y, w);
                            const Index c = s.index(y, u2) * h + s.index(x, w2);
                            tt(r, c) += sc.t_tilde(u * m + w, u2 * m + w2);
                            th(r, c) += sc.t_hat(u * m + w, u2 * m + w2);
                        }
        }
    const ShuffledOperators st = shuffled(d.t, static_cast<int>(h));
    return std::max(max_abs_diff(st.t_tilde, tt), max_abs_diff(st.t_hat, th));
}

double kernel_bijection_residual(const CMatrix& c, double tol) {
    const CMatrix one = identity(c.rows());
    const Subspace k1 = kernel_basis(one - c * c.adjoint(), tol);
    const Subspace k2 = kernel_basis(one - c.adjoint() * c, tol);
    if (k1.dim() != k2.dim()) return 1.0;
    if (k1.dim() == 0) return 0.0;
    const CMatrix p2 = projector(k2), p1 = projector(k1);
    const CMatrix img = c.adjoint() * k1.frame;   // lands in ker(1 - C^*C)
    const CMatrix back = c * k2.frame;            // lands in ker(1 - CC^*)
    double r = (img - p2 * img).norm();
    r = std::max(r, (back - p1 * back).norm());
    r = std::max(r, (c * img - k1.frame).norm());
    r = std::max(r, (c.adjoint() * back - k2.frame).norm());
    return r;
}

std::pair<double, double> range_condition_pair(const CMatrix& c, const CVector& u, const CVector& v,
                                               double tol) {
    const CMatrix one = identity(c.rows());
    const CMatrix r1 = projector(range_basis(one - c * c.adjoint(), tol));
    const CMatrix r2 = projector(range_basis(one - c.adjoint() * c, tol));
    const CVector a = u - c * v, b = v - c.adjoint() * u;
    return {(a - r1 * a).norm(), (b - r2 * b).norm()};
}

std::vector<Index> distinct_sector(const SiteModel& sites, int n) {
    const Index total = pow_index(sites.h_dim(), n);
    std::vector<Index> out;
    std::vector<int> site, comp;
    for (Index k = 0; k < total; ++k) {
        decode(sites, n, k, site, comp);
        bool ok = true;
        for (int a = 0; a < n && ok; ++a)
            for (int b = a + 1; b < n && ok; ++b) ok = site[a] != site[b];
        if (ok) out.push_back(k);
    }
    return out;
}

CMatrix restrict_to(const CMatrix& a, const std::vector<Index>& idx) {
    const Index k = static_cast<Index>(idx.size());
    CMatrix out(k, k);
    for (Index c = 0; c < k; ++c)
        for (Index r = 0; r < k; ++r) out(r, c) = a(idx[r], idx[c]);
    return out;
}

namespace {

CMatrix sector_columns(Index total, const std::vector<Index>& idx) {
    CMatrix e = CMatrix::Zero(total, static_cast<Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) e(idx[c], static_cast<Index>(c)) = 1.0;
    return e;
}

CMatrix rows_of(const CMatrix& a, const std::vector<Index>& idx) {
    CMatrix out(static_cast<Index>(idx.size()), a.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Index>(r)) = a.row(idx[r]);
    return out;
}

} // namespace

double sector_leakage(const SiteModel& sites, const DeformationOperator& d, int n) {
    const auto idx = distinct_sector(sites, n);
    const Index total = pow_index(sites.h_dim(), n);
    std::vector<char> in(total, 0);
    for (Index k : idx) in[k] = 1;
    double worst = 0;
    for (int i = 1; i <= n - 1; ++i) {
        CMatrix m = sector_columns(total, idx);
        apply_local(d.t, d.h_dim, n, i, m);
        for (Index r = 0; r < total; ++r)
            if (!in[r]) worst = std::max(worst, m.row(r).cwiseAbs().maxCoeff());
    }
    return worst;
}

SectorLevel sector_level(const SiteModel& sites, const DeformationOperator& d, int n, double tol) {
    if (n < 1) throw ContractViolation("sector_level: n >= 1 required");
    if (!d.ybe) throw YbeViolation("T does not satisfy the braid relation; P_n is not defined");
    SectorLevel out;
    out.indices = distinct_sector(sites, n);
    const Index total = pow_index(sites.h_dim(), n);
    const Index k = static_cast<Index>(out.indices.size());
    const CMatrix e = sector_columns(total, out.indices);
    for (int i = 1; i <= n - 1; ++i) {
        CMatrix m = e;
        apply_local(d.t, d.h_dim, n, i, m);
        out.t_local.push_back(rows_of(m, out.indices));
    }
    CMatrix p = CMatrix::Zero(k, k);
    if (n == 1) {
        p = identity(k);
    } else {
        for (const auto& perm : all_permutations(n)) {
            CMatrix m = e;
            const ReducedWord w = reduced_word(perm);
            for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) apply_local(d.t, d.h_dim, n, *it, m);
            p += rows_of(m, out.indices);
        }
    }
    out.level = fock_level_from(p, d.h_dim, n, tol);
    return out;
}

double sector_unitary_residual(const SectorLevel& s) {
    if (s.indices.empty()) return 0.0;
    return unitary_projection_residual(s.level);
}

double sector_fixed_point_distance(const SectorLevel& s, double tol) {
    const Index k = static_cast<Index>(s.indices.size());
    if (k == 0 || s.t_local.empty()) return 0.0;
    CMatrix stacked(k * static_cast<Index>(s.t_local.size()), k);
    for (std::size_t i = 0; i < s.t_local.size(); ++i)
        stacked.middleRows(static_cast<Index>(i) * k, k) = s.t_local[i] - identity(k);
    return subspace_distance(s.level.subspace, kernel_basis(stacked, tol));
}

bool in_y_sector(const MultiSpec& spec, int x, int y) {
    if (spec.rule.kind != RuleKind::ScalarPair) return false;
    return std::abs(scalar_q1(spec, x, y)) >= 1.0 - 1e-12;
}

const BlockOperator& PointOperators::a(char kind, int comp, int site) const {
    const Index k = sites.index(site, comp);
    return kind == '+' ? plus.at(k) : minus.at(k);
}

PointOperators point_operators(const SiteModel& sites, const FockTruncation& tr) {
    if (tr.h_dim != sites.h_dim()) throw ContractViolation("point_operators: dimension mismatch");
    PointOperators ops;
    ops.sites = sites;
    for (Index k = 0; k < sites.h_dim(); ++k) {
        ops.plus.push_back(a_plus(basis_vector(sites.h_dim(), k), tr));
        ops.minus.push_back(a_minus(basis_vector(sites.h_dim(), k), tr));
    }
    return ops;
}

std::string format_coef(cplx c) {
    char buf[64];
    const double re = std::abs(c.real()) < 5e-13 ? 0.0 : c.real();
    const double im = std::abs(c.imag()) < 5e-13 ? 0.0 : c.imag();
    if (im == 0.0)
        std::snprintf(buf, sizeof buf, "%.6g", re);
    else if (re == 0.0)
        std::snprintf(buf, sizeof buf, "%.6gi", im);
    else
        std::snprintf(buf, sizeof buf, "(%.6g%+.6gi)", re, im);
    return buf;
}

std::string format_monomial(const Monomial& t, const char* x, const char* y) {
    auto atom = [&](const Atom& a) {
        return "a_" + std::to_string(a.comp + 1) + "^" + a.kind + "(" + (a.slot == 0 ? x : y) + ")";
    };
    std::string c = format_coef(t.coef);
    std::string prefix = c == "1" ? "" : (c == "-1" ? "-" : c + " ");
    return prefix + atom(t.first) + atom(t.second);
}

std::string format_terms(const std::vector<Monomial>& ts, const char* x, const char* y) {
    if (ts.empty()) return "0";
    std::string out;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        if (k) out += " + ";
        out += format_monomial(ts[k], x, y);
    }
    return out;
}

BlockOperator evaluate(const PointOperators& ops, const std::vector<Monomial>& ts, int x, int y) {
    const auto& any = ops.plus.at(0);
    BlockOperator acc = zero_operator(any.dims);
    for (const auto& t : ts) {
        const int s1 = t.first.slot == 0 ? x : y, s2 = t.second.slot == 0 ? x : y;
        acc = acc + t.coef * (ops.a(t.first.kind, t.first.comp, s1) * ops.a(t.second.kind, t.second.comp, s2));
    }
    return acc;
}

namespace {

std::string site_name(int s) { return "x" + std::to_string(s + 1); }

// Monomials sum_{uw} v[u m + w] a_u^{k1}(slot1) a_w^{k2}(slot2), dropping zero coefficients.
std::vector<Monomial> internal_terms(const CVector& v, int m, char k1, int slot1, char k2, int slot2,
                                     bool conj_coef, bool swap_order) {
    std::vector<Monomial> out;
    for (int u = 0; u < m; ++u)
        for (int w = 0; w < m; ++w) {
            cplx c = v(u * m + w);
            if (std::abs(c) < 1e-13) continue;
            if (conj_coef) c = std::conj(c);
            Atom a{k1, u, slot1}, b{k2, w, slot2};
            out.push_back(swap_order ? Monomial{c, b, a} : Monomial{c, a, b});
        }
    return out;
}

} // namespace

std::vector<RelationReport> relation_discovery(const MultiSpec& spec, const DeformationOperator& d,
                                               const FockTruncation& tr, double tol) {
    const SiteModel& s = spec.sites;
    const int m = s.internal_dim;
    const Index h = s.h_dim();
    const PointOperators ops = point_operators(s, tr);
    const auto dims = level_dims(tr);
    const CMatrix tt = shuffled(d.t, static_cast<int>(h)).t_tilde;
    std::vector<RelationReport> out;

    for (int x = 0; x < s.n_sites; ++x)
        for (int y = 0; y < s.n_sites; ++y) {
            const std::string xn = site_name(x), yn = site_name(y);
            if (x == y) {
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) {
                        const BlockOperator lhs = ops.a('-', i, x) * ops.a('+', j, x);
                        const BlockOperator rhs = (i == j ? 1.0 : 0.0) * identity_operator(dims);
                        const double r = interior_norm(lhs - rhs);
                        out.push_back({"contact",
                                       "a_" + std::to_string(i + 1) + "^-(" + xn + ")a_" + std::to_string(j + 1) +
                                           "^+(" + xn + ") = " + (i == j ? "1" : "0"),
                                       {{"x", x}, {"i", i + 1}, {"j", j + 1}}, r, r <= tol});
                    }
                continue;
            }
            // a^-a^+ family from T~.
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    const Index col = s.index(x, i) * h + s.index(y, j);
                    std::vector<Monomial> rhs;
                    for (Index row = 0; row < h * h; ++row) {
                        const cplx c = tt(row, col);
                        if (std::abs(c) < 1e-13) continue;
                        const Index k = row / h, l = row % h;
                        const int ks = static_cast<int>(k / m), ls = static_cast<int>(l / m);
                        if (!((ks == x || ks == y) && (ls == x || ls == y)))
                            throw VerificationFailure("shuffled T couples a third site");
                        rhs.push_back({c, {'+', static_cast<int>(k % m), ks == x ? 0 : 1},
                                       {'-', static_cast<int>(l % m), ls == x ? 0 : 1}});
                    }
                    const std::vector<Monomial> lhs{{1.0, {'-', i, 0}, {'+', j, 1}}};
                    const double r = interior_norm(evaluate(ops, lhs, x, y) - evaluate(ops, rhs, x, y));
                    out.push_back({"annihilation_creation",
                                   format_terms(lhs, xn.c_str(), yn.c_str()) + " = " +
                                       format_terms(rhs, xn.c_str(), yn.c_str()),
                                   {{"x", x}, {"y", y}, {"i", i + 1}, {"j", j + 1}}, r, r <= tol});
                }
            // Exchange families on ker(1 - C C^*).
            const CMatrix cxy = rule_block(spec, x, y), cyx = rule_block(spec, y, x);
            const Subspace ker = canonical(kernel_basis(identity(cxy.rows()) - cxy * cxy.adjoint(), spec.tol));
            for (Index col = 0; col < ker.dim(); ++col) {
                const CVector v = ker.frame.col(col), cv = cyx * v;
                const auto cl = internal_terms(v, m, '+', 0, '+', 1, false, false);
                const auto cr = internal_terms(cv, m, '+', 1, '+', 0, false, false);
                const double rc = block_norm(evaluate(ops, cl, x, y) - evaluate(ops, cr, x, y), tr.n_max);
                out.push_back({"creation_exchange",
                               format_terms(cl, xn.c_str(), yn.c_str()) + " = " +
                                   format_terms(cr, xn.c_str(), yn.c_str()),
                               {{"x", x}, {"y", y}, {"kernel_vector", col}}, rc, rc <= tol});
                const auto al = internal_terms(v, m, '-', 0, '-', 1, true, true);
                const auto ar = internal_terms(cv, m, '-', 1, '-', 0, true, true);
                const double ra = block_norm(evaluate(ops, al, x, y) - evaluate(ops, ar, x, y), tr.n_max);
                out.push_back({"annihilation_exchange",
                               format_terms(al, xn.c_str(), yn.c_str()) + " = " +
                                   format_terms(ar, xn.c_str(), yn.c_str()),
                               {{"x", x}, {"y", y}, {"kernel_vector", col}}, ra, ra <= tol});
            }
        }
    return out;
}

} // namespace fockforge
