#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fockforge/quant_ops.hpp"

namespace fockforge {

/// N ordered sites, each carrying V = C^m. Site i stands for the point with the
/// i-th smallest first coordinate. One-particle index is site * m + u.
struct SiteModel {
    int n_sites = 0;
    int internal_dim = 2;

    int h_dim() const { return n_sites * internal_dim; }
    Index index(int site, int u) const { return static_cast<Index>(site) * internal_dim + u; }
};

enum class RuleKind { Constant, SignSplit, PerPair, ScalarPair };

std::string to_string(RuleKind k);
RuleKind rule_kind_from(const std::string& s);   // throws SpecError

/// How C_{x,y} is produced for x != y.
///   Constant:   C everywhere
///   SignSplit:  C for x < y, C^* for x > y
///   PerPair:    table for x < y, C_{y,x} = C_{x,y}^*
///   ScalarPair: Q1, Q2 tables for x < y (m = 2), conjugated for x > y
struct CRule {
    RuleKind kind = RuleKind::Constant;
    CMatrix c;
    std::map<std::pair<int, int>, CMatrix> per_pair;
    std::map<std::pair<int, int>, cplx> q1, q2;
};

struct MultiSpec {
    SiteModel sites;
    CRule rule;
    double tol = 1e-9;
};

/// The m = 2 block with Q1 on the anti-diagonal corners and Q2 on the middle diagonal.
CMatrix scalar_pair_block(cplx q1, cplx q2);

/// C_{x,y}; x != y required.
CMatrix rule_block(const MultiSpec& spec, int x, int y);

/// Scalar tables read with Hermitian extension: Q(y,x) = conj Q(x,y).
cplx scalar_q1(const MultiSpec& spec, int x, int y);
cplx scalar_q2(const MultiSpec& spec, int x, int y);

/// Shapes, norms and Hermitian symmetry of every block; throws SpecError.
void validate(const MultiSpec& spec);

/// T on (C^N (x) C^m)^{(x)2}: (x,u)(y,w) <- C_{x,y} acting on the internal part of
/// (y,.)(x,.). Pairs with coinciding sites are mapped to zero.
CMatrix build_t_matrix(const MultiSpec& spec);
DeformationOperator build_T(const MultiSpec& spec);

/// Max over ordered triples of pairwise distinct sites of
/// || C_xy^{12} C_xz^{23} C_yz^{12} - C_yz^{23} C_xz^{12} C_xy^{23} ||_max.
double check_spectral_qybe(const MultiSpec& spec);

/// Orthogonal projection of V(x)2 (+) V(x)2 onto {(u,v) : u - C_{x,y} v in ran(1 - C C^*)}.
struct PairProjection {
    CMatrix p;     // 2m^2 x 2m^2
    CMatrix p1;    // first component map (top rows)
    CMatrix p2;    // second component map (bottom rows)
};

PairProjection pair_projection(const MultiSpec& spec, int x, int y);   // x < y, else ContractViolation

/// PP_2 assembled from the pair projections; identity on coinciding sites.
CMatrix assembled_projection(const MultiSpec& spec);

/// Pointwise membership test: every f(.., x_i, x_{i+1}, ..) - C^{i,i+1} f(.., x_{i+1}, x_i, ..)
/// has no component outside ran(1 - C C^*) in slots i, i+1.
struct MultiMembership {
    bool member = false;
    double residual_ordered = 0;     // worst over tuples with x_i < x_{i+1}
    double residual_reversed = 0;    // worst over tuples with x_i > x_{i+1}
    bool orientations_agree = false;
    bool agrees_with_t = false;      // same verdict as check_membership_theorem on T
};

MultiMembership check_membership_multicomponent(const MultiSpec& spec, const DeformationOperator& d,
                                                const FockLevel& level, const CVector& f,
                                                double tol = 1e-8);

/// Distance between ker(1+T) and the span of f - T f, f supported on one ordered pair
/// x < y with values in ker(1 - C_xy C_xy^*).
double check_ker_one_plus_T(const MultiSpec& spec, const DeformationOperator& d);

/// Reshuffles of a single block; same entry patterns as for T with h = m.
ShuffledOperators shuffled_C(const CMatrix& c, int m);

/// max(|T~ - assembled C~_{y,x}|, |T^ - assembled C^_{y,x}|).
double shuffled_assembly_residual(const MultiSpec& spec, const DeformationOperator& d);

/// C^* maps ker(1-CC^*) onto ker(1-C^*C) and C maps it back; worst defect.
double kernel_bijection_residual(const CMatrix& c, double tol = kDefaultRankTol);

/// Out-of-range norms of u - Cv w.r.t. ran(1-CC^*) and of v - C^*u w.r.t. ran(1-C^*C).
std::pair<double, double> range_condition_pair(const CMatrix& c, const CVector& u, const CVector& v,
                                               double tol = kDefaultRankTol);

/// Indices of the level-n tensor basis with pairwise distinct sites, increasing.
std::vector<Index> distinct_sector(const SiteModel& sites, int n);
CMatrix restrict_to(const CMatrix& a, const std::vector<Index>& idx);

/// Largest entry of T_i coupling the distinct sector to its complement.
double sector_leakage(const SiteModel& sites, const DeformationOperator& d, int n);

/// Level n restricted to the distinct-site sector, which every T_i leaves invariant.
/// P_n is summed over permutations on the sector columns only, so the full
/// h^n x h^n matrix is never formed.
struct SectorLevel {
    std::vector<Index> indices;       // distinct_sector(sites, n)
    std::vector<CMatrix> t_local;     // T_i restricted, i = 1..n-1
    FockLevel level;                  // eigen-data of P_n restricted
};

SectorLevel sector_level(const SiteModel& sites, const DeformationOperator& d, int n,
                         double tol = kDefaultRankTol);

/// ||PP_n - P_n/n!|| on the sector.
double sector_unitary_residual(const SectorLevel& s);

/// Distance between F_n and {f : T_i f = f for all i}, inside the sector.
double sector_fixed_point_distance(const SectorLevel& s, double tol = kDefaultRankTol);

/// Pair (x,y) lies in Y when |Q1(x,y)| >= 1 - 1e-12.
bool in_y_sector(const MultiSpec& spec, int x, int y);

/// Pointwise creation/annihilation operators a_u^{+/-}(x) = a^{+/-}(delta_x (x) e_u).
struct PointOperators {
    SiteModel sites;
    std::vector<BlockOperator> plus, minus;   // indexed by site * m + u

    const BlockOperator& a(char kind, int comp, int site) const;
};

PointOperators point_operators(const SiteModel& sites, const FockTruncation& tr);

/// One factor of a Wick monomial: a_comp^{kind}(site slot), slot 0 = x, 1 = y.
struct Atom {
    char kind = '+';
    int comp = 0;
    int slot = 0;
};

struct Monomial {
    cplx coef;
    Atom first, second;
};

std::string format_coef(cplx c);
std::string format_monomial(const Monomial& t, const char* x = "x", const char* y = "y");
std::string format_terms(const std::vector<Monomial>& ts, const char* x = "x", const char* y = "y");

/// Sum of monomials evaluated at sites (x, y).
BlockOperator evaluate(const PointOperators& ops, const std::vector<Monomial>& ts, int x, int y);

/// Relations read off from C_{x,y} for each ordered site pair and internal basis pair:
/// the a^-a^+ family, creation and annihilation exchanges on ker(1 - C C^*), and the
/// contact family a_i^-(x)a_j^+(x) = delta_ij.
std::vector<RelationReport> relation_discovery(const MultiSpec& spec, const DeformationOperator& d,
                                               const FockTruncation& tr, double tol = 1e-9);

} // namespace fockforge
