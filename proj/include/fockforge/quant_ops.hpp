#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fockforge/fock_space.hpp"

namespace fockforge {

/// Operator on a Fock truncation as a map (target_level, source_level) -> block.
/// Blocks act on level coordinates; an absent block is zero.
struct BlockOperator {
    std::vector<Index> dims;   // coordinate dimension per level 0..n_max
    std::map<std::pair<int, int>, CMatrix> blocks;

    int n_max() const { return static_cast<int>(dims.size()) - 1; }
    void add_block(int target, int source, const CMatrix& m);
    const CMatrix* find(int target, int source) const;
};

BlockOperator zero_operator(const std::vector<Index>& dims);
BlockOperator identity_operator(const std::vector<Index>& dims);
BlockOperator operator*(const BlockOperator& a, const BlockOperator& b);
BlockOperator operator+(const BlockOperator& a, const BlockOperator& b);
BlockOperator operator-(const BlockOperator& a, const BlockOperator& b);
BlockOperator operator*(cplx c, const BlockOperator& a);
BlockOperator adjoint(const BlockOperator& a);

/// Largest block operator norm among blocks whose source and target are both <= max_level.
double block_norm(const BlockOperator& a, int max_level);
/// Same, for the truncation boundary rule: levels <= n_max - 1.
double interior_norm(const BlockOperator& a);

/// Dense matrix over the concatenated levels 0..n_max.
CMatrix to_dense(const BlockOperator& a);

/// Coordinate dimensions of a truncation.
std::vector<Index> level_dims(const FockTruncation& tr);

/// l^+(f) and l^-(f) on the plain tensor levels H^{(x)n}, n <= n_max (standard coordinates).
BlockOperator left_creation(const CVector& f, const FockTruncation& tr);
BlockOperator left_annihilation(const CVector& f, const FockTruncation& tr);

/// a^+(f): level-n block G_{n+1}^* P_{n+1} (f (x) G_n), top level maps to nothing.
BlockOperator a_plus(const CVector& f, const FockTruncation& tr);

/// a^-(f) = a^+(Jf)^*; the returned value is the adjoint path.
BlockOperator a_minus(const CVector& f, const FockTruncation& tr);

/// a^-(f) via PP_{n-1} l^-(f) TT_n, in deformed coordinates.
BlockOperator a_minus_explicit(const CVector& f, const FockTruncation& tr);

/// Max block difference between the two a^- constructions.
double a_minus_path_gap(const CVector& f, const FockTruncation& tr);

struct ShuffledOperators {
    CMatrix t_tilde;
    CMatrix t_hat;
};

/// Entry reshuffles: t_tilde[(k,l),(i,j)] = t[(i,k),(j,l)], t_hat[(k,l),(i,j)] = conj t[(l,k),(j,i)].
ShuffledOperators shuffled(const CMatrix& t, int h_dim);

/// S(f (x) g) = J(g (x) f); antilinear.
CVector swap_conj(const CVector& f2, int h_dim);

struct PairOperators {
    BlockOperator plus_minus;
    BlockOperator plus_plus;
    BlockOperator minus_minus;
};

/// a^{+-}, a^{++}, a^{--} for f2 in H (x) H, in deformed coordinates.
PairOperators pair_operators(const CVector& f2, const FockTruncation& tr);

/// One verified or falsified identity.
struct RelationReport {
    std::string relation_id;
    std::string formula;       // the identity being checked, in plain text
    nlohmann::json inputs;
    double residual = 0;
    bool pass = false;
};

nlohmann::json to_json(const RelationReport& r);
nlohmann::json to_json(const std::vector<RelationReport>& rs);

/// a^-(f)a^+(g) - a^{+-}(T~ f (x) g) - <f,g> on interior blocks.
RelationReport verify_main_relation(const DeformationOperator& d, const FockTruncation& tr,
                                    const CVector& f, const CVector& g, double tol = 1e-9);

/// Pair relations: a^{++} vanishes on ker(1+T) and not on its complement in F_2;
/// a^{++}(f2) = a^{++}(T f2) on ker(1-T^2); mirrored a^{--} statements with S and T^.
std::vector<RelationReport> verify_pair_relations(const DeformationOperator& d,
                                                  const FockTruncation& tr, double tol = 1e-9);

/// Basis form of the relations, over all basis pairs (i,j). The exchange
/// families are only tested where e_i (x) e_j (resp. its swap) lies in ker(1-T^2).
std::vector<RelationReport> verify_basis_relations(const DeformationOperator& d,
                                                   const FockTruncation& tr, double tol = 1e-9);

/// Adjoint identities a^{+-}(f2)^* = a^{+-}(S f2), a^{++}(f2)^* = a^{--}(S f2).
std::vector<RelationReport> verify_pair_adjoints(const FockTruncation& tr, const CVector& f2,
                                                 double tol = 1e-9);

/// Standard basis vector e_i of C^n.
CVector basis_vector(Index n, Index i);

} // namespace fockforge
