#pragma once

#include <vector>

#include <json.hpp>

#include "fockforge/braid_rep.hpp"

namespace fockforge {

/// F_n(H) = ker(P_n)^perp together with the deformed-orthonormal frame.
struct FockLevel {
    int n = 0;
    int h_dim = 0;
    Subspace subspace;            // orthonormal eigenvectors of P_n with kept eigenvalues
    CMatrix gram_root;            // eigenvector / sqrt(eigenvalue); G^* P_n G = 1
    std::vector<double> eigenvalues;   // kept eigenvalues, matching subspace columns
    CMatrix p_n;                  // the positivity operator itself
    double lambda_max = 0;
    double min_kept = 0;          // smallest kept eigenvalue / lambda_max
    double max_dropped = 0;       // largest dropped |eigenvalue| / lambda_max
    double min_eigenvalue = 0;    // signed smallest eigenvalue of P_n (positivity diagnostic)
    int blocks = 1;               // invariant blocks used by the eigensolver
};

/// Deformed Fock truncation: levels 0..n_max; level 0 is the vacuum.
struct FockTruncation {
    int h_dim = 0;
    int n_max = 0;
    double tol = kDefaultRankTol;
    std::vector<FockLevel> levels;
    std::vector<CMatrix> bb_t;       // TT_n per level (identity for n <= 1)
    std::vector<CMatrix> coord;      // G_n^* P_n: raw vector -> coordinates of its projection
    std::vector<CMatrix> proj;       // PP_n

    const FockLevel& level(int n) const { return levels.at(n); }
    Index dim(int n) const { return levels.at(n).gram_root.cols(); }
};

/// Eigendecomposition of a given positivity operator. Eigenvalues above
/// tol * lambda_max are kept. The solver splits P_n into the connected components
/// of its sparsity pattern, so block-diagonal operators are diagonalised per block.
FockLevel fock_level_from(const CMatrix& p_n, int h_dim, int n, double tol = kDefaultRankTol);

/// P_n from p_n_direct (n >= 2); levels 0 and 1 are undeformed.
FockLevel fock_level(const DeformationOperator& d, int n, double tol = kDefaultRankTol,
                     int threads = 1, const DimensionBudget& budget = {});

FockTruncation build_truncation(const DeformationOperator& d, int n_max,
                                double tol = kDefaultRankTol, int threads = 1,
                                const DimensionBudget& budget = {});

/// Orthogonal projection PP_n onto F_n.
CMatrix projection(const FockLevel& level);

/// Distance between ker(P_n) and the span of the ker(1+T_i).
double check_kernel_sum_formula(const DeformationOperator& d, const FockLevel& level);
double check_kernel_sum_formula(const DeformationOperator& d, int n, double tol = kDefaultRankTol);

/// Distance between F_n and the intersection of ran(1+T_i), i = 1..n-1,
/// the intersection taken by iterated parallel sums.
double check_range_intersection(const DeformationOperator& d, const FockLevel& level);
double check_range_intersection(const DeformationOperator& d, int n, double tol = kDefaultRankTol);

struct ParallelSumReport {
    double q1_defect = 0;          // Q1 is an orthogonal projection
    double q2_defect = 0;
    double parallel_sum = 0;       // ||PP_n - 2(Q1:Q2)||
    double factorization = 0;      // max over m of ||PP_n - PP_n(PP_m (x) 1)||, ||PP_n - PP_n(1 (x) PP_m)||
    double worst() const;
};

/// Q1 = product of PP2 promoted to slots (i,i+1), i odd; Q2 the same for i even.
ParallelSumReport check_parallel_sum_prop(const DeformationOperator& d,
                                          const std::vector<FockLevel>& levels, int n);
ParallelSumReport check_parallel_sum_prop(const DeformationOperator& d, int n,
                                          double tol = kDefaultRankTol);

struct MembershipVerdict {
    bool theorem = false;          // every (1-T_i)f lies in ran(1-T_i^2)
    bool direct = false;           // f lies in F_n
    double theorem_residual = 0;   // max_i of the out-of-range component, relative to ||f||
    double direct_residual = 0;    // ||f - PP_n f|| / ||f||
    bool agree() const { return theorem == direct; }
};

MembershipVerdict check_membership_theorem(const DeformationOperator& d, const FockLevel& level,
                                           const CVector& f, double tol = 1e-8);

/// Distance between ker(1+T) and (1-T) ker(1-T^2).
double check_kerrT_lemma(const DeformationOperator& d, double tol = kDefaultRankTol);

/// ||PP_n - P_n / n!||, meaningful for unitary T.
double unitary_projection_residual(const FockLevel& level);

/// Distance between F_n and {f : T_i f = f for all i}.
double fixed_point_distance(const DeformationOperator& d, const FockLevel& level);

/// ||G^* P_n G - 1||.
double gram_identity_residual(const FockLevel& level);

/// {n, dim, eigenvalues[], frame[][]} with [re, im] scalars.
nlohmann::json level_to_json(const FockLevel& level);

} // namespace fockforge
