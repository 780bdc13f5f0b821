#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

#include "fockforge/errors.hpp"

namespace fockforge {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kDefaultRankTol = 1e-9;

// Largest matrix (rows*cols) the library will allocate without complaint.
inline constexpr std::size_t kMaxEntries = std::size_t(1) << 28;

/// Throws SpecError if any entry is NaN or infinite.
void require_finite(const CMatrix& a, const char* what);

/// a*b with overflow and budget check; throws SizeError.
std::size_t checked_product(std::size_t a, std::size_t b);

/// Kronecker product, lexicographic index order ((i,k),(j,l)) -> a(i,j)b(k,l).
CMatrix kron(const CMatrix& a, const CMatrix& b);
CVector kron(const CVector& a, const CVector& b);

CMatrix identity(Index n);

/// Spectral norm (largest singular value).
double op_norm(const CMatrix& a);

/// Entrywise complex conjugation, the real structure J of the standard basis.
CVector apply_j(const CVector& v);

/// Orthonormal column frame of a subspace of C^ambient_dim.
struct Subspace {
    Index ambient_dim = 0;
    CMatrix frame;            // ambient_dim x k
    double tol = kDefaultRankTol;

    Index dim() const { return frame.cols(); }
};

Subspace zero_subspace(Index ambient_dim, double tol = kDefaultRankTol);
Subspace full_subspace(Index ambient_dim, double tol = kDefaultRankTol);

/// Null space of a: right singular vectors with sigma <= tol * sigma_max.
Subspace kernel_basis(const CMatrix& a, double tol = kDefaultRankTol);

/// Column space of a: left singular vectors with sigma > tol * sigma_max.
Subspace range_basis(const CMatrix& a, double tol = kDefaultRankTol);

/// frame * frame^*
CMatrix projector(const Subspace& s);

/// Rewrites the frame into a basis that depends only on the subspace:
/// Gram-Schmidt over the projector's columns in natural order, each column
/// phased so its first entry above threshold is real positive.
Subspace canonical(const Subspace& s);

/// Multiplies each column by a phase making its first significant entry real positive.
void fix_column_phases(CMatrix& frame, double threshold = 1e-12);

/// Max of ||p^2 - p|| and ||p - p^*|| (entrywise max norm).
double projection_defect(const CMatrix& p);

/// Projection onto ran(p1) ∩ ran(p2), i.e. 2(P1:P2). Computed as the
/// projector onto ker [1-p1; 1-p2] and cross-checked against the
/// Anderson-Duffin form; throws ContractViolation if inputs are not
/// projections and VerificationFailure if the two forms disagree.
CMatrix parallel_sum_projection(const CMatrix& p1, const CMatrix& p2,
                                double tol = kDefaultRankTol);

/// 2 p1 (p1+p2)^+ p2, with the pseudo-inverse taken spectrally.
CMatrix anderson_duffin(const CMatrix& p1, const CMatrix& p2,
                        double tol = kDefaultRankTol);

/// Moore-Penrose inverse of a Hermitian matrix.
CMatrix hermitian_pinv(const CMatrix& a, double tol = kDefaultRankTol);

/// Operator-norm distance between the orthogonal projectors of s1 and s2.
double subspace_distance(const Subspace& s1, const Subspace& s2);

/// Smallest subspace containing both.
Subspace subspace_sum(const Subspace& a, const Subspace& b);

/// Max-abs entry of a - b (dims must agree).
double max_abs_diff(const CMatrix& a, const CMatrix& b);

} // namespace fockforge
