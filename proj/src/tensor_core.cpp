#include "fockforge/tensor_core.hpp"

#include <Eigen/SVD>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>

namespace fockforge {

void require_finite(const CMatrix& a, const char* what) {
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag()))
                throw SpecError(std::string(what) + ": non-finite entry at (" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
}

std::size_t checked_product(std::size_t a, std::size_t b) {
    if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a)
        throw SizeError("dimension product overflows");
    return a * b;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    std::size_t rows = checked_product(a.rows(), b.rows());
    std::size_t cols = checked_product(a.cols(), b.cols());
    if (checked_product(rows, cols) > kMaxEntries)
        throw SizeError("kron result " + std::to_string(rows) + "x" + std::to_string(cols) +
                        " exceeds the entry budget");
    CMatrix out(rows, cols);
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CVector kron(const CVector& a, const CVector& b) {
    std::size_t n = checked_product(a.size(), b.size());
    if (n > kMaxEntries) throw SizeError("kron vector exceeds the entry budget");
    CVector out(n);
    for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

CMatrix identity(Index n) { return CMatrix::Identity(n, n); }

double op_norm(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::BDCSVD<CMatrix> svd(a);
    return svd.singularValues()(0);
}

CVector apply_j(const CVector& v) { return v.conjugate(); }

Subspace zero_subspace(Index ambient_dim, double tol) {
    return Subspace{ambient_dim, CMatrix(ambient_dim, 0), tol};
}

Subspace full_subspace(Index ambient_dim, double tol) {
    return Subspace{ambient_dim, identity(ambient_dim), tol};
}

namespace {

// BDCSVD in Eigen 3.4.0 occasionally returns a wrong null space on large, heavily rank-deficient
// inputs. Each result is checked against the input and recomputed with JacobiSVD when it does not hold.
template <class Svd>
Index numerical_rank(const Svd& svd, double tol) {
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    // Relative cut, with an absolute floor so that a matrix of pure rounding noise has rank 0.
    const double floor = 100 * std::numeric_limits<double>::epsilon() * double(std::max(svd.rows(), svd.cols()));
    const double cut = std::max(tol * s(0), floor);
    Index rank = 0;
    while (rank < s.size() && s(rank) > cut) ++rank;
    return rank;
}

double frame_slack(const CMatrix& a, double tol) {
    return std::max(1e-10, 10 * tol) * std::max(1.0, a.cwiseAbs().maxCoeff() * std::sqrt(double(a.cols())));
}

bool orthonormal(const CMatrix& q) {
    if (q.cols() == 0) return true;
    return (q.adjoint() * q - identity(q.cols())).cwiseAbs().maxCoeff() < 1e-10;
}

} // namespace

Subspace kernel_basis(const CMatrix& a, double tol) {
    const Index n = a.cols();
    if (a.rows() == 0 || n == 0) return full_subspace(n, tol);
    const double slack = frame_slack(a, tol);
    CMatrix frame;
    {
        Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeFullV);
        frame = svd.matrixV().rightCols(n - numerical_rank(svd, tol));
    }
    if (!orthonormal(frame) || (frame.cols() > 0 && (a * frame).cwiseAbs().maxCoeff() > slack)) {
        Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
        frame = svd.matrixV().rightCols(n - numerical_rank(svd, tol));
    }
    Subspace out{n, frame, tol};
    fix_column_phases(out.frame);
    return out;
}

Subspace range_basis(const CMatrix& a, double tol) {
    const Index m = a.rows();
    if (m == 0 || a.cols() == 0) return zero_subspace(m, tol);
    const double slack = frame_slack(a, tol);
    CMatrix frame;
    {
        Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeThinU);
        frame = svd.matrixU().leftCols(numerical_rank(svd, tol));
    }
    if (!orthonormal(frame) || (a - frame * (frame.adjoint() * a)).cwiseAbs().maxCoeff() > slack) {
        Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU);
        frame = svd.matrixU().leftCols(numerical_rank(svd, tol));
    }
    Subspace out{m, frame, tol};
    fix_column_phases(out.frame);
    return out;
}

CMatrix projector(const Subspace& s) {
    if (s.dim() == 0) return CMatrix::Zero(s.ambient_dim, s.ambient_dim);
    return s.frame * s.frame.adjoint();
}

void fix_column_phases(CMatrix& frame, double threshold) {
    for (Index j = 0; j < frame.cols(); ++j) {
        const double scale = frame.col(j).cwiseAbs().maxCoeff();
        for (Index i = 0; i < frame.rows(); ++i) {
            const double mag = std::abs(frame(i, j));
            if (mag > threshold * std::max(1.0, scale)) {
                frame.col(j) *= std::conj(frame(i, j)) / mag;
                frame(i, j) = cplx(mag, 0.0);
                break;
            }
        }
    }
}

Subspace canonical(const Subspace& s) {
    const Index k = s.dim();
    if (k == 0) return s;
    const CMatrix p = projector(s);
    CMatrix q(s.ambient_dim, k);
    Index found = 0;
    for (Index j = 0; j < s.ambient_dim && found < k; ++j) {
        CVector v = p.col(j);
        for (int pass = 0; pass < 2; ++pass)
            for (Index c = 0; c < found; ++c) v -= q.col(c) * q.col(c).dot(v);
        const double nv = v.norm();
        if (nv > 1e-6) q.col(found++) = v / nv;
    }
    // Degenerate pick-up (projector columns too small): finish with the SVD frame.
    for (Index c = 0; c < k && found < k; ++c) {
        CVector v = s.frame.col(c);
        for (int pass = 0; pass < 2; ++pass)
            for (Index d = 0; d < found; ++d) v -= q.col(d) * q.col(d).dot(v);
        const double nv = v.norm();
        if (nv > 1e-6) q.col(found++) = v / nv;
    }
    Subspace out{s.ambient_dim, q.leftCols(found), s.tol};
    fix_column_phases(out.frame);
    return out;
}

double projection_defect(const CMatrix& p) {
    if (p.size() == 0) return 0.0;
    const double idem = (p * p - p).cwiseAbs().maxCoeff();
    const double herm = (p - p.adjoint()).cwiseAbs().maxCoeff();
    return std::max(idem, herm);
}

CMatrix hermitian_pinv(const CMatrix& a, double tol) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
    const auto& ev = es.eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    Eigen::VectorXd inv(ev.size());
    for (Index i = 0; i < ev.size(); ++i)
        inv(i) = std::abs(ev(i)) > tol * scale && scale > 0 ? 1.0 / ev(i) : 0.0;
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix anderson_duffin(const CMatrix& p1, const CMatrix& p2, double tol) {
    return 2.0 * p1 * hermitian_pinv(p1 + p2, tol) * p2;
}

CMatrix parallel_sum_projection(const CMatrix& p1, const CMatrix& p2, double tol) {
    if (p1.rows() != p1.cols() || p1.rows() != p2.rows() || p2.rows() != p2.cols())
        throw ContractViolation("parallel_sum_projection: dimension mismatch");
    const double ptol = std::max(1e-8, 100 * tol);
    if (projection_defect(p1) > ptol || projection_defect(p2) > ptol)
        throw ContractViolation("parallel_sum_projection: argument is not an orthogonal projection");
    const Index n = p1.rows();
    CMatrix stacked(2 * n, n);
    stacked.topRows(n) = identity(n) - p1;
    stacked.bottomRows(n) = identity(n) - p2;
    const CMatrix out = projector(kernel_basis(stacked, tol));
    const CMatrix ad = anderson_duffin(p1, p2, tol);
    if (max_abs_diff(out, ad) > 1e-7)
        throw VerificationFailure("parallel_sum_projection: stacked-kernel and Anderson-Duffin forms disagree");
    return out;
}

double subspace_distance(const Subspace& s1, const Subspace& s2) {
    if (s1.ambient_dim != s2.ambient_dim)
        throw ContractViolation("subspace_distance: ambient dimension mismatch");
    return op_norm(projector(s1) - projector(s2));
}

Subspace subspace_sum(const Subspace& a, const Subspace& b) {
    if (a.ambient_dim != b.ambient_dim)
        throw ContractViolation("subspace_sum: ambient dimension mismatch");
    CMatrix both(a.ambient_dim, a.dim() + b.dim());
    both << a.frame, b.frame;
    return range_basis(both, std::max(a.tol, b.tol));
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ContractViolation("max_abs_diff: dimension mismatch");
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace fockforge
