#include "nctorus/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace nct {

CMatrix cidentity(Eigen::Index n) { return CMatrix::Identity(n, n); }

namespace {

// Power iteration on M*M for matrices too large for the dense path.
// Deterministic start; convergence certified by the eigen-residual of the
// Rayleigh quotient, which bounds the distance to the spectrum of M*M.
double power_iteration_norm(const CMatrix& m) {
    const Eigen::Index n = m.cols();
    CVector v = CVector::Zero(n);
    // Fixed, seedless start with nonzero overlap against any fixed subspace
    // is not guaranteed, so perturb a constant vector deterministically.
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = Complex(1.0 + 1e-3 * static_cast<double>(i % 97),
                       1e-3 * static_cast<double>((7 * i) % 89));
    v.normalize();

    const double scale2 = m.squaredNorm();  // Frobenius^2 >= sigma_max^2
    if (scale2 == 0.0) return 0.0;

    double lambda = 0.0;
    const int max_iters = 50000;
    for (int it = 0; it < max_iters; ++it) {
        CVector w = m.adjoint() * (m * v);
        lambda = std::real(v.dot(w));
        const double resid = (w - lambda * v).norm();
        // |sigma_max^2 - lambda| <= resid for Hermitian M*M once v is close;
        // demand residual small relative to the value itself.
        if (resid <= 1e-13 * std::max(lambda, scale2 * 1e-30) && it > 4)
            break;
        const double wn = w.norm();
        if (wn == 0.0) return 0.0;
        v = w / wn;
    }
    return std::sqrt(std::max(lambda, 0.0));
}

} // namespace

double op_norm(const CMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0)
        throw dimension_error("op_norm: empty matrix");
    if (std::max(m.rows(), m.cols()) <= kDenseNormLimit) {
        Eigen::BDCSVD<CMatrix> svd(m);
        return svd.singularValues()(0);
    }
    return power_iteration_norm(m);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    if (a.rows() == 0 || a.cols() == 0 || b.rows() == 0 || b.cols() == 0)
        throw dimension_error("kron: empty factor");
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
    return out;
}

double frobenius(const CMatrix& m) { return m.norm(); }

double hermiticity_defect(const CMatrix& m) {
    if (m.rows() != m.cols()) return 1.0;
    const double scale = m.norm();
    if (scale == 0.0) return 0.0;
    return (m - m.adjoint()).norm() / scale;
}

bool is_hermitian(const CMatrix& m, double rel_tol) {
    return m.rows() == m.cols() && hermiticity_defect(m) <= rel_tol;
}

void require_hermitian(const CMatrix& m, const char* who, double rel_tol) {
    if (m.rows() != m.cols())
        throw contract_error(std::string(who) + ": matrix is not square");
    if (!is_hermitian(m, rel_tol))
        throw contract_error(std::string(who) +
                             ": matrix violates the Hermitian contract");
}

HermEig herm_eig(const CMatrix& h, double rel_tol) {
    require_hermitian(h, "herm_eig", rel_tol);
    const CMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
    if (es.info() != Eigen::Success)
        throw error("herm_eig: eigensolver failed to converge");
    const Eigen::Index n = h.rows();
    HermEig out;
    out.values = RVector(n);
    out.vectors = CMatrix(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {  // ascending -> descending
        out.values(i) = es.eigenvalues()(n - 1 - i);
        out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    return out;
}

TopSingular top_singular_triplet(const CMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0)
        throw dimension_error("top_singular_triplet: empty matrix");
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    TopSingular t;
    t.sigma = svd.singularValues()(0);
    t.left = svd.matrixU().col(0);
    t.right = svd.matrixV().col(0);
    return t;
}

double min_singular_value(const RMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0)
        throw dimension_error("min_singular_value: empty matrix");
    Eigen::BDCSVD<RMatrix> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

double min_singular_value(const CMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0)
        throw dimension_error("min_singular_value: empty matrix");
    Eigen::BDCSVD<CMatrix> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

} // namespace nct
