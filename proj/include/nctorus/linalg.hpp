#pragma once

#include <Eigen/Dense>
#include <complex>

#include "nctorus/errors.hpp"

namespace nct {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Relative tolerance used when deciding whether a matrix counts as Hermitian.
inline constexpr double kHermitianRelTol = 1e-12;

// Dimension threshold below which op_norm uses a dense decomposition.
inline constexpr int kDenseNormLimit = 512;

CMatrix cidentity(Eigen::Index n);

// Largest singular value. Dense SVD up to kDenseNormLimit, verified power
// iteration on M*M above. Throws dimension_error on an empty matrix.
double op_norm(const CMatrix& m);

// Kronecker product, blocks ordered row-major in the first factor:
// result((i*rb)+k, (j*cb)+l) = a(i,j) * b(k,l).
CMatrix kron(const CMatrix& a, const CMatrix& b);

double frobenius(const CMatrix& m);

// ||m - m*|| relative to ||m|| (0 for the zero matrix).
double hermiticity_defect(const CMatrix& m);

bool is_hermitian(const CMatrix& m, double rel_tol = kHermitianRelTol);

// Throws contract_error naming `who` if m is not square-Hermitian within tol.
void require_hermitian(const CMatrix& m, const char* who,
                       double rel_tol = kHermitianRelTol);

struct HermEig {
    RVector values;   // descending
    CMatrix vectors;  // columns, matching `values` order
};

// Eigendecomposition of a Hermitian matrix. The input is checked against
// the Hermitian contract and symmetrized as (M + M*)/2 before the solve,
// so the decomposition satisfies M = V diag(w) V* within ~1e-14 * ||M||.
HermEig herm_eig(const CMatrix& h, double rel_tol = kHermitianRelTol);

struct TopSingular {
    double sigma = 0.0;
    CVector left;   // u:  m v = sigma u
    CVector right;  // v
};

// Leading singular triplet (used by the metric solvers for supergradients).
TopSingular top_singular_triplet(const CMatrix& m);

// Smallest singular value of a (possibly rectangular) real matrix.
double min_singular_value(const RMatrix& m);

// Smallest singular value of a complex matrix.
double min_singular_value(const CMatrix& m);

} // namespace nct
