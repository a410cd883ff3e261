#include "nctorus/gns.hpp"

#include <functional>

namespace nct {

namespace {

// Columns of the operator x -> transform(x) in the Weyl basis.
CMatrix basiswise(const TorusPtr& t,
                  const std::function<CMatrix(const CMatrix&)>& transform) {
    const int q = t->q();
    const Eigen::Index dim = t->gns_dim();
    CMatrix op(dim, dim);
    for (int m = 0; m < q; ++m)
        for (int n = 0; n < q; ++n) {
            const CMatrix image = transform(t->weyl_matrix(m, n));
            const CMatrix coeffs = t->fourier_decompose(image);
            const Eigen::Index col = t->basis_index(m, n);
            for (int a = 0; a < q; ++a)
                for (int b = 0; b < q; ++b)
                    op(t->basis_index(a, b), col) = coeffs(a, b);
        }
    return op;
}

} // namespace

GnsOperator left_regular(const AlgebraElement& a) {
    const TorusPtr& t = a.torus();
    if (!t) throw parameter_error("left_regular: empty element");
    const CMatrix& am = a.matrix();
    return GnsOperator{basiswise(t, [&](const CMatrix& x) { return am * x; }),
                       OpTag::left};
}

GnsOperator commutant_right(const AlgebraElement& b) {
    const TorusPtr& t = b.torus();
    if (!t) throw parameter_error("commutant_right: empty element");
    const CMatrix& bm = b.matrix();
    return GnsOperator{basiswise(t, [&](const CMatrix& x) { return x * bm; }),
                       OpTag::right};
}

CMatrix modular_basis_matrix(const TorusPtr& t) {
    if (!t) throw parameter_error("modular_basis_matrix: null torus");
    const int q = t->q();
    const Eigen::Index dim = t->gns_dim();
    CMatrix s(dim, dim);
    for (int m = 0; m < q; ++m)
        for (int n = 0; n < q; ++n) {
            const CMatrix coeffs =
                t->fourier_decompose(t->weyl_matrix(m, n).adjoint());
            const Eigen::Index col = t->basis_index(m, n);
            for (int a = 0; a < q; ++a)
                for (int b = 0; b < q; ++b)
                    s(t->basis_index(a, b), col) = coeffs(a, b);
        }
    return s;
}

GnsOperator modular_conj(const TorusPtr& t, const GnsOperator& op) {
    if (!t) throw parameter_error("modular_conj: null torus");
    if (op.mat.rows() != t->gns_dim() || op.mat.cols() != t->gns_dim())
        throw dimension_error("modular_conj: operator is not q^2 x q^2");
    // J(x) = S conj(x); two antilinear conjugations compose to the linear
    // map J T J = S conj(T) conj(S).
    const CMatrix s = modular_basis_matrix(t);
    return GnsOperator{s * op.mat.conjugate() * s.conjugate(), OpTag::general};
}

namespace {

GnsOperator multiplier_diag(const DerivationFamily& fam, int k, Complex unit,
                            OpTag tag) {
    const TorusPtr& t = fam.torus();
    const RMatrix& tab = fam.table(k);
    const int q = t->q();
    CMatrix op = CMatrix::Zero(t->gns_dim(), t->gns_dim());
    for (int m = 0; m < q; ++m)
        for (int n = 0; n < q; ++n) {
            const Eigen::Index i = t->basis_index(m, n);
            op(i, i) = unit * tab(m, n);
        }
    return GnsOperator{std::move(op), tag};
}

} // namespace

GnsOperator derivation_operator(const DerivationFamily& fam, int k) {
    return multiplier_diag(fam, k, Complex(0.0, 1.0), OpTag::derivation);
}

GnsOperator grading_operator(const DerivationFamily& fam, int k) {
    return multiplier_diag(fam, k, Complex(1.0, 0.0), OpTag::derivation);
}

} // namespace nct
