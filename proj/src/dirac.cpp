#include "nctorus/dirac.hpp"

#include <cmath>

namespace nct {

namespace {

std::string block_name(const char* who, int k, int j) {
    return std::string(who) + ": block (" + std::to_string(k) + "," +
           std::to_string(j) + ")";
}

} // namespace

CoefficientMatrix CoefficientMatrix::assemble(TorusPtr t,
                                              std::vector<AlgebraElement> grid,
                                              int d) {
    if (!t) throw parameter_error("CoefficientMatrix: null torus");
    if (d < 1) throw parameter_error("CoefficientMatrix: d must be >= 1");
    if (grid.size() != static_cast<std::size_t>(d) * d)
        throw dimension_error("CoefficientMatrix: grid must hold d*d blocks");
    for (const AlgebraElement& e : grid) {
        if (!e.torus() || e.torus()->q() != t->q() || e.torus()->p() != t->p())
            throw dimension_error(
                "CoefficientMatrix: block from another presentation");
    }

    CoefficientMatrix out;
    out.torus_ = t;
    out.d_ = d;
    out.grid_ = std::move(grid);
    out.commutant_.reserve(out.grid_.size());
    for (const AlgebraElement& e : out.grid_)
        out.commutant_.push_back(commutant_right(e).mat);

    const Eigen::Index bd = t->gns_dim();
    out.assembled_ = CMatrix::Zero(d * bd, d * bd);
    // Operator layout: block row j, block column k holds h_{kj}.
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j)
            out.assembled_.block(j * bd, k * bd, bd, bd) =
                out.commutant_[static_cast<std::size_t>(k) * d + j];
    out.min_sv_ = nct::min_singular_value(out.assembled_);
    return out;
}

CoefficientMatrix CoefficientMatrix::identity(TorusPtr t, int d) {
    return scalar(std::move(t), d, Complex(1.0, 0.0));
}

CoefficientMatrix CoefficientMatrix::scalar(TorusPtr t, int d, Complex c) {
    if (!t) throw parameter_error("CoefficientMatrix: null torus");
    if (d < 1) throw parameter_error("CoefficientMatrix: d must be >= 1");
    std::vector<AlgebraElement> grid;
    grid.reserve(static_cast<std::size_t>(d) * d);
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) {
            if (k == j)
                grid.push_back(c * AlgebraElement::identity(t));
            else
                grid.push_back(AlgebraElement::zero(t));
        }
    return assemble(std::move(t), std::move(grid), d);
}

CoefficientMatrix CoefficientMatrix::linear_combination(
    const CoefficientMatrix& a, Complex ca, const CoefficientMatrix& b,
    Complex cb) {
    if (a.d_ != b.d_)
        throw dimension_error("CoefficientMatrix: mismatched d");
    std::vector<AlgebraElement> grid;
    grid.reserve(a.grid_.size());
    for (std::size_t i = 0; i < a.grid_.size(); ++i)
        grid.push_back(ca * a.grid_[i] + cb * b.grid_[i]);
    return assemble(a.torus_, std::move(grid), a.d_);
}

const AlgebraElement& CoefficientMatrix::block(int k, int j) const {
    if (k < 0 || k >= d_ || j < 0 || j >= d_)
        throw parameter_error(block_name("CoefficientMatrix::block", k, j) +
                              " out of range");
    return grid_[static_cast<std::size_t>(k) * d_ + j];
}

const CMatrix& CoefficientMatrix::commutant_block(int k, int j) const {
    if (k < 0 || k >= d_ || j < 0 || j >= d_)
        throw parameter_error(
            block_name("CoefficientMatrix::commutant_block", k, j) +
            " out of range");
    return commutant_[static_cast<std::size_t>(k) * d_ + j];
}

CMatrix CoefficientMatrix::inverse() const {
    if (!invertible())
        throw singular_error(
            "CoefficientMatrix: assembled operator is numerically singular",
            min_sv_);
    return assembled_.partialPivLu().solve(
        CMatrix::Identity(assembled_.rows(), assembled_.cols()));
}

int CoefficientMatrix::max_block_band_degree() const {
    int deg = 0;
    for (const AlgebraElement& e : grid_) {
        const auto bd = e.band_degree();
        deg = std::max({deg, bd.deg1, bd.deg2});
    }
    return deg;
}

CMatrix flat_dirac(const TorusPtr& t, const DerivationFamily& fam,
                   const CliffordRep& cliff) {
    if (!t) throw parameter_error("flat_dirac: null torus");
    if (fam.d() != cliff.d)
        throw dimension_error(
            "flat_dirac: derivation family and Clifford sizes differ");
    const Eigen::Index dim = t->gns_dim() * cliff.dim;
    CMatrix d = CMatrix::Zero(dim, dim);
    for (int k = 0; k < fam.d(); ++k)
        d += kron(grading_operator(fam, k).mat, cliff.gamma[k]);
    return d;
}

CMatrix spinor_representation(const AlgebraElement& a,
                              Eigen::Index spinor_dim) {
    if (spinor_dim < 1)
        throw parameter_error("spinor_representation: bad spinor dimension");
    return kron(left_regular(a).mat, CMatrix::Identity(spinor_dim, spinor_dim));
}

CurvedDirac::CurvedDirac(CoefficientMatrix h, DerivationFamily fam,
                         CliffordRep cliff)
    : h_(std::move(h)), fam_(std::move(fam)), cliff_(std::move(cliff)) {
    if (h_.d() != fam_.d() || h_.d() != cliff_.d)
        throw dimension_error("CurvedDirac: coefficient grid, derivation "
                              "family and Clifford sizes must agree");
    if (h_.torus()->q() != fam_.torus()->q() ||
        h_.torus()->p() != fam_.torus()->p())
        throw dimension_error("CurvedDirac: mismatched presentations");
}

CMatrix CurvedDirac::channel(const AlgebraElement& a, int j) const {
    if (j < 0 || j >= h_.d())
        throw parameter_error("CurvedDirac::channel: index out of range");
    const Eigen::Index bd = h_.torus()->gns_dim();
    CMatrix b = CMatrix::Zero(bd, bd);
    for (int k = 0; k < h_.d(); ++k) {
        const AlgebraElement da = fam_.apply(k, a);
        b += h_.commutant_block(k, j) * left_regular(da).mat;
    }
    return b;
}

CMatrix CurvedDirac::commutator(const AlgebraElement& a) const {
    if (!a.torus() || a.torus()->q() != h_.torus()->q() ||
        a.torus()->p() != h_.torus()->p())
        throw dimension_error("CurvedDirac: element from another presentation");
    const Eigen::Index bd = h_.torus()->gns_dim();
    const Eigen::Index dim = bd * cliff_.dim;
    CMatrix c = CMatrix::Zero(dim, dim);

    // Cache rho(derivation_k(a)) once per k; channels reuse them.
    std::vector<CMatrix> x;
    x.reserve(h_.d());
    for (int k = 0; k < h_.d(); ++k)
        x.push_back(left_regular(fam_.apply(k, a)).mat);

    for (int j = 0; j < h_.d(); ++j) {
        CMatrix b = CMatrix::Zero(bd, bd);
        for (int k = 0; k < h_.d(); ++k) b += h_.commutant_block(k, j) * x[k];
        c += kron(b, cliff_.gamma[j]);
    }
    return c;
}

double CurvedDirac::lip(const AlgebraElement& a) const {
    require_hermitian(a.matrix(), "lip_norm");
    return op_norm(commutator(a));
}

CMatrix CurvedDirac::matrix() const {
    const Eigen::Index bd = h_.torus()->gns_dim();
    const Eigen::Index dim = bd * cliff_.dim;
    CMatrix d = CMatrix::Zero(dim, dim);
    for (int k = 0; k < h_.d(); ++k) {
        const CMatrix mult = derivation_operator(fam_, k).mat;
        for (int j = 0; j < h_.d(); ++j)
            d += kron(h_.commutant_block(k, j) * mult, cliff_.gamma[j]);
    }
    return d;
}

double lip_norm(const CurvedDirac& d, const AlgebraElement& a) {
    return d.lip(a);
}

double symmetrized_commutator_residual(const CoefficientMatrix& h,
                                       const DerivationFamily& fam,
                                       const CliffordRep& cliff,
                                       const AlgebraElement& a) {
    if (h.d() != fam.d() || h.d() != cliff.d)
        throw dimension_error("symmetrized_commutator_residual: sizes differ");
    const TorusPtr& t = h.torus();
    const int q = t->q();
    const double band_cap = q / 4.0;

    const auto check_band = [&](const AlgebraElement& e, const char* what) {
        const auto bd = e.band_degree();
        if (bd.deg1 >= band_cap || bd.deg2 >= band_cap)
            throw contract_error(
                std::string("symmetrized_commutator_residual: ") + what +
                " exceeds the band limit (degree must stay below q/4)");
    };
    check_band(a, "the element");
    for (int k = 0; k < h.d(); ++k)
        for (int j = 0; j < h.d(); ++j)
            check_band(h.block(k, j), "a coefficient block");

    const Eigen::Index bd = t->gns_dim();
    const Eigen::Index dim = bd * cliff.dim;

    CMatrix d_h = CMatrix::Zero(dim, dim);
    CMatrix zero_order = CMatrix::Zero(dim, dim);
    for (int k = 0; k < h.d(); ++k) {
        const CMatrix mult = derivation_operator(fam, k).mat;
        for (int j = 0; j < h.d(); ++j) {
            d_h += kron(h.commutant_block(k, j) * mult, cliff.gamma[j]);
            // Derivative of the coefficient inside the commutant:
            // h = J rho(b*) J  =>  d_k(h) = J rho(d_k(b*)) J.
            const GnsOperator z = modular_conj(
                t, left_regular(fam.apply(k, h.block(k, j).adjoint())));
            zero_order += kron(0.5 * z.mat, cliff.gamma[j]);
        }
    }
    const CMatrix d_sym = d_h + zero_order;

    const CMatrix pa = spinor_representation(a, cliff.dim);
    const CMatrix lhs = d_sym * pa - pa * d_sym;
    const CMatrix rhs = d_h * pa - pa * d_h;
    return op_norm(lhs - rhs);
}

SpinorCommutant SpinorCommutant::from_matrix(TorusPtr t,
                                             Eigen::Index spinor_dim,
                                             CMatrix mat) {
    if (!t) throw parameter_error("SpinorCommutant: null torus");
    if (spinor_dim < 1)
        throw parameter_error("SpinorCommutant: bad spinor dimension");
    const Eigen::Index dim = t->gns_dim() * spinor_dim;
    if (mat.rows() != dim || mat.cols() != dim)
        throw dimension_error("SpinorCommutant: matrix has wrong size");

    // Verify membership in the commutant of the represented algebra on the
    // Weyl generators (which span it).
    const double scale = std::max(mat.norm(), 1e-300);
    const int q = t->q();
    for (int m = 0; m < q; ++m)
        for (int n = 0; n < q; ++n) {
            const CMatrix pw = spinor_representation(
                AlgebraElement::weyl(t, m, n), spinor_dim);
            const double defect = (mat * pw - pw * mat).norm() / scale;
            if (defect > 1e-10)
                throw contract_error(
                    "SpinorCommutant: matrix does not commute with the "
                    "represented algebra");
        }

    SpinorCommutant out;
    out.torus_ = std::move(t);
    out.sdim_ = spinor_dim;
    out.min_sv_ = nct::min_singular_value(mat);
    out.mat_ = std::move(mat);
    return out;
}

SpinorCommutant SpinorCommutant::from_grid(TorusPtr t, Eigen::Index spinor_dim,
                                           std::vector<AlgebraElement> grid) {
    if (!t) throw parameter_error("SpinorCommutant: null torus");
    if (spinor_dim < 1)
        throw parameter_error("SpinorCommutant: bad spinor dimension");
    if (grid.size() != static_cast<std::size_t>(spinor_dim) * spinor_dim)
        throw dimension_error("SpinorCommutant: grid must hold s*s blocks");
    const Eigen::Index bd = t->gns_dim();
    CMatrix mat = CMatrix::Zero(bd * spinor_dim, bd * spinor_dim);
    for (Eigen::Index a = 0; a < spinor_dim; ++a)
        for (Eigen::Index b = 0; b < spinor_dim; ++b) {
            const AlgebraElement& e =
                grid[static_cast<std::size_t>(a) * spinor_dim + b];
            if (!e.torus() || e.torus()->q() != t->q())
                throw dimension_error(
                    "SpinorCommutant: block from another presentation");
            const CMatrix r = commutant_right(e).mat;
            // kron(R, E_ab): entry R(i,j) lands at (i*s + a, j*s + b).
            for (Eigen::Index i = 0; i < bd; ++i)
                for (Eigen::Index j = 0; j < bd; ++j)
                    mat(i * spinor_dim + a, j * spinor_dim + b) = r(i, j);
        }
    return from_matrix(std::move(t), spinor_dim, std::move(mat));
}

SpinorCommutant SpinorCommutant::identity(TorusPtr t, Eigen::Index spinor_dim) {
    return scalar(std::move(t), spinor_dim, Complex(1.0, 0.0));
}

SpinorCommutant SpinorCommutant::scalar(TorusPtr t, Eigen::Index spinor_dim,
                                        Complex c) {
    if (!t) throw parameter_error("SpinorCommutant: null torus");
    const Eigen::Index dim = t->gns_dim() * spinor_dim;
    return from_matrix(std::move(t), spinor_dim,
                       c * CMatrix::Identity(dim, dim));
}

SpinorCommutant SpinorCommutant::random_hermitian(TorusPtr t,
                                                  Eigen::Index spinor_dim,
                                                  Rng& rng, double magnitude) {
    if (!t) throw parameter_error("SpinorCommutant: null torus");
    if (!(magnitude >= 0.0) || magnitude >= 1.0)
        throw parameter_error(
            "SpinorCommutant: magnitude must lie in [0, 1) so the pivot "
            "stays invertible");
    const int s = static_cast<int>(spinor_dim);
    std::vector<AlgebraElement> dev(static_cast<std::size_t>(s) * s,
                                    AlgebraElement::zero(t));
    for (int a = 0; a < s; ++a)
        for (int b = a; b < s; ++b) {
            const AlgebraElement e =
                AlgebraElement::random_hermitian(t, rng, t->q() / 2);
            dev[static_cast<std::size_t>(a) * s + b] = e;
            if (a != b) dev[static_cast<std::size_t>(b) * s + a] = e.adjoint();
        }
    const SpinorCommutant raw = from_grid(t, spinor_dim, dev);
    const double nrm = op_norm(raw.matrix());
    if (nrm > 0.0) {
        const Complex c(magnitude / nrm, 0.0);
        for (auto& e : dev) e = c * e;
    }
    for (int a = 0; a < s; ++a)
        dev[static_cast<std::size_t>(a) * s + a] =
            AlgebraElement::identity(t) +
            dev[static_cast<std::size_t>(a) * s + a];
    // deviation norm == magnitude < 1, so the pivot is always invertible
    return from_grid(std::move(t), spinor_dim, std::move(dev));
}

CMatrix SpinorCommutant::inverse() const {
    if (!invertible())
        throw singular_error("SpinorCommutant: pivot is numerically singular",
                             min_sv_);
    return mat_.partialPivLu().solve(
        CMatrix::Identity(mat_.rows(), mat_.cols()));
}

CMatrix sandwich_commutator(const SpinorCommutant& k, const CMatrix& dirac,
                            const AlgebraElement& a) {
    if (dirac.rows() != k.matrix().rows() || dirac.cols() != k.matrix().cols())
        throw dimension_error("sandwich_commutator: size mismatch");
    if (!a.torus() || a.torus()->q() != k.torus()->q())
        throw dimension_error("sandwich_commutator: mismatched presentations");
    const CMatrix kd = k.matrix() * dirac * k.matrix();
    const CMatrix pa = spinor_representation(a, k.spinor_dim());
    return kd * pa - pa * kd;
}

double sandwich_lip(const SpinorCommutant& k, const CMatrix& dirac,
                    const AlgebraElement& a) {
    return op_norm(sandwich_commutator(k, dirac, a));
}

} // namespace nct
