#include "nctorus/torus.hpp"

#include <cmath>
#include <numeric>

namespace nct {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

int symmetric_residue(long long s, int q) {
    long long r = s % q;
    if (r < 0) r += q;
    // r in [0, q); fold the upper half down, keeping the edge at +q/2.
    if (2 * r > q) r -= q;
    return static_cast<int>(r);
}

TorusAlgebra::TorusAlgebra(int q, int p) : q_(q), p_(p) {
    const double angle = 2.0 * kPi * static_cast<double>(p) / q;
    omega_ = std::polar(1.0, angle);

    clock_ = CMatrix::Zero(q, q);
    for (int j = 0; j < q; ++j)
        clock_(j, j) = std::polar(1.0, angle * j);

    // Down-shift: shift * e_j = e_{j-1 mod q}; this orientation realizes
    // shift * clock = omega * clock * shift.
    shift_ = CMatrix::Zero(q, q);
    for (int j = 0; j < q; ++j)
        shift_((j + q - 1) % q, j) = 1.0;

    weyl_.reserve(static_cast<std::size_t>(q) * q);
    CMatrix shift_pow = CMatrix::Identity(q, q);
    for (int m = 0; m < q; ++m) {
        CMatrix w = shift_pow;
        for (int n = 0; n < q; ++n) {
            weyl_.push_back(w);
            w = w * clock_;
        }
        shift_pow = shift_pow * shift_;
    }
}

TorusPtr TorusAlgebra::make(int q, int p) {
    if (q < 2) throw parameter_error("make_torus: q must be at least 2");
    if (p < 1 || p >= q)
        throw parameter_error("make_torus: p must satisfy 1 <= p < q");
    if (std::gcd(p, q) != 1)
        throw parameter_error("make_torus: p and q must be coprime");
    return TorusPtr(new TorusAlgebra(q, p));
}

TorusPtr make_torus(int q, int p) { return TorusAlgebra::make(q, p); }

Eigen::Matrix2d TorusAlgebra::theta() const {
    Eigen::Matrix2d t;
    const double r = static_cast<double>(p_) / q_;
    t << 0.0, r, -r, 0.0;
    return t;
}

Complex TorusAlgebra::cocycle(long long xi1, long long xi2,
                              long long eta1, long long eta2) const {
    const double r = static_cast<double>(p_) / q_;
    const double phase = kPi * r * (static_cast<double>(xi1) * eta2 -
                                    static_cast<double>(xi2) * eta1);
    return std::polar(1.0, phase);
}

const CMatrix& TorusAlgebra::weyl_matrix(int m, int n) const {
    if (m < 0 || m >= q_ || n < 0 || n >= q_)
        throw parameter_error("weyl: exponents must satisfy 0 <= m, n < q");
    return weyl_[static_cast<std::size_t>(m) * q_ + n];
}

CMatrix TorusAlgebra::fourier_decompose(const CMatrix& m) const {
    if (m.rows() != q_ || m.cols() != q_)
        throw dimension_error("fourier_decompose: matrix is not q x q");
    CMatrix coeffs(q_, q_);
    for (int a = 0; a < q_; ++a)
        for (int b = 0; b < q_; ++b) {
            const CMatrix& w = weyl_[static_cast<std::size_t>(a) * q_ + b];
            // tau(w^* m) = <w, m>_F / q
            coeffs(a, b) = (w.conjugate().cwiseProduct(m)).sum() /
                           static_cast<double>(q_);
        }
    return coeffs;
}

CMatrix TorusAlgebra::fourier_assemble(const CMatrix& coeffs) const {
    if (coeffs.rows() != q_ || coeffs.cols() != q_)
        throw dimension_error("fourier_assemble: table is not q x q");
    CMatrix m = CMatrix::Zero(q_, q_);
    for (int a = 0; a < q_; ++a)
        for (int b = 0; b < q_; ++b)
            m += coeffs(a, b) * weyl_[static_cast<std::size_t>(a) * q_ + b];
    return m;
}

AlgebraElement::AlgebraElement(TorusPtr t, CMatrix m, CMatrix f)
    : torus_(std::move(t)), matrix_(std::move(m)), fourier_(std::move(f)) {}

AlgebraElement AlgebraElement::from_matrix(TorusPtr t, const CMatrix& m) {
    if (!t) throw parameter_error("AlgebraElement: null torus");
    CMatrix f = t->fourier_decompose(m);
    return AlgebraElement(std::move(t), m, std::move(f));
}

AlgebraElement AlgebraElement::from_fourier(TorusPtr t, const CMatrix& coeffs) {
    if (!t) throw parameter_error("AlgebraElement: null torus");
    CMatrix m = t->fourier_assemble(coeffs);
    return AlgebraElement(std::move(t), std::move(m), coeffs);
}

AlgebraElement AlgebraElement::weyl(TorusPtr t, int m, int n) {
    if (!t) throw parameter_error("AlgebraElement: null torus");
    const CMatrix& w = t->weyl_matrix(m, n);
    CMatrix f = CMatrix::Zero(t->q(), t->q());
    f(m, n) = 1.0;
    return AlgebraElement(std::move(t), w, std::move(f));
}

AlgebraElement AlgebraElement::identity(TorusPtr t) { return weyl(t, 0, 0); }

AlgebraElement AlgebraElement::zero(TorusPtr t) {
    if (!t) throw parameter_error("AlgebraElement: null torus");
    const int q = t->q();
    return AlgebraElement(std::move(t), CMatrix::Zero(q, q),
                          CMatrix::Zero(q, q));
}

AlgebraElement AlgebraElement::random_hermitian(TorusPtr t, Rng& rng,
                                                int band) {
    if (!t) throw parameter_error("AlgebraElement: null torus");
    const int q = t->q();
    CMatrix f = CMatrix::Zero(q, q);
    for (int m = 0; m < q; ++m)
        for (int n = 0; n < q; ++n) {
            if (std::abs(symmetric_residue(m, q)) > band ||
                std::abs(symmetric_residue(n, q)) > band)
                continue;
            f(m, n) = rng.cgaussian();
        }
    AlgebraElement x = from_fourier(std::move(t), f);
    AlgebraElement h = Complex(0.5, 0.0) * (x + x.adjoint());
    return h;
}

Complex AlgebraElement::fourier_at(int m, int n) const {
    if (!torus_) throw parameter_error("fourier_at: empty element");
    if (m < 0 || m >= torus_->q() || n < 0 || n >= torus_->q())
        throw parameter_error("fourier_at: index out of range");
    return fourier_(m, n);
}

AlgebraElement AlgebraElement::adjoint() const {
    return from_matrix(torus_, matrix_.adjoint());
}

bool AlgebraElement::is_hermitian(double rel_tol) const {
    return nct::is_hermitian(matrix_, rel_tol);
}

double AlgebraElement::op_norm() const { return nct::op_norm(matrix_); }

Complex AlgebraElement::tau() const {
    return matrix_.trace() / static_cast<double>(torus_->q());
}

AlgebraElement::BandDegree
AlgebraElement::band_degree(double rel_threshold) const {
    const int q = torus_->q();
    const double top = fourier_.cwiseAbs().maxCoeff();
    const double cut = top * rel_threshold;
    BandDegree deg;
    if (top == 0.0) return deg;
    for (int m = 0; m < q; ++m)
        for (int n = 0; n < q; ++n) {
            if (std::abs(fourier_(m, n)) <= cut) continue;
            deg.deg1 = std::max(deg.deg1, std::abs(symmetric_residue(m, q)));
            deg.deg2 = std::max(deg.deg2, std::abs(symmetric_residue(n, q)));
        }
    return deg;
}

void require_same_torus(const AlgebraElement& a, const AlgebraElement& b,
                        const char* who) {
    if (!a.torus() || !b.torus())
        throw parameter_error(std::string(who) + ": empty element");
    if (a.torus()->q() != b.torus()->q() || a.torus()->p() != b.torus()->p())
        throw dimension_error(std::string(who) +
                              ": elements live on different presentations");
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
    require_same_torus(*this, o, "operator+");
    return AlgebraElement(torus_, matrix_ + o.matrix_, fourier_ + o.fourier_);
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
    require_same_torus(*this, o, "operator-");
    return AlgebraElement(torus_, matrix_ - o.matrix_, fourier_ - o.fourier_);
}

AlgebraElement AlgebraElement::operator*(const AlgebraElement& o) const {
    require_same_torus(*this, o, "operator*");
    return from_matrix(torus_, matrix_ * o.matrix_);
}

AlgebraElement AlgebraElement::operator-() const {
    return AlgebraElement(torus_, -matrix_, -fourier_);
}

AlgebraElement operator*(Complex c, const AlgebraElement& a) {
    return AlgebraElement(a.torus_, c * a.matrix_, c * a.fourier_);
}

Complex tau(const AlgebraElement& a) { return a.tau(); }

AlgebraElement dual_action(int s, int t, const AlgebraElement& a) {
    const TorusPtr& torus = a.torus();
    if (!torus) throw parameter_error("dual_action: empty element");
    const int q = torus->q();
    const double base = 2.0 * kPi * static_cast<double>(torus->p()) / q;
    CMatrix f = a.fourier();
    for (int m = 0; m < q; ++m)
        for (int n = 0; n < q; ++n) {
            const long long e = static_cast<long long>(m) * s +
                                static_cast<long long>(n) * t;
            const long long r = ((e % q) + q) % q;
            f(m, n) *= std::polar(1.0, base * static_cast<double>(r));
        }
    return AlgebraElement::from_fourier(torus, f);
}

DerivationFamily::DerivationFamily(TorusPtr t, std::vector<RMatrix> tables)
    : torus_(std::move(t)), tables_(std::move(tables)) {}

DerivationFamily DerivationFamily::standard(const TorusPtr& t) {
    if (!t) throw parameter_error("DerivationFamily: null torus");
    const int q = t->q();
    RMatrix s1(q, q), s2(q, q);
    for (int m = 0; m < q; ++m)
        for (int n = 0; n < q; ++n) {
            s1(m, n) = symmetric_residue(m, q);
            s2(m, n) = symmetric_residue(n, q);
        }
    return DerivationFamily(t, {s1, s2});
}

DerivationFamily DerivationFamily::custom(const TorusPtr& t,
                                          std::vector<RMatrix> tables) {
    if (!t) throw parameter_error("DerivationFamily: null torus");
    if (tables.empty())
        throw parameter_error("DerivationFamily: need at least one table");
    for (const RMatrix& tab : tables)
        if (tab.rows() != t->q() || tab.cols() != t->q())
            throw dimension_error("DerivationFamily: table is not q x q");
    return DerivationFamily(t, std::move(tables));
}

const RMatrix& DerivationFamily::table(int k) const {
    if (k < 0 || k >= d())
        throw parameter_error("DerivationFamily: index out of range");
    return tables_[static_cast<std::size_t>(k)];
}

AlgebraElement DerivationFamily::apply(int k, const AlgebraElement& a) const {
    const RMatrix& tab = table(k);
    if (!a.torus() || a.torus()->q() != torus_->q() ||
        a.torus()->p() != torus_->p())
        throw dimension_error("derivation: element from another presentation");
    const int q = torus_->q();
    CMatrix f = a.fourier();
    for (int m = 0; m < q; ++m)
        for (int n = 0; n < q; ++n) f(m, n) *= Complex(0.0, tab(m, n));
    return AlgebraElement::from_fourier(a.torus(), f);
}

AlgebraElement derivation(const DerivationFamily& fam, int k,
                          const AlgebraElement& a) {
    return fam.apply(k, a);
}

} // namespace nct
