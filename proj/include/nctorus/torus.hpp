#pragma once

#include <memory>
#include <vector>

#include "nctorus/linalg.hpp"
#include "nctorus/rng.hpp"

namespace nct {

class TorusAlgebra;
using TorusPtr = std::shared_ptr<const TorusAlgebra>;

// Symmetric residue of s modulo q, valued in (-q/2, q/2]. For even q the
// band edge q/2 maps to +q/2.
int symmetric_residue(long long s, int q);

// Full matrix algebra M_q presented by clock/shift generators at rational
// angle p/q. The Weyl monomials weyl(m,n) = shift^m * clock^n form an
// orthonormal basis of the GNS space of the normalized trace.
class TorusAlgebra : public std::enable_shared_from_this<TorusAlgebra> {
public:
    // q >= 2, 1 <= p < q, gcd(p, q) = 1; throws parameter_error otherwise.
    static TorusPtr make(int q, int p);

    int q() const { return q_; }
    int p() const { return p_; }
    Complex omega() const { return omega_; }  // exp(2*pi*i*p/q)

    const CMatrix& clock() const { return clock_; }
    const CMatrix& shift() const { return shift_; }

    // Antisymmetric angle matrix [[0, p/q], [-p/q, 0]].
    Eigen::Matrix2d theta() const;

    // Group 2-cocycle exp(i*pi*<xi, theta*eta>) on Z^2 x Z^2.
    Complex cocycle(long long xi1, long long xi2,
                    long long eta1, long long eta2) const;

    // Cached monomial matrix, 0 <= m, n < q (parameter_error otherwise).
    const CMatrix& weyl_matrix(int m, int n) const;

    // GNS basis layout: the coefficient at (m, n) lives at flat index m*q+n.
    Eigen::Index basis_index(int m, int n) const {
        return static_cast<Eigen::Index>(m) * q_ + n;
    }
    Eigen::Index gns_dim() const {
        return static_cast<Eigen::Index>(q_) * q_;
    }

    // Coefficients of M in the Weyl basis: c(m,n) = tau(weyl(m,n)^* M).
    CMatrix fourier_decompose(const CMatrix& m) const;
    // Inverse of fourier_decompose.
    CMatrix fourier_assemble(const CMatrix& coeffs) const;

private:
    TorusAlgebra(int q, int p);

    int q_;
    int p_;
    Complex omega_;
    CMatrix clock_;
    CMatrix shift_;
    std::vector<CMatrix> weyl_;  // index m*q+n
};

TorusPtr make_torus(int q, int p);

// An element of M_q carried in both representations at once: the q x q
// matrix and its Weyl coefficient table. The two are kept in sync eagerly.
class AlgebraElement {
public:
    AlgebraElement() = default;

    static AlgebraElement from_matrix(TorusPtr t, const CMatrix& m);
    static AlgebraElement from_fourier(TorusPtr t, const CMatrix& coeffs);
    static AlgebraElement weyl(TorusPtr t, int m, int n);
    static AlgebraElement identity(TorusPtr t);
    static AlgebraElement zero(TorusPtr t);

    // Hermitian element with Fourier support in the symmetric band
    // |[m]_q| <= band, |[n]_q| <= band.
    static AlgebraElement random_hermitian(TorusPtr t, Rng& rng, int band);

    const TorusPtr& torus() const { return torus_; }
    const CMatrix& matrix() const { return matrix_; }
    const CMatrix& fourier() const { return fourier_; }
    Complex fourier_at(int m, int n) const;

    AlgebraElement adjoint() const;
    bool is_hermitian(double rel_tol = kHermitianRelTol) const;
    double op_norm() const;

    // Normalized trace tau = tr/q; tau(1) = 1.
    Complex tau() const;

    // Largest |[m]_q| and |[n]_q| over the Fourier support (coefficients
    // below a relative dust threshold are ignored).
    struct BandDegree {
        int deg1 = 0;
        int deg2 = 0;
    };
    BandDegree band_degree(double rel_threshold = 1e-13) const;

    AlgebraElement operator+(const AlgebraElement& o) const;
    AlgebraElement operator-(const AlgebraElement& o) const;
    AlgebraElement operator*(const AlgebraElement& o) const;
    AlgebraElement operator-() const;
    friend AlgebraElement operator*(Complex c, const AlgebraElement& a);

private:
    AlgebraElement(TorusPtr t, CMatrix m, CMatrix f);

    TorusPtr torus_;
    CMatrix matrix_;
    CMatrix fourier_;
};

// Requires both elements to live on the same presentation (q and p match).
void require_same_torus(const AlgebraElement& a, const AlgebraElement& b,
                        const char* who);

Complex tau(const AlgebraElement& a);

// Dual-group action: multiplies the (m, n) Fourier coefficient by
// omega^(m*s + n*t). A trace-preserving *-automorphism for every (s, t).
AlgebraElement dual_action(int s, int t, const AlgebraElement& a);

// A family of d commuting Fourier-multiplier derivations. Member k scales
// the (m, n) coefficient by i * s_k(m, n), s_k real. The standard family of
// the torus (d = 2) uses the symmetric residues s_1 = [m]_q, s_2 = [n]_q.
class DerivationFamily {
public:
    static DerivationFamily standard(const TorusPtr& t);

    // Custom family for the operator layer; each table is q x q, entry
    // (m, n) = s_k(m, n). Tables must be real-valued by construction.
    static DerivationFamily custom(const TorusPtr& t,
                                   std::vector<RMatrix> tables);

    int d() const { return static_cast<int>(tables_.size()); }
    const TorusPtr& torus() const { return torus_; }
    const RMatrix& table(int k) const;

    // i * s_k-multiplier applied coefficient-wise; 0 <= k < d.
    AlgebraElement apply(int k, const AlgebraElement& a) const;

private:
    DerivationFamily(TorusPtr t, std::vector<RMatrix> tables);
    TorusPtr torus_;
    std::vector<RMatrix> tables_;
};

// Derivation number k of the family applied to a.
AlgebraElement derivation(const DerivationFamily& fam, int k,
                          const AlgebraElement& a);

} // namespace nct
