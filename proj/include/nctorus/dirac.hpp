#pragma once

#include "nctorus/clifford.hpp"
#include "nctorus/gns.hpp"
#include "nctorus/torus.hpp"

namespace nct {

// Invertibility threshold shared by every coefficient/pivot matrix here.
inline constexpr double kInvertibleMinSv = 1e-8;

// A d x d grid of algebra elements h_{kj} (k = derivation channel,
// j = spinor channel) acting on the GNS space through the commutant
// (right-multiplication) representation. `assembled` is the d*q^2 block
// operator whose (j, k) block is commutant_right(h_{kj}); that layout is
// the operator actually multiplying the derivative column in the curved
// commutator, so the perturbation estimates below are exact algebra.
class CoefficientMatrix {
public:
    // grid is row-major h[k][j], size d*d.
    static CoefficientMatrix assemble(TorusPtr t,
                                      std::vector<AlgebraElement> grid, int d);
    static CoefficientMatrix identity(TorusPtr t, int d);
    static CoefficientMatrix scalar(TorusPtr t, int d, Complex c);

    // Blockwise ca * A + cb * B (same torus and d).
    static CoefficientMatrix linear_combination(const CoefficientMatrix& a,
                                                Complex ca,
                                                const CoefficientMatrix& b,
                                                Complex cb);

    const TorusPtr& torus() const { return torus_; }
    int d() const { return d_; }
    const AlgebraElement& block(int k, int j) const;
    // Commutant image of block (k, j), cached at assembly.
    const CMatrix& commutant_block(int k, int j) const;

    const CMatrix& assembled() const { return assembled_; }
    double min_singular_value() const { return min_sv_; }
    bool invertible() const { return min_sv_ > kInvertibleMinSv; }
    // Inverse of `assembled`; throws singular_error carrying min_sv if the
    // grid is not invertible.
    CMatrix inverse() const;

    // Largest band degree over all blocks (either coordinate).
    int max_block_band_degree() const;

private:
    CoefficientMatrix() = default;
    TorusPtr torus_;
    int d_ = 0;
    std::vector<AlgebraElement> grid_;   // row-major h[k][j]
    std::vector<CMatrix> commutant_;     // same layout
    CMatrix assembled_;
    double min_sv_ = 0.0;
};

// Flat operator sum_k grading_k (x) gamma_k with the Hermitian grading
// multipliers diag(s_k). fam.d must equal cliff.d.
CMatrix flat_dirac(const TorusPtr& t, const DerivationFamily& fam,
                   const CliffordRep& cliff);

// pi(a) = left_regular(a) (x) 1 on GNS (x) spinor space.
CMatrix spinor_representation(const AlgebraElement& a, Eigen::Index spinor_dim);

// First-order operator with coefficients: assembles
// sum_{j,k} commutant_right(h_{kj}) * multiplier_k (x) gamma_j, where
// multiplier_k is the anti-Hermitian derivation multiplier diag(i s_k).
class CurvedDirac {
public:
    CurvedDirac(CoefficientMatrix h, DerivationFamily fam, CliffordRep cliff);

    const CoefficientMatrix& coefficients() const { return h_; }
    const DerivationFamily& family() const { return fam_; }
    const CliffordRep& clifford() const { return cliff_; }

    // The commutator is *defined* by the first-order formula
    //   sum_j ( sum_k h_{kj} . rho(derivation_k(a)) ) (x) gamma_j ,
    // which extends the band-limited literal commutator to all of M_q.
    CMatrix commutator(const AlgebraElement& a) const;

    // Channel j of the commutator: sum_k h_{kj} . rho(derivation_k(a)).
    CMatrix channel(const AlgebraElement& a, int j) const;

    // Seminorm value op_norm(commutator(a)); a must be self-adjoint
    // (contract_error otherwise).
    double lip(const AlgebraElement& a) const;

    // Materialized operator matrix (derivation multipliers, so generally
    // not Hermitian for nontrivial coefficients).
    CMatrix matrix() const;

private:
    CoefficientMatrix h_;
    DerivationFamily fam_;
    CliffordRep cliff_;
};

double lip_norm(const CurvedDirac& d, const AlgebraElement& a);

// Residual between the commutators of the first-order operator D_H and its
// zero-order-symmetrized companion D'_H = D_H + (1/2) sum d_k(h_kj) (x) g_j,
// with the coefficient derivative taken inside the commutant via J . J.
// Exactly zero in exact arithmetic; preconditions keep both operators on
// the regime where they represent the same derivation data:
// every block of h and the element a must have band degree < q/4.
double symmetrized_commutator_residual(const CoefficientMatrix& h,
                                       const DerivationFamily& fam,
                                       const CliffordRep& cliff,
                                       const AlgebraElement& a);

// Invertible-by-use element of the commutant of the spinor representation:
// sum_{ab} commutant_right(b_{ab}) (x) E_{ab} on GNS (x) C^s. Commutation
// against the represented Weyl basis is verified at construction.
class SpinorCommutant {
public:
    static SpinorCommutant from_grid(TorusPtr t, Eigen::Index spinor_dim,
                                     std::vector<AlgebraElement> grid);
    static SpinorCommutant from_matrix(TorusPtr t, Eigen::Index spinor_dim,
                                       CMatrix mat);
    static SpinorCommutant identity(TorusPtr t, Eigen::Index spinor_dim);
    static SpinorCommutant scalar(TorusPtr t, Eigen::Index spinor_dim,
                                  Complex c);

    // Self-adjoint invertible pivot: identity plus a Hermitian commutant
    // deviation rescaled to operator norm `magnitude`, which must lie in
    // [0, 1) so the result is always invertible.
    static SpinorCommutant random_hermitian(TorusPtr t, Eigen::Index spinor_dim,
                                            Rng& rng, double magnitude);

    const TorusPtr& torus() const { return torus_; }
    Eigen::Index spinor_dim() const { return sdim_; }
    const CMatrix& matrix() const { return mat_; }
    double min_singular_value() const { return min_sv_; }
    bool invertible() const { return min_sv_ > kInvertibleMinSv; }
    CMatrix inverse() const;

private:
    SpinorCommutant() = default;
    TorusPtr torus_;
    Eigen::Index sdim_ = 0;
    CMatrix mat_;
    double min_sv_ = 0.0;
};

// [K D K, pi(a)] computed literally; K commutes with the representation by
// construction, so this equals K [D, pi(a)] K in exact arithmetic.
CMatrix sandwich_commutator(const SpinorCommutant& k, const CMatrix& dirac,
                            const AlgebraElement& a);

// op_norm of the sandwiched commutator.
double sandwich_lip(const SpinorCommutant& k, const CMatrix& dirac,
                    const AlgebraElement& a);

} // namespace nct
