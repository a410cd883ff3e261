#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "nctorus/dirac.hpp"

namespace nct {

// Fixed orthonormal basis (Hilbert-Schmidt) of traceless Hermitian q x q
// matrices, real dimension q^2 - 1. Deterministic ordering: off-diagonal
// symmetric/antisymmetric pairs in row-major (i < j) order, then the q - 1
// diagonal combinations.
std::vector<CMatrix> traceless_hermitian_basis(int q);

// Seminorm a -> scale * op_norm(T(a)) on Hermitian q x q matrices, with T
// linear. Copies share their caches; scaled() multiplies only the scalar
// prefactor, so scaling relations between a seminorm and its dilations are
// exact (the optimizers see identical normalized problems).
class LipSeminorm {
public:
    static LipSeminorm curved(const TorusPtr& t, const CoefficientMatrix& h,
                              const DerivationFamily& fam,
                              const CliffordRep& cliff);
    // Curved seminorm with the identity coefficient grid.
    static LipSeminorm flat(const TorusPtr& t, const DerivationFamily& fam,
                            const CliffordRep& cliff);
    // Standard two-derivation flat seminorm of the torus.
    static LipSeminorm flat(const TorusPtr& t);
    // a -> op_norm([K D K, pi(a)]) for a fixed pivot and operator matrix.
    static LipSeminorm sandwich(const SpinorCommutant& k, const CMatrix& dirac);
    static LipSeminorm custom(int q, std::function<CMatrix(const CMatrix&)> t);

    LipSeminorm scaled(double c) const;  // c > 0

    int q() const;
    double scale() const { return scale_; }

    // Seminorm value; the argument must satisfy the Hermitian contract.
    double eval(const CMatrix& herm) const;
    double eval(const AlgebraElement& a) const;

    // Smallest singular value of the real-linearized map restricted to the
    // traceless Hermitian subspace; positive iff the kernel is exactly the
    // scalars. Includes the scale factor.
    double kernel_gap() const;
    bool degenerate(double rel_tol = 1e-12) const;

    // --- solver plumbing (normalized problem, scale-free) ---

    const std::vector<CMatrix>& basis() const;
    // Images T(B_i) of the traceless basis (unscaled).
    const std::vector<CMatrix>& images() const;
    // max_i op_norm(T(B_i)); the internal normalization constant.
    double scale_base() const;
    // op_norm(T(sum x_i B_i)) / scale_base; independent of scale().
    double eval_normalized(const RVector& x) const;
    // Assembled T(sum x_i B_i) from cached images.
    CMatrix assemble_image(const RVector& x) const;

    // Per-direction unscaled norms op_norm(T(u . sigma)) over the fixed
    // spherical grid (q = 2 only); cached per resolution.
    std::shared_ptr<const std::vector<double>> sphere_norm_table(
        int n_theta) const;

private:
    struct Impl;
    LipSeminorm(std::shared_ptr<Impl> impl, double scale);
    std::shared_ptr<Impl> impl_;
    double scale_ = 1.0;
};

// A state of M_q presented by its density: phi(a) = tau(density * a),
// with density Hermitian, positive semidefinite, tau(density) = 1
// (so tr(density) = q). Validated at construction.
class State {
public:
    static State from_density(int q, const CMatrix& density);
    static State pure(const CVector& unit_vector);
    static State random_mixed(int q, Rng& rng);

    int q() const { return static_cast<int>(density_.rows()); }
    const CMatrix& density() const { return density_; }

    double expect(const CMatrix& herm) const;

private:
    explicit State(CMatrix d) : density_(std::move(d)) {}
    CMatrix density_;
};

struct MkBudget {
    int restarts = 64;
    int iterations = 200;
    std::uint64_t seed = 0;
};

struct MkResult {
    double value = 0.0;
    CMatrix witness;      // Hermitian, traceless, L(witness) = 1
    int best_restart = -1;
    int restarts = 0;
    int iterations = 0;
};

// Monge-Kantorovich distance estimate: certified lower bound
//   sup { phi(a) - psi(a) : a Hermitian, L(a) <= 1 }
// via multi-start supergradient ascent on the ratio (phi - psi)(a) / L(a)
// over traceless Hermitian a. Deterministic per (budget.seed, restarts):
// restart r uses task_seed(seed, r); restart 0 starts from the functional's
// own direction; best value over restarts is returned with its witness.
MkResult mk_distance(const LipSeminorm& l, const State& phi, const State& psi,
                     const MkBudget& budget = {});

// Exhaustive reference value at q = 2: the traceless Hermitian directions
// are scanned over a fixed theta-phi sphere grid with 2*n_theta^2 points
// (n_theta >= 224 keeps the grid above 1e5 points). Also a lower bound of
// the supremum, accurate to the grid resolution.
double mk_oracle_grid(const LipSeminorm& l, const State& phi, const State& psi,
                      int n_theta = 400);

// Same grid, optimizing the eigenvalue spread: reference diameter at q = 2.
double diameter_oracle_grid(const LipSeminorm& l, int n_theta = 400);

struct DiamBudget {
    int restarts = 12;
    int alternations = 3;
    int inner_restarts = 8;
    int inner_iterations = 150;
    std::uint64_t seed = 0;
};

struct DiamResult {
    double value = 0.0;
    CVector left, right;  // witness pure-state vectors
};

// Lower-bound estimate of the state-space diameter sup mk(phi, psi). The
// supremum is attained at pure states (mk is convex in each argument), so
// the search runs over pairs of unit vectors, alternating between solving
// mk for the pair and re-extracting the extreme eigenvectors of the mk
// witness. Monotone in restarts; deterministic per seed.
DiamResult diameter(const LipSeminorm& l, const DiamBudget& budget = {});

struct LeibnizSlack {
    double jordan = 0.0;  // L(a)||b|| + ||a||L(b) - L(a o b)
    double lie = 0.0;     // same with the symmetrized commutator product
};

// Both products must stay below the wrap-around threshold: the band
// degrees of a and b must sum below q/2 in each coordinate
// (contract_error otherwise). a, b must be self-adjoint.
LeibnizSlack leibniz_residual(const LipSeminorm& l, const AlgebraElement& a,
                              const AlgebraElement& b);

double kernel_gap(const LipSeminorm& l);

} // namespace nct
