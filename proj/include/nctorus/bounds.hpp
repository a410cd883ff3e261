#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nctorus/metric.hpp"

namespace nct {

struct PairingDelta {
    double fwd = 0.0;  // d * op_norm(1 - Hp H^{-1}); controls |L_Hp - L_H| / L_H
    double bwd = 0.0;  // d * op_norm(1 - H Hp^{-1}); controls |L_H - L_Hp| / L_Hp
};

PairingDelta pairing_delta(const CoefficientMatrix& h, const CoefficientMatrix& hp);

// (op_norm(H K^{-1}) + 1) * op_norm(1 - K^{-1} H) for invertible spinor
// commutants; dominates |L_H(a) - L_K(a)| / L_K(a) for the conjugated
// operator seminorms.
double sandwich_delta(const SpinorCommutant& h, const SpinorCommutant& k);

// Everything entering the closed-form distance bound for one pair (H, H').
struct BoundReport {
    int n = 0;               // schedule index (0 for one-shot reports)
    double length_fn = 0.0;  // op_norm(1 - Hn H^{-1})
    double delta_fwd = 0.0;
    double delta_bwd = 0.0;
    double diam_flat = 0.0;
    double diam_h = 0.0;       // (1 + d*op_norm(1 - H^{-1})) * diam_flat
    double diam_hprime = 0.0;  // same for H'
    double lemma_bound = 0.0;
    double closed_form_corrected = 0.0;
    double closed_form_literal = 0.0;
    double empirical_ratio = 0.0;  // max sampled |L_H(a) - L_H'(a)| / L_H(a)
    double height = 0.0;           // unit pivot
    double wall_time_ms = 0.0;     // filled by the batch layer, never here
};

struct SampleBudget {
    int samples = 20;
    int band = 0;  // Fourier band of the sampled a; 0 means unrestricted
    std::uint64_t seed = 0;
};

// Closed-form upper bound on the distance between the curved metrics of H
// and H', assembled from the one-sided deltas, the flat diameter, and the
// two readings of the diameter coefficient (the printed inverted one and
// the corrected one); lemma_bound composes the pairing estimate with the
// measured diameter bounds directly at pivot height 0. empirical_ratio
// comes from seeded Hermitian samples.
BoundReport propinquity_bound(const CoefficientMatrix& h,
                              const CoefficientMatrix& hp, double diam_flat,
                              const SampleBudget& budget);

struct ComparisonPair {
    double mk_l = 0.0;
    double mk_s = 0.0;
    bool corrected_ok = false;  // mk_S <= delta * mk_L
    bool literal_ok = false;    // mk_S <= delta^{-1} * mk_L (printed form)
};

struct ComparisonReport {
    double delta = 0.0;                // hypothesis constant in L <= delta * S
    double hypothesis_residual = 0.0;  // max sampled L(a) - delta * S(a)
    std::vector<ComparisonPair> pairs;
    bool corrected_holds = false;
    bool literal_holds = false;
};

// Checks both readings of the seminorm-comparison estimate on the given
// state pairs: from L <= delta * S the constraint sets nest as
// {S <= 1} contained in {L <= delta}, so mk_S <= delta * mk_L; the printed
// delta^{-1} form is evaluated on the same data and reported as-is.
ComparisonReport comparison_lemma_check(
    const LipSeminorm& l, const LipSeminorm& s, double delta,
    const std::vector<std::pair<State, State>>& state_pairs,
    const MkBudget& budget, std::uint64_t hypothesis_seed);

// Seeded invertible coefficient grid: identity plus a magnitude-scaled
// band-limited Hermitian block on the diagonal, magnitude-scaled blocks off
// the diagonal. With hermitian_assembled the grid is adjoint-symmetric, so
// the assembled operator is Hermitian; otherwise the blocks are independent.
// Retries a few seeds if the draw is not invertible (singular_error after
// that).
CoefficientMatrix random_coefficients(const TorusPtr& t, int d, int band,
                                      double magnitude, std::uint64_t seed,
                                      bool hermitian_assembled);

// Pure deviation grid (no identity on the diagonal, no invertibility
// requirement): every block has op-norm equal to magnitude. Used as the
// direction of additive schedules.
CoefficientMatrix random_direction(const TorusPtr& t, int d, int band,
                                   double magnitude, std::uint64_t seed,
                                   bool hermitian_assembled);

// First d tables of the standard derivation pair (d = 1 or 2).
DerivationFamily standard_family(const TorusPtr& t, int d);

enum class ScheduleKind { additive, dilation };

// additive: H_n = H + decay^n * E (direction required);
// dilation: H_n = (1 + decay^n) * H.
std::vector<CoefficientMatrix> make_schedule(
    const CoefficientMatrix& h, ScheduleKind kind, int length, double decay,
    const std::optional<CoefficientMatrix>& direction);

// One bound report per schedule entry, with n, length_fn and a per-row
// sample seed task_seed(budget.seed, n); diam_flat is shared by all rows.
std::vector<BoundReport> convergence_experiment(
    const CoefficientMatrix& h, const std::vector<CoefficientMatrix>& schedule,
    double diam_flat, const SampleBudget& budget);

// Single schedule row (n-th): used by the serial helper above and by the
// parallel batch runner, so both produce identical numbers.
BoundReport convergence_row(const CoefficientMatrix& h,
                            const CoefficientMatrix& hn, int n,
                            double diam_flat, const SampleBudget& budget);

// max over rows with positive length_fn of closed_form_corrected/length_fn:
// the run-reported constant C with bound <= C * length_fn.
double convergence_constant(const std::vector<BoundReport>& rows);

} // namespace nct
