#include "nctorus/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nctorus/errors.hpp"
#include "nctorus/rng.hpp"

namespace nct {

namespace {

void require_compatible(const CoefficientMatrix& h, const CoefficientMatrix& hp) {
    if (h.torus() != hp.torus())
        throw dimension_error("coefficient grids live on different algebras");
    if (h.d() != hp.d())
        throw dimension_error("coefficient grids have different derivation counts");
}

} // namespace

PairingDelta pairing_delta(const CoefficientMatrix& h, const CoefficientMatrix& hp) {
    require_compatible(h, hp);
    const double d = h.d();
    const CMatrix hinv = h.inverse();
    const CMatrix hpinv = hp.inverse();
    const CMatrix id = cidentity(h.assembled().rows());
    PairingDelta out;
    out.fwd = d * op_norm(id - hp.assembled() * hinv);
    out.bwd = d * op_norm(id - h.assembled() * hpinv);
    return out;
}

double sandwich_delta(const SpinorCommutant& h, const SpinorCommutant& k) {
    if (h.torus() != k.torus() || h.spinor_dim() != k.spinor_dim())
        throw dimension_error("sandwich_delta: pivots live on different spaces");
    const CMatrix kinv = k.inverse();
    const CMatrix id = cidentity(h.matrix().rows());
    return (op_norm(h.matrix() * kinv) + 1.0) * op_norm(id - kinv * h.matrix());
}

DerivationFamily standard_family(const TorusPtr& t, int d) {
    if (d < 1 || d > 2)
        throw parameter_error("standard_family: d must be 1 or 2");
    DerivationFamily full = DerivationFamily::standard(t);
    if (d == 2) return full;
    return DerivationFamily::custom(t, {full.table(0)});
}

BoundReport propinquity_bound(const CoefficientMatrix& h,
                              const CoefficientMatrix& hp, double diam_flat,
                              const SampleBudget& budget) {
    require_compatible(h, hp);
    if (!(diam_flat >= 0.0))
        throw parameter_error("propinquity_bound: diam_flat must be >= 0");
    const TorusPtr& t = h.torus();
    const int d = h.d();
    const int q = t->q();

    BoundReport r;
    r.diam_flat = diam_flat;

    const CMatrix hinv = h.inverse();
    const CMatrix hpinv = hp.inverse();
    const CMatrix id = cidentity(h.assembled().rows());
    const double fwd_norm = op_norm(id - hp.assembled() * hinv);
    r.length_fn = fwd_norm;
    r.delta_fwd = d * fwd_norm;
    r.delta_bwd = d * op_norm(id - h.assembled() * hpinv);
    const double delta = std::max(r.delta_fwd, r.delta_bwd);

    // Comparing each curved seminorm against the flat one bounds the curved
    // diameters by (1 + d*op_norm(1 - H^{-1})) times the flat diameter.
    const double coef_h = 1.0 + d * op_norm(id - hinv);
    const double coef_hp = 1.0 + d * op_norm(id - hpinv);
    r.diam_h = coef_h * diam_flat;
    r.diam_hprime = coef_hp * diam_flat;

    r.height = 0.0;
    r.lemma_bound = std::max(
        delta * (1.0 + 0.5 * std::max(r.diam_h, r.diam_hprime)), r.height);
    r.closed_form_corrected =
        delta * (1.0 + 0.5 * std::max(coef_h, coef_hp) * diam_flat);
    r.closed_form_literal =
        delta * (1.0 + 0.5 * std::max(1.0 / coef_h, 1.0 / coef_hp) * diam_flat);

    if (budget.samples > 0) {
        const DerivationFamily fam = standard_family(t, d);
        const CliffordRep cliff = clifford_rep(d);
        const CurvedDirac dirac_h(h, fam, cliff);
        const CurvedDirac dirac_hp(hp, fam, cliff);
        const int band = budget.band > 0 ? budget.band : q;
        double worst = 0.0;
        for (int i = 0; i < budget.samples; ++i) {
            Rng rng(task_seed(budget.seed, static_cast<std::uint64_t>(i)));
            const AlgebraElement a = AlgebraElement::random_hermitian(t, rng, band);
            const double lh = dirac_h.lip(a);
            if (!(lh > 1e-12)) continue;
            const double lhp = dirac_hp.lip(a);
            worst = std::max(worst, std::abs(lhp - lh) / lh);
        }
        r.empirical_ratio = worst;
    }
    return r;
}

ComparisonReport comparison_lemma_check(
    const LipSeminorm& l, const LipSeminorm& s, double delta,
    const std::vector<std::pair<State, State>>& state_pairs,
    const MkBudget& budget, std::uint64_t hypothesis_seed) {
    if (l.q() != s.q())
        throw dimension_error("comparison_lemma_check: seminorms live on different algebras");
    if (!(delta > 0.0))
        throw parameter_error("comparison_lemma_check: delta must be positive");

    ComparisonReport rep;
    rep.delta = delta;

    const int q = l.q();
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 16; ++i) {
        Rng rng(task_seed(hypothesis_seed, static_cast<std::uint64_t>(i)));
        const CMatrix a = rng.gaussian_hermitian(q);
        worst = std::max(worst, l.eval(a) - delta * s.eval(a));
    }
    rep.hypothesis_residual = worst;
    if (worst > 1e-9)
        throw contract_error(
            "comparison_lemma_check: hypothesis L <= delta*S fails on samples");

    rep.corrected_holds = true;
    rep.literal_holds = true;
    rep.pairs.reserve(state_pairs.size());
    for (std::size_t i = 0; i < state_pairs.size(); ++i) {
        MkBudget b = budget;
        b.seed = task_seed(budget.seed, i);
        ComparisonPair cp;
        cp.mk_l = mk_distance(l, state_pairs[i].first, state_pairs[i].second, b).value;
        cp.mk_s = mk_distance(s, state_pairs[i].first, state_pairs[i].second, b).value;
        const double tol = 1e-9 + 1e-6 * std::max(cp.mk_l, cp.mk_s);
        cp.corrected_ok = cp.mk_s <= delta * cp.mk_l + tol;
        cp.literal_ok = cp.mk_s <= cp.mk_l / delta + tol;
        rep.corrected_holds = rep.corrected_holds && cp.corrected_ok;
        rep.literal_holds = rep.literal_holds && cp.literal_ok;
        rep.pairs.push_back(cp);
    }
    return rep;
}

namespace {

std::vector<AlgebraElement> random_grid(const TorusPtr& t, int d, int band,
                                        double magnitude, Rng& rng,
                                        bool hermitian_assembled,
                                        bool add_identity) {
    std::vector<AlgebraElement> grid(static_cast<std::size_t>(d) * d,
                                     AlgebraElement::zero(t));
    for (int k = 0; k < d; ++k) {
        for (int j = 0; j < d; ++j) {
            if (hermitian_assembled && j < k) continue;  // mirrored below
            AlgebraElement x = AlgebraElement::random_hermitian(t, rng, band);
            if (!hermitian_assembled) {
                AlgebraElement y = AlgebraElement::random_hermitian(t, rng, band);
                x = x + Complex(0.0, 1.0) * y;
            }
            // Pin the block norm to the requested magnitude, so the
            // assembled deviation from the identity stays below
            // d * magnitude and the grid is invertible by construction
            // whenever d * magnitude < 1.
            const double xn = x.op_norm();
            if (xn > 0.0) x = Complex(1.0 / xn, 0.0) * x;
            AlgebraElement block = Complex(magnitude, 0.0) * x;
            if (add_identity && j == k)
                block = AlgebraElement::identity(t) + block;
            grid[static_cast<std::size_t>(k) * d + j] = block;
            if (hermitian_assembled && j > k)
                grid[static_cast<std::size_t>(j) * d + k] = block;
        }
    }
    return grid;
}

void check_grid_params(const TorusPtr& t, int d, int band, double magnitude,
                       const char* who) {
    if (!t) throw parameter_error(std::string(who) + ": null algebra");
    if (d < 1) throw parameter_error(std::string(who) + ": d must be >= 1");
    if (band < 0) throw parameter_error(std::string(who) + ": band must be >= 0");
    if (!(magnitude >= 0.0))
        throw parameter_error(std::string(who) + ": magnitude must be >= 0");
}

} // namespace

CoefficientMatrix random_coefficients(const TorusPtr& t, int d, int band,
                                      double magnitude, std::uint64_t seed,
                                      bool hermitian_assembled) {
    check_grid_params(t, d, band, magnitude, "random_coefficients");
    double last_sv = 0.0;
    for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
        Rng rng(task_seed(seed, attempt));
        CoefficientMatrix h = CoefficientMatrix::assemble(
            t, random_grid(t, d, band, magnitude, rng, hermitian_assembled, true),
            d);
        last_sv = h.min_singular_value();
        if (h.invertible()) return h;
    }
    throw singular_error("random_coefficients: could not draw an invertible grid",
                         last_sv);
}

CoefficientMatrix random_direction(const TorusPtr& t, int d, int band,
                                   double magnitude, std::uint64_t seed,
                                   bool hermitian_assembled) {
    check_grid_params(t, d, band, magnitude, "random_direction");
    Rng rng(task_seed(seed, 0));
    return CoefficientMatrix::assemble(
        t, random_grid(t, d, band, magnitude, rng, hermitian_assembled, false), d);
}

std::vector<CoefficientMatrix> make_schedule(
    const CoefficientMatrix& h, ScheduleKind kind, int length, double decay,
    const std::optional<CoefficientMatrix>& direction) {
    if (length < 1) throw parameter_error("make_schedule: length must be >= 1");
    if (!(decay > 0.0 && decay < 1.0))
        throw parameter_error("make_schedule: decay must lie in (0, 1)");
    if (kind == ScheduleKind::additive && !direction)
        throw parameter_error("make_schedule: additive schedule needs a direction grid");

    std::vector<CoefficientMatrix> out;
    out.reserve(static_cast<std::size_t>(length));
    double w = 1.0;
    for (int n = 0; n < length; ++n) {
        if (kind == ScheduleKind::additive) {
            out.push_back(CoefficientMatrix::linear_combination(
                h, Complex(1.0, 0.0), *direction, Complex(w, 0.0)));
        } else {
            out.push_back(CoefficientMatrix::linear_combination(
                h, Complex(1.0 + w, 0.0), h, Complex(0.0, 0.0)));
        }
        w *= decay;
    }
    return out;
}

BoundReport convergence_row(const CoefficientMatrix& h,
                            const CoefficientMatrix& hn, int n,
                            double diam_flat, const SampleBudget& budget) {
    SampleBudget b = budget;
    b.seed = task_seed(budget.seed, static_cast<std::uint64_t>(n));
    BoundReport r = propinquity_bound(h, hn, diam_flat, b);
    r.n = n;
    return r;
}

std::vector<BoundReport> convergence_experiment(
    const CoefficientMatrix& h, const std::vector<CoefficientMatrix>& schedule,
    double diam_flat, const SampleBudget& budget) {
    std::vector<BoundReport> rows;
    rows.reserve(schedule.size());
    for (std::size_t n = 0; n < schedule.size(); ++n)
        rows.push_back(convergence_row(h, schedule[n], static_cast<int>(n),
                                       diam_flat, budget));
    return rows;
}

double convergence_constant(const std::vector<BoundReport>& rows) {
    double c = 0.0;
    for (const auto& r : rows)
        if (r.length_fn > 0.0)
            c = std::max(c, r.closed_form_corrected / r.length_fn);
    return c;
}

} // namespace nct
