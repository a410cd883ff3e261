#include "nctorus/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Dense>

#include "nctorus/errors.hpp"
#include "nctorus/rng.hpp"

namespace nct {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kStep0 = 1.0;

// The spherical scan must stay above 1e5 directions (2 * nt^2 points).
int sphere_resolution(int n_theta) { return std::max(n_theta, 224); }

// Fixed enumeration order shared by the table builder and its consumers.
template <typename F>
void for_each_sphere_direction(int nt, F&& f) {
    for (int i = 0; i < nt; ++i) {
        const double theta = kPi * (i + 0.5) / nt;
        const double st = std::sin(theta);
        const double ct = std::cos(theta);
        for (int j = 0; j < 2 * nt; ++j) {
            const double phi = kPi * j / nt;
            f(st * std::cos(phi), st * std::sin(phi), ct);
        }
    }
}

} // namespace

std::vector<CMatrix> traceless_hermitian_basis(int q) {
    if (q < 1) throw parameter_error("traceless_hermitian_basis: q must be >= 1");
    std::vector<CMatrix> basis;
    basis.reserve(static_cast<std::size_t>(q) * q - 1);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < q; ++i) {
        for (int j = i + 1; j < q; ++j) {
            CMatrix x = CMatrix::Zero(q, q);
            x(i, j) = inv_sqrt2;
            x(j, i) = inv_sqrt2;
            basis.push_back(std::move(x));
            CMatrix y = CMatrix::Zero(q, q);
            y(i, j) = Complex(0.0, inv_sqrt2);
            y(j, i) = Complex(0.0, -inv_sqrt2);
            basis.push_back(std::move(y));
        }
    }
    for (int k = 1; k < q; ++k) {
        CMatrix z = CMatrix::Zero(q, q);
        const double c = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
        for (int i = 0; i < k; ++i) z(i, i) = c;
        z(k, k) = -static_cast<double>(k) * c;
        basis.push_back(std::move(z));
    }
    return basis;
}

struct LipSeminorm::Impl {
    int q = 0;
    std::function<CMatrix(const CMatrix&)> t;
    std::vector<CMatrix> basis;

    std::mutex mu;
    bool images_ready = false;
    std::vector<CMatrix> images;
    double s_base = 0.0;
    std::optional<double> raw_gap;
    std::map<int, std::shared_ptr<const std::vector<double>>> sphere;

    // Images are written once and then immutable, so the returned reference
    // stays valid for concurrent readers.
    const std::vector<CMatrix>& ensure_images() {
        std::lock_guard<std::mutex> lock(mu);
        if (!images_ready) {
            images.reserve(basis.size());
            double s = 0.0;
            for (const auto& b : basis) {
                images.push_back(t(b));
                s = std::max(s, op_norm(images.back()));
            }
            s_base = s;
            images_ready = true;
        }
        return images;
    }
};

LipSeminorm::LipSeminorm(std::shared_ptr<Impl> impl, double scale)
    : impl_(std::move(impl)), scale_(scale) {}

LipSeminorm LipSeminorm::custom(int q, std::function<CMatrix(const CMatrix&)> t) {
    if (q < 1) throw parameter_error("LipSeminorm: q must be >= 1");
    if (!t) throw parameter_error("LipSeminorm: missing map");
    auto impl = std::make_shared<Impl>();
    impl->q = q;
    impl->t = std::move(t);
    impl->basis = traceless_hermitian_basis(q);
    return LipSeminorm(std::move(impl), 1.0);
}

LipSeminorm LipSeminorm::curved(const TorusPtr& t, const CoefficientMatrix& h,
                                const DerivationFamily& fam,
                                const CliffordRep& cliff) {
    if (!t) throw parameter_error("LipSeminorm::curved: null algebra");
    if (h.torus() != t)
        throw dimension_error("LipSeminorm::curved: coefficient grid belongs to a different algebra");
    auto dirac = std::make_shared<CurvedDirac>(h, fam, cliff);
    TorusPtr torus = t;
    return custom(t->q(), [torus, dirac](const CMatrix& m) {
        return dirac->commutator(AlgebraElement::from_matrix(torus, m));
    });
}

LipSeminorm LipSeminorm::flat(const TorusPtr& t, const DerivationFamily& fam,
                              const CliffordRep& cliff) {
    return curved(t, CoefficientMatrix::identity(t, fam.d()), fam, cliff);
}

LipSeminorm LipSeminorm::flat(const TorusPtr& t) {
    if (!t) throw parameter_error("LipSeminorm::flat: null algebra");
    return flat(t, DerivationFamily::standard(t), clifford_rep(2));
}

LipSeminorm LipSeminorm::sandwich(const SpinorCommutant& k, const CMatrix& dirac) {
    TorusPtr torus = k.torus();
    if (dirac.rows() != k.matrix().rows() || dirac.cols() != k.matrix().cols())
        throw dimension_error("LipSeminorm::sandwich: operator and pivot dimensions differ");
    const Eigen::Index sdim = k.spinor_dim();
    CMatrix kdk = k.matrix() * dirac * k.matrix();
    return custom(torus->q(), [torus, sdim, kdk](const CMatrix& m) {
        CMatrix pi = spinor_representation(AlgebraElement::from_matrix(torus, m), sdim);
        return CMatrix(kdk * pi - pi * kdk);
    });
}

LipSeminorm LipSeminorm::scaled(double c) const {
    if (!(c > 0.0)) throw parameter_error("LipSeminorm::scaled: factor must be positive");
    return LipSeminorm(impl_, scale_ * c);
}

int LipSeminorm::q() const { return impl_->q; }

double LipSeminorm::eval(const CMatrix& herm) const {
    if (herm.rows() != impl_->q || herm.cols() != impl_->q)
        throw dimension_error("LipSeminorm: argument has the wrong dimension");
    require_hermitian(herm, "seminorm argument");
    return scale_ * op_norm(impl_->t(herm));
}

double LipSeminorm::eval(const AlgebraElement& a) const {
    return eval(a.matrix());
}

const std::vector<CMatrix>& LipSeminorm::basis() const { return impl_->basis; }

const std::vector<CMatrix>& LipSeminorm::images() const {
    return impl_->ensure_images();
}

double LipSeminorm::scale_base() const {
    impl_->ensure_images();
    return impl_->s_base;
}

CMatrix LipSeminorm::assemble_image(const RVector& x) const {
    const auto& images = impl_->ensure_images();
    if (x.size() != static_cast<Eigen::Index>(images.size()))
        throw dimension_error("LipSeminorm: coordinate vector has the wrong dimension");
    if (images.empty())
        throw singular_error("LipSeminorm: no traceless directions at q = 1", 0.0);
    CMatrix m = CMatrix::Zero(images.front().rows(), images.front().cols());
    for (std::size_t i = 0; i < images.size(); ++i)
        if (x(static_cast<Eigen::Index>(i)) != 0.0)
            m += x(static_cast<Eigen::Index>(i)) * images[i];
    return m;
}

double LipSeminorm::eval_normalized(const RVector& x) const {
    const double sb = scale_base();
    if (!(sb > 0.0))
        throw singular_error("LipSeminorm: seminorm vanishes on the traceless subspace", sb);
    return op_norm(assemble_image(x)) / sb;
}

double LipSeminorm::kernel_gap() const {
    const auto& images = impl_->ensure_images();
    if (images.empty()) return std::numeric_limits<double>::infinity();
    std::lock_guard<std::mutex> lock(impl_->mu);
    if (!impl_->raw_gap) {
        const Eigen::Index len = images.front().rows() * images.front().cols();
        RMatrix a(2 * len, static_cast<Eigen::Index>(images.size()));
        for (std::size_t i = 0; i < images.size(); ++i) {
            Eigen::Map<const CVector> v(images[i].data(), len);
            a.col(static_cast<Eigen::Index>(i)).head(len) = v.real();
            a.col(static_cast<Eigen::Index>(i)).tail(len) = v.imag();
        }
        impl_->raw_gap = min_singular_value(a);
    }
    return scale_ * *impl_->raw_gap;
}

bool LipSeminorm::degenerate(double rel_tol) const {
    const auto& images = impl_->ensure_images();
    if (images.empty()) return false;
    if (!(impl_->s_base > 0.0)) return true;
    return kernel_gap() / scale_ <= rel_tol * impl_->s_base;
}

std::shared_ptr<const std::vector<double>> LipSeminorm::sphere_norm_table(
    int n_theta) const {
    if (impl_->q != 2)
        throw contract_error("sphere norm table is defined for q = 2 only");
    const int nt = sphere_resolution(n_theta);
    std::lock_guard<std::mutex> lock(impl_->mu);
    auto it = impl_->sphere.find(nt);
    if (it != impl_->sphere.end()) return it->second;
    const CMatrix t1 = impl_->t(pauli1());
    const CMatrix t2 = impl_->t(pauli2());
    const CMatrix t3 = impl_->t(pauli3());
    auto table = std::make_shared<std::vector<double>>();
    table->reserve(static_cast<std::size_t>(2) * nt * nt);
    for_each_sphere_direction(nt, [&](double u1, double u2, double u3) {
        table->push_back(op_norm(u1 * t1 + u2 * t2 + u3 * t3));
    });
    impl_->sphere.emplace(nt, table);
    return table;
}

State State::from_density(int q, const CMatrix& density) {
    if (q < 1) throw parameter_error("State: q must be >= 1");
    if (density.rows() != q || density.cols() != q)
        throw dimension_error("State: density has the wrong dimension");
    require_hermitian(density, "density");
    CMatrix h = 0.5 * (density + density.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, lmax))
        throw parameter_error("State: density has a negative eigenvalue");
    const double tr = h.trace().real();
    if (std::abs(tr / q - 1.0) > 1e-12 * q)
        throw parameter_error("State: density is not normalized (trace average must be 1)");
    return State(std::move(h));
}

State State::pure(const CVector& unit_vector) {
    const Eigen::Index n = unit_vector.size();
    if (n < 1) throw parameter_error("State::pure: empty vector");
    const double n2 = unit_vector.squaredNorm();
    if (std::abs(n2 - 1.0) > 1e-9)
        throw parameter_error("State::pure: vector is not a unit vector");
    CVector w = unit_vector / std::sqrt(n2);
    return State(static_cast<double>(n) * (w * w.adjoint()));
}

State State::random_mixed(int q, Rng& rng) {
    if (q < 1) throw parameter_error("State: q must be >= 1");
    CMatrix w = rng.gaussian_cmatrix(q, q + 2);
    CMatrix d = w * w.adjoint();
    d = 0.5 * (d + d.adjoint());
    const double tr = d.trace().real();
    if (!(tr > 0.0)) return random_mixed(q, rng);
    d *= static_cast<double>(q) / tr;
    return State(std::move(d));
}

double State::expect(const CMatrix& herm) const {
    if (herm.rows() != density_.rows() || herm.cols() != density_.cols())
        throw dimension_error("State: observable has the wrong dimension");
    return (density_ * herm).trace().real() / static_cast<double>(q());
}

MkResult mk_distance(const LipSeminorm& l, const State& phi, const State& psi,
                     const MkBudget& budget) {
    const int q = l.q();
    if (phi.q() != q || psi.q() != q)
        throw dimension_error("mk_distance: state dimension does not match the seminorm");
    if (budget.restarts < 1 || budget.iterations < 1)
        throw parameter_error("mk_distance: budget must be positive");

    const auto& basis = l.basis();
    const int n = static_cast<int>(basis.size());

    MkResult out;
    out.restarts = budget.restarts;
    out.iterations = budget.iterations;
    out.witness = CMatrix::Zero(q, q);

    const CMatrix delta = phi.density() - psi.density();
    RVector c(n);
    for (int i = 0; i < n; ++i)
        c(i) = (delta * basis[static_cast<std::size_t>(i)]).trace().real() / q;
    const double cnorm = c.norm();
    if (n == 0 || cnorm == 0.0) return out;  // equal states: exact zero

    if (l.degenerate())
        throw contract_error("mk_distance: seminorm kernel exceeds the scalars");

    const double s_base = l.scale_base();
    const auto& images = l.images();

    double best = 0.0;
    RVector best_x;
    int best_restart = -1;
    auto consider = [&](double val, const RVector& x, int r) {
        if (val > best) {
            best = val;
            best_x = x;
            best_restart = r;
        }
    };

    for (int r = 0; r < budget.restarts; ++r) {
        Rng rng(task_seed(budget.seed, static_cast<std::uint64_t>(r)));
        RVector x(n);
        if (r == 0) {
            x = c / cnorm;
        } else {
            for (int i = 0; i < n; ++i) x(i) = rng.gaussian();
            const double xn = x.norm();
            if (!(xn > 0.0)) continue;
            x /= xn;
        }
        double ln = l.eval_normalized(x);
        if (!(ln > 1e-300)) continue;
        x /= ln;
        double val = c.dot(x);
        if (val < 0.0) {
            x = -x;
            val = -val;
        }
        consider(val, x, r);

        for (int k = 1; k <= budget.iterations; ++k) {
            const CMatrix m = l.assemble_image(x);
            const TopSingular ts = top_singular_triplet(m);
            RVector gl(n);
            for (int i = 0; i < n; ++i)
                gl(i) = ts.left.dot(images[static_cast<std::size_t>(i)] * ts.right)
                            .real() /
                        s_base;
            const RVector g = c - val * gl;
            const double gn = g.norm();
            if (gn <= 1e-14 * cnorm) break;  // stationary ratio
            x += (kStep0 / k) * (x.norm() / gn) * g;
            ln = l.eval_normalized(x);
            if (!(ln > 1e-300)) break;
            x /= ln;
            val = c.dot(x);
            if (val < 0.0) {
                x = -x;
                val = -val;
            }
            consider(val, x, r);
        }
    }

    const double denom = l.scale() * s_base;
    out.value = best / denom;
    out.best_restart = best_restart;
    if (best_restart >= 0) {
        CMatrix w = CMatrix::Zero(q, q);
        for (int i = 0; i < n; ++i)
            w += best_x(i) * basis[static_cast<std::size_t>(i)];
        out.witness = w / denom;
    }
    return out;
}

double mk_oracle_grid(const LipSeminorm& l, const State& phi, const State& psi,
                      int n_theta) {
    if (l.q() != 2)
        throw contract_error("mk_oracle_grid: grid oracle is defined for q = 2 only");
    if (phi.q() != 2 || psi.q() != 2)
        throw dimension_error("mk_oracle_grid: states must live on q = 2");
    const auto table = l.sphere_norm_table(n_theta);
    const int nt = sphere_resolution(n_theta);
    const CMatrix delta = phi.density() - psi.density();
    const double m1 = (delta * pauli1()).trace().real() / 2.0;
    const double m2 = (delta * pauli2()).trace().real() / 2.0;
    const double m3 = (delta * pauli3()).trace().real() / 2.0;
    double best = 0.0;
    std::size_t idx = 0;
    for_each_sphere_direction(nt, [&](double u1, double u2, double u3) {
        const double val = std::abs(u1 * m1 + u2 * m2 + u3 * m3);
        const double den = l.scale() * (*table)[idx++];
        if (den > 0.0) best = std::max(best, val / den);
    });
    return best;
}

double diameter_oracle_grid(const LipSeminorm& l, int n_theta) {
    if (l.q() != 2)
        throw contract_error("diameter_oracle_grid: grid oracle is defined for q = 2 only");
    if (l.degenerate())
        throw contract_error("diameter_oracle_grid: seminorm kernel exceeds the scalars");
    const auto table = l.sphere_norm_table(n_theta);
    const int nt = sphere_resolution(n_theta);
    double best = 0.0;
    std::size_t idx = 0;
    // The eigenvalue spread of a unit direction u . sigma is exactly 2.
    for_each_sphere_direction(nt, [&](double, double, double) {
        const double den = l.scale() * (*table)[idx++];
        if (den > 0.0) best = std::max(best, 2.0 / den);
    });
    return best;
}

DiamResult diameter(const LipSeminorm& l, const DiamBudget& budget) {
    const int q = l.q();
    DiamResult out;
    if (q == 1) return out;  // only one state
    if (budget.restarts < 1 || budget.alternations < 1 ||
        budget.inner_restarts < 1 || budget.inner_iterations < 1)
        throw parameter_error("diameter: budget must be positive");
    if (l.degenerate())
        throw contract_error("diameter: seminorm kernel exceeds the scalars");

    out.left = CVector::Unit(q, 0);
    out.right = CVector::Unit(q, 1);

    for (int r = 0; r < budget.restarts; ++r) {
        const std::uint64_t seed_r = task_seed(budget.seed, static_cast<std::uint64_t>(r));
        Rng rng(seed_r);
        CVector u, v;
        if (r == 0) {
            u = CVector::Unit(q, 0);
            v = CVector::Unit(q, 1);
        } else {
            u = rng.unit_cvector(q);
            v = rng.unit_cvector(q);
        }
        for (int alt = 0; alt < budget.alternations; ++alt) {
            MkBudget mb;
            mb.restarts = budget.inner_restarts;
            mb.iterations = budget.inner_iterations;
            mb.seed = task_seed(seed_r, 7000 + static_cast<std::uint64_t>(alt));
            const MkResult res = mk_distance(l, State::pure(u), State::pure(v), mb);
            if (res.value > out.value) {
                out.value = res.value;
                out.left = u;
                out.right = v;
            }
            if (!(res.value > 0.0)) break;
            // The witness realizes the current value; its extreme spectral
            // pair can only widen the pairing on the next round.
            const HermEig eig = herm_eig(res.witness);
            u = eig.vectors.col(0);
            v = eig.vectors.col(q - 1);
        }
    }
    return out;
}

LeibnizSlack leibniz_residual(const LipSeminorm& l, const AlgebraElement& a,
                              const AlgebraElement& b) {
    require_same_torus(a, b, "leibniz_residual");
    const TorusPtr& t = a.torus();
    if (t->q() != l.q())
        throw dimension_error("leibniz_residual: seminorm and elements live on different algebras");
    if (!a.is_hermitian() || !b.is_hermitian())
        throw contract_error("leibniz_residual: arguments must be self-adjoint");
    const int q = t->q();
    const auto da = a.band_degree();
    const auto db = b.band_degree();
    if (2 * (da.deg1 + db.deg1) >= q || 2 * (da.deg2 + db.deg2) >= q)
        throw contract_error("leibniz_residual: product band degrees wrap around");

    const AlgebraElement ab = a * b;
    const AlgebraElement ba = b * a;
    const AlgebraElement jordan = Complex(0.5, 0.0) * (ab + ba);
    const AlgebraElement lie = Complex(0.0, -0.5) * (ab - ba);

    const double la = l.eval(a);
    const double lb = l.eval(b);
    const double na = a.op_norm();
    const double nb = b.op_norm();
    const double budget = la * nb + na * lb;

    LeibnizSlack s;
    s.jordan = budget - l.eval(jordan);
    s.lie = budget - l.eval(lie);
    return s;
}

double kernel_gap(const LipSeminorm& l) { return l.kernel_gap(); }

} // namespace nct
