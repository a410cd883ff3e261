#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "nctorus/linalg.hpp"

namespace nct {

// Deterministic randomness for experiments and solvers.
//
// std::mt19937_64 is bit-exact across platforms by the standard; the
// standard *distributions* are not, so every real-valued transform here is
// written out explicitly. Everything downstream that must reproduce
// byte-identical output (CSV goldens, per-task seeds) routes through this.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Stable per-task seed: hash of (master seed, task index). Independent of
// scheduling order, so parallel runs reproduce serial ones.
inline std::uint64_t task_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 0x165667B19E3779F9ULL));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return std::ldexp(static_cast<double>(bits() >> 11), -53); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t below(std::uint64_t n) { return bits() % n; }

    // Box-Muller, spelled out for cross-platform determinism.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Complex cgaussian() { return Complex(gaussian(), gaussian()); }

    CMatrix gaussian_cmatrix(Eigen::Index rows, Eigen::Index cols) {
        CMatrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cgaussian();
        return m;
    }

    CMatrix gaussian_hermitian(Eigen::Index n) {
        const CMatrix g = gaussian_cmatrix(n, n);
        return 0.5 * (g + g.adjoint());
    }

    // Unit vector, Haar-ish via normalized Gaussian entries.
    CVector unit_cvector(Eigen::Index n) {
        CVector v(n);
        double norm2 = 0.0;
        do {
            for (Eigen::Index i = 0; i < n; ++i) v(i) = cgaussian();
            norm2 = v.squaredNorm();
        } while (norm2 < 1e-12);
        return v / std::sqrt(norm2);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace nct
