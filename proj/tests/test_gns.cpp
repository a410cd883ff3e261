#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_support.hpp"

#include "nctorus/gns.hpp"

using namespace nct;
using testsup::max_entry_diff;

namespace {

AlgebraElement random_element(const TorusPtr& t, std::uint64_t seed) {
    Rng rng(seed);
    return AlgebraElement::from_matrix(
        t, rng.gaussian_cmatrix(t->q(), t->q()));
}

}  // namespace

TEST_CASE("left regular representation is a *-homomorphism") {
    const auto t = make_torus(5, 2);
    const auto a = random_element(t, 1);
    const auto b = random_element(t, 2);
    const CMatrix ra = left_regular(a).mat;
    const CMatrix rb = left_regular(b).mat;
    CHECK(max_entry_diff(left_regular(a * b).mat, ra * rb) < 1e-12);
    CHECK(max_entry_diff(left_regular(a + b).mat, ra + rb) < 1e-13);
    CHECK(max_entry_diff(left_regular(a.adjoint()).mat, ra.adjoint()) <
          1e-13);
    CHECK(max_entry_diff(left_regular(AlgebraElement::identity(t)).mat,
                         cidentity(t->gns_dim())) < 1e-14);
    // isometric on the algebra: operator norms agree
    CHECK(op_norm(ra) == doctest::Approx(a.op_norm()).epsilon(1e-11));
}

TEST_CASE("right multiplication is an anti-homomorphism into the commutant") {
    const auto t = make_torus(4, 3);
    const auto a = random_element(t, 3);
    const auto b = random_element(t, 4);
    const CMatrix sa = commutant_right(a).mat;
    const CMatrix sb = commutant_right(b).mat;
    CHECK(max_entry_diff(commutant_right(a * b).mat, sb * sa) < 1e-12);
    for (std::uint64_t s = 5; s < 9; ++s) {
        const CMatrix rho = left_regular(random_element(t, s)).mat;
        CHECK(op_norm(rho * sa - sa * rho) < 1e-12 * op_norm(rho) *
                                                 (1.0 + op_norm(sa)));
    }
}

TEST_CASE("modular conjugation squares to the identity on operators") {
    const auto t = make_torus(5, 3);
    const CMatrix s = modular_basis_matrix(t);
    CHECK(max_entry_diff(s * s.conjugate(), cidentity(t->gns_dim())) < 1e-13);
    const auto a = random_element(t, 11);
    const GnsOperator op = left_regular(a);
    const GnsOperator once = modular_conj(t, op);
    const GnsOperator twice = modular_conj(t, once);
    CHECK(max_entry_diff(twice.mat, op.mat) < 1e-12);
}

TEST_CASE("conjugated left action equals right action by the adjoint") {
    for (const auto& [q, p] : {std::pair{2, 1}, {3, 1}, {5, 2}, {8, 5}}) {
        const auto t = make_torus(q, p);
        const auto a = random_element(t, 100 + static_cast<std::uint64_t>(q));
        const CMatrix lhs = modular_conj(t, left_regular(a)).mat;
        const CMatrix rhs = commutant_right(a.adjoint()).mat;
        CHECK(max_entry_diff(lhs, rhs) < 1e-12 * (1.0 + a.op_norm()));
    }
}

TEST_CASE("derivation and grading multipliers are diagonal companions") {
    const auto t = make_torus(4, 1);
    const auto fam = DerivationFamily::standard(t);
    for (int k = 0; k < 2; ++k) {
        const CMatrix dk = derivation_operator(fam, k).mat;
        const CMatrix gk = grading_operator(fam, k).mat;
        CHECK(max_entry_diff(dk, Complex(0, 1) * gk) < 1e-15);
        CHECK(max_entry_diff(gk, gk.adjoint()) < 1e-15);          // Hermitian
        CHECK(max_entry_diff(dk, -dk.adjoint()) < 1e-15);         // anti-Herm
        for (Eigen::Index i = 0; i < dk.rows(); ++i)
            for (Eigen::Index j = 0; j < dk.cols(); ++j)
                if (i != j) CHECK(std::abs(gk(i, j)) == 0.0);     // diagonal
    }
    // multiplier action matches the algebra-level derivation
    const auto a = random_element(t, 55);
    const int q = t->q();
    CVector coeffs(t->gns_dim()), derived(t->gns_dim());
    for (int m = 0; m < q; ++m)
        for (int n = 0; n < q; ++n) {
            coeffs(t->basis_index(m, n)) = a.fourier_at(m, n);
            derived(t->basis_index(m, n)) =
                derivation(fam, 0, a).fourier_at(m, n);
        }
    const CVector lhs = derivation_operator(fam, 0).mat * coeffs;
    CHECK((lhs - derived).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("derivation multipliers commute with right multiplication only up "
          "to wrapping") {
    // on the non-wrapping subspace the commutator with rho(a) reproduces the
    // derived element: check column-wise against monomials
    const auto t = make_torus(8, 1);
    const auto fam = DerivationFamily::standard(t);
    Rng rng(77);
    const auto a = AlgebraElement::random_hermitian(t, rng, 1);
    const CMatrix dk = derivation_operator(fam, 0).mat;
    const CMatrix rho = left_regular(a).mat;
    const CMatrix formula = left_regular(derivation(fam, 0, a)).mat;
    const CMatrix literal = dk * rho - rho * dk;
    for (int m = -2; m <= 2; ++m)
        for (int n = -2; n <= 2; ++n) {
            const int mm = (m + 8) % 8, nn = (n + 8) % 8;
            CVector e = CVector::Zero(t->gns_dim());
            e(t->basis_index(mm, nn)) = 1.0;
            CHECK((literal * e - formula * e).norm() < 1e-12);
        }
}
