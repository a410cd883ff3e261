#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_support.hpp"

#include "nctorus/linalg.hpp"

using namespace nct;
using testsup::max_entry_diff;
using testsup::op_norm_oracle;
using testsup::random_cmatrix;

TEST_CASE("op_norm matches the Gram-eigenvalue reference on dense sizes") {
    for (const Eigen::Index n : {1, 2, 3, 7, 16, 40}) {
        const CMatrix m = random_cmatrix(100 + static_cast<std::uint64_t>(n),
                                         n, n + (n % 3));
        const double got = op_norm(m);
        const double want = op_norm_oracle(m);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("op_norm power-iteration path agrees with the dense reference") {
    const Eigen::Index n = 530;  // above the dense-decomposition cutoff
    CMatrix m = CMatrix::Zero(n, n);
    Rng rng(7);
    for (int k = 0; k < 4000; ++k) {
        const auto i = static_cast<Eigen::Index>(rng.below(n));
        const auto j = static_cast<Eigen::Index>(rng.below(n));
        m(i, j) = rng.cgaussian();
    }
    const double got = op_norm(m);
    const double want = op_norm_oracle(m);
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("op_norm basics") {
    CHECK(op_norm(cidentity(5)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(op_norm(CMatrix::Zero(3, 3)) == 0.0);
    CHECK_THROWS_AS(op_norm(CMatrix(0, 0)), dimension_error);
    const CMatrix m = random_cmatrix(3, 6, 6);
    CHECK(op_norm(2.5 * m) == doctest::Approx(2.5 * op_norm(m)).epsilon(1e-13));
    CHECK(op_norm(m.adjoint()) == doctest::Approx(op_norm(m)).epsilon(1e-13));
}

TEST_CASE("kron layout and algebra") {
    const CMatrix a = random_cmatrix(11, 2, 3);
    const CMatrix b = random_cmatrix(12, 3, 2);
    const CMatrix k = kron(a, b);
    REQUIRE(k.rows() == 6);
    REQUIRE(k.cols() == 6);
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 3; ++j)
            for (Eigen::Index r = 0; r < 3; ++r)
                for (Eigen::Index c = 0; c < 2; ++c)
                    CHECK(std::abs(k(i * 3 + r, j * 2 + c) -
                                   a(i, j) * b(r, c)) < 1e-15);
    // mixed-product identity (A x B)(C x D) = AC x BD
    const CMatrix cm = random_cmatrix(13, 3, 2);
    const CMatrix d = random_cmatrix(14, 2, 4);
    CHECK(max_entry_diff(kron(a, b) * kron(cm, d),
                         kron(a * cm, b * d)) < 1e-13);
    CHECK_THROWS_AS(kron(CMatrix(0, 0), a), dimension_error);
}

TEST_CASE("hermiticity detection and enforcement") {
    Rng rng(21);
    const CMatrix h = rng.gaussian_hermitian(5);
    CHECK(is_hermitian(h));
    CHECK(hermiticity_defect(h) < 1e-14);
    CMatrix bad = h;
    bad(0, 1) += Complex(0.0, 0.5);
    CHECK(!is_hermitian(bad));
    CHECK_THROWS_AS(require_hermitian(bad, "test"), contract_error);
    CHECK_NOTHROW(require_hermitian(h, "test"));
    CHECK(hermiticity_defect(CMatrix::Zero(4, 4)) == 0.0);
    CHECK(hermiticity_defect(random_cmatrix(9, 3, 4)) == 1.0);  // not square
}

TEST_CASE("herm_eig reconstructs the matrix with descending eigenvalues") {
    Rng rng(31);
    const CMatrix h = rng.gaussian_hermitian(7);
    const HermEig e = herm_eig(h);
    for (Eigen::Index i = 0; i + 1 < e.values.size(); ++i)
        CHECK(e.values(i) >= e.values(i + 1));
    const CMatrix rebuilt =
        e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    CHECK(max_entry_diff(rebuilt, h) < 1e-13 * (1.0 + op_norm(h)));
    CHECK(max_entry_diff(e.vectors.adjoint() * e.vectors, cidentity(7)) <
          1e-13);
}

TEST_CASE("top singular triplet is consistent and extremal") {
    const CMatrix m = random_cmatrix(41, 8, 5);
    const TopSingular ts = top_singular_triplet(m);
    CHECK(ts.sigma == doctest::Approx(op_norm_oracle(m)).epsilon(1e-12));
    CHECK((m * ts.right - ts.sigma * ts.left).norm() < 1e-12 * ts.sigma);
    CHECK(std::abs(ts.left.norm() - 1.0) < 1e-12);
    CHECK(std::abs(ts.right.norm() - 1.0) < 1e-12);
}

TEST_CASE("min_singular_value on complex and real inputs") {
    const CMatrix u = random_cmatrix(51, 6, 6);
    Eigen::JacobiSVD<CMatrix> svd(u);
    CHECK(min_singular_value(u) ==
          doctest::Approx(svd.singularValues().minCoeff()).epsilon(1e-11));
    RMatrix r = RMatrix::Zero(3, 2);
    r(0, 0) = 3.0;
    r(1, 1) = 0.25;
    CHECK(min_singular_value(r) == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(min_singular_value(CMatrix(CMatrix::Zero(4, 4))) == 0.0);
}

TEST_CASE("frobenius norm") {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = Complex(3.0, 0.0);
    m(1, 1) = Complex(0.0, 4.0);
    CHECK(frobenius(m) == doctest::Approx(5.0).epsilon(1e-15));
}
