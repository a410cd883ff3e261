#pragma once

#include "nctorus/torus.hpp"

namespace nct {

// Provenance tag for operators on the GNS column space.
enum class OpTag { left, right, derivation, general };

// A q^2 x q^2 matrix acting on the GNS space of the normalized trace,
// written in the orthonormal Weyl basis (flat index m*q + n).
struct GnsOperator {
    CMatrix mat;
    OpTag tag = OpTag::general;
};

// Left-regular representation x -> a x. Isometric *-homomorphism.
GnsOperator left_regular(const AlgebraElement& a);

// Right multiplication x -> x b; generates the commutant of the
// left-regular image. Equals modular_conj(left_regular(b*)).
GnsOperator commutant_right(const AlgebraElement& b);

// Conjugation T -> J T J by the modular involution J(x) = x^*. J itself is
// antilinear and never materialized; the sandwich is computed basis-wise.
GnsOperator modular_conj(const TorusPtr& t, const GnsOperator& op);

// Matrix of the antilinear J "up to conjugation": J(x) = S * conj(x) in
// basis coordinates. Exposed for tests (S * conj(S) = identity).
CMatrix modular_basis_matrix(const TorusPtr& t);

// Diagonal multiplier diag(i * s_k(m, n)): the GNS materialization of
// derivation k. Anti-Hermitian.
GnsOperator derivation_operator(const DerivationFamily& fam, int k);

// Diagonal multiplier diag(s_k(m, n)): the Hermitian grading companion of
// derivation k (the derivation equals i times this).
GnsOperator grading_operator(const DerivationFamily& fam, int k);

} // namespace nct
