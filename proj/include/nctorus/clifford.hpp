#pragma once

#include <vector>

#include "nctorus/linalg.hpp"

namespace nct {

// d pairwise-anticommuting Hermitian involutive unitaries on spinor space
// C^(2^ceil(d/2)), built by the standard tensor chain
//   gamma_{2j-1} = s3^(j-1) (x) s1 (x) 1...,  gamma_{2j} = s3^(j-1) (x) s2 (x) 1...
// For d = 2 this is exactly (s1, s2).
struct CliffordRep {
    int d = 0;
    Eigen::Index dim = 0;           // 2^ceil(d/2)
    std::vector<CMatrix> gamma;     // size d

    // Spectral projection (1 + gamma_j) / 2; satisfies
    // p_j gamma_k p_j = delta_{jk} p_j.
    CMatrix projection_plus(int j) const;
    CMatrix projection_minus(int j) const;
};

// 1 <= d <= 16 (parameter_error otherwise).
CliffordRep clifford_rep(int d);

CMatrix pauli1();
CMatrix pauli2();
CMatrix pauli3();

} // namespace nct
