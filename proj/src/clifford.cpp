#include "nctorus/clifford.hpp"

namespace nct {

CMatrix pauli1() {
    CMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

CMatrix pauli2() {
    CMatrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

CMatrix pauli3() {
    CMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

CliffordRep clifford_rep(int d) {
    if (d < 1 || d > 16)
        throw parameter_error("clifford_rep: d must be in 1..16");
    const int pairs = (d + 1) / 2;
    const Eigen::Index dim = Eigen::Index(1) << pairs;

    CliffordRep rep;
    rep.d = d;
    rep.dim = dim;
    rep.gamma.reserve(d);

    const CMatrix s1 = pauli1(), s2 = pauli2(), s3 = pauli3();
    for (int g = 1; g <= d; ++g) {
        const int slot = (g + 1) / 2;  // 1-based tensor slot
        const CMatrix& core = (g % 2 == 1) ? s1 : s2;
        CMatrix acc = CMatrix::Identity(1, 1);
        for (int t = 1; t <= pairs; ++t) {
            if (t < slot)
                acc = kron(acc, s3);
            else if (t == slot)
                acc = kron(acc, core);
            else
                acc = kron(acc, CMatrix::Identity(2, 2));
        }
        rep.gamma.push_back(std::move(acc));
    }
    return rep;
}

CMatrix CliffordRep::projection_plus(int j) const {
    if (j < 0 || j >= d)
        throw parameter_error("projection_plus: index out of range");
    return 0.5 * (CMatrix::Identity(dim, dim) + gamma[j]);
}

CMatrix CliffordRep::projection_minus(int j) const {
    if (j < 0 || j >= d)
        throw parameter_error("projection_minus: index out of range");
    return 0.5 * (CMatrix::Identity(dim, dim) - gamma[j]);
}

} // namespace nct
