#pragma once

// Independent brute-force oracle for the Tate cohomology of a cyclic group
// C_p with trivial coefficients, built from the standard 2-periodic complete
// resolution  ... -> A -(g-1)-> A -N-> A -(g-1)-> A -> ...  of O over
// A = O[C_p].  This deliberately avoids the tower/hom-space machinery of the
// library: cochain spaces and differentials are written down directly.

#include <vector>

#include "tate/linalg.hpp"

namespace tate_oracle {

using tate::Mat;
using tate::Rat;

// d_k : A -> A is right multiplication by (g - 1) for odd k, by the norm
// N = 1 + g + ... + g^{p-1} for even k.
inline Mat cp_differential(long p, int k) {
    const int n = int(p);
    Mat m(n, n);
    bool odd = ((k % 2) + 2) % 2 == 1;
    if (odd) {
        // x |-> x (g - 1)
        for (int i = 0; i < n; ++i) {
            m.at((i + 1) % n, i) += 1;
            m.at(i, i) -= 1;
        }
    } else {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) m.at(i, j) += 1;
    }
    return m;
}

// Exactness of the periodic complex: im(d_{k+1}) = ker(d_k) as saturated
// lattices together with d_k d_{k+1} = 0.
inline bool cp_resolution_exact(long p) {
    for (int k = -3; k <= 3; ++k) {
        Mat dk = cp_differential(p, k);
        Mat dk1 = cp_differential(p, k + 1);
        if (!(dk * dk1).is_zero()) return false;
        Mat ker = tate::kernel_lattice(dk, p);
        Mat img = tate::image_basis(dk1, p);
        if (!tate::lattice_equal(ker, img, p)) return false;
    }
    return true;
}

// Invariant factor exponents of Tate cohomology Ext-hat^n(O, O) over O[C_p].
// Hom_A(A, O) = O via phi(x) = (sum of coordinates) * c, so the cochain
// complex has rank-1 terms; the differential at C^n is precomposition with
// d_{n+1}.
inline std::vector<long> cp_tate_cohomology(long p, int n) {
    Mat ones(1, int(p));
    for (int j = 0; j < int(p); ++j) ones.at(0, j) = 1;
    auto delta = [&](int k) {  // C^k -> C^{k+1}, a 1x1 matrix
        Mat row = ones * cp_differential(p, k + 1);
        // row = scalar * ones
        return Mat{{row.at(0, 0)}};
    };
    Mat ker = tate::kernel_lattice(delta(n), p);
    Mat img = delta(n - 1);
    if (ker.cols() == 0) return {};
    Mat coords = tate::solve_exact(ker, img, p);
    auto exps = tate::smith_exponents(coords, p);
    std::vector<long> out;
    for (long e : exps)
        if (e > 0) out.push_back(e);
    return out;
}

}  // namespace tate_oracle
