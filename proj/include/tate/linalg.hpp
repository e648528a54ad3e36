#pragma once

#include <optional>

#include "tate/matrix.hpp"

namespace tate {

// All routines below work p-locally: "over O" means over Z_(p). Pivots are
// chosen with minimal p-adic valuation, so row/column operations never leave O
// and unit pivots certify saturation.

// O-basis of the saturated kernel lattice {x in O^n : a x = 0}, as columns.
Mat kernel_lattice(const Mat& a, long p);

// Rows y with y a = 0, spanning the saturated left kernel.
Mat left_kernel(const Mat& a, long p);

// Saturation of the column span of s inside O^rows: basis of
// span_K(s) intersected with O^rows, as columns.
Mat saturate(const Mat& s, long p);

// A column basis of the O-lattice spanned by the columns of s (exact span,
// not saturated).
Mat image_basis(const Mat& s, long p);

// Some x over O with a x = b, or nullopt if no such x exists.
std::optional<Mat> solve_over_O(const Mat& a, const Mat& b, long p);

// As above but throws on failure.
Mat solve_exact(const Mat& a, const Mat& b, long p);

// Exact inverse over K; throws if singular.
Mat invert(const Mat& a);

// Square and invertible over O.
bool is_unimodular(const Mat& a, long p);

// v lies in the O-span of the columns of basis.
bool lattice_contains(const Mat& basis, const Mat& v, long p);

// Column spans agree as O-lattices.
bool lattice_equal(const Mat& a, const Mat& b, long p);

struct SmithDecomposition {
    Mat left;                     // unimodular over O
    Mat diag;                     // p^{e_1} | ... | p^{e_r}, then zeros
    Mat right;                    // unimodular over O
    std::vector<long> exponents;  // e_1 <= ... <= e_r
    int rank = 0;

    bool has_transforms = false;
};

// left * diag * right == input, invariant factors pure p-powers.
SmithDecomposition smith_normal_form(const Mat& a, long p, bool want_transforms = true);

// Exponents only (no transform matrices).
std::vector<long> smith_exponents(const Mat& a, long p);

// Complement data for a saturated sublattice S of O^n: columns completing S to
// a basis of O^n, the projection onto quotient coordinates and its section.
struct QuotientData {
    Mat proj;  // (n - r) x n, proj * S = 0
    Mat sect;  // n x (n - r), proj * sect = I
};
QuotientData quotient_data(const Mat& s, long p);

}  // namespace tate
