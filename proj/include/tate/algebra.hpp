#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tate/linalg.hpp"

namespace tate {

class Algebra;
using AlgebraPtr = std::shared_ptr<const Algebra>;

// Finite O-free algebra given by structure constants on a fixed basis,
// O = Z_(p). Immutable after construction.
class Algebra {
  public:
    long p = 0;
    int n = 0;
    std::vector<Mat> lmul;  // lmul[i] = matrix of x |-> e_i x
    std::vector<Mat> rmul;  // rmul[j] = matrix of x |-> x e_j
    Mat unit;               // n x 1
    std::vector<Mat> gens;  // generate K(x)A as a unital K-algebra
    std::string name;

    Mat mul(const Mat& x, const Mat& y) const;
    // Matrix of left/right multiplication by the element with coordinates x.
    Mat left_action(const Mat& x) const;
    Mat right_action(const Mat& x) const;

    bool same_as(const Algebra& o) const;

    size_t hash = 0;
};

struct ValidationReport {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
    std::string str() const;
};

// structure[i][j] = coordinates of e_i * e_j (each an n x 1 column).
AlgebraPtr algebra_from_structure(long p, const std::vector<std::vector<Mat>>& structure,
                                  const Mat& unit, std::string name = "A");

// O[G] from a Cayley table t[i][j] = index of g_i g_j; index 0 must be the
// identity. Throws if the table is not a group.
AlgebraPtr group_algebra(long p, const std::vector<std::vector<int>>& table,
                         std::string name = "O[G]");

// M_d(O) on the basis E_{ij}, index i*d+j.
AlgebraPtr matrix_algebra(long p, int d);

AlgebraPtr opposite(const AlgebraPtr& a);
AlgebraPtr tensor_algebra(const AlgebraPtr& a, const AlgebraPtr& b);
AlgebraPtr direct_product(const AlgebraPtr& a, const AlgebraPtr& b);
AlgebraPtr enveloping(const AlgebraPtr& a);

ValidationReport validate_algebra(const Algebra& a);

// A symmetrising form, s(x) = dot(s, x).
struct Form {
    Mat s;  // n x 1
};

Form group_form(const Algebra& a);         // 1_G |-> 1, other elements |-> 0
Form matrix_trace_form(const Algebra& a);  // s(E_ij) = delta_ij
Form opposite_form(const Form& s);
Form tensor_form(const Form& s, const Form& t);
Form product_form(const Form& s, const Form& t);
Form scale_form(const Form& s, const Rat& lambda);

ValidationReport validate_form(const Algebra& a, const Form& f);

// Cached data derived from a validated symmetrising form.
struct FormData {
    Form form;
    Mat gram;      // G_ij = s(e_i e_j), invertible over O
    Mat gram_inv;  // columns are the dual basis
    Mat z;         // relative projective element, in Z(A)
};

FormData make_form_data(const Algebra& a, const Form& f);

// Dual basis vectors x_j^dual with s(x_i x_j^dual) = delta_ij.
std::vector<Mat> dual_basis(const Algebra& a, const FormData& fd);

// Saturated basis of the centre.
Mat center(const Algebra& a);

// K (x) A is semisimple (regular-representation trace form nondegenerate).
bool check_K_semisimple(const Algebra& a);

}  // namespace tate
