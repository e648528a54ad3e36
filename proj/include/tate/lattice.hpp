#pragma once

#include "tate/algebra.hpp"

namespace tate {

// O-free left module over an algebra, given by one action matrix per algebra
// basis element.
struct Lattice {
    AlgebraPtr E;
    int rank = 0;
    std::vector<Mat> act;

    // Action matrix of the element with coordinate vector x.
    Mat action_of(const Mat& x) const;
};

Lattice regular_lattice(const AlgebraPtr& e);
// E^copies with coordinates (copy, algebra coordinate), index j*n + k.
Lattice free_module(const AlgebraPtr& e, int copies);
Lattice zero_lattice(const AlgebraPtr& e);
Lattice direct_sum(const Lattice& u, const Lattice& v);
// O-dual as a module over eop (structurally opposite(u.E)); actions transpose.
Lattice dual_lattice(const Lattice& u, const AlgebraPtr& eop);

ValidationReport validate_action(const Lattice& u);

// Generators and relations of U as an E-module.
struct Presentation {
    std::vector<int> gens;  // indices of O-basis vectors generating U over E
    Mat pi;                 // rank x (nE * g), surjection E^g -> U
    Mat relations;          // saturated kernel lattice of pi, (nE*g) x r
    Mat xi;                 // (nE*g) x rank with pi * xi = identity
};

Presentation present(const Lattice& u);

// Hom_E(U, V) as a saturated lattice, coordinatized by generator images
// ("tuples" in O^{g * rank V}).
class HomSpace {
  public:
    Lattice U, V;
    Presentation pres;
    Mat basis;  // (g * rankV) x dim, saturated

    int dim() const { return basis.cols(); }
    // Hom matrix (rankV x rankU) of the tuple with the given coordinates.
    Mat to_matrix(const Mat& coords) const;
    Mat matrix_of_tuple(const Mat& tuple) const;
    Mat tuple_of_matrix(const Mat& f) const;
    // Coordinates of an intertwiner in the basis; nullopt if f is not in the
    // O-span (i.e. not an intertwiner defined over O).
    std::optional<Mat> coords_of(const Mat& f) const;
    // Batched version: columns are tuples.
    std::optional<Mat> coords_of_tuples(const Mat& tuples) const;
};

HomSpace hom_space(const Lattice& u, const Lattice& v);

// Higman relative trace of an O-linear f: U -> V with respect to the dual
// basis pair of fd: Tr(f) = sum_x rho_V(x) f rho_U(x^dual).
Mat relative_trace(const Lattice& u, const Lattice& v, const FormData& fd, const Mat& f);

// Hom^pr(U, V) as a column lattice in hom-space coordinates: the exact image
// of the relative trace (not saturated).
Mat projective_factoring_coords(const HomSpace& h, const FormData& fd);

// Hom^pr by the definitional characterization: image of
// Hom_E(U, E (x)_O V) -> Hom_E(U, V), post-composition with e(x)v |-> ev.
// Used to cross-check the relative-trace description.
Mat projective_factoring_by_definition(const HomSpace& h);

// Projective basis {(p_i, pi_i)} with sum_i pi_i(u) . p_i = u; the pi_i are
// E-linear maps U -> E. nullopt when U is not projective.
struct ProjBasisE {
    std::vector<Mat> elements;  // rank x 1
    std::vector<Mat> maps;      // nE x rank
};

std::optional<ProjBasisE> projective_basis(const Lattice& u);

// Membership of a hom matrix in a coordinate sublattice of h.
bool hom_in_sublattice(const HomSpace& h, const Mat& sublattice, const Mat& f);

}  // namespace tate
