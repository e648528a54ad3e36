#pragma once

#include <map>
#include <memory>

#include "tate/lattice.hpp"

namespace tate {

// One registered short exact sequence 0 -> level(k-1) -> P -> level(k) -> 0
// with relatively O-projective middle carrying an explicit projective basis.
struct Link {
    Lattice P;
    ProjBasisE pb;
    Mat incl;  // P.rank x level(k-1).rank, saturated image
    Mat surj;  // level(k).rank x P.rank
    bool bar = false;  // P = E (x)_O level(k) with the multiplication surjection
};

class Tower;
using TowerPtr = std::shared_ptr<Tower>;

// A module with realized shifts Sigma^{+-k}. Negative levels are kernels of
// the registered covers; positive levels are coordinate duals of the mirror
// tower's negative levels. Cosyzygy of a registered syzygy reuses the
// registered sequence, so Sigma Sigma^{-1} = id on the nose.
class Tower {
  public:
    virtual ~Tower() = default;

    AlgebraPtr E;
    FormData efd;

    const Lattice& level(int k);
    const Link& link(int k);  // connects level(k-1) -> level(k)
    Tower& mirror();
    TowerPtr mirror_ptr();  // owning pointer; not available on mirror towers

    // Canonical iso mirror.level(-k) -> (level k)^dual. Empty matrix means
    // the identity (coordinate duality on the nose).
    Mat dual_iso(int k);

    static int depth_cap();  // from TATE_TOWER_DEPTH, default 4

  protected:
    Tower(AlgebraPtr e, FormData fd, Lattice base);
    virtual Link build_neg_link(int k) = 0;  // k <= 0
    virtual TowerPtr make_mirror() = 0;
    // Crossed pairing matrix Pair[w, t] between mirror level 0 and level 0;
    // empty when level 0 is the literal coordinate dual of mirror level 0.
    virtual Mat seam_pairing() { return Mat(); }

    std::map<int, Lattice> levels_;
    std::map<int, Link> links_;
    TowerPtr mirror_;
    Tower* mirror_back_ = nullptr;
};

// Tower of a module with covers E (x)_O W -> W ("bar" covers).
TowerPtr bar_tower(const AlgebraPtr& e, const FormData& fd, Lattice base);

// Projective basis of P^dual over the opposite algebra, from one of P and
// the symmetrising-form data of P's algebra.
ProjBasisE dual_proj_basis(const Lattice& p, const ProjBasisE& pb, const FormData& fd);

// f : t1.level(a) -> t2.level(b) intertwining; returns Sigma^{-1}(f) (resp.
// Sigma(f)), computed by lifting through the registered sequences.
Mat shift_down(Tower& t1, int a, Tower& t2, int b, const Mat& f);
Mat shift_up(Tower& t1, int a, Tower& t2, int b, const Mat& f);
// Sigma^n(f) for any integer n.
Mat shift_map(Tower& t1, int a, Tower& t2, int b, Mat f, int n);

// A degree-n stable class represented by a hom U -> tower.level(n).
struct TateElement {
    int degree = 0;
    Mat rep;
};

// Finite torsion module presenting Hom(U, Sigma^n V) / Hom^pr, with the
// reduction data needed to put stable classes in canonical form.
struct TorsionModule {
    long p = 2;
    std::vector<long> exps;       // orders p^{e_i}, e_i >= 1 ascending
    std::vector<Mat> gen_coords;  // hom-space coordinates of the generators
    std::vector<Mat> gen_homs;    // representing homomorphisms

    HomSpace hom;
    Mat pr;  // Hom^pr as a coordinate lattice
    Mat basis_change_inv;
    std::vector<long> all_exps;

    bool is_trivial() const { return exps.empty(); }
    Int order() const;
    std::string to_string() const;

    // Canonical class vector (entries in [0, p^{e_i})); nullopt if f is not
    // an O-intertwiner.
    std::optional<std::vector<Int>> class_of(const Mat& f) const;
    bool class_is_zero(const Mat& f) const;
};

// Ext-hat^n(U, V) where tv is a tower of V over the same algebra as U.
TorsionModule tate_ext(const Lattice& u, Tower& tv, int n);

// Invariant factor exponents of classical Ext^n (n >= 1) from the bar-type
// resolution registered in the tower of U. Independent route used to
// cross-check tate_ext in positive degrees.
std::vector<long> classical_ext_exponents(Tower& tu, const Lattice& v, int n);

// Invariant factor exponents of Hom(U, V)/Hom^pr; throws when the quotient
// is not torsion.
std::vector<long> stable_hom_exponents(const Lattice& u, const Lattice& v, const FormData& efd);

}  // namespace tate
