#pragma once

#include "tate/tower.hpp"

namespace tate {

// A-B-bimodule with commuting left and right actions.
struct Bimodule {
    AlgebraPtr A, B;
    int rank = 0;
    std::vector<Mat> lact;  // per A basis element
    std::vector<Mat> ract;  // per B basis element, m |-> m b

    Mat left_of(const Mat& x) const;   // action matrix of x in A
    Mat right_of(const Mat& x) const;  // action matrix of x in B
};

ValidationReport validate_bimodule(const Bimodule& m);

Bimodule regular_bimodule(const AlgebraPtr& a);
Bimodule dual_bimodule(const Bimodule& m);  // B-A bimodule, transposed actions
// Same module viewed over the opposite pair: an op(B)-op(A)-bimodule.
Bimodule flip(const Bimodule& m);
// (X (x)_O Y) over (A (x) C, B (x) D) for X over (A,B), Y over (C,D).
Bimodule box_tensor(const Bimodule& x, const Bimodule& y);
Bimodule direct_sum(const Bimodule& m, const Bimodule& n);

// O[G] as an (O[G], O[H])-bimodule for the subgroup H generated by the given
// element indices; returns the bimodule and the subgroup algebra.
struct InducedBimodule {
    Bimodule m;
    AlgebraPtr subalgebra;
    std::vector<int> elements;  // indices of H inside G
};
InducedBimodule induction_bimodule(const AlgebraPtr& og,
                                   const std::vector<std::vector<int>>& table,
                                   const std::vector<int>& subgroup_gens);

Lattice left_restriction(const Bimodule& m);      // over A
Lattice op_right_restriction(const Bimodule& m);  // over op(B)
// M as a module over env; env must be structurally A (x) op(B).
Lattice as_env_module(const Bimodule& m, const AlgebraPtr& env);

// Perfect bimodule: projective on both sides, with cached projective bases.
struct PerfectBimodule {
    Bimodule m;
    ProjBasisE left_pb;   // (m_i, alpha_i : M -> A), A-linear
    ProjBasisE right_pb;  // (m_j, beta_j : M -> B), right-B-linear

    Lattice left_lattice() const { return left_restriction(m); }
    Lattice op_right_lattice() const { return op_right_restriction(m); }
};

// Computes both projective bases; nullopt when a side is not projective.
std::optional<PerfectBimodule> make_perfect(const Bimodule& m);
PerfectBimodule dual_perfect(const PerfectBimodule& p, const FormData& fda, const FormData& fdb);
PerfectBimodule flip_perfect(const PerfectBimodule& p);
PerfectBimodule box_perfect(const PerfectBimodule& x, const PerfectBimodule& y);
PerfectBimodule direct_sum_perfect(const PerfectBimodule& m, const PerfectBimodule& n);

// Balanced tensor product X (x)_E Y presented as a saturated quotient of the
// free tensor product, with projection and section.
struct Tensor2 {
    int rx = 0, ry = 0, rank = 0;
    Mat proj;  // rank x (rx*ry)
    Mat sect;  // (rx*ry) x rank
};

// xr: right action of E on X (per E basis element); yl: left action on Y.
Tensor2 tensor_over(const std::vector<Mat>& xr, int rx, const std::vector<Mat>& yl, int ry,
                    const AlgebraPtr& e);

// The four adjunction maps of a perfect A-B-bimodule with respect to
// symmetrising forms s on A and t on B.
struct AdjunctionData {
    Tensor2 mvm;      // M^vee (x)_A M
    Tensor2 mmv;      // M (x)_B M^vee
    Mat eps_m;        // B -> M^vee (x)_A M, columns per B basis element
    Mat eta_m;        // M (x)_B M^vee -> A
    Mat eps_mv;       // A -> M (x)_B M^vee
    Mat eta_mv;       // M^vee (x)_A M -> B
    Mat eta_m_free;   // A-valued on free M (x) M^vee coordinates
    Mat eta_mv_free;  // B-valued on free M^vee (x) M coordinates
    Mat pi_m;         // (eta_M o eps_Mv)(1_A), in Z(A)
    Mat pi_mv;        // (eta_Mv o eps_M)(1_B), in Z(B)
};

AdjunctionData adjunction_data(const PerfectBimodule& p, const FormData& fda, const FormData& fdb);

// Exact triangle identities of the two adjunctions realized by the four maps.
ValidationReport check_triangle_identities(const PerfectBimodule& p, const AdjunctionData& adj);

// Explicit iso M^vee (x)_A U -> Hom_A(M, U) of Eq-style dual-tensor
// adjunction; returns the matrix from tensor coordinates to hom coordinates.
Mat dual_tensor_iso(const PerfectBimodule& p, const FormData& fda, const Tensor2& mvu,
                    const HomSpace& hom_mu);

// tr_M(beta) for a B-linear beta : M^vee (x)_A U -> M^vee (x)_A X, where X is
// an A-module (e.g. a tower level of V). Returns a map U -> X.
Mat transfer_graded(const PerfectBimodule& p, const AdjunctionData& adj, const Lattice& u,
                    const Tensor2& t2u, const Lattice& x, const Tensor2& t2x, const Mat& beta);

// Description of an exact functor F(X) = P (x)_E X (or X (x)_E P), where E is
// an algebra acting on the fixed factor P and embedded into the algebra of the
// source levels. The outer algebra of F(X) combines the factor's outer action
// with a residual part of the source algebra.
struct FunctorData {
    bool factor_first = true;
    PerfectBimodule p;  // the fixed factor; left_pb / right_pb as usual
    AlgebraPtr ebal;    // balanced algebra E
    AlgebraPtr cout;    // outer algebra of F(X)
    AlgebraPtr dsrc;    // source algebra; dsrc = ebal (x) res up to index order
    int nres = 1;       // rank of the residual tensor factor of dsrc

    AlgebraPtr cp;  // outer algebra of the factor (the factor part of cout)
    FormData fd_cp;

    std::vector<Mat> p_cp;      // per cp basis: outer action on P
    std::vector<Mat> p_bal;     // per ebal basis: action on P on its balanced side
    std::vector<Mat> bal_emb;   // per ebal basis: dsrc coordinates of the embedding
    std::vector<Mat> res_emb;   // per residual index: dsrc coords of 1_bal (x) e_l
    std::vector<Mat> res_lmul;  // left multiplication in the residual algebra
    Mat res_unit;               // unit of the residual algebra (nres x 1)

    // index of (bal k, res l) inside dsrc, and of (factor part m, res l)
    // inside cout
    std::function<int(int, int)> src_index;
    std::function<int(int, int)> out_index;
    int n_pout = 1;  // number of factor-part basis indices in cout

    // pb of the factor on its outer side (maps into cp coordinates)
    std::vector<Mat> pb_elements;  // in P
    std::vector<Mat> pb_maps;      // n_pout x rankP

    // pb of the factor on its balanced side (maps into ebal coordinates);
    // presents P (x)_E X as the image of an explicit idempotent on X^J
    std::vector<Mat> bal_pb_elements;
    std::vector<Mat> bal_pb_maps;
};

// F(X) = P (x)_D X with full outer action from P (pure case).
FunctorData pure_functor(const PerfectBimodule& p);

class TensorTower : public Tower {
  public:
    TensorTower(FunctorData f, FormData fdc, FormData fd_ebal, TowerPtr source);

    // Quotient data of the balanced tensor at source level k.
    const Tensor2& functor_tensor(int k);
    // Iso from functor_tensor(k) coordinates to level(k) coordinates;
    // empty = identity (always for k <= 0).
    Mat entry_iso(int k);
    // Image of an intertwiner f : source.level(k) -> source.level(l) in tower
    // coordinates (level k -> level l).
    Mat apply_functor(int k, int l, const Mat& f);

    Tower& source() { return *source_; }
    const FunctorData& functor() const { return f_; }

  protected:
    Link build_neg_link(int k) override;
    TowerPtr make_mirror() override;
    Mat seam_pairing() override;

  private:
    Lattice make_level(const Lattice& src, const Tensor2& t2) const;
    Mat pairing_with_mirror(int k);  // Pair[g, f] at source level k
    const Mat& psi();                // Hom_{bal}(P, E) contraction data

    FunctorData f_;
    FormData fd_ebal_;
    TowerPtr source_;
    std::map<int, Tensor2> tens_;
    std::map<int, Mat> entries_;
    Mat psi_;  // nE x (rankP * rankP), col (c,c') = Psi(delta_c)(e_{c'})
};

using TensorTowerPtr = std::shared_ptr<TensorTower>;

// Pure tower P (x)_D (source levels) for a perfect (C, D)-bimodule P.
TensorTowerPtr tensor_tower(const PerfectBimodule& p, const FormData& fdc, const FormData& fdd,
                            const TowerPtr& source);
// Generic tower from explicit functor data.
TensorTowerPtr tensor_tower(FunctorData f, const FormData& fdc, const FormData& fd_ebal,
                            const TowerPtr& source);

// A as a module over env = A (x) A^op.
Lattice bimodule_regular_lattice(const AlgebraPtr& a, const AlgebraPtr& env);

// Tate-Hochschild cohomology HH-hat^n(A) = Ext-hat^n_{A^e}(A, A): torsion
// module over the enveloping tower of A.
TorsionModule hochschild_tate(const AlgebraPtr& a, Tower& ta, int n);

// Machinery bundle for Hochschild transfers along a perfect A-B-bimodule.
struct HochschildTransfer {
    AlgebraPtr a, b, env_a, env_b;
    FormData fda, fdb, fdae, fdbe;
    PerfectBimodule pm;
    AdjunctionData adj;
    TowerPtr ta;                          // tower of A over A^e
    TowerPtr tb;                          // tower of B over B^e
    TensorTowerPtr t3;                    // (M box M^vee) (x)_{B^e} TB over A^e
    Mat g0;                               // t3.level(0) -> A: eta_M after absorbing B
    std::map<int, Mat> g_shift;           // cached shifts of g0
    TensorTowerPtr s1;                    // (B box M^vee) (x)_{B^e} TB over B (x) A^op
    TensorTowerPtr s2;                    // (M^vee box A) (x)_{A^e} TA over B (x) A^op
    Mat chi0;                             // s1.level(0) -> s2.level(0), both iso M^vee
    std::map<int, Mat> chi_shift;         // cached comparison shifts

    // tr_M(tau) for tau : B -> tb.level(n); returns a map A -> ta.level(n).
    Mat transfer(int n, const Mat& tau);
    // Alternate route through Hom_{B (x) A^op}(M^vee, Sigma^n M^vee).
    Mat transfer_via_bimodule_hom(int n, const Mat& tau);
};

HochschildTransfer make_hochschild_transfer(const AlgebraPtr& a, const FormData& fda,
                                            const AlgebraPtr& b, const FormData& fdb,
                                            const Bimodule& m, const TowerPtr& ta,
                                            const TowerPtr& tb);

}  // namespace tate
