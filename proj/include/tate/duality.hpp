#pragma once

#include <functional>
#include <random>

#include "tate/bimodule.hpp"

namespace tate {

// trace on K(x)U of z^{-1} Sigma^n(beta) o alpha, where alpha : U -> tv.level(n)
// and beta : V -> tu.level(-n) for towers tu of U and tv of V over one algebra.
// zinv_u is the inverse (over K) of the z-action on U.
Rat phi_form(Tower& tu, Tower& tv, const Mat& zinv_u, int n, const Mat& alpha, const Mat& beta);

// phi_form reduced to K/O; depends only on the stable classes.
MatlisValue tate_pairing(Tower& tu, Tower& tv, const Mat& zinv_u, int n, const Mat& alpha,
                         const Mat& beta);

// Yoneda product beta alpha = Sigma^m(beta) o alpha for alpha of degree m in
// Ext-hat(U, V), beta of degree n in Ext-hat(V, W); returns the degree-(m+n)
// representative U -> tw.level(m+n).
Mat yoneda_product(Tower& tv, Tower& tw, int n, const Mat& beta, int m, const Mat& alpha);

// Random class bounded by integer coordinates in [-p^3, p^3] over the
// generator lifts.
Mat sample_class(const TorsionModule& t, std::mt19937_64& rng);

// Nondegeneracy of a pairing X x Y -> K/O between finite torsion modules:
// the induced map X -> Hom(Y, K/O) is an isomorphism.
bool check_nondegenerate(const TorsionModule& x, const TorsionModule& y,
                         const std::function<MatlisValue(const Mat&, const Mat&)>& pair);

struct PairingReport {
    std::string instance;
    int degree = 0;
    std::string check;
    std::string value;
    bool pass = true;
    std::string detail;
};

// Everything needed to evaluate Theorem 1 style pairings for one bimodule and
// one pair of A-lattices.
struct Thm1Context {
    AlgebraPtr a, b;
    FormData fda, fdb;
    PerfectBimodule pm;
    AdjunctionData adj;
    TowerPtr tu, tv;          // towers of U, V over A
    TensorTowerPtr tmu, tmv;  // towers of M^vee (x) U, M^vee (x) V over B
    Mat zinv_u, zinv_v, zinv_mvu, zinv_mvv;

    Lattice u() { return tu->level(0); }
    Lattice v() { return tv->level(0); }

    // tr_M(beta) for beta : M^vee(x)V -> tmu.level(k); returns V -> tu.level(k).
    Mat transfer(int k, const Mat& beta);
    // Id_{M^vee} (x) alpha for alpha : U -> tv.level(k), landing in tmv.level(k).
    Mat id_tensor(int k, const Mat& alpha);
};

Thm1Context make_thm1_context(const AlgebraPtr& a, const FormData& fda, const AlgebraPtr& b,
                              const FormData& fdb, const Bimodule& m, const Lattice& u,
                              const Lattice& v);

// Both displayed equalities of the module-level duality theorem, on seeded
// random classes; at n = 0 the sharper rational equality of the phi-forms is
// asserted as well.
std::vector<PairingReport> check_theorem1(Thm1Context& ctx, int n, int trials, uint64_t seed,
                                          const std::string& instance);

struct Thm2Context {
    HochschildTransfer hm;   // tr_M : HH(B) -> HH(A)
    HochschildTransfer hmv;  // tr_{M^vee} : HH(A) -> HH(B)
    Mat zinv2_a, zinv2_b;
};

Thm2Context make_thm2_context(const AlgebraPtr& a, const FormData& fda, const AlgebraPtr& b,
                              const FormData& fdb, const Bimodule& m);

// Both displayed equalities of the Hochschild-level duality theorem.
std::vector<PairingReport> check_theorem2(Thm2Context& ctx, int n, int trials, uint64_t seed,
                                          const std::string& instance);

// <beta alpha, gamma> = <alpha, gamma beta> for degrees m, n, -m-n, evaluated
// exactly in K/O; also checks <beta alpha, Id> = <alpha, beta> when m+n = 0.
PairingReport check_adjointness_associativity(Tower& tu, Tower& tv, Tower& tw, const Mat& zinv_u,
                                              const Mat& zinv_v, int m, int n, const Mat& alpha,
                                              const Mat& beta, const Mat& gamma);

// For a nonzero class zeta in Ext-hat^n(U, V), finds eta in Ext-hat^{-n}(V, U)
// with <zeta, eta> != 0 and certifies that the Yoneda product eta zeta is a
// nonzero class of Ext-hat^0(U, U).
struct WitnessResult {
    bool found = false;
    Mat eta;
    MatlisValue pairing_value;
};
WitnessResult witness_nonzero_product(Tower& tu, Tower& tv, const Mat& zinv_u, int n,
                                      const Mat& zeta, const TorsionModule& ext_minus_n,
                                      const TorsionModule& ext_zero);

}  // namespace tate
