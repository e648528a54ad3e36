#include "tate/tower.hpp"

#include <cstdlib>
#include <sstream>

namespace tate {

Tower::Tower(AlgebraPtr e, FormData fd, Lattice base) : E(std::move(e)), efd(std::move(fd)) {
    levels_.emplace(0, std::move(base));
}

int Tower::depth_cap() {
    if (const char* s = std::getenv("TATE_TOWER_DEPTH")) {
        long v = std::atol(s);
        if (v >= 1) return int(v);
    }
    return 4;
}

const Lattice& Tower::level(int k) {
    auto it = levels_.find(k);
    if (it != levels_.end()) return it->second;
    if (std::abs(k) > depth_cap())
        throw error("tower depth cap exceeded at level " + std::to_string(k) +
                    " (raise TATE_TOWER_DEPTH)");
    if (k < 0) {
        link(k + 1);  // building the link registers the level
    } else {
        levels_.emplace(k, dual_lattice(mirror().level(-k), E));
    }
    return levels_.at(k);
}

const Link& Tower::link(int k) {
    auto it = links_.find(k);
    if (it != links_.end()) return it->second;
    if (k <= 0) {
        level(k);  // need the upper end of the sequence first
        Link l = build_neg_link(k);
        Lattice low{E, l.incl.cols(), {}};
        for (int i = 0; i < E->n; ++i)
            low.act.push_back(solve_exact(l.incl, l.P.act[i] * l.incl, E->p));
        levels_.emplace(k - 1, std::move(low));
        links_.emplace(k, std::move(l));
    } else {
        level(k);
        level(k - 1);
        const Link& ml = mirror().link(-k + 1);
        Link l;
        l.P = dual_lattice(ml.P, E);
        l.pb = dual_proj_basis(ml.P, ml.pb, mirror().efd);
        Mat eps = mirror().dual_iso(-k + 1);
        l.incl = eps.rows() ? Mat(ml.surj.transpose() * eps) : ml.surj.transpose();
        l.surj = ml.incl.transpose();
        links_.emplace(k, std::move(l));
    }
    return links_.at(k);
}

Tower& Tower::mirror() {
    if (mirror_back_) return *mirror_back_;
    if (!mirror_) {
        mirror_ = make_mirror();
        mirror_->mirror_back_ = this;
    }
    return *mirror_;
}

TowerPtr Tower::mirror_ptr() {
    if (mirror_back_) throw error("mirror_ptr: not available on a mirror tower");
    mirror();
    return mirror_;
}

Mat Tower::dual_iso(int k) {
    if (k != 0) return Mat();
    if (mirror_back_) {
        Mat sp = mirror_back_->seam_pairing();
        return sp;  // iso level0(of mirror's mirror = primal) -> (this level 0)^dual
    }
    Mat sp = seam_pairing();
    if (sp.rows() == 0) return Mat();
    return sp.transpose();
}

namespace {

class BarTower : public Tower {
  public:
    BarTower(AlgebraPtr e, FormData fd, Lattice base)
        : Tower(std::move(e), std::move(fd), std::move(base)) {}

  protected:
    Link build_neg_link(int k) override {
        const Lattice& w = level(k);
        const Algebra& e = *E;
        Link l;
        l.bar = true;
        l.P = Lattice{E, e.n * w.rank, {}};
        for (int i = 0; i < e.n; ++i)
            l.P.act.push_back(kron(e.lmul[i], Mat::identity(w.rank)));
        l.surj = Mat(w.rank, e.n * w.rank);
        for (int i = 0; i < e.n; ++i)
            for (int c = 0; c < w.rank; ++c)
                for (int r = 0; r < w.rank; ++r) l.surj.at(r, i * w.rank + c) = w.act[i].at(r, c);
        l.incl = kernel_lattice(l.surj, e.p);
        for (int b = 0; b < w.rank; ++b) {
            l.pb.elements.push_back(kron(e.unit, Mat::unit_vec(w.rank, b)));
            l.pb.maps.push_back(kron(Mat::identity(e.n), Mat::unit_vec(w.rank, b).transpose()));
        }
        return l;
    }

    TowerPtr make_mirror() override {
        AlgebraPtr eop = opposite(E);
        FormData fd = make_form_data(*eop, efd.form);
        return std::make_shared<BarTower>(eop, fd, dual_lattice(levels_.at(0), eop));
    }
};

}  // namespace

TowerPtr bar_tower(const AlgebraPtr& e, const FormData& fd, Lattice base) {
    if (!base.E->same_as(*e)) throw error("bar_tower: algebra mismatch");
    return std::make_shared<BarTower>(e, fd, std::move(base));
}

ProjBasisE dual_proj_basis(const Lattice& p, const ProjBasisE& pb, const FormData& fd) {
    ProjBasisE d;
    const int ne = int(p.act.size());
    for (size_t i = 0; i < pb.elements.size(); ++i) {
        // element: x |-> s(pi_i(x))
        d.elements.push_back(pb.maps[i].transpose() * fd.form.s);
        // map: F |-> G^{-1} K_i^T F where K_i = [rho_P(e_k) p_i]_k
        Mat ki(p.rank, ne);
        for (int k = 0; k < ne; ++k) ki.set_col(k, p.act[k] * pb.elements[i]);
        d.maps.push_back(fd.gram_inv * ki.transpose());
    }
    return d;
}

namespace {

Int mod_reduce(const Rat& x, long p, long e) {
    Int pe = pow_int(p, static_cast<unsigned long>(e));
    Int dinv;
    if (mpz_invert(dinv.get_mpz_t(), x.get_den().get_mpz_t(), pe.get_mpz_t()) == 0)
        throw error("mod_reduce: denominator not invertible");
    Int r = (x.get_num() % pe) * dinv % pe;
    if (r < 0) r += pe;
    return r;
}

}  // namespace

Mat shift_down(Tower& t1, int a, Tower& t2, int b, const Mat& f) {
    const Link& l1 = t1.link(a);
    const Link& l2 = t2.link(b);
    const long p = t1.E->p;
    if (!t1.E->same_as(*t2.E)) throw error("shift_down: algebra mismatch");
    Mat phi_incl;  // (lift of f through the covers) composed with l1.incl
    if (l1.bar && l2.bar) {
        // canonical lift Id_E (x) f
        phi_incl = Mat(l2.P.rank, l1.incl.cols());
        const int ne = t1.E->n;
        const int w1 = l1.P.rank / std::max(1, ne), w2 = l2.P.rank / std::max(1, ne);
        for (int c = 0; c < l1.incl.cols(); ++c)
            for (int i = 0; i < ne; ++i)
                for (int r1 = 0; r1 < w1; ++r1) {
                    const Rat& x = l1.incl.at(i * w1 + r1, c);
                    if (x == 0) continue;
                    for (int r2 = 0; r2 < w2; ++r2) {
                        const Rat& y = f.at(r2, r1);
                        if (y != 0) phi_incl.at(i * w2 + r2, c) += x * y;
                    }
                }
    } else {
        const int ni = int(l1.pb.elements.size());
        Mat rhs(l2.surj.rows(), ni);
        for (int i = 0; i < ni; ++i) rhs.set_col(i, f * (l1.surj * l1.pb.elements[i]));
        auto csol = solve_over_O(l2.surj, rhs, p);
        if (!csol) throw error("shift_down: lift through covers not solvable over O");
        const Mat& c = *csol;
        // D[i][k] = rho_{P2}(e_k) c_i
        const int ne = t1.E->n;
        std::vector<std::vector<Mat>> dv(ni, std::vector<Mat>(ne));
        for (int i = 0; i < ni; ++i)
            for (int k = 0; k < ne; ++k) dv[i][k] = l2.P.act[k] * c.col(i);
        phi_incl = Mat(l2.P.rank, l1.incl.cols());
        for (int col = 0; col < l1.incl.cols(); ++col) {
            Mat v = l1.incl.col(col);
            Mat acc(l2.P.rank, 1);
            for (int i = 0; i < ni; ++i) {
                Mat coeff = l1.pb.maps[i] * v;  // E-coordinates
                for (int k = 0; k < ne; ++k) {
                    const Rat& x = coeff.at(k, 0);
                    if (x != 0) acc.add_scaled(dv[i][k], x);
                }
            }
            phi_incl.set_col(col, acc);
        }
    }
    return solve_exact(l2.incl, phi_incl, p);
}

namespace {

Mat compose_iso(const Mat& left, const Mat& mid, const Mat& right, bool invert_left) {
    Mat m = mid;
    if (right.rows()) m = m * right;
    if (left.rows()) m = (invert_left ? invert(left) : left) * m;
    return m;
}

}  // namespace

Mat shift_up(Tower& t1, int a, Tower& t2, int b, const Mat& f) {
    Tower& m1 = t1.mirror();
    Tower& m2 = t2.mirror();
    Mat gm = compose_iso(t1.dual_iso(a), f.transpose(), t2.dual_iso(b), true);
    Mat h = shift_down(m2, -b, m1, -a, gm);
    Mat res = compose_iso(m2.dual_iso(-b - 1), h.transpose(), m1.dual_iso(-a - 1), true);
    return res;
}

Mat shift_map(Tower& t1, int a, Tower& t2, int b, Mat f, int n) {
    while (n < 0) {
        f = shift_down(t1, a, t2, b, f);
        --a;
        --b;
        ++n;
    }
    while (n > 0) {
        f = shift_up(t1, a, t2, b, f);
        ++a;
        ++b;
        --n;
    }
    return f;
}

Int TorsionModule::order() const {
    Int o = 1;
    for (long e : exps) o *= pow_int(p, static_cast<unsigned long>(e));
    return o;
}

std::string TorsionModule::to_string() const {
    if (exps.empty()) return "0";
    std::ostringstream os;
    for (size_t i = 0; i < exps.size(); ++i) {
        if (i) os << " x ";
        os << "Z/" << pow_int(p, static_cast<unsigned long>(exps[i])).get_str();
    }
    return os.str();
}

std::optional<std::vector<Int>> TorsionModule::class_of(const Mat& f) const {
    auto c = hom.coords_of(f);
    if (!c) return std::nullopt;
    Mat t = basis_change_inv * *c;
    std::vector<Int> cls;
    for (size_t i = 0; i < all_exps.size(); ++i)
        if (all_exps[i] > 0) cls.push_back(mod_reduce(t.at(int(i), 0), p, all_exps[i]));
    return cls;
}

bool TorsionModule::class_is_zero(const Mat& f) const {
    auto c = class_of(f);
    if (!c) return false;
    for (const Int& x : *c)
        if (x != 0) return false;
    return true;
}

TorsionModule tate_ext(const Lattice& u, Tower& tv, int n) {
    if (!u.E->same_as(*tv.E)) throw error("tate_ext: algebra mismatch");
    TorsionModule t;
    t.p = u.E->p;
    t.hom = hom_space(u, tv.level(n));
    t.pr = projective_factoring_coords(t.hom, tv.efd);
    const int dim = t.hom.dim();
    if (dim == 0) {
        t.basis_change_inv = Mat(0, 0);
        return t;
    }
    auto s = smith_normal_form(t.pr, t.p, true);
    if (s.rank < dim)
        throw error("tate_ext: Hom/Hom^pr is not torsion; K-semisimplicity hypothesis violated");
    t.basis_change_inv = invert(s.left);
    t.all_exps = s.exponents;
    for (int i = 0; i < dim; ++i) {
        if (s.exponents[i] <= 0) continue;
        t.exps.push_back(s.exponents[i]);
        t.gen_coords.push_back(s.left.col(i));
        t.gen_homs.push_back(t.hom.to_matrix(s.left.col(i)));
    }
    return t;
}

std::vector<long> stable_hom_exponents(const Lattice& u, const Lattice& v, const FormData& efd) {
    HomSpace h = hom_space(u, v);
    Mat pr = projective_factoring_coords(h, efd);
    auto s = smith_normal_form(pr, u.E->p, false);
    if (s.rank < h.dim()) throw error("stable_hom_exponents: quotient not torsion");
    std::vector<long> out;
    for (long e : s.exponents)
        if (e > 0) out.push_back(e);
    return out;
}

std::vector<long> classical_ext_exponents(Tower& tu, const Lattice& v, int n) {
    if (n < 1) throw error("classical_ext_exponents: n must be positive");
    const long p = tu.E->p;
    auto cochain_rank = [&](int j) { return tu.level(-j).rank * v.rank; };
    // D_j : Hom_O(level(-j), V) -> Hom_O(level(-j-1), V)
    auto build_d = [&](int j) {
        const Link& l = tu.link(-j);  // level(-j-1) -> E (x) level(-j) -> level(-j)
        const int rj = tu.level(-j).rank, rj1 = tu.level(-j - 1).rank;
        Mat d(rj1 * v.rank, rj * v.rank);
        for (int a = 0; a < v.rank; ++a)
            for (int b = 0; b < rj; ++b) {
                // psi = ext(E_ab) . incl ; psi.col(w) = sum_i act_V[i].col(a) incl[(i,b),w]
                for (int w = 0; w < rj1; ++w) {
                    for (int i = 0; i < tu.E->n; ++i) {
                        const Rat& x = l.incl.at(i * rj + b, w);
                        if (x == 0) continue;
                        for (int r = 0; r < v.rank; ++r) {
                            const Rat& y = v.act[i].at(r, a);
                            if (y != 0) d.at(r * rj1 + w, a * rj + b) += y * x;
                        }
                    }
                }
            }
        return d;
    };
    Mat dn = build_d(n);
    Mat dn1 = build_d(n - 1);
    (void)cochain_rank;
    Mat ker = kernel_lattice(dn, p);
    Mat img = dn1;  // columns span the image
    Mat coords = solve_exact(ker, img, p);
    auto s = smith_normal_form(coords, p, false);
    if (s.rank < ker.cols()) throw error("classical_ext_exponents: Ext not finite");
    std::vector<long> out;
    for (long e : s.exponents)
        if (e > 0) out.push_back(e);
    return out;
}

}  // namespace tate
