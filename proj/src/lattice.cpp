#include "tate/lattice.hpp"

namespace tate {

Mat Lattice::action_of(const Mat& x) const {
    Mat m(rank, rank);
    for (int i = 0; i < E->n; ++i)
        if (x.at(i, 0) != 0) m.add_scaled(act[i], x.at(i, 0));
    return m;
}

Lattice regular_lattice(const AlgebraPtr& e) { return Lattice{e, e->n, e->lmul}; }

Lattice free_module(const AlgebraPtr& e, int copies) {
    Lattice l{e, copies * e->n, {}};
    l.act.reserve(e->n);
    for (int i = 0; i < e->n; ++i) l.act.push_back(kron(Mat::identity(copies), e->lmul[i]));
    return l;
}

Lattice zero_lattice(const AlgebraPtr& e) {
    Lattice l{e, 0, {}};
    l.act.assign(e->n, Mat(0, 0));
    return l;
}

Lattice direct_sum(const Lattice& u, const Lattice& v) {
    if (!u.E->same_as(*v.E)) throw error("direct_sum: algebra mismatch");
    Lattice l{u.E, u.rank + v.rank, {}};
    for (int i = 0; i < u.E->n; ++i) {
        Mat m(l.rank, l.rank);
        for (int a = 0; a < u.rank; ++a)
            for (int b = 0; b < u.rank; ++b) m.at(a, b) = u.act[i].at(a, b);
        for (int a = 0; a < v.rank; ++a)
            for (int b = 0; b < v.rank; ++b) m.at(u.rank + a, u.rank + b) = v.act[i].at(a, b);
        l.act.push_back(m);
    }
    return l;
}

Lattice dual_lattice(const Lattice& u, const AlgebraPtr& eop) {
    if (eop->n != u.E->n || eop->p != u.E->p) throw error("dual_lattice: algebra mismatch");
    Lattice l{eop, u.rank, {}};
    for (int i = 0; i < u.E->n; ++i) l.act.push_back(u.act[i].transpose());
    return l;
}

ValidationReport validate_action(const Lattice& u) {
    ValidationReport r;
    const Algebra& e = *u.E;
    if (int(u.act.size()) != e.n) {
        r.issues.push_back("action list has wrong length");
        return r;
    }
    for (int i = 0; i < e.n; ++i)
        if (u.act[i].rows() != u.rank || u.act[i].cols() != u.rank) {
            r.issues.push_back("action matrix " + std::to_string(i) + " has wrong shape");
            return r;
        }
    if (u.action_of(e.unit) != Mat::identity(u.rank))
        r.issues.push_back("unit does not act as identity");
    for (int i = 0; i < e.n; ++i)
        for (int j = 0; j < e.n; ++j)
            if (u.act[i] * u.act[j] != u.action_of(e.lmul[i].col(j)))
                r.issues.push_back("action does not respect structure constants at (" +
                                   std::to_string(i) + "," + std::to_string(j) + ")");
    return r;
}

Presentation present(const Lattice& u) {
    const Algebra& e = *u.E;
    Presentation p;
    Mat span(u.rank, 0);
    for (int b = 0; b < u.rank; ++b) {
        if (span.cols() > 0 && lattice_contains(span, Mat::unit_vec(u.rank, b), e.p)) continue;
        p.gens.push_back(b);
        Mat orbit(u.rank, e.n);
        for (int i = 0; i < e.n; ++i)
            for (int r = 0; r < u.rank; ++r) orbit.at(r, i) = u.act[i].at(r, b);
        span = image_basis(hcat(span, orbit), e.p);
    }
    const int g = int(p.gens.size());
    p.pi = Mat(u.rank, e.n * g);
    for (int j = 0; j < g; ++j)
        for (int i = 0; i < e.n; ++i)
            for (int r = 0; r < u.rank; ++r) p.pi.at(r, j * e.n + i) = u.act[i].at(r, p.gens[j]);
    p.relations = kernel_lattice(p.pi, e.p);
    p.xi = solve_exact(p.pi, Mat::identity(u.rank), e.p);
    return p;
}

Mat HomSpace::to_matrix(const Mat& coords) const { return matrix_of_tuple(basis * coords); }

Mat HomSpace::matrix_of_tuple(const Mat& tuple) const {
    const Algebra& e = *U.E;
    const int g = int(pres.gens.size());
    Mat f(V.rank, U.rank);
    for (int b = 0; b < U.rank; ++b) {
        Mat col(V.rank, 1);
        for (int j = 0; j < g; ++j) {
            Mat wj(V.rank, 1);
            for (int r = 0; r < V.rank; ++r) wj.at(r, 0) = tuple.at(j * V.rank + r, 0);
            Mat elem(e.n, 1);
            for (int i = 0; i < e.n; ++i) elem.at(i, 0) = pres.xi.at(j * e.n + i, b);
            col += V.action_of(elem) * wj;
        }
        f.set_col(b, col);
    }
    return f;
}

Mat HomSpace::tuple_of_matrix(const Mat& f) const {
    const int g = int(pres.gens.size());
    Mat t(g * V.rank, 1);
    for (int j = 0; j < g; ++j)
        for (int r = 0; r < V.rank; ++r) t.at(j * V.rank + r, 0) = f.at(r, pres.gens[j]);
    return t;
}

std::optional<Mat> HomSpace::coords_of(const Mat& f) const {
    auto c = solve_over_O(basis, tuple_of_matrix(f), U.E->p);
    if (!c) return std::nullopt;
    if (to_matrix(*c) != f) return std::nullopt;  // tuple matched but f is not E-linear
    return c;
}

std::optional<Mat> HomSpace::coords_of_tuples(const Mat& tuples) const {
    return solve_over_O(basis, tuples, U.E->p);
}

HomSpace hom_space(const Lattice& u, const Lattice& v) {
    if (!u.E->same_as(*v.E)) throw error("hom_space: algebra mismatch");
    const Algebra& e = *u.E;
    HomSpace h;
    h.U = u;
    h.V = v;
    h.pres = present(u);
    const int g = int(h.pres.gens.size());
    Mat b = Mat::identity(g * v.rank);
    // impose each relation: sum_j rho_V(r_j) w_j = 0
    for (int rc = 0; rc < h.pres.relations.cols() && b.cols() > 0; ++rc) {
        std::vector<Mat> rho(g);
        for (int j = 0; j < g; ++j) {
            Mat elem(e.n, 1);
            for (int i = 0; i < e.n; ++i) elem.at(i, 0) = h.pres.relations.at(j * e.n + i, rc);
            rho[j] = v.action_of(elem);
        }
        Mat c(v.rank, b.cols());
        for (int col = 0; col < b.cols(); ++col) {
            Mat acc(v.rank, 1);
            for (int j = 0; j < g; ++j) {
                Mat wj(v.rank, 1);
                for (int r = 0; r < v.rank; ++r) wj.at(r, 0) = b.at(j * v.rank + r, col);
                acc += rho[j] * wj;
            }
            c.set_col(col, acc);
        }
        Mat k = kernel_lattice(c, e.p);
        b = b * k;
    }
    h.basis = b;
    return h;
}

Mat relative_trace(const Lattice& u, const Lattice& v, const FormData& fd, const Mat& f) {
    const Algebra& e = *u.E;
    Mat t(v.rank, u.rank);
    for (int i = 0; i < e.n; ++i) {
        Mat dual_act = u.action_of(fd.gram_inv.col(i));
        t += v.act[i] * f * dual_act;
    }
    return t;
}

Mat projective_factoring_coords(const HomSpace& h, const FormData& fd) {
    const Algebra& e = *h.U.E;
    const int g = int(h.pres.gens.size());
    // rho_U(x_i^dual) u_gj, precomputed per (i, j)
    std::vector<std::vector<Mat>> dual_gen(e.n, std::vector<Mat>(g));
    for (int i = 0; i < e.n; ++i) {
        Mat da = h.U.action_of(fd.gram_inv.col(i));
        for (int j = 0; j < g; ++j) dual_gen[i][j] = da.col(h.pres.gens[j]);
    }
    Mat tuples(g * h.V.rank, h.U.rank * h.V.rank);
    for (int i = 0; i < e.n; ++i) {
        const Mat& va = h.V.act[i];
        for (int a = 0; a < h.V.rank; ++a)
            for (int b = 0; b < h.U.rank; ++b)
                for (int j = 0; j < g; ++j) {
                    const Rat& c = dual_gen[i][j].at(b, 0);
                    if (c == 0) continue;
                    for (int r = 0; r < h.V.rank; ++r) {
                        const Rat& y = va.at(r, a);
                        if (y != 0) tuples.at(j * h.V.rank + r, a * h.U.rank + b) += y * c;
                    }
                }
    }
    auto coords = h.coords_of_tuples(tuples);
    if (!coords) throw error("projective_factoring_coords: relative trace left the hom lattice");
    return image_basis(*coords, e.p);
}

Mat projective_factoring_by_definition(const HomSpace& h) {
    const Algebra& e = *h.U.E;
    // E (x)_O V with action on the left tensor factor only
    Lattice ev{h.U.E, e.n * h.V.rank, {}};
    for (int i = 0; i < e.n; ++i) ev.act.push_back(kron(e.lmul[i], Mat::identity(h.V.rank)));
    HomSpace hev = hom_space(h.U, ev);
    // multiplication map E (x) V -> V, e (x) v |-> ev
    Mat mult(h.V.rank, e.n * h.V.rank);
    for (int i = 0; i < e.n; ++i)
        for (int a = 0; a < h.V.rank; ++a)
            for (int r = 0; r < h.V.rank; ++r) mult.at(r, i * h.V.rank + a) = h.V.act[i].at(r, a);
    Mat cols(h.dim(), 0);
    for (int c = 0; c < hev.dim(); ++c) {
        Mat f = mult * hev.to_matrix(Mat::unit_vec(hev.dim(), c));
        auto coords = h.coords_of(f);
        if (!coords) throw error("projective_factoring_by_definition: image escaped hom lattice");
        cols = hcat(cols, *coords);
    }
    return image_basis(cols, e.p);
}

std::optional<ProjBasisE> projective_basis(const Lattice& u) {
    const Algebra& e = *u.E;
    if (u.rank == 0) return ProjBasisE{};
    Presentation pr = present(u);
    const int g = int(pr.gens.size());
    Lattice eg = free_module(u.E, g);
    HomSpace h = hom_space(u, eg);
    // affine solve: sum_l c_l (pi . H_l) = id_U
    Mat stacked(u.rank * u.rank, h.dim());
    for (int l = 0; l < h.dim(); ++l) {
        Mat m = pr.pi * h.to_matrix(Mat::unit_vec(h.dim(), l));
        stacked.set_col(l, m.vec());
    }
    auto c = solve_over_O(stacked, Mat::identity(u.rank).vec(), e.p);
    if (!c) return std::nullopt;
    Mat sigma = h.to_matrix(*c);  // (nE*g) x rank
    ProjBasisE pb;
    for (int j = 0; j < g; ++j) {
        pb.elements.push_back(Mat::unit_vec(u.rank, pr.gens[j]));
        Mat block(e.n, u.rank);
        for (int i = 0; i < e.n; ++i)
            for (int r = 0; r < u.rank; ++r) block.at(i, r) = sigma.at(j * e.n + i, r);
        pb.maps.push_back(block);
    }
    return pb;
}

bool hom_in_sublattice(const HomSpace& h, const Mat& sublattice, const Mat& f) {
    auto c = h.coords_of(f);
    if (!c) return false;
    if (sublattice.cols() == 0) return c->is_zero();
    return lattice_contains(sublattice, *c, h.U.E->p);
}

}  // namespace tate
