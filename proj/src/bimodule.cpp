#include "tate/bimodule.hpp"

#include <set>

namespace tate {

Mat Bimodule::left_of(const Mat& x) const {
    Mat m(rank, rank);
    for (int i = 0; i < A->n; ++i)
        if (x.at(i, 0) != 0) m.add_scaled(lact[i], x.at(i, 0));
    return m;
}

Mat Bimodule::right_of(const Mat& x) const {
    Mat m(rank, rank);
    for (int i = 0; i < B->n; ++i)
        if (x.at(i, 0) != 0) m.add_scaled(ract[i], x.at(i, 0));
    return m;
}

ValidationReport validate_bimodule(const Bimodule& m) {
    ValidationReport r = validate_action(left_restriction(m));
    for (auto& s : r.issues) s = "left: " + s;
    ValidationReport rr = validate_action(op_right_restriction(m));
    for (auto& s : rr.issues) r.issues.push_back("right: " + s);
    for (int i = 0; i < m.A->n; ++i)
        for (int j = 0; j < m.B->n; ++j)
            if (m.lact[i] * m.ract[j] != m.ract[j] * m.lact[i]) {
                r.issues.push_back("left and right actions do not commute at (" +
                                   std::to_string(i) + "," + std::to_string(j) + ")");
                return r;
            }
    return r;
}

Bimodule regular_bimodule(const AlgebraPtr& a) { return Bimodule{a, a, a->n, a->lmul, a->rmul}; }

Bimodule dual_bimodule(const Bimodule& m) {
    Bimodule d{m.B, m.A, m.rank, {}, {}};
    for (int j = 0; j < m.B->n; ++j) d.lact.push_back(m.ract[j].transpose());
    for (int i = 0; i < m.A->n; ++i) d.ract.push_back(m.lact[i].transpose());
    return d;
}

Bimodule flip(const Bimodule& m) {
    return Bimodule{opposite(m.B), opposite(m.A), m.rank, m.ract, m.lact};
}

Bimodule box_tensor(const Bimodule& x, const Bimodule& y) {
    Bimodule t{tensor_algebra(x.A, y.A), tensor_algebra(x.B, y.B), x.rank * y.rank, {}, {}};
    for (int i = 0; i < x.A->n; ++i)
        for (int j = 0; j < y.A->n; ++j) t.lact.push_back(kron(x.lact[i], y.lact[j]));
    for (int i = 0; i < x.B->n; ++i)
        for (int j = 0; j < y.B->n; ++j) t.ract.push_back(kron(x.ract[i], y.ract[j]));
    return t;
}

Bimodule direct_sum(const Bimodule& m, const Bimodule& n) {
    if (!m.A->same_as(*n.A) || !m.B->same_as(*n.B)) throw error("direct_sum: algebra mismatch");
    Bimodule t{m.A, m.B, m.rank + n.rank, {}, {}};
    auto blocks = [&](const Mat& a, const Mat& b) {
        Mat r(t.rank, t.rank);
        for (int i = 0; i < a.rows(); ++i)
            for (int j = 0; j < a.cols(); ++j) r.at(i, j) = a.at(i, j);
        for (int i = 0; i < b.rows(); ++i)
            for (int j = 0; j < b.cols(); ++j) r.at(m.rank + i, m.rank + j) = b.at(i, j);
        return r;
    };
    for (int i = 0; i < m.A->n; ++i) t.lact.push_back(blocks(m.lact[i], n.lact[i]));
    for (int i = 0; i < m.B->n; ++i) t.ract.push_back(blocks(m.ract[i], n.ract[i]));
    return t;
}

InducedBimodule induction_bimodule(const AlgebraPtr& og,
                                   const std::vector<std::vector<int>>& table,
                                   const std::vector<int>& subgroup_gens) {
    const int n = int(table.size());
    std::set<int> closure{0};
    for (int g : subgroup_gens) {
        if (g < 0 || g >= n) throw error("induction_bimodule: generator index out of range");
        closure.insert(g);
    }
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<int> cur(closure.begin(), closure.end());
        for (int a : cur)
            for (int b : cur)
                if (closure.insert(table[a][b]).second) grew = true;
    }
    InducedBimodule out;
    out.elements.assign(closure.begin(), closure.end());
    const int h = int(out.elements.size());
    std::vector<int> pos(n, -1);
    for (int i = 0; i < h; ++i) pos[out.elements[i]] = i;
    std::vector<std::vector<int>> sub(h, std::vector<int>(h));
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j) sub[i][j] = pos[table[out.elements[i]][out.elements[j]]];
    out.subalgebra = group_algebra(og->p, sub, og->name + ".sub");
    out.m = Bimodule{og, out.subalgebra, n, og->lmul, {}};
    for (int j = 0; j < h; ++j) out.m.ract.push_back(og->rmul[out.elements[j]]);
    return out;
}

Lattice left_restriction(const Bimodule& m) { return Lattice{m.A, m.rank, m.lact}; }

Lattice op_right_restriction(const Bimodule& m) {
    return Lattice{opposite(m.B), m.rank, m.ract};
}

Lattice as_env_module(const Bimodule& m, const AlgebraPtr& env) {
    if (env->n != m.A->n * m.B->n) throw error("as_env_module: env rank mismatch");
    Lattice l{env, m.rank, {}};
    for (int i = 0; i < m.A->n; ++i)
        for (int j = 0; j < m.B->n; ++j) l.act.push_back(m.lact[i] * m.ract[j]);
    return l;
}

std::optional<PerfectBimodule> make_perfect(const Bimodule& m) {
    auto lpb = projective_basis(left_restriction(m));
    if (!lpb) return std::nullopt;
    auto rpb = projective_basis(op_right_restriction(m));
    if (!rpb) return std::nullopt;
    return PerfectBimodule{m, std::move(*lpb), std::move(*rpb)};
}

PerfectBimodule dual_perfect(const PerfectBimodule& p, const FormData& fda, const FormData& fdb) {
    PerfectBimodule d;
    d.m = dual_bimodule(p.m);
    d.left_pb = dual_proj_basis(op_right_restriction(p.m), p.right_pb, fdb);
    d.right_pb = dual_proj_basis(left_restriction(p.m), p.left_pb, fda);
    return d;
}

PerfectBimodule flip_perfect(const PerfectBimodule& p) {
    return PerfectBimodule{flip(p.m), p.right_pb, p.left_pb};
}

PerfectBimodule box_perfect(const PerfectBimodule& x, const PerfectBimodule& y) {
    PerfectBimodule t;
    t.m = box_tensor(x.m, y.m);
    for (size_t i = 0; i < x.left_pb.elements.size(); ++i)
        for (size_t j = 0; j < y.left_pb.elements.size(); ++j) {
            t.left_pb.elements.push_back(kron(x.left_pb.elements[i], y.left_pb.elements[j]));
            t.left_pb.maps.push_back(kron(x.left_pb.maps[i], y.left_pb.maps[j]));
        }
    for (size_t i = 0; i < x.right_pb.elements.size(); ++i)
        for (size_t j = 0; j < y.right_pb.elements.size(); ++j) {
            t.right_pb.elements.push_back(kron(x.right_pb.elements[i], y.right_pb.elements[j]));
            t.right_pb.maps.push_back(kron(x.right_pb.maps[i], y.right_pb.maps[j]));
        }
    return t;
}

PerfectBimodule direct_sum_perfect(const PerfectBimodule& m, const PerfectBimodule& n) {
    PerfectBimodule t;
    t.m = direct_sum(m.m, n.m);
    auto embed = [&](const Mat& v, bool first) {
        Mat r(t.m.rank, 1);
        int off = first ? 0 : m.m.rank;
        for (int i = 0; i < v.rows(); ++i) r.at(off + i, 0) = v.at(i, 0);
        return r;
    };
    auto widen = [&](const Mat& f, bool first) {
        Mat r(f.rows(), t.m.rank);
        int off = first ? 0 : m.m.rank;
        for (int i = 0; i < f.rows(); ++i)
            for (int j = 0; j < f.cols(); ++j) r.at(i, off + j) = f.at(i, j);
        return r;
    };
    for (size_t i = 0; i < m.left_pb.elements.size(); ++i) {
        t.left_pb.elements.push_back(embed(m.left_pb.elements[i], true));
        t.left_pb.maps.push_back(widen(m.left_pb.maps[i], true));
    }
    for (size_t i = 0; i < n.left_pb.elements.size(); ++i) {
        t.left_pb.elements.push_back(embed(n.left_pb.elements[i], false));
        t.left_pb.maps.push_back(widen(n.left_pb.maps[i], false));
    }
    for (size_t i = 0; i < m.right_pb.elements.size(); ++i) {
        t.right_pb.elements.push_back(embed(m.right_pb.elements[i], true));
        t.right_pb.maps.push_back(widen(m.right_pb.maps[i], true));
    }
    for (size_t i = 0; i < n.right_pb.elements.size(); ++i) {
        t.right_pb.elements.push_back(embed(n.right_pb.elements[i], false));
        t.right_pb.maps.push_back(widen(n.right_pb.maps[i], false));
    }
    return t;
}

Tensor2 tensor_over(const std::vector<Mat>& xr, int rx, const std::vector<Mat>& yl, int ry,
                    const AlgebraPtr& e) {
    Tensor2 t;
    t.rx = rx;
    t.ry = ry;
    const int free_rank = rx * ry;
    if (free_rank == 0) {
        t.rank = 0;
        t.proj = Mat(0, free_rank);
        t.sect = Mat(free_rank, 0);
        return t;
    }
    auto act_of = [&](const std::vector<Mat>& acts, const Mat& g, int r) {
        Mat m(r, r);
        for (int i = 0; i < e->n; ++i)
            if (g.at(i, 0) != 0) m.add_scaled(acts[i], g.at(i, 0));
        return m;
    };
    Mat rels(free_rank, 0);
    for (const auto& g : e->gens) {
        Mat d = kron(act_of(xr, g, rx), Mat::identity(ry)) -
                kron(Mat::identity(rx), act_of(yl, g, ry));
        rels = hcat(rels, d);
    }
    Mat sat = saturate(rels, e->p);
    if (sat.cols() == 0) {
        t.rank = free_rank;
        t.proj = Mat::identity(free_rank);
        t.sect = Mat::identity(free_rank);
        return t;
    }
    auto q = quotient_data(sat, e->p);
    t.rank = free_rank - sat.cols();
    t.proj = q.proj;
    t.sect = q.sect;
    return t;
}

AdjunctionData adjunction_data(const PerfectBimodule& p, const FormData& fda,
                               const FormData& fdb) {
    const Bimodule& m = p.m;
    const long pr = m.A->p;
    AdjunctionData d;
    // M^vee (x)_A M and M (x)_B M^vee
    std::vector<Mat> mv_r, mv_l;  // right-A action on M^vee; left-B action on M^vee
    for (int i = 0; i < m.A->n; ++i) mv_r.push_back(m.lact[i].transpose());
    for (int j = 0; j < m.B->n; ++j) mv_l.push_back(m.ract[j].transpose());
    d.mvm = tensor_over(mv_r, m.rank, m.lact, m.rank, m.A);
    d.mmv = tensor_over(m.ract, m.rank, mv_l, m.rank, m.B);

    // Hom_A(M, A) and Hom_{B^op}(M, B) with the form isomorphisms to M^vee
    HomSpace hma = hom_space(left_restriction(m), regular_lattice(m.A));
    if (hma.dim() != m.rank) throw error("adjunction_data: Hom_A(M,A) has unexpected rank");
    Mat phi(m.rank, m.rank);
    std::vector<Mat> hl;
    for (int l = 0; l < m.rank; ++l) {
        hl.push_back(hma.to_matrix(Mat::unit_vec(m.rank, l)));
        phi.set_col(l, hl.back().transpose() * fda.form.s);
    }
    if (!is_unimodular(phi, pr)) throw error("adjunction_data: s o (-) is not an isomorphism");
    Mat phi_inv = invert(phi);

    AlgebraPtr bop = opposite(m.B);
    HomSpace hmb = hom_space(op_right_restriction(m), regular_lattice(bop));
    if (hmb.dim() != m.rank) throw error("adjunction_data: Hom_Bop(M,B) has unexpected rank");
    Mat psi(m.rank, m.rank);
    std::vector<Mat> kl;
    for (int l = 0; l < m.rank; ++l) {
        kl.push_back(hmb.to_matrix(Mat::unit_vec(m.rank, l)));
        psi.set_col(l, kl.back().transpose() * fdb.form.s);
    }
    if (!is_unimodular(psi, pr)) throw error("adjunction_data: t o (-) is not an isomorphism");
    Mat psi_inv = invert(psi);

    // eta_M on free coordinates: (m, phi) |-> Phi^{-1}(phi)(m)
    d.eta_m_free = Mat(m.A->n, m.rank * m.rank);
    for (int a = 0; a < m.rank; ++a)
        for (int c = 0; c < m.rank; ++c) {
            Mat acc(m.A->n, 1);
            for (int l = 0; l < m.rank; ++l)
                if (phi_inv.at(l, c) != 0) acc.add_scaled(hl[l].col(a), phi_inv.at(l, c));
            d.eta_m_free.set_col(a * m.rank + c, acc);
        }
    d.eta_m = d.eta_m_free * d.mmv.sect;

    // eta_Mv on free coordinates: (phi, m) |-> Psi^{-1}(phi)(m)
    d.eta_mv_free = Mat(m.B->n, m.rank * m.rank);
    for (int c = 0; c < m.rank; ++c)
        for (int b = 0; b < m.rank; ++b) {
            Mat acc(m.B->n, 1);
            for (int l = 0; l < m.rank; ++l)
                if (psi_inv.at(l, c) != 0) acc.add_scaled(kl[l].col(b), psi_inv.at(l, c));
            d.eta_mv_free.set_col(c * m.rank + b, acc);
        }
    d.eta_mv = d.eta_mv_free * d.mvm.sect;

    // eps_M : 1_B |-> sum_i (s o alpha_i) (x) m_i
    Mat eps_m_1(d.mvm.rank, 1);
    for (size_t i = 0; i < p.left_pb.elements.size(); ++i)
        eps_m_1 += d.mvm.proj *
                   kron(p.left_pb.maps[i].transpose() * fda.form.s, p.left_pb.elements[i]);
    d.eps_m = Mat(d.mvm.rank, m.B->n);
    for (int j = 0; j < m.B->n; ++j) {
        Mat act = d.mvm.proj * kron(m.ract[j].transpose(), Mat::identity(m.rank)) * d.mvm.sect;
        d.eps_m.set_col(j, act * eps_m_1);
    }

    // eps_Mv : 1_A |-> sum_j m_j (x) (t o beta_j)
    Mat eps_mv_1(d.mmv.rank, 1);
    for (size_t j = 0; j < p.right_pb.elements.size(); ++j)
        eps_mv_1 += d.mmv.proj *
                    kron(p.right_pb.elements[j], p.right_pb.maps[j].transpose() * fdb.form.s);
    d.eps_mv = Mat(d.mmv.rank, m.A->n);
    for (int i = 0; i < m.A->n; ++i) {
        Mat act = d.mmv.proj * kron(m.lact[i], Mat::identity(m.rank)) * d.mmv.sect;
        d.eps_mv.set_col(i, act * eps_mv_1);
    }

    d.pi_m = d.eta_m * (d.eps_mv * m.A->unit);
    d.pi_mv = d.eta_mv * (d.eps_m * m.B->unit);
    return d;
}

ValidationReport check_triangle_identities(const PerfectBimodule& p, const AdjunctionData& adj) {
    ValidationReport r;
    const Bimodule& m = p.m;
    const int rm = m.rank;
    Mat w = adj.mvm.sect * (adj.eps_m * m.B->unit);    // free (phi, m) coords
    Mat wp = adj.mmv.sect * (adj.eps_mv * m.A->unit);  // free (m, phi) coords
    // (eta_M (x) Id_M) o (Id_M (x) eps_M) = Id_M
    for (int b = 0; b < rm; ++b) {
        Mat out(rm, 1);
        for (int c = 0; c < rm; ++c) {
            Mat chunk(rm, 1);
            for (int d = 0; d < rm; ++d) chunk.at(d, 0) = w.at(c * rm + d, 0);
            out += m.left_of(adj.eta_m_free.col(b * rm + c)) * chunk;
        }
        if (out != Mat::unit_vec(rm, b)) {
            r.issues.push_back("triangle (eta_M x Id)(Id x eps_M) fails at basis " +
                               std::to_string(b));
            break;
        }
    }
    // (Id_{M^v} (x) eta_M) o (eps_M (x) Id_{M^v}) = Id_{M^v}
    for (int b = 0; b < rm; ++b) {
        Mat out(rm, 1);
        for (int c1 = 0; c1 < rm; ++c1)
            for (int a = 0; a < rm; ++a) {
                const Rat& y = w.at(c1 * rm + a, 0);
                if (y == 0) continue;
                Mat ract_a = m.left_of(adj.eta_m_free.col(a * rm + b)).transpose();
                out.add_scaled(ract_a.col(c1), y);
            }
        if (out != Mat::unit_vec(rm, b)) {
            r.issues.push_back("triangle (Id x eta_M)(eps_M x Id) fails at basis " +
                               std::to_string(b));
            break;
        }
    }
    // (Id_M (x) eta_{M^v}) o (eps_{M^v} (x) Id_M) = Id_M
    for (int b = 0; b < rm; ++b) {
        Mat out(rm, 1);
        for (int a = 0; a < rm; ++a)
            for (int c = 0; c < rm; ++c) {
                const Rat& y = wp.at(a * rm + c, 0);
                if (y == 0) continue;
                Mat ract_b = m.right_of(adj.eta_mv_free.col(c * rm + b));
                out.add_scaled(ract_b.col(a), y);
            }
        if (out != Mat::unit_vec(rm, b)) {
            r.issues.push_back("triangle (Id x eta_Mv)(eps_Mv x Id) fails at basis " +
                               std::to_string(b));
            break;
        }
    }
    // (eta_{M^v} (x) Id_{M^v}) o (Id_{M^v} (x) eps_{M^v}) = Id_{M^v}
    for (int b = 0; b < rm; ++b) {
        Mat out(rm, 1);
        for (int a = 0; a < rm; ++a)
            for (int c2 = 0; c2 < rm; ++c2) {
                const Rat& y = wp.at(a * rm + c2, 0);
                if (y == 0) continue;
                Mat lact_t = m.right_of(adj.eta_mv_free.col(b * rm + a)).transpose();
                out.add_scaled(lact_t.col(c2), y);
            }
        if (out != Mat::unit_vec(rm, b)) {
            r.issues.push_back("triangle (eta_Mv x Id)(Id x eps_Mv) fails at basis " +
                               std::to_string(b));
            break;
        }
    }
    return r;
}

Mat dual_tensor_iso(const PerfectBimodule& p, const FormData& fda, const Tensor2& mvu,
                    const HomSpace& hom_mu) {
    const Bimodule& m = p.m;
    const Lattice& u = hom_mu.V;
    HomSpace hma = hom_space(left_restriction(m), regular_lattice(m.A));
    Mat phi(m.rank, m.rank);
    std::vector<Mat> hl;
    for (int l = 0; l < hma.dim(); ++l) {
        hl.push_back(hma.to_matrix(Mat::unit_vec(hma.dim(), l)));
        phi.set_col(l, hl.back().transpose() * fda.form.s);
    }
    Mat phi_inv = invert(phi);
    Mat cols(hom_mu.dim(), 0);
    for (int cphi = 0; cphi < m.rank; ++cphi)
        for (int cu = 0; cu < u.rank; ++cu) {
            // a0 = Phi^{-1}(delta_cphi) : M -> A, F(m') = a0(m') . u
            Mat a0(m.A->n, m.rank);
            for (int l = 0; l < m.rank; ++l)
                if (phi_inv.at(l, cphi) != 0) a0.add_scaled(hl[l], phi_inv.at(l, cphi));
            Mat f(u.rank, m.rank);
            for (int k = 0; k < m.A->n; ++k) {
                Mat col = u.act[k] * Mat::unit_vec(u.rank, cu);
                for (int mm = 0; mm < m.rank; ++mm)
                    if (a0.at(k, mm) != 0) {
                        for (int r = 0; r < u.rank; ++r)
                            if (col.at(r, 0) != 0) f.at(r, mm) += a0.at(k, mm) * col.at(r, 0);
                    }
            }
            auto c = hom_mu.coords_of(f);
            if (!c) throw error("dual_tensor_iso: image is not an intertwiner");
            cols = hcat(cols, *c);
        }
    return cols * mvu.sect;
}

Mat transfer_graded(const PerfectBimodule& p, const AdjunctionData& adj, const Lattice& u,
                    const Tensor2& t2u, const Lattice& x, const Tensor2& t2x, const Mat& beta) {
    if (beta.rows() != t2x.rank || beta.cols() != t2u.rank)
        throw error("transfer_graded: beta has wrong shape");
    const int rm = p.m.rank;
    Mat eps1free = adj.mmv.sect * (adj.eps_mv * p.m.A->unit);  // (rm*rm) x 1
    Mat betafree = t2x.sect * beta * t2u.proj;                 // (rm*rx_free?) careful: rows rm*x.rank
    // precompute the action of eta on each (a, c) block
    std::vector<Mat> eta_act(rm * rm);
    for (int a = 0; a < rm; ++a)
        for (int c = 0; c < rm; ++c)
            eta_act[a * rm + c] = x.action_of(adj.eta_m_free.col(a * rm + c));
    Mat out(x.rank, u.rank);
    for (int b = 0; b < u.rank; ++b) {
        Mat col(x.rank, 1);
        for (int a = 0; a < rm; ++a) {
            // chunk_a of eps1free (x) e_b, pushed through beta on free coords
            Mat za(rm * x.rank, 1);
            for (int c = 0; c < rm; ++c) {
                const Rat& w = eps1free.at(a * rm + c, 0);
                if (w == 0) continue;
                for (int r = 0; r < rm * x.rank; ++r) {
                    const Rat& y = betafree.at(r, c * u.rank + b);
                    if (y != 0) za.at(r, 0) += w * y;
                }
            }
            for (int c = 0; c < rm; ++c) {
                Mat w(x.rank, 1);
                bool nz = false;
                for (int r = 0; r < x.rank; ++r) {
                    w.at(r, 0) = za.at(c * x.rank + r, 0);
                    if (w.at(r, 0) != 0) nz = true;
                }
                if (nz) col += eta_act[a * rm + c] * w;
            }
        }
        out.set_col(b, col);
    }
    return out;
}

// ---------------------------------------------------------------------------
// TensorTower

FunctorData pure_functor(const PerfectBimodule& p) {
    FunctorData f;
    f.factor_first = true;
    f.p = p;
    f.cp = p.m.A;
    f.ebal = p.m.B;
    f.cout = p.m.A;
    f.dsrc = p.m.B;
    f.nres = 1;
    f.p_cp = p.m.lact;
    f.p_bal = p.m.ract;
    for (int d = 0; d < p.m.B->n; ++d) f.bal_emb.push_back(Mat::unit_vec(p.m.B->n, d));
    f.res_emb = {p.m.B->unit};
    f.res_lmul = {Mat::identity(1)};
    f.res_unit = Mat{{Rat(1)}};
    f.src_index = [](int k, int) { return k; };
    f.out_index = [](int m, int) { return m; };
    f.n_pout = p.m.A->n;
    f.pb_elements = p.left_pb.elements;
    f.pb_maps = p.left_pb.maps;
    f.bal_pb_elements = p.right_pb.elements;
    f.bal_pb_maps = p.right_pb.maps;
    return f;
}

// act = proj * kron(a, b) * sect without materializing the Kronecker product,
// using vec(a V b^T) = (a (x) b) vec(V) in row-major layout.
Mat conj_kron(const Mat& proj, const Mat& a, const Mat& b, const Mat& sect) {
    Mat out(proj.rows(), sect.cols());
    for (int c = 0; c < sect.cols(); ++c) {
        Mat v = Mat::unvec(sect.col(c), a.cols(), b.cols());
        Mat w = a * v * b.transpose();
        out.set_col(c, proj * w.vec());
    }
    return out;
}

namespace {

std::vector<Mat> balanced_source_actions(const FunctorData& f, const Lattice& src) {
    std::vector<Mat> xs;
    xs.reserve(f.ebal->n);
    for (int d = 0; d < f.ebal->n; ++d) xs.push_back(src.action_of(f.bal_emb[d]));
    return xs;
}

}  // namespace

TensorTower::TensorTower(FunctorData f, FormData fdc, FormData fd_ebal, TowerPtr source)
    : Tower(f.cout, std::move(fdc), Lattice{}),
      f_(std::move(f)),
      fd_ebal_(std::move(fd_ebal)),
      source_(std::move(source)) {
    const Tensor2& t0 = functor_tensor(0);
    levels_.at(0) = make_level(source_->level(0), t0);
}

const Tensor2& TensorTower::functor_tensor(int k) {
    auto it = tens_.find(k);
    if (it != tens_.end()) return it->second;
    const Lattice& src = source_->level(k);
    const long p = E->p;
    const int rp = f_.p.m.rank, rx = src.rank;
    const int nj = int(f_.bal_pb_elements.size());
    Tensor2 t;
    t.rx = f_.factor_first ? rp : rx;
    t.ry = f_.factor_first ? rx : rp;
    if (rp * rx == 0 || nj == 0) {
        t.rank = 0;
        t.proj = Mat(0, rp * rx);
        t.sect = Mat(rp * rx, 0);
        return tens_.emplace(k, std::move(t)).first->second;
    }
    auto embed = [&](const Mat& d) {
        Mat e(f_.dsrc->n, 1);
        for (int kk = 0; kk < f_.ebal->n; ++kk)
            if (d.at(kk, 0) != 0) e.add_scaled(f_.bal_emb[kk], d.at(kk, 0));
        return e;
    };
    // idempotent on X^J presenting the balanced tensor as its image
    Mat idem(nj * rx, nj * rx);
    for (int j = 0; j < nj; ++j)
        for (int j2 = 0; j2 < nj; ++j2) {
            Mat blk = src.action_of(embed(f_.bal_pb_maps[j] * f_.bal_pb_elements[j2]));
            for (int r = 0; r < rx; ++r)
                for (int c = 0; c < rx; ++c)
                    if (blk.at(r, c) != 0) idem.at(j * rx + r, j2 * rx + c) = blk.at(r, c);
        }
    Mat basis = image_basis(idem, p);
    t.rank = basis.cols();
    // phi : free -> X^J,  (p, x) or (x, p) |-> (rho_X(beta_j(p)) x)_j
    Mat phifree(nj * rx, rp * rx);
    for (int j = 0; j < nj; ++j)
        for (int cp = 0; cp < rp; ++cp) {
            Mat blk = src.action_of(embed(f_.bal_pb_maps[j].col(cp)));
            for (int cx = 0; cx < rx; ++cx) {
                int fr = f_.factor_first ? cp * rx + cx : cx * rp + cp;
                for (int r = 0; r < rx; ++r)
                    if (blk.at(r, cx) != 0) phifree.at(j * rx + r, fr) = blk.at(r, cx);
            }
        }
    t.proj = solve_exact(basis, phifree, p);
    // psi : X^J -> free, (x)_j |-> sum_j p_j (x) x_j
    t.sect = Mat(rp * rx, t.rank);
    for (int q = 0; q < t.rank; ++q) {
        Mat acc(rp * rx, 1);
        for (int j = 0; j < nj; ++j)
            for (int cp = 0; cp < rp; ++cp) {
                const Rat& x = f_.bal_pb_elements[j].at(cp, 0);
                if (x == 0) continue;
                for (int r = 0; r < rx; ++r) {
                    const Rat& y = basis.at(j * rx + r, q);
                    if (y != 0)
                        acc.at(f_.factor_first ? cp * rx + r : r * rp + cp, 0) += x * y;
                }
            }
        t.sect.set_col(q, acc);
    }
    return tens_.emplace(k, std::move(t)).first->second;
}

Lattice TensorTower::make_level(const Lattice& src, const Tensor2& t2) const {
    Lattice l{E, t2.rank, {}};
    l.act.assign(E->n, Mat());
    for (int m = 0; m < f_.n_pout; ++m)
        for (int lr = 0; lr < f_.nres; ++lr) {
            Mat xact = src.action_of(f_.res_emb[lr]);
            l.act[f_.out_index(m, lr)] =
                f_.factor_first ? conj_kron(t2.proj, f_.p_cp[m], xact, t2.sect)
                                : conj_kron(t2.proj, xact, f_.p_cp[m], t2.sect);
        }
    return l;
}

const Mat& TensorTower::psi() {
    if (psi_.rows() == 0) {
        const int rp = f_.p.m.rank;
        AlgebraPtr ebop = opposite(f_.ebal);
        Lattice pbal{ebop, rp, f_.p_bal};
        HomSpace h = hom_space(pbal, regular_lattice(ebop));
        if (h.dim() != rp) throw error("TensorTower: Hom_E(P, E) has unexpected rank");
        Mat phi(rp, rp);
        std::vector<Mat> kl;
        for (int l = 0; l < rp; ++l) {
            kl.push_back(h.to_matrix(Mat::unit_vec(rp, l)));
            phi.set_col(l, kl.back().transpose() * fd_ebal_.form.s);
        }
        if (!is_unimodular(phi, E->p)) throw error("TensorTower: t o (-) not an isomorphism");
        Mat phi_inv = invert(phi);
        psi_ = Mat(f_.ebal->n, rp * rp);
        for (int c = 0; c < rp; ++c)
            for (int c2 = 0; c2 < rp; ++c2) {
                Mat acc(f_.ebal->n, 1);
                for (int l = 0; l < rp; ++l)
                    if (phi_inv.at(l, c) != 0) acc.add_scaled(kl[l].col(c2), phi_inv.at(l, c));
                psi_.set_col(c * rp + c2, acc);
            }
    }
    return psi_;
}

Mat TensorTower::pairing_with_mirror(int k) {
    const Lattice& w = source_->level(k);
    const Mat& ps = psi();
    const int rp = f_.p.m.rank, rw = w.rank;
    TensorTower* mt = dynamic_cast<TensorTower*>(&mirror());
    if (!mt) throw error("TensorTower: mirror is not a tensor tower");
    const Tensor2& gt = mt->functor_tensor(-k);
    const Tensor2& ft = functor_tensor(k);
    Mat conv = source_->dual_iso(k);  // mirror-source level(-k) -> (level k)^dual
    auto fidx = [&](int c, int d) { return f_.factor_first ? c * rw + d : d * rp + c; };
    Mat pifree(rp * rw, rp * rw);
    for (int c = 0; c < rp; ++c)
        for (int c2 = 0; c2 < rp; ++c2) {
            Mat q(f_.dsrc->n, 1);
            for (int d = 0; d < f_.ebal->n; ++d) {
                const Rat& x = ps.at(d, c * rp + c2);
                if (x != 0) q.add_scaled(f_.bal_emb[d], x);
            }
            Mat block = w.action_of(q);
            if (conv.rows()) block = conv.transpose() * block;
            for (int d = 0; d < rw; ++d)
                for (int d2 = 0; d2 < rw; ++d2)
                    if (block.at(d, d2) != 0) pifree.at(fidx(c, d), fidx(c2, d2)) = block.at(d, d2);
        }
    Mat pair = gt.sect.transpose() * pifree * ft.sect;
    if (!is_unimodular(pair, E->p)) throw error("TensorTower: duality pairing not unimodular");
    return pair;
}

Mat TensorTower::seam_pairing() { return pairing_with_mirror(0); }

Mat TensorTower::entry_iso(int k) {
    if (k <= 0) return Mat();
    auto it = entries_.find(k);
    if (it != entries_.end()) return it->second;
    Mat e = pairing_with_mirror(k);
    return entries_.emplace(k, std::move(e)).first->second;
}

Mat TensorTower::apply_functor(int k, int l, const Mat& f) {
    const int rp = f_.p.m.rank;
    if (k <= 0 && l <= 0) {
        const Tensor2& tk = functor_tensor(k);
        const Tensor2& tl = functor_tensor(l);
        Mat ident = Mat::identity(rp);
        return f_.factor_first ? conj_kron(tl.proj, ident, f, tk.sect)
                               : conj_kron(tl.proj, f, ident, tk.sect);
    }
    if (k >= 0 && l >= 0) {
        // route through the mirror, converting with the level-0 duality only
        TensorTower* mt = dynamic_cast<TensorTower*>(&mirror());
        if (!mt) throw error("apply_functor: mirror is not a tensor tower");
        Mat fm = f.transpose();
        Mat dl = source_->dual_iso(l);
        if (dl.rows()) fm = fm * dl;
        Mat dk = source_->dual_iso(k);
        if (dk.rows()) fm = invert(dk) * fm;
        Mat g = mt->apply_functor(-l, -k, fm);
        Mat tf = g.transpose();
        Mat ck = mirror().dual_iso(-k);
        if (ck.rows()) tf = tf * ck;
        Mat cl = mirror().dual_iso(-l);
        if (cl.rows()) tf = invert(cl) * tf;
        return tf;
    }
    // mixed signs: direct path through the canonical entry isomorphisms
    const Tensor2& tk = functor_tensor(k);
    const Tensor2& tl = functor_tensor(l);
    Mat ident = Mat::identity(rp);
    Mat ff = f_.factor_first ? conj_kron(tl.proj, ident, f, tk.sect)
                             : conj_kron(tl.proj, f, ident, tk.sect);
    Mat ek = entry_iso(k), el = entry_iso(l);
    if (el.rows()) ff = el * ff;
    if (ek.rows()) ff = ff * invert(ek);
    return ff;
}

Link TensorTower::build_neg_link(int k) {
    const Link& sl = source_->link(k);
    const long p = E->p;
    const Tensor2& tk = functor_tensor(k);
    functor_tensor(k - 1);
    const int rp = f_.p.m.rank;
    Link l;
    if (sl.bar) {
        // F(E_src (x) W) has closed form: factor (x) res (x) W (with the
        // balanced part of E_src absorbed into the factor)
        const Lattice& w = source_->level(k);
        const int rw = w.rank;
        const int nb = f_.ebal->n, nr = f_.nres;
        auto small = [&](int cp, int lr, int cw) {
            return f_.factor_first ? (cp * nr + lr) * rw + cw : (lr * rw + cw) * rp + cp;
        };
        l.P = Lattice{E, rp * nr * rw, {}};
        l.P.act.assign(E->n, Mat());
        for (int m = 0; m < f_.n_pout; ++m)
            for (int lr = 0; lr < nr; ++lr) {
                Mat a(l.P.rank, l.P.rank);
                for (int cp = 0; cp < rp; ++cp)
                    for (int c2 = 0; c2 < rp; ++c2) {
                        const Rat& x = f_.p_cp[m].at(cp, c2);
                        if (x == 0) continue;
                        for (int l1 = 0; l1 < nr; ++l1)
                            for (int l2 = 0; l2 < nr; ++l2) {
                                const Rat& y = f_.res_lmul[lr].at(l1, l2);
                                if (y == 0) continue;
                                for (int cw = 0; cw < rw; ++cw)
                                    a.at(small(cp, l1, cw), small(c2, l2, cw)) += x * y;
                            }
                    }
                l.P.act[f_.out_index(m, lr)] = std::move(a);
            }
        // surjection onto F(W): (p, r, w) represents p (x) (1_bal (x) e_r)(w)
        l.surj = Mat(tk.rank, l.P.rank);
        for (int lr = 0; lr < nr; ++lr) {
            Mat xact = source_->level(k).action_of(f_.res_emb[lr]);
            for (int cw = 0; cw < rw; ++cw) {
                Mat xcol = xact.col(cw);
                for (int cp = 0; cp < rp; ++cp) {
                    Mat big(rp * rw, 1);
                    for (int r = 0; r < rw; ++r) {
                        const Rat& y = xcol.at(r, 0);
                        if (y != 0) big.at(f_.factor_first ? cp * rw + r : r * rp + cp, 0) = y;
                    }
                    l.surj.set_col(small(cp, lr, cw), tk.proj * big);
                }
            }
        }
        // inclusion of F(level(k-1)) through Id (x) sl.incl
        std::vector<int> bal_of(f_.dsrc->n, -1), res_of(f_.dsrc->n, -1);
        for (int kk = 0; kk < nb; ++kk)
            for (int ll = 0; ll < nr; ++ll) {
                bal_of[f_.src_index(kk, ll)] = kk;
                res_of[f_.src_index(kk, ll)] = ll;
            }
        const Tensor2& tk1 = functor_tensor(k - 1);
        const Lattice& low = source_->level(k - 1);
        l.incl = Mat(l.P.rank, tk1.rank);
        for (int col = 0; col < tk1.rank; ++col) {
            Mat acc(l.P.rank, 1);
            for (int cp = 0; cp < rp; ++cp)
                for (int cl = 0; cl < low.rank; ++cl) {
                    int fr = f_.factor_first ? cp * low.rank + cl : cl * rp + cp;
                    const Rat& x = tk1.sect.at(fr, col);
                    if (x == 0) continue;
                    // expand e_cp (x) sl.incl.col(cl) and absorb balanced parts
                    for (int src = 0; src < sl.incl.rows(); ++src) {
                        const Rat& y = sl.incl.at(src, cl);
                        if (y == 0) continue;
                        int esrc = src / rw, cw = src % rw;
                        int kb = bal_of[esrc], lr = res_of[esrc];
                        Mat pc = f_.p_bal[kb].col(cp);
                        for (int r = 0; r < rp; ++r) {
                            const Rat& z = pc.at(r, 0);
                            if (z != 0) acc.at(small(r, lr, cw), 0) += x * y * z;
                        }
                    }
                }
            l.incl.set_col(col, acc);
        }
        // projective basis: (pb_i (x) 1_res (x) w_b, chi(p (x) r (x) w) =
        // coeff_b(w) combine(pb_map_i(p), r))
        for (size_t i = 0; i < f_.pb_elements.size(); ++i)
            for (int b = 0; b < rw; ++b) {
                Mat el(l.P.rank, 1);
                for (int cp = 0; cp < rp; ++cp) {
                    const Rat& x = f_.pb_elements[i].at(cp, 0);
                    if (x == 0) continue;
                    for (int lr = 0; lr < nr; ++lr) {
                        const Rat& y = f_.res_unit.at(lr, 0);
                        if (y != 0) el.at(small(cp, lr, b), 0) += x * y;
                    }
                }
                l.pb.elements.push_back(el);
                Mat mp(E->n, l.P.rank);
                for (int m = 0; m < f_.n_pout; ++m)
                    for (int cp = 0; cp < rp; ++cp) {
                        const Rat& x = f_.pb_maps[i].at(m, cp);
                        if (x == 0) continue;
                        for (int lr = 0; lr < nr; ++lr)
                            mp.at(f_.out_index(m, lr), small(cp, lr, b)) += x;
                    }
                l.pb.maps.push_back(mp);
            }
    } else {
        // generic middle: balanced tensor with sl.P
        std::vector<Mat> xbal = balanced_source_actions(f_, sl.P);
        Tensor2 tp = f_.factor_first
                         ? tensor_over(f_.p_bal, rp, xbal, sl.P.rank, f_.ebal)
                         : tensor_over(xbal, sl.P.rank, f_.p_bal, rp, f_.ebal);
        l.P = make_level(sl.P, tp);
        Mat bi = f_.factor_first ? kron(Mat::identity(rp), sl.incl)
                                 : kron(sl.incl, Mat::identity(rp));
        l.incl = tp.proj * bi * functor_tensor(k - 1).sect;
        Mat bs = f_.factor_first ? kron(Mat::identity(rp), sl.surj)
                                 : kron(sl.surj, Mat::identity(rp));
        l.surj = tk.proj * bs * tp.sect;
        // pb composition: chi_{ij}(p (x) x) = sum_{kb,lr} pi_j(x)[src(kb,lr)]
        //   combine(pb_map_i(p_bal[kb] p), e_lr)
        for (size_t i = 0; i < f_.pb_elements.size(); ++i)
            for (size_t j = 0; j < sl.pb.elements.size(); ++j) {
                Mat big = f_.factor_first ? kron(f_.pb_elements[i], sl.pb.elements[j])
                                          : kron(sl.pb.elements[j], f_.pb_elements[i]);
                l.pb.elements.push_back(tp.proj * big);
                Mat chi_free(E->n, rp * sl.P.rank);
                for (int cx = 0; cx < sl.P.rank; ++cx) {
                    Mat pj = sl.pb.maps[j].col(cx);  // in dsrc coords
                    for (int kb = 0; kb < f_.ebal->n; ++kb)
                        for (int lr = 0; lr < f_.nres; ++lr) {
                            const Rat& coef = pj.at(f_.src_index(kb, lr), 0);
                            if (coef == 0) continue;
                            for (int cp = 0; cp < rp; ++cp) {
                                Mat moved = f_.p_bal[kb].col(cp);
                                Mat v = f_.pb_maps[i] * moved;  // n_pout coords
                                int fr = f_.factor_first ? cp * sl.P.rank + cx
                                                         : cx * rp + cp;
                                for (int m = 0; m < f_.n_pout; ++m) {
                                    const Rat& y = v.at(m, 0);
                                    if (y != 0)
                                        chi_free.at(f_.out_index(m, lr), fr) += coef * y;
                                }
                            }
                        }
                }
                l.pb.maps.push_back(chi_free * tp.sect);
            }
    }
    (void)p;
    return l;
}

TowerPtr TensorTower::make_mirror() {
    FunctorData g;
    g.factor_first = f_.factor_first;
    g.p.m = Bimodule{opposite(f_.p.m.A), opposite(f_.p.m.B), f_.p.m.rank, {}, {}};
    for (const auto& m : f_.p.m.lact) g.p.m.lact.push_back(m.transpose());
    for (const auto& m : f_.p.m.ract) g.p.m.ract.push_back(m.transpose());
    g.cp = opposite(f_.cp);
    g.ebal = opposite(f_.ebal);
    g.cout = opposite(f_.cout);
    g.dsrc = opposite(f_.dsrc);
    g.nres = f_.nres;
    for (const auto& m : f_.p_cp) g.p_cp.push_back(m.transpose());
    for (const auto& m : f_.p_bal) g.p_bal.push_back(m.transpose());
    g.bal_emb = f_.bal_emb;
    g.res_emb = f_.res_emb;
    for (const auto& m : f_.res_lmul) g.res_lmul.push_back(m.transpose());
    g.res_unit = f_.res_unit;
    g.src_index = f_.src_index;
    g.out_index = f_.out_index;
    g.n_pout = f_.n_pout;
    // dual factor gets its outer-side projective basis by form-mediated duality
    Lattice pcp{f_.cp, f_.p.m.rank, f_.p_cp};
    ProjBasisE pb{f_.pb_elements, f_.pb_maps};
    ProjBasisE dual = dual_proj_basis(pcp, pb, f_.fd_cp);
    g.pb_elements = dual.elements;
    g.pb_maps = dual.maps;
    g.fd_cp = make_form_data(*g.cp, f_.fd_cp.form);
    Lattice pbal{opposite(f_.ebal), f_.p.m.rank, f_.p_bal};
    ProjBasisE balpb{f_.bal_pb_elements, f_.bal_pb_maps};
    ProjBasisE baldual = dual_proj_basis(pbal, balpb, fd_ebal_);
    g.bal_pb_elements = baldual.elements;
    g.bal_pb_maps = baldual.maps;
    FormData fdc_op = make_form_data(*g.cout, efd.form);
    FormData fde_op = make_form_data(*g.ebal, fd_ebal_.form);
    return std::make_shared<TensorTower>(std::move(g), std::move(fdc_op), std::move(fde_op),
                                         source_->mirror_ptr());
}

TensorTowerPtr tensor_tower(const PerfectBimodule& p, const FormData& fdc, const FormData& fdd,
                            const TowerPtr& source) {
    FunctorData f = pure_functor(p);
    f.fd_cp = fdc;
    return std::make_shared<TensorTower>(std::move(f), fdc, fdd, source);
}

TensorTowerPtr tensor_tower(FunctorData f, const FormData& fdc, const FormData& fd_ebal,
                            const TowerPtr& source) {
    return std::make_shared<TensorTower>(std::move(f), fdc, fd_ebal, source);
}

Lattice bimodule_regular_lattice(const AlgebraPtr& a, const AlgebraPtr& env) {
    return as_env_module(regular_bimodule(a), env);
}

TorsionModule hochschild_tate(const AlgebraPtr& a, Tower& ta, int n) {
    return tate_ext(bimodule_regular_lattice(a, ta.E), ta, n);
}

// ---------------------------------------------------------------------------
// Hochschild transfer

namespace {

PerfectBimodule regular_perfect(const AlgebraPtr& a) {
    PerfectBimodule p;
    p.m = regular_bimodule(a);
    p.left_pb.elements = {a->unit};
    p.left_pb.maps = {Mat::identity(a->n)};
    p.right_pb.elements = {a->unit};
    p.right_pb.maps = {Mat::identity(a->n)};
    return p;
}

void retag(PerfectBimodule& p, const AlgebraPtr& left, const AlgebraPtr& right) {
    if (!p.m.A->same_as(*left) || !p.m.B->same_as(*right))
        throw error("retag: algebra structures differ");
    p.m.A = left;
    p.m.B = right;
}

// F(Y) = Y (x)_B M^vee over B (x) A^op, for Y over B^e.
FunctorData s1_functor(const PerfectBimodule& dualm, const AlgebraPtr& bopa,
                       const AlgebraPtr& env_b, const FormData& fda, const FormData& fdb) {
    AlgebraPtr b = dualm.m.A, a = dualm.m.B;  // M^vee is a (B, A)-bimodule
    const int na = a->n, nb = b->n;
    FunctorData f;
    f.factor_first = false;
    f.p = dualm;
    f.cp = opposite(a);
    f.fd_cp = make_form_data(*f.cp, fda.form);
    f.ebal = b;
    f.cout = bopa;
    f.dsrc = env_b;
    f.nres = nb;
    f.p_cp = dualm.m.ract;  // right-A action of a^op on M^vee
    f.p_bal = dualm.m.lact;  // left-B action
    for (int d = 0; d < nb; ++d) f.bal_emb.push_back(kron(b->unit, Mat::unit_vec(nb, d)));
    for (int l = 0; l < nb; ++l) f.res_emb.push_back(kron(Mat::unit_vec(nb, l), b->unit));
    f.res_lmul = b->lmul;
    f.res_unit = b->unit;
    f.src_index = [nb](int k, int l) { return l * nb + k; };
    f.out_index = [na](int m, int l) { return l * na + m; };
    f.n_pout = na;
    f.pb_elements = dualm.right_pb.elements;
    f.pb_maps = dualm.right_pb.maps;
    f.bal_pb_elements = dualm.left_pb.elements;
    f.bal_pb_maps = dualm.left_pb.maps;
    return f;
}

// F(X) = M^vee (x)_A X over B (x) A^op, for X over A^e.
FunctorData s2_functor(const PerfectBimodule& dualm, const AlgebraPtr& bopa,
                       const AlgebraPtr& env_a, const FormData& fda, const FormData& fdb) {
    AlgebraPtr b = dualm.m.A, a = dualm.m.B;
    const int na = a->n, nb = b->n;
    FunctorData f;
    f.factor_first = true;
    f.p = dualm;
    f.cp = b;
    f.fd_cp = fdb;
    f.ebal = a;
    f.cout = bopa;
    f.dsrc = env_a;
    f.nres = na;
    f.p_cp = dualm.m.lact;   // left-B
    f.p_bal = dualm.m.ract;  // right-A, balanced against the left part of A^e
    for (int d = 0; d < na; ++d) f.bal_emb.push_back(kron(Mat::unit_vec(na, d), a->unit));
    for (int l = 0; l < na; ++l) f.res_emb.push_back(kron(a->unit, Mat::unit_vec(na, l)));
    f.res_lmul = a->rmul;  // residual algebra is A^op
    f.res_unit = a->unit;
    f.src_index = [na](int k, int l) { return k * na + l; };
    f.out_index = [na](int m, int l) { return m * na + l; };
    f.n_pout = nb;
    f.pb_elements = dualm.left_pb.elements;
    f.pb_maps = dualm.left_pb.maps;
    f.bal_pb_elements = dualm.right_pb.elements;
    f.bal_pb_maps = dualm.right_pb.maps;
    return f;
}

}  // namespace

Mat HochschildTransfer::transfer(int n, const Mat& tau) {
    const Tensor2& t0 = t3->functor_tensor(0);
    Mat ftau = t3->apply_functor(0, n, tau);
    // iota : A -> t3.level(0), bimodule map with 1 |-> sum_j (m_j (x) t beta_j) (x) 1_B
    Mat v1(t0.rank, 1);
    for (size_t j = 0; j < pm.right_pb.elements.size(); ++j)
        v1 += t0.proj * kron(kron(pm.right_pb.elements[j],
                                  pm.right_pb.maps[j].transpose() * fdb.form.s),
                             b->unit);
    const Lattice& lvl0 = t3->level(0);
    Mat iota(t0.rank, a->n);
    for (int i = 0; i < a->n; ++i)
        iota.set_col(i, lvl0.action_of(kron(Mat::unit_vec(a->n, i), a->unit)) * v1);
    auto it = g_shift.find(n);
    if (it == g_shift.end()) it = g_shift.emplace(n, shift_map(*t3, 0, *ta, 0, g0, n)).first;
    return it->second * ftau * iota;
}

Mat HochschildTransfer::transfer_via_bimodule_hom(int n, const Mat& tau) {
    const int rm = pm.m.rank;
    // iota1 : M^vee -> s1.level(0) = B (x)_B M^vee, phi |-> 1 (x) phi
    const Tensor2& s1t0 = s1->functor_tensor(0);
    Mat iota1(s1t0.rank, rm);
    for (int c = 0; c < rm; ++c)
        iota1.set_col(c, s1t0.proj * kron(b->unit, Mat::unit_vec(rm, c)));
    Mat zeta = s1->apply_functor(0, n, tau) * iota1;  // M^vee -> s1.level(n)
    auto it = chi_shift.find(n);
    if (it == chi_shift.end()) it = chi_shift.emplace(n, shift_map(*s1, 0, *s2, 0, chi0, n)).first;
    Mat beta = it->second * zeta;  // M^vee -> s2.level(n)
    // bimodule transfer tr_M with (U, V) = (A, X), X = ta.level(n)
    const Lattice& x = ta->level(n);
    const Tensor2& s2tn = s2->functor_tensor(n);
    Mat sect_n = s2tn.sect;
    Mat e2 = s2->entry_iso(n);
    if (e2.rows()) sect_n = sect_n * invert(e2);
    Mat betafree = sect_n * beta;  // free (phi, x) coordinates per M^vee basis column
    std::vector<Mat> left_eta(rm * rm);
    for (int i = 0; i < rm * rm; ++i)
        left_eta[i] = x.action_of(kron(adj.eta_m_free.col(i), a->unit));
    Mat mmv_free = adj.mmv.sect * adj.eps_mv;  // free (m, phi) coords per A-basis column
    Mat out(x.rank, a->n);
    for (int i = 0; i < a->n; ++i) {
        Mat col(x.rank, 1);
        for (int am = 0; am < rm; ++am)
            for (int cphi = 0; cphi < rm; ++cphi) {
                const Rat& w0 = mmv_free.at(am * rm + cphi, i);
                if (w0 == 0) continue;
                for (int cphi2 = 0; cphi2 < rm; ++cphi2) {
                    Mat w(x.rank, 1);
                    bool nz = false;
                    for (int r = 0; r < x.rank; ++r) {
                        const Rat& y = betafree.at(cphi2 * x.rank + r, cphi);
                        if (y != 0) {
                            w.at(r, 0) = y * w0;
                            nz = true;
                        }
                    }
                    if (nz) col += left_eta[am * rm + cphi2] * w;
                }
            }
        out.set_col(i, col);
    }
    return out;
}

HochschildTransfer make_hochschild_transfer(const AlgebraPtr& a, const FormData& fda,
                                            const AlgebraPtr& b, const FormData& fdb,
                                            const Bimodule& m, const TowerPtr& ta,
                                            const TowerPtr& tb) {
    HochschildTransfer h;
    h.a = a;
    h.b = b;
    h.fda = fda;
    h.fdb = fdb;
    h.env_a = ta->E;
    h.env_b = tb->E;
    h.fdae = ta->efd;
    h.fdbe = tb->efd;
    h.ta = ta;
    h.tb = tb;
    auto pm = make_perfect(m);
    if (!pm) throw error("make_hochschild_transfer: bimodule is not perfect");
    h.pm = *pm;
    h.adj = adjunction_data(h.pm, fda, fdb);

    PerfectBimodule dualm = dual_perfect(h.pm, fda, fdb);
    PerfectBimodule n = box_perfect(h.pm, flip_perfect(dualm));
    retag(n, h.env_a, h.env_b);
    h.t3 = tensor_tower(n, h.fdae, h.fdbe, tb);

    // g0 : t3.level(0) = (M box M^vee) (x)_{B^e} B -> A, absorb B then eta_M
    {
        const Tensor2& t0 = h.t3->functor_tensor(0);
        const int rm = h.pm.m.rank;
        Mat absfree(h.adj.mmv.rank, rm * rm * b->n);
        for (int cm = 0; cm < rm; ++cm)
            for (int cphi = 0; cphi < rm; ++cphi)
                for (int cb = 0; cb < b->n; ++cb) {
                    Mat v = h.adj.mmv.proj *
                            kron(h.pm.m.ract[cb].col(cm), Mat::unit_vec(rm, cphi));
                    absfree.set_col((cm * rm + cphi) * b->n + cb, v);
                }
        h.g0 = h.adj.eta_m * absfree * t0.sect;
    }

    AlgebraPtr bopa = tensor_algebra(b, opposite(a));
    FormData fd_bopa = make_form_data(*bopa, tensor_form(fdb.form, fda.form));
    h.s1 = tensor_tower(s1_functor(dualm, bopa, h.env_b, fda, fdb), fd_bopa, fdb, tb);
    h.s2 = tensor_tower(s2_functor(dualm, bopa, h.env_a, fda, fdb), fd_bopa, fda, ta);

    // chi0 : s1.level(0) -> s2.level(0), both canonically M^vee
    {
        const int rm = h.pm.m.rank;
        const Tensor2& t1 = h.s1->functor_tensor(0);
        const Tensor2& t2 = h.s2->functor_tensor(0);
        // absorb s1.level(0) = B (x)_B M^vee -> M^vee : y (x) phi |-> y . phi
        Mat absfree(rm, b->n * rm);
        for (int cy = 0; cy < b->n; ++cy)
            for (int cphi = 0; cphi < rm; ++cphi)
                absfree.set_col(cy * rm + cphi,
                                h.pm.m.ract[cy].transpose() * Mat::unit_vec(rm, cphi));
        Mat abs1 = absfree * t1.sect;
        Mat iota2(t2.rank, rm);
        for (int c = 0; c < rm; ++c)
            iota2.set_col(c, t2.proj * kron(Mat::unit_vec(rm, c), a->unit));
        h.chi0 = iota2 * abs1;
    }
    return h;
}

}  // namespace tate
