#include "tate/linalg.hpp"

namespace tate {

namespace {

size_t rat_size(const Rat& x) {
    return mpz_sizeinbase(x.get_num().get_mpz_t(), 2) + mpz_sizeinbase(x.get_den().get_mpz_t(), 2);
}

struct ColEch {
    Mat R, T;
    std::vector<int> pivot_col, pivot_row;
};

// Column echelon form by O-unimodular column operations (min-valuation pivots).
ColEch col_echelon(const Mat& a, long p, bool want_T) {
    const int m = a.rows(), n = a.cols();
    ColEch e{a, want_T ? Mat::identity(n) : Mat(), {}, {}};
    std::vector<char> coldone(n, 0), rowdone(m, 0);
    while (true) {
        int pi = -1, pj = -1;
        long bestv = kValInfinity;
        size_t bests = 0;
        for (int j = 0; j < n; ++j) {
            if (coldone[j]) continue;
            for (int i = 0; i < m; ++i) {
                if (rowdone[i]) continue;
                const Rat& x = e.R.at(i, j);
                if (x == 0) continue;
                long v = valuation(x, p);
                size_t s = rat_size(x);
                if (v < bestv || (v == bestv && s < bests)) {
                    bestv = v;
                    bests = s;
                    pi = i;
                    pj = j;
                }
            }
        }
        if (pi < 0) break;
        const Rat piv = e.R.at(pi, pj);
        for (int j = 0; j < n; ++j) {
            if (j == pj || coldone[j]) continue;
            const Rat& x = e.R.at(pi, j);
            if (x == 0) continue;
            Rat f = x / piv;
            for (int i = 0; i < m; ++i) {
                const Rat& y = e.R.at(i, pj);
                if (y != 0) e.R.at(i, j) -= f * y;
            }
            if (want_T)
                for (int i = 0; i < n; ++i) {
                    const Rat& y = e.T.at(i, pj);
                    if (y != 0) e.T.at(i, j) -= f * y;
                }
        }
        coldone[pj] = 1;
        rowdone[pi] = 1;
        e.pivot_col.push_back(pj);
        e.pivot_row.push_back(pi);
    }
    return e;
}

}  // namespace

Mat kernel_lattice(const Mat& a, long p) {
    ColEch e = col_echelon(a, p, true);
    std::vector<char> ispiv(a.cols(), 0);
    for (int j : e.pivot_col) ispiv[j] = 1;
    Mat k(a.cols(), a.cols() - int(e.pivot_col.size()));
    int out = 0;
    for (int j = 0; j < a.cols(); ++j) {
        if (ispiv[j]) continue;
        for (int i = 0; i < a.cols(); ++i) k.at(i, out) = e.T.at(i, j);
        ++out;
    }
    return k;
}

Mat left_kernel(const Mat& a, long p) { return kernel_lattice(a.transpose(), p).transpose(); }

Mat saturate(const Mat& s, long p) {
    Mat lk = left_kernel(s, p);
    return kernel_lattice(lk, p);
}

Mat image_basis(const Mat& s, long p) {
    ColEch e = col_echelon(s, p, false);
    Mat b(s.rows(), int(e.pivot_col.size()));
    for (size_t k = 0; k < e.pivot_col.size(); ++k)
        for (int i = 0; i < s.rows(); ++i) b.at(i, int(k)) = e.R.at(i, e.pivot_col[k]);
    return b;
}

std::optional<Mat> solve_over_O(const Mat& a, const Mat& b, long p) {
    if (a.rows() != b.rows()) throw error("solve_over_O: shape mismatch");
    Mat r = a, c = b;
    const int m = a.rows(), n = a.cols();
    std::vector<char> rowdone(m, 0), coldone(n, 0);
    std::vector<std::pair<int, int>> piv;
    while (true) {
        int pi = -1, pj = -1;
        long bestv = kValInfinity;
        size_t bests = 0;
        for (int i = 0; i < m; ++i) {
            if (rowdone[i]) continue;
            for (int j = 0; j < n; ++j) {
                if (coldone[j]) continue;
                const Rat& x = r.at(i, j);
                if (x == 0) continue;
                long v = valuation(x, p);
                size_t s = rat_size(x);
                if (v < bestv || (v == bestv && s < bests)) {
                    bestv = v;
                    bests = s;
                    pi = i;
                    pj = j;
                }
            }
        }
        if (pi < 0) break;
        const Rat piv_val = r.at(pi, pj);
        for (int i = 0; i < m; ++i) {
            if (i == pi) continue;
            const Rat& x = r.at(i, pj);
            if (x == 0) continue;
            Rat f = x / piv_val;
            for (int j = 0; j < n; ++j) {
                const Rat& y = r.at(pi, j);
                if (y != 0) r.at(i, j) -= f * y;
            }
            for (int j = 0; j < c.cols(); ++j) {
                const Rat& y = c.at(pi, j);
                if (y != 0) c.at(i, j) -= f * y;
            }
        }
        rowdone[pi] = 1;
        coldone[pj] = 1;
        piv.push_back({pi, pj});
    }
    for (int i = 0; i < m; ++i) {
        if (rowdone[i]) continue;
        for (int j = 0; j < c.cols(); ++j)
            if (c.at(i, j) != 0) return std::nullopt;
    }
    Mat x(n, c.cols());
    for (auto [i, j] : piv) {
        const Rat& pv = r.at(i, j);
        for (int k = 0; k < c.cols(); ++k) {
            if (c.at(i, k) == 0) continue;
            Rat q = c.at(i, k) / pv;
            if (!is_p_integral(q, p)) return std::nullopt;
            x.at(j, k) = q;
        }
    }
    return x;
}

Mat solve_exact(const Mat& a, const Mat& b, long p) {
    auto x = solve_over_O(a, b, p);
    if (!x) throw error("solve_exact: system not solvable over O");
    return *x;
}

Mat invert(const Mat& a) {
    if (a.rows() != a.cols()) throw error("invert: non-square");
    const int n = a.rows();
    Mat r = a, inv = Mat::identity(n);
    std::vector<char> rowdone(n, 0), coldone(n, 0);
    for (int step = 0; step < n; ++step) {
        int pi = -1, pj = -1;
        size_t bests = 0;
        for (int i = 0; i < n; ++i) {
            if (rowdone[i]) continue;
            for (int j = 0; j < n; ++j) {
                if (coldone[j]) continue;
                const Rat& x = r.at(i, j);
                if (x == 0) continue;
                size_t s = rat_size(x);
                if (pi < 0 || s < bests) {
                    bests = s;
                    pi = i;
                    pj = j;
                }
            }
        }
        if (pi < 0) throw error("invert: singular matrix");
        const Rat pv = r.at(pi, pj);
        for (int i = 0; i < n; ++i) {
            if (i == pi) continue;
            const Rat& x = r.at(i, pj);
            if (x == 0) continue;
            Rat f = x / pv;
            for (int j = 0; j < n; ++j) {
                const Rat& y = r.at(pi, j);
                if (y != 0) r.at(i, j) -= f * y;
            }
            for (int j = 0; j < n; ++j) {
                const Rat& y = inv.at(pi, j);
                if (y != 0) inv.at(i, j) -= f * y;
            }
        }
        rowdone[pi] = 1;
        coldone[pj] = 1;
    }
    // r is now a generalized permutation matrix; finish by scaling.
    Mat out(n, n);
    for (int i = 0; i < n; ++i) {
        int j = 0;
        while (r.at(i, j) == 0) ++j;
        for (int k = 0; k < n; ++k)
            if (inv.at(i, k) != 0) out.at(j, k) = inv.at(i, k) / r.at(i, j);
    }
    return out;
}

bool is_unimodular(const Mat& a, long p) {
    if (a.rows() != a.cols()) return false;
    auto e = smith_exponents(a, p);
    if (int(e.size()) != a.rows()) return false;
    for (long x : e)
        if (x != 0) return false;
    return true;
}

bool lattice_contains(const Mat& basis, const Mat& v, long p) {
    return solve_over_O(basis, v, p).has_value();
}

bool lattice_equal(const Mat& a, const Mat& b, long p) {
    if (a.rows() != b.rows()) return false;
    return lattice_contains(a, b, p) && lattice_contains(b, a, p);
}

SmithDecomposition smith_normal_form(const Mat& a, long p, bool want_transforms) {
    const int m = a.rows(), n = a.cols();
    SmithDecomposition s;
    s.diag = a;
    s.has_transforms = want_transforms;
    if (want_transforms) {
        s.left = Mat::identity(m);
        s.right = Mat::identity(n);
    }
    Mat& d = s.diag;
    const int steps = std::min(m, n);
    for (int k = 0; k < steps; ++k) {
        int pi = -1, pj = -1;
        long bestv = kValInfinity;
        size_t bests = 0;
        for (int i = k; i < m; ++i)
            for (int j = k; j < n; ++j) {
                const Rat& x = d.at(i, j);
                if (x == 0) continue;
                long v = valuation(x, p);
                size_t sz = rat_size(x);
                if (v < bestv || (v == bestv && sz < bests)) {
                    bestv = v;
                    bests = sz;
                    pi = i;
                    pj = j;
                }
            }
        if (pi < 0) break;
        if (pi != k) {  // swap rows pi, k
            for (int j = 0; j < n; ++j) std::swap(d.at(pi, j), d.at(k, j));
            if (want_transforms)
                for (int i = 0; i < m; ++i) std::swap(s.left.at(i, pi), s.left.at(i, k));
        }
        if (pj != k) {  // swap cols pj, k
            for (int i = 0; i < m; ++i) std::swap(d.at(i, pj), d.at(i, k));
            if (want_transforms)
                for (int j = 0; j < n; ++j) std::swap(s.right.at(pj, j), s.right.at(k, j));
        }
        Rat pk(pow_int(p, static_cast<unsigned long>(bestv)));
        Rat u = d.at(k, k) / pk;  // unit of O
        if (u != 1) {             // normalize pivot to p^v
            Rat uinv = 1 / u;
            for (int j = k; j < n; ++j)
                if (d.at(k, j) != 0) d.at(k, j) *= uinv;
            if (want_transforms)
                for (int i = 0; i < m; ++i)
                    if (s.left.at(i, k) != 0) s.left.at(i, k) *= u;
        }
        for (int i = k + 1; i < m; ++i) {
            const Rat& x = d.at(i, k);
            if (x == 0) continue;
            Rat f = x / pk;
            for (int j = k; j < n; ++j) {
                const Rat& y = d.at(k, j);
                if (y != 0) d.at(i, j) -= f * y;
            }
            if (want_transforms)
                for (int r = 0; r < m; ++r) {
                    Rat t = f * s.left.at(r, i);
                    if (t != 0) s.left.at(r, k) += t;
                }
        }
        for (int j = k + 1; j < n; ++j) {
            const Rat& x = d.at(k, j);
            if (x == 0) continue;
            Rat f = x / pk;
            d.at(k, j) = 0;  // column k has its only nonzero at row k
            if (want_transforms)
                for (int c2 = 0; c2 < n; ++c2) {
                    Rat t = f * s.right.at(j, c2);
                    if (t != 0) s.right.at(k, c2) += t;
                }
        }
        s.exponents.push_back(bestv);
        ++s.rank;
    }
    return s;
}

std::vector<long> smith_exponents(const Mat& a, long p) {
    return smith_normal_form(a, p, false).exponents;
}

QuotientData quotient_data(const Mat& s, long p) {
    const int n = s.rows(), r = s.cols();
    ColEch e = col_echelon(s, p, false);
    if (int(e.pivot_col.size()) != r) throw error("quotient_data: basis not independent");
    std::vector<char> used(n, 0);
    for (size_t k = 0; k < e.pivot_row.size(); ++k) {
        if (valuation(e.R.at(e.pivot_row[k], e.pivot_col[k]), p) != 0)
            throw error("quotient_data: sublattice not saturated");
        used[e.pivot_row[k]] = 1;
    }
    Mat full(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < r; ++j) full.at(i, j) = s.at(i, j);
    std::vector<int> comp;
    for (int i = 0; i < n; ++i)
        if (!used[i]) comp.push_back(i);
    for (size_t k = 0; k < comp.size(); ++k) full.at(comp[k], r + int(k)) = 1;
    Mat inv = invert(full);
    if (!inv.is_p_integral(p)) throw error("quotient_data: completion not unimodular");
    QuotientData q;
    q.proj = Mat(n - r, n);
    for (int i = 0; i < n - r; ++i)
        for (int j = 0; j < n; ++j) q.proj.at(i, j) = inv.at(r + i, j);
    q.sect = Mat(n, n - r);
    for (size_t k = 0; k < comp.size(); ++k) q.sect.at(comp[k], int(k)) = 1;
    return q;
}

}  // namespace tate
