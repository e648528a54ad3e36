#include "tate/algebra.hpp"

#include <set>
#include <sstream>

namespace tate {

namespace {

size_t hash_mat(size_t seed, const Mat& m) {
    std::hash<std::string> h;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (m.at(i, j) != 0)
                seed ^= h(m.at(i, j).get_str()) + 0x9e3779b9 + (seed << 6) + (seed >> 2) +
                        size_t(i * 131 + j);
    return seed;
}

size_t structural_hash(const Algebra& a) {
    size_t s = std::hash<long>()(a.p) * 31 + a.n;
    for (const auto& m : a.lmul) s = hash_mat(s, m);
    s = hash_mat(s, a.unit);
    return s;
}

std::shared_ptr<Algebra> finish(std::shared_ptr<Algebra> a) {
    a->hash = structural_hash(*a);
    return a;
}

}  // namespace

Mat Algebra::mul(const Mat& x, const Mat& y) const { return left_action(x) * y; }

Mat Algebra::left_action(const Mat& x) const {
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        if (x.at(i, 0) != 0) m.add_scaled(lmul[i], x.at(i, 0));
    return m;
}

Mat Algebra::right_action(const Mat& x) const {
    Mat m(n, n);
    for (int j = 0; j < n; ++j)
        if (x.at(j, 0) != 0) m.add_scaled(rmul[j], x.at(j, 0));
    return m;
}

bool Algebra::same_as(const Algebra& o) const {
    if (this == &o) return true;
    if (p != o.p || n != o.n || hash != o.hash) return false;
    return unit == o.unit && lmul == o.lmul;
}

std::string ValidationReport::str() const {
    std::ostringstream os;
    for (const auto& s : issues) os << s << "\n";
    return os.str();
}

AlgebraPtr algebra_from_structure(long p, const std::vector<std::vector<Mat>>& structure,
                                  const Mat& unit, std::string name) {
    auto a = std::make_shared<Algebra>();
    a->p = p;
    a->n = int(structure.size());
    a->unit = unit;
    a->name = std::move(name);
    a->lmul.assign(a->n, Mat(a->n, a->n));
    a->rmul.assign(a->n, Mat(a->n, a->n));
    for (int i = 0; i < a->n; ++i) {
        if (int(structure[i].size()) != a->n) throw error("algebra_from_structure: ragged table");
        for (int j = 0; j < a->n; ++j) {
            const Mat& c = structure[i][j];
            if (c.rows() != a->n || c.cols() != 1)
                throw error("algebra_from_structure: bad product vector shape");
            for (int k = 0; k < a->n; ++k) {
                a->lmul[i].at(k, j) = c.at(k, 0);
                a->rmul[j].at(k, i) = c.at(k, 0);
            }
        }
    }
    for (int i = 0; i < a->n; ++i) a->gens.push_back(Mat::unit_vec(a->n, i));
    return finish(a);
}

namespace {

// Closure of a subset of group-element indices under the table.
std::set<int> subgroup_closure(const std::vector<std::vector<int>>& t, std::set<int> s) {
    s.insert(0);
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<int> cur(s.begin(), s.end());
        for (int a : cur)
            for (int b : cur)
                if (s.insert(t[a][b]).second) grew = true;
    }
    return s;
}

}  // namespace

AlgebraPtr group_algebra(long p, const std::vector<std::vector<int>>& t, std::string name) {
    const int n = int(t.size());
    if (n == 0) throw error("group_algebra: empty table");
    for (const auto& row : t) {
        if (int(row.size()) != n) throw error("group_algebra: ragged table");
        for (int x : row)
            if (x < 0 || x >= n) throw error("group_algebra: entry out of range");
    }
    for (int j = 0; j < n; ++j)
        if (t[0][j] != j || t[j][0] != j)
            throw error("group_algebra: index 0 is not an identity element");
    for (int i = 0; i < n; ++i) {
        std::vector<char> seen_row(n, 0), seen_col(n, 0);
        bool has_inv = false;
        for (int j = 0; j < n; ++j) {
            seen_row[t[i][j]] = 1;
            seen_col[t[j][i]] = 1;
            if (t[i][j] == 0) has_inv = true;
        }
        for (int j = 0; j < n; ++j)
            if (!seen_row[j] || !seen_col[j])
                throw error("group_algebra: row/column " + std::to_string(i) +
                            " is not a permutation");
        if (!has_inv) throw error("group_algebra: element has no inverse");
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (t[t[i][j]][k] != t[i][t[j][k]])
                    throw error("group_algebra: table not associative at (" + std::to_string(i) +
                                "," + std::to_string(j) + "," + std::to_string(k) + ")");

    auto a = std::make_shared<Algebra>();
    a->p = p;
    a->n = n;
    a->name = std::move(name);
    a->unit = Mat::unit_vec(n, 0);
    a->lmul.assign(n, Mat(n, n));
    a->rmul.assign(n, Mat(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a->lmul[i].at(t[i][j], j) = 1;
            a->rmul[j].at(t[i][j], i) = 1;
        }
    // Greedy generating set for the group.
    std::set<int> closure = subgroup_closure(t, {});
    std::vector<int> gen_idx;
    for (int g = 1; g < n; ++g) {
        if (closure.count(g)) continue;
        gen_idx.push_back(g);
        std::set<int> s(gen_idx.begin(), gen_idx.end());
        closure = subgroup_closure(t, s);
    }
    if (gen_idx.empty()) gen_idx.push_back(0);
    for (int g : gen_idx) a->gens.push_back(Mat::unit_vec(n, g));
    return finish(a);
}

AlgebraPtr matrix_algebra(long p, int d) {
    if (d < 1) throw error("matrix_algebra: d must be >= 1");
    const int n = d * d;
    auto a = std::make_shared<Algebra>();
    a->p = p;
    a->n = n;
    a->name = "M_" + std::to_string(d);
    a->unit = Mat(n, 1);
    for (int i = 0; i < d; ++i) a->unit.at(i * d + i, 0) = 1;
    a->lmul.assign(n, Mat(n, n));
    a->rmul.assign(n, Mat(n, n));
    // E_ij E_kl = delta_jk E_il
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int l = 0; l < d; ++l) {
                a->lmul[i * d + j].at(i * d + l, j * d + l) = 1;
                a->rmul[j * d + l].at(i * d + l, i * d + j) = 1;
            }
    if (d == 1) {
        a->gens.push_back(a->unit);
    } else {
        Mat cyc(n, 1);  // permutation matrix of the d-cycle
        for (int i = 0; i < d; ++i) cyc.at(((i + 1) % d) * d + i, 0) = 1;
        a->gens.push_back(cyc);
        a->gens.push_back(Mat::unit_vec(n, 0));  // E_00
    }
    return finish(a);
}

AlgebraPtr opposite(const AlgebraPtr& a) {
    auto o = std::make_shared<Algebra>();
    o->p = a->p;
    o->n = a->n;
    o->name = a->name + "^op";
    o->unit = a->unit;
    o->lmul = a->rmul;
    o->rmul = a->lmul;
    o->gens = a->gens;
    return finish(o);
}

AlgebraPtr tensor_algebra(const AlgebraPtr& a, const AlgebraPtr& b) {
    if (a->p != b->p) throw error("tensor_algebra: prime mismatch");
    auto t = std::make_shared<Algebra>();
    t->p = a->p;
    t->n = a->n * b->n;
    t->name = a->name + "(x)" + b->name;
    t->unit = kron(a->unit, b->unit);
    t->lmul.reserve(t->n);
    t->rmul.reserve(t->n);
    for (int i = 0; i < a->n; ++i)
        for (int j = 0; j < b->n; ++j) {
            t->lmul.push_back(kron(a->lmul[i], b->lmul[j]));
            t->rmul.push_back(kron(a->rmul[i], b->rmul[j]));
        }
    for (const auto& g : a->gens) t->gens.push_back(kron(g, b->unit));
    for (const auto& g : b->gens) t->gens.push_back(kron(a->unit, g));
    return finish(t);
}

AlgebraPtr direct_product(const AlgebraPtr& a, const AlgebraPtr& b) {
    if (a->p != b->p) throw error("direct_product: prime mismatch");
    auto t = std::make_shared<Algebra>();
    t->p = a->p;
    t->n = a->n + b->n;
    t->name = a->name + "x" + b->name;
    auto embed = [&](const Mat& x, bool first) {
        Mat v(t->n, 1);
        int off = first ? 0 : a->n;
        for (int i = 0; i < x.rows(); ++i) v.at(off + i, 0) = x.at(i, 0);
        return v;
    };
    t->unit = embed(a->unit, true) + embed(b->unit, false);
    auto block = [&](const Mat& m, bool first) {
        Mat r(t->n, t->n);
        int off = first ? 0 : a->n;
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) r.at(off + i, off + j) = m.at(i, j);
        return r;
    };
    for (int i = 0; i < a->n; ++i) t->lmul.push_back(block(a->lmul[i], true));
    for (int i = 0; i < b->n; ++i) t->lmul.push_back(block(b->lmul[i], false));
    for (int i = 0; i < a->n; ++i) t->rmul.push_back(block(a->rmul[i], true));
    for (int i = 0; i < b->n; ++i) t->rmul.push_back(block(b->rmul[i], false));
    for (const auto& g : a->gens) t->gens.push_back(embed(g, true));
    for (const auto& g : b->gens) t->gens.push_back(embed(g, false));
    t->gens.push_back(embed(a->unit, true));
    return finish(t);
}

AlgebraPtr enveloping(const AlgebraPtr& a) { return tensor_algebra(a, opposite(a)); }

ValidationReport validate_algebra(const Algebra& a) {
    ValidationReport r;
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) {
            // (e_i e_j) x = e_i (e_j x) as matrices
            Mat lhs = a.left_action(a.lmul[i].col(j));
            Mat rhs = a.lmul[i] * a.lmul[j];
            if (lhs != rhs)
                r.issues.push_back("associativity fails at basis pair (" + std::to_string(i) +
                                   "," + std::to_string(j) + ")");
        }
    if (a.left_action(a.unit) != Mat::identity(a.n)) r.issues.push_back("unit is not a left unit");
    if (a.right_action(a.unit) != Mat::identity(a.n))
        r.issues.push_back("unit is not a right unit");
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j)
            if (a.lmul[i].col(j) != a.rmul[j].col(i)) {
                r.issues.push_back("left/right structure constants disagree");
                return r;
            }
    return r;
}

Form group_form(const Algebra& a) {
    Form f;
    f.s = Mat::unit_vec(a.n, 0);
    return f;
}

Form matrix_trace_form(const Algebra& a) {
    int d = 1;
    while (d * d < a.n) ++d;
    if (d * d != a.n) throw error("matrix_trace_form: rank is not a square");
    Form f;
    f.s = Mat(a.n, 1);
    for (int i = 0; i < d; ++i) f.s.at(i * d + i, 0) = 1;
    return f;
}

Form opposite_form(const Form& s) { return s; }

Form tensor_form(const Form& s, const Form& t) { return {kron(s.s, t.s)}; }

Form product_form(const Form& s, const Form& t) { return {vcat(s.s, t.s)}; }

Form scale_form(const Form& s, const Rat& lambda) { return {s.s * lambda}; }

namespace {

Mat gram_matrix(const Algebra& a, const Form& f) {
    Mat g(a.n, a.n);
    for (int i = 0; i < a.n; ++i) {
        Mat row = f.s.transpose() * a.lmul[i];  // s(e_i e_j)
        for (int j = 0; j < a.n; ++j) g.at(i, j) = row.at(0, j);
    }
    return g;
}

}  // namespace

ValidationReport validate_form(const Algebra& a, const Form& f) {
    ValidationReport r;
    if (f.s.rows() != a.n || f.s.cols() != 1) {
        r.issues.push_back("form has wrong length");
        return r;
    }
    Mat g = gram_matrix(a, f);
    if (g != g.transpose()) r.issues.push_back("form is not symmetric");
    if (!g.is_p_integral(a.p)) r.issues.push_back("Gram matrix not defined over O");
    auto exps = smith_exponents(g, a.p);
    if (int(exps.size()) < a.n)
        r.issues.push_back("Gram matrix singular");
    else
        for (long e : exps)
            if (e != 0) {
                r.issues.push_back("Gram matrix not invertible over O (det valuation " +
                                   std::to_string([&] {
                                       long t = 0;
                                       for (long x : exps) t += x;
                                       return t;
                                   }()) + ")");
                break;
            }
    return r;
}

FormData make_form_data(const Algebra& a, const Form& f) {
    auto rep = validate_form(a, f);
    if (!rep.ok()) throw error("make_form_data: invalid symmetrising form: " + rep.str());
    FormData fd;
    fd.form = f;
    fd.gram = gram_matrix(a, f);
    fd.gram_inv = invert(fd.gram);
    fd.z = Mat(a.n, 1);
    for (int j = 0; j < a.n; ++j) fd.z += a.lmul[j] * fd.gram_inv.col(j);
    return fd;
}

std::vector<Mat> dual_basis(const Algebra& a, const FormData& fd) {
    std::vector<Mat> d;
    d.reserve(a.n);
    for (int j = 0; j < a.n; ++j) d.push_back(fd.gram_inv.col(j));
    return d;
}

Mat center(const Algebra& a) {
    Mat stacked(0, a.n);
    for (const auto& g : a.gens)
        stacked = vcat(stacked, a.left_action(g) - a.right_action(g));
    return kernel_lattice(stacked, a.p);
}

bool check_K_semisimple(const Algebra& a) {
    Mat t(a.n, a.n);
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) t.at(i, j) = (a.lmul[i] * a.lmul[j]).trace();
    return kernel_lattice(t, a.p).cols() == 0;
}

}  // namespace tate
