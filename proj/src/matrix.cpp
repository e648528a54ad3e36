#include "tate/matrix.hpp"

#include <sstream>

namespace tate {

Mat::Mat(std::initializer_list<std::initializer_list<Rat>> rows) {
    r_ = int(rows.size());
    c_ = r_ ? int(rows.begin()->size()) : 0;
    a_.reserve(size_t(r_) * c_);
    for (const auto& row : rows) {
        if (int(row.size()) != c_) throw error("Mat: ragged initializer");
        for (const auto& x : row) a_.push_back(x);
    }
}

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

Mat Mat::col_vec(const std::vector<Rat>& v) {
    Mat m(int(v.size()), 1);
    for (size_t i = 0; i < v.size(); ++i) m.a_[i] = v[i];
    return m;
}

Mat Mat::unit_vec(int n, int i) {
    Mat m(n, 1);
    m.at(i, 0) = 1;
    return m;
}

bool Mat::is_zero() const {
    for (const auto& x : a_)
        if (x != 0) return false;
    return true;
}

Mat Mat::operator+(const Mat& o) const {
    Mat m = *this;
    m += o;
    return m;
}

Mat Mat::operator-(const Mat& o) const {
    Mat m = *this;
    m -= o;
    return m;
}

Mat& Mat::operator+=(const Mat& o) {
    if (r_ != o.r_ || c_ != o.c_) throw error("Mat: shape mismatch in +");
    for (size_t i = 0; i < a_.size(); ++i)
        if (o.a_[i] != 0) a_[i] += o.a_[i];
    return *this;
}

Mat& Mat::operator-=(const Mat& o) {
    if (r_ != o.r_ || c_ != o.c_) throw error("Mat: shape mismatch in -");
    for (size_t i = 0; i < a_.size(); ++i)
        if (o.a_[i] != 0) a_[i] -= o.a_[i];
    return *this;
}

void Mat::add_scaled(const Mat& o, const Rat& s) {
    if (r_ != o.r_ || c_ != o.c_) throw error("Mat: shape mismatch in add_scaled");
    if (s == 0) return;
    for (size_t i = 0; i < a_.size(); ++i)
        if (o.a_[i] != 0) a_[i] += s * o.a_[i];
}

Mat Mat::operator*(const Mat& o) const {
    if (c_ != o.r_) throw error("Mat: shape mismatch in *");
    Mat m(r_, o.c_);
    for (int i = 0; i < r_; ++i) {
        for (int k = 0; k < c_; ++k) {
            const Rat& x = at(i, k);
            if (x == 0) continue;
            const Rat* orow = &o.a_[size_t(k) * o.c_];
            Rat* mrow = &m.a_[size_t(i) * o.c_];
            for (int j = 0; j < o.c_; ++j)
                if (orow[j] != 0) mrow[j] += x * orow[j];
        }
    }
    return m;
}

Mat Mat::operator*(const Rat& s) const {
    Mat m(r_, c_);
    if (s == 0) return m;
    for (size_t i = 0; i < a_.size(); ++i)
        if (a_[i] != 0) m.a_[i] = a_[i] * s;
    return m;
}

Mat Mat::transpose() const {
    Mat m(c_, r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) m.at(j, i) = at(i, j);
    return m;
}

Rat Mat::trace() const {
    if (r_ != c_) throw error("Mat: trace of non-square");
    Rat t = 0;
    for (int i = 0; i < r_; ++i) t += at(i, i);
    return t;
}

Mat Mat::col(int j) const {
    Mat m(r_, 1);
    for (int i = 0; i < r_; ++i) m.at(i, 0) = at(i, j);
    return m;
}

Mat Mat::row(int i) const {
    Mat m(1, c_);
    for (int j = 0; j < c_; ++j) m.at(0, j) = at(i, j);
    return m;
}

void Mat::set_col(int j, const Mat& v) {
    if (v.rows() != r_ || v.cols() != 1) throw error("Mat: set_col shape");
    for (int i = 0; i < r_; ++i) at(i, j) = v.at(i, 0);
}

Mat Mat::cols_range(int j0, int j1) const {
    Mat m(r_, j1 - j0);
    for (int i = 0; i < r_; ++i)
        for (int j = j0; j < j1; ++j) m.at(i, j - j0) = at(i, j);
    return m;
}

Mat Mat::submatrix(const std::vector<int>& rows, const std::vector<int>& cols) const {
    Mat m(int(rows.size()), int(cols.size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j) m.at(int(i), int(j)) = at(rows[i], cols[j]);
    return m;
}

Mat Mat::select_rows(const std::vector<int>& rows) const {
    Mat m(int(rows.size()), c_);
    for (size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < c_; ++j) m.at(int(i), j) = at(rows[i], j);
    return m;
}

Mat Mat::vec() const {
    Mat m(r_ * c_, 1);
    for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i];
    return m;
}

Mat Mat::unvec(const Mat& v, int rows, int cols) {
    if (v.rows() != rows * cols || v.cols() != 1) throw error("Mat: unvec shape");
    Mat m(rows, cols);
    for (int i = 0; i < rows * cols; ++i) m.a_[i] = v.a_[i];
    return m;
}

bool Mat::is_p_integral(long p) const {
    for (const auto& x : a_)
        if (!tate::is_p_integral(x, p)) return false;
    return true;
}

std::string Mat::to_string() const {
    std::ostringstream os;
    for (int i = 0; i < r_; ++i) {
        os << (i ? "\n[" : "[");
        for (int j = 0; j < c_; ++j) os << (j ? " " : "") << rat_to_string(at(i, j));
        os << "]";
    }
    return os.str();
}

Mat hcat(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) throw error("hcat: shape mismatch");
    Mat m(a.rows(), a.cols() + b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) m.at(i, j) = a.at(i, j);
        for (int j = 0; j < b.cols(); ++j) m.at(i, a.cols() + j) = b.at(i, j);
    }
    return m;
}

Mat vcat(const Mat& a, const Mat& b) {
    if (a.cols() != b.cols()) throw error("vcat: shape mismatch");
    Mat m(a.rows() + b.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m.at(i, j) = a.at(i, j);
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) m.at(a.rows() + i, j) = b.at(i, j);
    return m;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat m(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const Rat& x = a.at(i, k);
            if (x == 0) continue;
            for (int j = 0; j < b.rows(); ++j)
                for (int l = 0; l < b.cols(); ++l) {
                    const Rat& y = b.at(j, l);
                    if (y != 0) m.at(i * b.rows() + j, k * b.cols() + l) = x * y;
                }
        }
    return m;
}

}  // namespace tate
