#pragma once

#include <initializer_list>
#include <vector>

#include "tate/rational.hpp"

namespace tate {

// Dense matrix over exact rationals, row major.
class Mat {
  public:
    Mat() = default;
    Mat(int rows, int cols) : r_(rows), c_(cols), a_(size_t(rows) * cols) {}
    Mat(std::initializer_list<std::initializer_list<Rat>> rows);

    static Mat identity(int n);
    static Mat zero(int rows, int cols) { return Mat(rows, cols); }
    static Mat col_vec(const std::vector<Rat>& v);
    // e_i as an n x 1 column
    static Mat unit_vec(int n, int i);

    int rows() const { return r_; }
    int cols() const { return c_; }

    Rat& at(int i, int j) { return a_[size_t(i) * c_ + j]; }
    const Rat& at(int i, int j) const { return a_[size_t(i) * c_ + j]; }

    bool is_zero() const;
    bool operator==(const Mat& o) const { return r_ == o.r_ && c_ == o.c_ && a_ == o.a_; }
    bool operator!=(const Mat& o) const { return !(*this == o); }

    Mat operator+(const Mat& o) const;
    Mat operator-(const Mat& o) const;
    Mat operator*(const Mat& o) const;
    Mat operator*(const Rat& s) const;
    Mat& operator+=(const Mat& o);
    Mat& operator-=(const Mat& o);
    // this += s * o, skipping zero entries of o
    void add_scaled(const Mat& o, const Rat& s);

    Mat transpose() const;
    Rat trace() const;

    Mat col(int j) const;
    Mat row(int i) const;
    void set_col(int j, const Mat& v);

    // Columns [j0, j1)
    Mat cols_range(int j0, int j1) const;
    Mat submatrix(const std::vector<int>& rows, const std::vector<int>& cols) const;
    Mat select_rows(const std::vector<int>& rows) const;

    // Row-major flattening of this matrix as a rows*cols x 1 column.
    Mat vec() const;
    static Mat unvec(const Mat& v, int rows, int cols);

    bool is_p_integral(long p) const;

    std::string to_string() const;

  private:
    int r_ = 0, c_ = 0;
    std::vector<Rat> a_;
};

Mat hcat(const Mat& a, const Mat& b);
Mat vcat(const Mat& a, const Mat& b);
// Kronecker product; index (i,j) |-> i*rows(b)+j, matching x (x) y |-> kron coords.
Mat kron(const Mat& a, const Mat& b);

}  // namespace tate
