// Small dense linear algebra for state spaces of dimension <= 12.
// Everything lives on the stack; no heap allocation anywhere.
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace nhep::linalg {

inline constexpr int kMaxDim = 12;

/// Stack-allocated real vector with runtime dimension n <= kMaxDim.
class VecX {
public:
    VecX() = default;
    explicit VecX(int n);
    VecX(std::initializer_list<double> xs);

    static VecX zero(int n) { return VecX(n); }

    int size() const { return n_; }
    double operator[](int i) const { return a_[static_cast<size_t>(i)]; }
    double& operator[](int i) { return a_[static_cast<size_t>(i)]; }

    VecX& operator+=(const VecX& o);
    VecX& operator-=(const VecX& o);
    VecX& operator*=(double s);

    double dot(const VecX& o) const;
    double norm() const;
    double norm_inf() const;

    /// Slice [lo, lo+len).
    VecX segment(int lo, int len) const;

private:
    int n_ = 0;
    std::array<double, kMaxDim> a_{};
};

VecX operator+(VecX a, const VecX& b);
VecX operator-(VecX a, const VecX& b);
VecX operator*(double s, VecX a);
VecX operator*(VecX a, double s);

/// Stack-allocated real matrix with runtime shape, each dim <= kMaxDim.
class MatX {
public:
    MatX() = default;
    MatX(int rows, int cols);

    static MatX zero(int rows, int cols) { return MatX(rows, cols); }
    static MatX identity(int n);

    int rows() const { return r_; }
    int cols() const { return c_; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i * kMaxDim + j)]; }
    double& operator()(int i, int j) { return a_[static_cast<size_t>(i * kMaxDim + j)]; }

    MatX transposed() const;
    VecX col(int j) const;
    VecX row(int i) const;
    void set_col(int j, const VecX& v);

    MatX& operator+=(const MatX& o);
    MatX& operator-=(const MatX& o);
    MatX& operator*=(double s);

    /// Submatrix rows [r0, r0+nr) x cols [c0, c0+nc).
    MatX block(int r0, int c0, int nr, int nc) const;

    double norm_inf() const;  // max row sum
    double norm_one() const;  // max column sum
    double max_abs() const;

private:
    int r_ = 0, c_ = 0;
    std::array<double, kMaxDim * kMaxDim> a_{};
};

MatX operator+(MatX a, const MatX& b);
MatX operator-(MatX a, const MatX& b);
MatX operator*(double s, MatX a);
MatX operator*(const MatX& a, const MatX& b);
VecX operator*(const MatX& a, const VecX& x);

/// LU decomposition with partial pivoting.
class Lu {
public:
    explicit Lu(const MatX& a);

    bool singular() const { return singular_; }
    /// 1-norm reciprocal condition estimate (exact inverse, n is tiny).
    double rcond() const { return rcond_; }
    VecX solve(const VecX& b) const;
    MatX solve(const MatX& b) const;
    MatX inverse() const;
    double det() const;

private:
    int n_ = 0;
    MatX lu_;
    std::array<int, kMaxDim> piv_{};
    bool singular_ = false;
    double rcond_ = 0.0;
    double anorm_ = 0.0;
};

/// Cholesky solve for symmetric positive definite systems.
/// Returns false (and leaves x untouched) when the matrix is not SPD.
bool solve_spd(const MatX& a, const VecX& b, VecX& x);

/// Orthonormal basis of the null space of `a` (rows are constraint gradients).
/// Rank is decided by column-pivoted QR of a^T with threshold rank_tol * max|R|.
/// Returns an n x (n - rank) matrix whose columns span ker a.
MatX nullspace(const MatX& a, double rank_tol = 1e-10);

/// Eigenvalues of a general real square matrix via Hessenberg reduction and
/// Francis double-shift QR. Dimension <= kMaxDim. Throws std::runtime_error
/// when the iteration cap (100 n^2) is exhausted.
std::vector<std::complex<double>> eigenvalues(const MatX& a);

/// Eigenvalues of a symmetric matrix via cyclic Jacobi, ascending order.
std::vector<double> sym_eigenvalues(const MatX& a);

}  // namespace nhep::linalg
