#include "nhep/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace nhep::linalg {

VecX::VecX(int n) : n_(n) {
    assert(n >= 0 && n <= kMaxDim);
}

VecX::VecX(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())) {
    assert(n_ <= kMaxDim);
    int i = 0;
    for (double x : xs) a_[static_cast<size_t>(i++)] = x;
}

VecX& VecX::operator+=(const VecX& o) {
    assert(n_ == o.n_);
    for (int i = 0; i < n_; ++i) (*this)[i] += o[i];
    return *this;
}

VecX& VecX::operator-=(const VecX& o) {
    assert(n_ == o.n_);
    for (int i = 0; i < n_; ++i) (*this)[i] -= o[i];
    return *this;
}

VecX& VecX::operator*=(double s) {
    for (int i = 0; i < n_; ++i) (*this)[i] *= s;
    return *this;
}

double VecX::dot(const VecX& o) const {
    assert(n_ == o.n_);
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += (*this)[i] * o[i];
    return s;
}

double VecX::norm() const { return std::sqrt(dot(*this)); }

double VecX::norm_inf() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s = std::max(s, std::fabs((*this)[i]));
    return s;
}

VecX VecX::segment(int lo, int len) const {
    assert(lo >= 0 && lo + len <= n_);
    VecX out(len);
    for (int i = 0; i < len; ++i) out[i] = (*this)[lo + i];
    return out;
}

VecX operator+(VecX a, const VecX& b) { return a += b; }
VecX operator-(VecX a, const VecX& b) { return a -= b; }
VecX operator*(double s, VecX a) { return a *= s; }
VecX operator*(VecX a, double s) { return a *= s; }

MatX::MatX(int rows, int cols) : r_(rows), c_(cols) {
    assert(rows >= 0 && rows <= kMaxDim && cols >= 0 && cols <= kMaxDim);
}

MatX MatX::identity(int n) {
    MatX m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

MatX MatX::transposed() const {
    MatX t(c_, r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

VecX MatX::col(int j) const {
    VecX v(r_);
    for (int i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
}

VecX MatX::row(int i) const {
    VecX v(c_);
    for (int j = 0; j < c_; ++j) v[j] = (*this)(i, j);
    return v;
}

void MatX::set_col(int j, const VecX& v) {
    assert(v.size() == r_);
    for (int i = 0; i < r_; ++i) (*this)(i, j) = v[i];
}

MatX& MatX::operator+=(const MatX& o) {
    assert(r_ == o.r_ && c_ == o.c_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) (*this)(i, j) += o(i, j);
    return *this;
}

MatX& MatX::operator-=(const MatX& o) {
    assert(r_ == o.r_ && c_ == o.c_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) (*this)(i, j) -= o(i, j);
    return *this;
}

MatX& MatX::operator*=(double s) {
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) (*this)(i, j) *= s;
    return *this;
}

MatX MatX::block(int r0, int c0, int nr, int nc) const {
    assert(r0 + nr <= r_ && c0 + nc <= c_);
    MatX b(nr, nc);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
}

double MatX::norm_inf() const {
    double m = 0.0;
    for (int i = 0; i < r_; ++i) {
        double s = 0.0;
        for (int j = 0; j < c_; ++j) s += std::fabs((*this)(i, j));
        m = std::max(m, s);
    }
    return m;
}

double MatX::norm_one() const {
    double m = 0.0;
    for (int j = 0; j < c_; ++j) {
        double s = 0.0;
        for (int i = 0; i < r_; ++i) s += std::fabs((*this)(i, j));
        m = std::max(m, s);
    }
    return m;
}

double MatX::max_abs() const {
    double m = 0.0;
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) m = std::max(m, std::fabs((*this)(i, j)));
    return m;
}

MatX operator+(MatX a, const MatX& b) { return a += b; }
MatX operator-(MatX a, const MatX& b) { return a -= b; }
MatX operator*(double s, MatX a) { return a *= s; }

MatX operator*(const MatX& a, const MatX& b) {
    assert(a.cols() == b.rows());
    MatX c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

VecX operator*(const MatX& a, const VecX& x) {
    assert(a.cols() == x.size());
    VecX y(a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Lu::Lu(const MatX& a) : n_(a.rows()), lu_(a) {
    assert(a.rows() == a.cols());
    anorm_ = a.norm_one();
    for (int i = 0; i < n_; ++i) piv_[static_cast<size_t>(i)] = i;
    for (int k = 0; k < n_; ++k) {
        int p = k;
        for (int i = k + 1; i < n_; ++i)
            if (std::fabs(lu_(i, k)) > std::fabs(lu_(p, k))) p = i;
        if (p != k) {
            for (int j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(p, j));
            std::swap(piv_[static_cast<size_t>(k)], piv_[static_cast<size_t>(p)]);
        }
        if (lu_(k, k) == 0.0) {
            singular_ = true;
            rcond_ = 0.0;
            return;
        }
        for (int i = k + 1; i < n_; ++i) {
            lu_(i, k) /= lu_(k, k);
            const double lik = lu_(i, k);
            for (int j = k + 1; j < n_; ++j) lu_(i, j) -= lik * lu_(k, j);
        }
    }
    // Exact 1-norm condition estimate: invert explicitly, n <= 12.
    MatX inv = solve(MatX::identity(n_));
    const double innorm = inv.norm_one();
    rcond_ = (anorm_ > 0.0 && innorm > 0.0) ? 1.0 / (anorm_ * innorm) : 0.0;
}

VecX Lu::solve(const VecX& b) const {
    assert(!singular_ && b.size() == n_);
    VecX x(n_);
    for (int i = 0; i < n_; ++i) x[i] = b[piv_[static_cast<size_t>(i)]];
    for (int i = 1; i < n_; ++i)
        for (int j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (int i = n_ - 1; i >= 0; --i) {
        for (int j = i + 1; j < n_; ++j) x[i] -= lu_(i, j) * x[j];
        x[i] /= lu_(i, i);
    }
    return x;
}

MatX Lu::solve(const MatX& b) const {
    MatX x(n_, b.cols());
    for (int j = 0; j < b.cols(); ++j) x.set_col(j, solve(b.col(j)));
    return x;
}

MatX Lu::inverse() const { return solve(MatX::identity(n_)); }

double Lu::det() const {
    if (singular_) return 0.0;
    double d = 1.0;
    for (int i = 0; i < n_; ++i) d *= lu_(i, i);
    // parity of the permutation
    std::array<int, kMaxDim> p = piv_;
    for (int i = 0; i < n_; ++i)
        while (p[static_cast<size_t>(i)] != i) {
            std::swap(p[static_cast<size_t>(i)], p[static_cast<size_t>(p[static_cast<size_t>(i)])]);
            d = -d;
        }
    return d;
}

bool solve_spd(const MatX& a, const VecX& b, VecX& x) {
    const int n = a.rows();
    assert(a.cols() == n && b.size() == n);
    MatX l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= 0.0 || !std::isfinite(d)) return false;
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    VecX y(n);
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    x = VecX(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return true;
}

namespace {

// Householder QR of `m` (in place); returns the accumulated full Q.
// Column pivoting is applied and the resulting rank (w.r.t. tol) reported.
MatX householder_qr(MatX m, double rank_tol, int* rank_out) {
    const int rows = m.rows(), cols = m.cols();
    MatX q = MatX::identity(rows);
    int rank = 0;
    for (int k = 0; k < std::min(rows, cols); ++k) {
        // column pivot: move the remaining column with largest tail norm to k
        int best = k;
        double best_norm = -1.0;
        for (int j = k; j < cols; ++j) {
            double s = 0.0;
            for (int i = k; i < rows; ++i) s += m(i, j) * m(i, j);
            if (s > best_norm) {
                best_norm = s;
                best = j;
            }
        }
        if (best != k)
            for (int i = 0; i < rows; ++i) std::swap(m(i, k), m(i, best));
        double alpha = std::sqrt(std::max(best_norm, 0.0));
        if (k == 0) rank_tol *= std::max(alpha, 1e-300);  // scale by sigma_max proxy
        if (alpha <= rank_tol) break;
        ++rank;
        if (m(k, k) > 0) alpha = -alpha;
        VecX v(rows);
        for (int i = k; i < rows; ++i) v[i] = m(i, k);
        v[k] -= alpha;
        const double vnorm2 = v.dot(v);
        if (vnorm2 > 0.0) {
            for (int j = k; j < cols; ++j) {
                double s = 0.0;
                for (int i = k; i < rows; ++i) s += v[i] * m(i, j);
                const double f = 2.0 * s / vnorm2;
                for (int i = k; i < rows; ++i) m(i, j) -= f * v[i];
            }
            for (int j = 0; j < rows; ++j) {
                double s = 0.0;
                for (int i = k; i < rows; ++i) s += v[i] * q(i, j);
                const double f = 2.0 * s / vnorm2;
                for (int i = k; i < rows; ++i) q(i, j) -= f * v[i];
            }
        }
    }
    *rank_out = rank;
    return q.transposed();  // columns of Q
}

}  // namespace

MatX nullspace(const MatX& a, double rank_tol) {
    const int n = a.cols();
    int rank = 0;
    MatX q = householder_qr(a.transposed(), rank_tol, &rank);
    MatX ns(n, n - rank);
    for (int j = rank; j < n; ++j)
        for (int i = 0; i < n; ++i) ns(i, j - rank) = q(i, j);
    return ns;
}

namespace {

void hessenberg(MatX& h) {
    const int n = h.rows();
    for (int k = 1; k < n - 1; ++k) {
        double s = 0.0;
        for (int i = k; i < n; ++i) s += h(i, k - 1) * h(i, k - 1);
        double alpha = std::sqrt(s);
        if (alpha == 0.0) continue;
        if (h(k, k - 1) > 0) alpha = -alpha;
        VecX v(n);
        for (int i = k; i < n; ++i) v[i] = h(i, k - 1);
        v[k] -= alpha;
        const double vn2 = v.dot(v);
        if (vn2 == 0.0) continue;
        // H <- P H P with P = I - 2 v v^T / v^T v
        for (int j = 0; j < n; ++j) {
            double t = 0.0;
            for (int i = k; i < n; ++i) t += v[i] * h(i, j);
            const double f = 2.0 * t / vn2;
            for (int i = k; i < n; ++i) h(i, j) -= f * v[i];
        }
        for (int i = 0; i < n; ++i) {
            double t = 0.0;
            for (int j = k; j < n; ++j) t += h(i, j) * v[j];
            const double f = 2.0 * t / vn2;
            for (int j = k; j < n; ++j) h(i, j) -= f * v[j];
        }
    }
}

void two_by_two_eigs(double a, double b, double c, double d,
                     std::vector<std::complex<double>>& out) {
    const double tr = a + d;
    const double det = a * d - b * c;
    const double disc = tr * tr / 4.0 - det;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        out.emplace_back(tr / 2.0 + root, 0.0);
        out.emplace_back(tr / 2.0 - root, 0.0);
    } else {
        const double root = std::sqrt(-disc);
        out.emplace_back(tr / 2.0, root);
        out.emplace_back(tr / 2.0, -root);
    }
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const MatX& a) {
    const int n = a.rows();
    assert(a.cols() == n);
    std::vector<std::complex<double>> out;
    if (n == 0) return out;
    if (n == 1) {
        out.emplace_back(a(0, 0), 0.0);
        return out;
    }
    MatX h = a;
    hessenberg(h);

    const double scale = std::max(h.norm_inf(), 1e-300);
    const double tol = 1e-12;
    int hi = n - 1;
    int iters = 0;
    const int iter_cap = 100 * n * n;
    int stall = 0;

    while (hi >= 0) {
        // deflate converged subdiagonals
        int lo = hi;
        while (lo > 0) {
            const double s = std::fabs(h(lo - 1, lo - 1)) + std::fabs(h(lo, lo));
            if (std::fabs(h(lo, lo - 1)) <= tol * std::max(s, scale)) {
                h(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) {
            out.emplace_back(h(hi, hi), 0.0);
            --hi;
            stall = 0;
            continue;
        }
        if (lo == hi - 1) {
            two_by_two_eigs(h(lo, lo), h(lo, hi), h(hi, lo), h(hi, hi), out);
            hi -= 2;
            stall = 0;
            continue;
        }
        if (++iters > iter_cap)
            throw std::runtime_error("eigenvalues: QR iteration cap exceeded");

        // Francis double-shift on the active block [lo, hi]
        double s, t;
        if (++stall % 16 == 0) {
            // exceptional shift to break symmetry-induced stalls
            const double w = std::fabs(h(hi, hi - 1)) + std::fabs(h(hi - 1, hi - 2));
            s = 1.5 * w;
            t = w * w;
        } else {
            s = h(hi - 1, hi - 1) + h(hi, hi);
            t = h(hi - 1, hi - 1) * h(hi, hi) - h(hi - 1, hi) * h(hi, hi - 1);
        }
        double x = h(lo, lo) * h(lo, lo) + h(lo, lo + 1) * h(lo + 1, lo) - s * h(lo, lo) + t;
        double y = h(lo + 1, lo) * (h(lo, lo) + h(lo + 1, lo + 1) - s);
        double z = h(lo + 2, lo + 1) * h(lo + 1, lo);
        for (int k = lo; k <= hi - 2; ++k) {
            // Householder on (x, y, z)
            double alpha = std::sqrt(x * x + y * y + z * z);
            if (alpha != 0.0) {
                if (x > 0) alpha = -alpha;
                const double v0 = x - alpha, v1 = y, v2 = z;
                const double vn2 = v0 * v0 + v1 * v1 + v2 * v2;
                if (vn2 > 0.0) {
                    const int jmin = std::max(lo, k - 1);
                    for (int j = jmin; j < n; ++j) {
                        const double tt =
                            v0 * h(k, j) + v1 * h(k + 1, j) + v2 * h(k + 2, j);
                        const double f = 2.0 * tt / vn2;
                        h(k, j) -= f * v0;
                        h(k + 1, j) -= f * v1;
                        h(k + 2, j) -= f * v2;
                    }
                    const int imax = std::min(hi, k + 3);
                    for (int i = 0; i <= imax; ++i) {
                        const double tt =
                            v0 * h(i, k) + v1 * h(i, k + 1) + v2 * h(i, k + 2);
                        const double f = 2.0 * tt / vn2;
                        h(i, k) -= f * v0;
                        h(i, k + 1) -= f * v1;
                        h(i, k + 2) -= f * v2;
                    }
                }
            }
            x = h(k + 1, k);
            y = h(k + 2, k);
            z = (k + 3 <= hi) ? h(k + 3, k) : 0.0;
        }
        // final 2x2 rotation at the bottom of the block
        {
            const int k = hi - 1;
            const double gx = x, gy = y;
            const double r = std::hypot(gx, gy);
            if (r > 0.0) {
                const double cth = gx / r, sth = gy / r;
                for (int j = k - 1 >= lo ? k - 1 : lo; j < n; ++j) {
                    const double t1 = h(k, j), t2 = h(k + 1, j);
                    h(k, j) = cth * t1 + sth * t2;
                    h(k + 1, j) = -sth * t1 + cth * t2;
                }
                for (int i = 0; i <= hi; ++i) {
                    const double t1 = h(i, k), t2 = h(i, k + 1);
                    h(i, k) = cth * t1 + sth * t2;
                    h(i, k + 1) = -sth * t1 + cth * t2;
                }
            }
        }
        // clean tiny fill-in below the first subdiagonal
        for (int i = lo + 2; i <= hi; ++i)
            for (int j = lo; j <= i - 2; ++j) h(i, j) = 0.0;
    }
    return out;
}

std::vector<double> sym_eigenvalues(const MatX& a) {
    const int n = a.rows();
    assert(a.cols() == n);
    MatX m = a;
    // symmetrize defensively against fp asymmetry of assembled Hessians
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = m(j, i) = v;
        }
    const double scale = std::max(m.max_abs(), 1e-300);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off = std::max(off, std::fabs(m(i, j)));
        if (off <= 1e-15 * scale) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(m(p, q)) <= 1e-18 * scale) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
    }
    std::vector<double> ev(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<size_t>(i)] = m(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

}  // namespace nhep::linalg
