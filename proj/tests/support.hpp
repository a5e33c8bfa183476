// Shared test helpers: a deterministic generator and small comparators.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "nhep/linalg.hpp"

namespace nheptest {

// SplitMix64; all test randomness is seeded and reproducible.
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform(double lo = 0.0, double hi = 1.0) {
        return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
    }
};

inline nhep::linalg::MatX random_matrix(Rng& rng, int n, double scale = 1.0) {
    nhep::linalg::MatX m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-scale, scale);
    return m;
}

// |det(A - lambda I)| via complex Gaussian elimination with partial pivoting.
inline double char_poly_residual(const nhep::linalg::MatX& a, std::complex<double> lambda) {
    const int n = a.rows();
    std::vector<std::complex<double>> m(static_cast<size_t>(n) * static_cast<size_t>(n));
    auto at = [&](int i, int j) -> std::complex<double>& {
        return m[static_cast<size_t>(i * n + j)];
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) at(i, j) = a(i, j) - (i == j ? lambda : 0.0);
    std::complex<double> det = 1.0;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(at(i, k)) > std::abs(at(p, k))) p = i;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
            det = -det;
        }
        if (std::abs(at(k, k)) == 0.0) return 0.0;
        det *= at(k, k);
        for (int i = k + 1; i < n; ++i) {
            const std::complex<double> f = at(i, k) / at(k, k);
            for (int j = k; j < n; ++j) at(i, j) -= f * at(k, j);
        }
    }
    return std::abs(det);
}

}  // namespace nheptest
