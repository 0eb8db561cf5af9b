#pragma once

// Brute-force reference transforms used as independent oracles in tests.
// Deliberately written by direct summation, sharing no code with the
// implementation under test.

#include <complex>
#include <vector>

#include "flts/spectral.hpp"

namespace flts::testing {

// c(k) = (1/M) sum_j f(x_j) e^{-ik x_j}, x_j = -pi + j 2pi/M.
inline std::vector<Complex> naive_coeffs(const SpectralGrid& g,
                                         const std::vector<Complex>& values) {
    const int m = g.size();
    std::vector<Complex> out(m);
    for (int i = 0; i < m; ++i) {
        const double k = g.wavenumber(i);
        Complex acc{};
        for (int j = 0; j < m; ++j) {
            acc += values[j] * std::polar(1.0, -k * g.node(j));
        }
        out[i] = acc / static_cast<double>(m);
    }
    return out;
}

// f(x_j) = sum_k c(k) e^{ik x_j}.
inline std::vector<Complex> naive_values(const SpectralGrid& g,
                                         const std::vector<Complex>& coeffs) {
    const int m = g.size();
    std::vector<Complex> out(m);
    for (int j = 0; j < m; ++j) {
        Complex acc{};
        for (int i = 0; i < m; ++i) {
            const double k = g.wavenumber(i);
            acc += coeffs[i] * std::polar(1.0, k * g.node(j));
        }
        out[j] = acc;
    }
    return out;
}

// Exact coefficient convolution of two band-limited fields, truncated to the
// representable band without aliasing: (ab)(k) = sum_{k1+k2=k} a(k1) b(k2).
inline std::vector<Complex> naive_product_coeffs(const SpectralGrid& g,
                                                 const std::vector<Complex>& a,
                                                 const std::vector<Complex>& b) {
    const int m = g.size();
    std::vector<Complex> out(m);
    for (int i = 0; i < m; ++i) {
        const int k = g.wavenumber(i);
        Complex acc{};
        for (int i1 = 0; i1 < m; ++i1) {
            const int k1 = g.wavenumber(i1);
            const int k2 = k - k1;
            if (k2 < g.min_wavenumber() || k2 > g.max_wavenumber()) continue;
            acc += a[i1] * b[g.index_of(k2)];
        }
        out[i] = acc;
    }
    return out;
}

}  // namespace flts::testing
