#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "spectra/errors.hpp"

namespace spectra {

using cplx = std::complex<double>;

namespace detail {

inline cplx ipow(cplx z, int e) {
    if (e == 0) return 1.0;
    if (e < 0) return 1.0 / ipow(z, -e);
    cplx r = 1.0;
    while (e) {
        if (e & 1) r *= z;
        z *= z;
        e >>= 1;
    }
    return r;
}

}  // namespace detail

// Dense complex polynomials, coefficients in ascending order.
using Poly = std::vector<cplx>;

inline int poly_degree(const Poly& p, double tol = 0.0) {
    int d = static_cast<int>(p.size()) - 1;
    while (d > 0 && std::abs(p[d]) <= tol) --d;
    if (d == 0 && (p.empty() || std::abs(p[0]) <= tol)) return -1;  // zero poly
    return d;
}

inline cplx poly_eval(const Poly& p, cplx z) {
    cplx r = 0;
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) r = r * z + p[i];
    return r;
}

inline Poly poly_derivative(const Poly& p) {
    Poly d;
    for (size_t i = 1; i < p.size(); ++i) d.push_back(double(i) * p[i]);
    if (d.empty()) d.push_back(0.0);
    return d;
}

inline Poly poly_scale(const Poly& p, cplx c) {
    Poly r = p;
    for (auto& a : r) a *= c;
    return r;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

// Durand-Kerner iteration with Newton polish; intended for the simple-root
// polynomials appearing here.
inline std::vector<cplx> poly_roots(const Poly& p_in) {
    const int d = poly_degree(p_in, 0.0);
    if (d <= 0) return {};
    Poly p(p_in.begin(), p_in.begin() + d + 1);
    const cplx lead = p[d];
    for (auto& c : p) c /= lead;

    double radius = 0;
    for (int i = 0; i < d; ++i) radius = std::max(radius, std::abs(p[i]));
    radius = 1.0 + radius;

    std::vector<cplx> z(d);
    for (int k = 0; k < d; ++k)
        z[k] = radius * std::polar(1.0, 2 * M_PI * k / d + 0.4);

    for (int iter = 0; iter < 600; ++iter) {
        double shift = 0;
        for (int k = 0; k < d; ++k) {
            cplx denom = 1.0;
            for (int j = 0; j < d; ++j)
                if (j != k) denom *= (z[k] - z[j]);
            if (std::abs(denom) < 1e-300) denom = 1e-300;
            cplx dz = poly_eval(p, z[k]) / denom;
            z[k] -= dz;
            shift = std::max(shift, std::abs(dz));
        }
        if (shift < 1e-15 * radius) break;
    }
    Poly dp = poly_derivative(p);
    for (int k = 0; k < d; ++k)
        for (int it = 0; it < 3; ++it) {
            cplx der = poly_eval(dp, z[k]);
            if (std::abs(der) < 1e-300) break;
            z[k] -= poly_eval(p, z[k]) / der;
        }
    std::sort(z.begin(), z.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return z;
}

}  // namespace spectra
