#pragma once

#include <cmath>
#include <complex>
#include <functional>

namespace spectra {

// Adaptive Gauss7/Kronrod15 quadrature for complex integrands on a real
// interval. Returns the integral and accumulates an error estimate.
namespace gk {

inline constexpr double xgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double wgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

inline void rule(const std::function<std::complex<double>(double)>& f, double a,
                 double b, std::complex<double>& k15, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::complex<double> g7 = wg[3] * f(c);
    k15 = wgk[7] * f(c);
    for (int i = 0; i < 7; ++i) {
        const std::complex<double> fp = f(c + h * xgk[i]);
        const std::complex<double> fm = f(c - h * xgk[i]);
        k15 += wgk[i] * (fp + fm);
        if (i % 2 == 1) g7 += wg[i / 2] * (fp + fm);
    }
    k15 *= h;
    g7 *= h;
    err = std::abs(k15 - g7);
}

inline std::complex<double> adaptive(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    double tol, double* err_out = nullptr, int depth = 0) {
    std::complex<double> k15;
    double err;
    rule(f, a, b, k15, err);
    if (err <= tol || depth >= 48) {
        if (err_out) *err_out += err;
        return k15;
    }
    const double c = 0.5 * (a + b);
    return adaptive(f, a, c, tol / 2, err_out, depth + 1) +
           adaptive(f, c, b, tol / 2, err_out, depth + 1);
}

}  // namespace gk
}  // namespace spectra
