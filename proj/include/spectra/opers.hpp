#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "spectra/config.hpp"
#include "spectra/differential.hpp"
#include "spectra/errors.hpp"
#include "spectra/foliation.hpp"

namespace spectra {

// ---------------------------------------------------------------------------
// The deformed equation y'' = Q(z, t) y with Q = t^{-2} phi + Q_corr, where
// Q_corr is a rational substitute for the uniformizing projective structure:
// leading coefficient -1/4 at every order-<=2 pole (including infinity), no
// other singularities. Residual freedom (simple-pole terms) is fixed by a
// minimum-norm solve of the polar conditions at infinity.

struct QCorrTerm {
    cplx pole;
    cplx c2 = 0;  // coefficient of (z - pole)^{-2}
    cplx c1 = 0;  // coefficient of (z - pole)^{-1}
};

struct OperFamily {
    QuadraticDifferential qd;
    Config cfg;
    CriticalPoints cp;
    double scale = 1;
    cplx z0;                      // basepoint
    std::vector<QCorrTerm> qcorr;
    int boundary_order = 0;       // order of the boundary pole (0 if none)
    bool boundary_at_infinity = true;
    cplx boundary_pos = 0;
    std::vector<double> boundary_dirs;  // local-chart asymptotic directions
    std::vector<int> label_of_dir;      // direction index -> marked point label
    double r_big = 0;                   // WKB seed radius (infinity) or
                                        // seed distance (finite pole)
};

namespace oper_detail {

// minimum-norm solution of A u = b for m <= 3 equations (complex), via the
// normal equations on A A^H
inline std::vector<cplx> min_norm_solve(const std::vector<std::vector<cplx>>& A,
                                        const std::vector<cplx>& b) {
    const int m = static_cast<int>(A.size());
    const int n = m ? static_cast<int>(A[0].size()) : 0;
    if (m == 0) return std::vector<cplx>(n, 0.0);
    // G = A A^H (m x m)
    std::vector<std::vector<cplx>> G(m, std::vector<cplx>(m, 0.0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < n; ++k) G[i][j] += A[i][k] * std::conj(A[j][k]);
    // solve G y = b by Gaussian elimination with partial pivoting
    std::vector<cplx> y = b;
    std::vector<std::vector<cplx>> M = G;
    std::vector<int> piv(m);
    for (int i = 0; i < m; ++i) piv[i] = i;
    for (int col = 0; col < m; ++col) {
        int best = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(M[r][col]) > std::abs(M[best][col])) best = r;
        std::swap(M[col], M[best]);
        std::swap(y[col], y[best]);
        if (std::abs(M[col][col]) < 1e-13) {
            if (std::abs(y[col]) > 1e-10)
                throw UnsupportedTopology(
                    "polar conditions at infinity are not solvable");
            M[col][col] = 1;
            y[col] = 0;
            continue;
        }
        for (int r = col + 1; r < m; ++r) {
            cplx f = M[r][col] / M[col][col];
            for (int c = col; c < m; ++c) M[r][c] -= f * M[col][c];
            y[r] -= f * y[col];
        }
    }
    for (int col = m - 1; col >= 0; --col) {
        for (int r = col + 1; r < m; ++r) y[col] -= M[col][r] * y[r];
        y[col] /= M[col][col];
    }
    // u = A^H y
    std::vector<cplx> u(n, 0.0);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < m; ++i) u[k] += std::conj(A[i][k]) * y[i];
    return u;
}

}  // namespace oper_detail

inline OperFamily make_oper(const QuadraticDifferential& qd,
                            const Config& cfg = {}) {
    if (!is_complete(qd))
        throw UnsupportedTopology("oper family needs a complete differential");
    OperFamily op;
    op.qd = qd;
    op.cfg = cfg;
    op.cp = critical_points(qd);
    op.scale = crit_extent(qd, op.cp.zeros);

    // base correction: -1/(4 (z-p)^2) at order-two poles, free simple-pole
    // terms at every finite pole, free double terms at order >= 3 poles
    struct Unknown {
        size_t term;
        int which;  // 1 => c1, 2 => c2
    };
    for (const auto& p : qd.poles) {
        QCorrTerm t;
        t.pole = p.z;
        t.c2 = (p.order == 2) ? cplx(-0.25, 0) : cplx(0, 0);
        op.qcorr.push_back(t);
    }
    std::vector<Unknown> unknowns;
    for (size_t i = 0; i < qd.poles.size(); ++i) {
        unknowns.push_back({i, 1});
        if (qd.poles[i].order >= 3) unknowns.push_back({i, 2});
    }
    const int m_inf = infinity_order(qd);
    // S1 = sum c1; S2 = sum (c1 p + c2); S3 = sum (c1 p^2 + 2 c2 p)
    std::vector<std::vector<cplx>> A;
    std::vector<cplx> rhs;
    auto fixed_S = [&](int k) {
        cplx s = 0;
        for (const auto& t : op.qcorr) {
            if (k == 2) s += t.c2;
            if (k == 3) s += 2.0 * t.c2 * t.pole;
        }
        return s;
    };
    auto coef_S = [&](int k, const Unknown& u) -> cplx {
        const cplx p = op.qcorr[u.term].pole;
        if (u.which == 1) return k == 1 ? cplx(1) : (k == 2 ? p : p * p);
        return k == 2 ? cplx(1) : (k == 3 ? 2.0 * p : cplx(0));
    };
    std::vector<std::pair<int, cplx>> conditions;  // (S index, target)
    if (m_inf == 2) {
        conditions = {{1, 0.0}, {2, cplx(-0.25, 0)}};
    } else if (m_inf <= 0) {
        conditions = {{1, 0.0}, {2, 0.0}, {3, 0.0}};
    }
    for (auto& [k, target] : conditions) {
        std::vector<cplx> row;
        for (const auto& u : unknowns) row.push_back(coef_S(k, u));
        A.push_back(row);
        rhs.push_back(target - (k == 1 ? cplx(0) : fixed_S(k)));
    }
    if (!conditions.empty()) {
        auto sol = oper_detail::min_norm_solve(A, rhs);
        for (size_t i = 0; i < unknowns.size(); ++i) {
            if (unknowns[i].which == 1)
                op.qcorr[unknowns[i].term].c1 = sol[i];
            else
                op.qcorr[unknowns[i].term].c2 += sol[i];
        }
    }

    // boundary pole data (exactly one pole of order >= 3 for framing work)
    int count = 0;
    for (size_t i = 0; i < qd.poles.size(); ++i)
        if (qd.poles[i].order >= 3) {
            op.boundary_at_infinity = false;
            op.boundary_pos = qd.poles[i].z;
            op.boundary_order = qd.poles[i].order;
            op.boundary_dirs = asymptotic_directions(qd, i);
            ++count;
        }
    if (m_inf >= 3) {
        op.boundary_at_infinity = true;
        op.boundary_order = m_inf;
        op.boundary_dirs = asymptotic_directions_at_infinity(qd);
        ++count;
    }
    if (count > 1) throw UnsupportedTopology("several poles of order >= 3");
    if (count == 1) {
        InfiniteCritical ic;
        ic.at_infinity = op.boundary_at_infinity;
        ic.order = op.boundary_order;
        ic.z = op.boundary_pos;
        ic.dirs_local = op.boundary_dirs;
        op.label_of_dir = boundary_labels(ic);
    }
    op.r_big = cfg.rbig_factor * op.scale;

    // deterministic basepoint with clearance from the critical set
    cplx centroid = 0;
    int cnt = 0;
    for (const auto& z : op.cp.zeros) {
        centroid += z;
        ++cnt;
    }
    for (const auto& p : qd.poles) {
        centroid += p.z;
        ++cnt;
    }
    if (cnt) centroid /= double(cnt);
    for (int j = 1; j < 40; ++j) {
        cplx cand = centroid + 0.23 * double(j) * op.scale * cplx(0.31, 0.73);
        double dmin = 1e300;
        for (const auto& z : op.cp.zeros) dmin = std::min(dmin, std::abs(cand - z));
        for (const auto& p : qd.poles) dmin = std::min(dmin, std::abs(cand - p.z));
        if (dmin > 0.3 * op.scale) {
            op.z0 = cand;
            break;
        }
    }
    return op;
}

inline cplx potential(const OperFamily& op, cplx z, cplx t) {
    cplx q = phi(op.qd, z) / (t * t);
    for (const auto& c : op.qcorr) {
        const cplx d = z - c.pole;
        q += c.c2 / (d * d) + c.c1 / d;
    }
    return q;
}

// ---------------------------------------------------------------------------
// Transport of y'' = Q y along paths: 2x2 fundamental matrices mapping
// (y, y') data at the start to the end. Paths are polylines or circles.

using TransportMatrix = std::array<cplx, 4>;  // row-major [a b; c d]

inline TransportMatrix mat_mul(const TransportMatrix& A, const TransportMatrix& B) {
    return {A[0] * B[0] + A[1] * B[2], A[0] * B[1] + A[1] * B[3],
            A[2] * B[0] + A[3] * B[2], A[2] * B[1] + A[3] * B[3]};
}

inline cplx mat_det(const TransportMatrix& M) { return M[0] * M[3] - M[1] * M[2]; }

namespace oper_detail {

// one adaptive RK (Dormand-Prince 5/4) sweep of dY/du = z'(u) A(z(u)) Y over
// u in [0,1] where A = [[0,1],[Q,0]]; State is 2 or 4 complex numbers
template <int N>
struct RkState {
    std::array<cplx, N> v{};
};

template <int N>
inline RkState<N> axpy(const RkState<N>& a, double f, const RkState<N>& b) {
    RkState<N> r = a;
    for (int i = 0; i < N; ++i) r.v[i] += f * b.v[i];
    return r;
}

template <int N>
void rk_integrate(RkState<N>& Y, const OperFamily& op,
                  const std::function<cplx(double)>& zfun,
                  const std::function<cplx(double)>& dzfun, cplx t,
                  bool renormalize, double* log_scale = nullptr) {
    double u = 0;
    double h = 1e-3;
    const double tol = op.cfg.ode_tol;
    int guard = 0;
    while (u < 1.0) {
        if (++guard > 4000000) throw Stalled("transport step limit exceeded");
        // oscillation-aware cap: |sqrt(Q)| |dz| per step <= 0.5
        const cplx zc = zfun(u);
        const cplx qc = potential(op, zc, t);
        const double wavenum = std::sqrt(std::abs(qc));
        const double dzmag = std::abs(dzfun(u));
        double hcap = 0.5 / std::max(1e-12, wavenum * dzmag);
        h = std::min({h, hcap, 1.0 - u});
        h = std::max(h, 1e-12);

        auto f = [&](double uu, const RkState<N>& s) {
            RkState<N> d;
            const cplx z = zfun(uu);
            const cplx q = potential(op, z, t);
            const cplx dz = dzfun(uu);
            if constexpr (N == 2) {
                d.v[0] = dz * s.v[1];
                d.v[1] = dz * q * s.v[0];
            } else {
                d.v[0] = dz * s.v[2];
                d.v[1] = dz * s.v[3];
                d.v[2] = dz * q * s.v[0];
                d.v[3] = dz * q * s.v[1];
            }
            return d;
        };
        const RkState<N> k1 = f(u, Y);
        const RkState<N> k2 = f(u + h / 5, axpy(Y, h / 5, k1));
        RkState<N> tmp = axpy(axpy(Y, 3 * h / 40, k1), 9 * h / 40, k2);
        const RkState<N> k3 = f(u + 3 * h / 10, tmp);
        tmp = axpy(axpy(axpy(Y, 44 * h / 45, k1), -56 * h / 15, k2), 32 * h / 9, k3);
        const RkState<N> k4 = f(u + 4 * h / 5, tmp);
        tmp = axpy(axpy(axpy(axpy(Y, 19372.0 / 6561 * h, k1), -25360.0 / 2187 * h, k2),
                        64448.0 / 6561 * h, k3),
                   -212.0 / 729 * h, k4);
        const RkState<N> k5 = f(u + 8 * h / 9, tmp);
        tmp = axpy(axpy(axpy(axpy(axpy(Y, 9017.0 / 3168 * h, k1), -355.0 / 33 * h, k2),
                             46732.0 / 5247 * h, k3),
                        49.0 / 176 * h, k4),
                   -5103.0 / 18656 * h, k5);
        const RkState<N> k6 = f(u + h, tmp);
        RkState<N> y5 = Y;
        y5 = axpy(y5, 35.0 / 384 * h, k1);
        y5 = axpy(y5, 500.0 / 1113 * h, k3);
        y5 = axpy(y5, 125.0 / 192 * h, k4);
        y5 = axpy(y5, -2187.0 / 6784 * h, k5);
        y5 = axpy(y5, 11.0 / 84 * h, k6);
        const RkState<N> k7 = f(u + h, y5);
        RkState<N> y4 = Y;
        y4 = axpy(y4, 5179.0 / 57600 * h, k1);
        y4 = axpy(y4, 7571.0 / 16695 * h, k3);
        y4 = axpy(y4, 393.0 / 640 * h, k4);
        y4 = axpy(y4, -92097.0 / 339200 * h, k5);
        y4 = axpy(y4, 187.0 / 2100 * h, k6);
        y4 = axpy(y4, h / 40, k7);
        double err = 0, mag = 0;
        for (int i = 0; i < N; ++i) {
            err = std::max(err, std::abs(y5.v[i] - y4.v[i]));
            mag = std::max(mag, std::abs(y5.v[i]));
        }
        const double target = tol * std::max(1.0, mag);
        if (err > target && h > 1e-12) {
            h *= std::max(0.2, 0.9 * std::pow(target / (err + 1e-300), 0.2));
            continue;
        }
        u += h;
        Y = y5;
        if (err > 0) h *= std::min(4.0, 0.9 * std::pow(target / err, 0.2));
        if (renormalize) {
            double m = 0;
            for (int i = 0; i < N; ++i) m = std::max(m, std::abs(Y.v[i]));
            if (m > 0 && (m > 1e3 || m < 1e-3)) {
                for (int i = 0; i < N; ++i) Y.v[i] /= m;
                if (log_scale) *log_scale += std::log(m);
            }
        }
    }
}

}  // namespace oper_detail

// transport along a straight segment
inline TransportMatrix transport_segment(const OperFamily& op, cplx a, cplx b,
                                         cplx t) {
    oper_detail::RkState<4> Y;
    Y.v = {1, 0, 0, 1};
    auto zf = [a, b](double u) { return a + (b - a) * u; };
    auto df = [a, b](double) { return b - a; };
    oper_detail::rk_integrate<4>(Y, op, zf, df, t, false);
    return {Y.v[0], Y.v[1], Y.v[2], Y.v[3]};
}

// transport along a circular arc around `center`
inline TransportMatrix transport_arc(const OperFamily& op, cplx center,
                                     double radius, double ang0, double ang1,
                                     cplx t) {
    oper_detail::RkState<4> Y;
    Y.v = {1, 0, 0, 1};
    auto zf = [=](double u) {
        return center + std::polar(radius, ang0 + (ang1 - ang0) * u);
    };
    auto df = [=](double u) {
        return cplx(0, 1) * (ang1 - ang0) *
               std::polar(radius, ang0 + (ang1 - ang0) * u);
    };
    oper_detail::rk_integrate<4>(Y, op, zf, df, t, false);
    return {Y.v[0], Y.v[1], Y.v[2], Y.v[3]};
}

// clearance-aware polyline transport; detours around poles near the segments
inline std::vector<cplx> route(const OperFamily& op, cplx a, cplx b, int depth = 0) {
    if (depth > 8) throw SingularityOnPath("routing recursion exceeded");
    for (const auto& p : op.qd.poles) {
        const cplx ab = b - a;
        const double len = std::abs(ab);
        if (len < 1e-14) continue;
        const double u = std::clamp((((p.z - a) / ab)).real(), 0.0, 1.0);
        const cplx foot = a + u * ab;
        double gap = op.scale;
        for (const auto& z : op.cp.zeros) gap = std::min(gap, std::abs(p.z - z));
        for (const auto& q : op.qd.poles)
            if (std::abs(q.z - p.z) > 1e-14)
                gap = std::min(gap, std::abs(p.z - q.z));
        const double rr = 0.35 * gap;
        if (u > 0 && u < 1 && std::abs(foot - p.z) < rr &&
            std::abs(a - p.z) > rr * 0.99 && std::abs(b - p.z) > rr * 0.99) {
            const cplx dir = ab / len;
            cplx n = cplx(0, 1) * dir;
            if ((std::conj(n) * (foot - p.z)).real() < 0) n = -n;
            const cplx mid = p.z + 1.2 * rr * (std::abs(foot - p.z) > 1e-12
                                                   ? (foot - p.z) / std::abs(foot - p.z)
                                                   : n);
            auto left = route(op, a, mid, depth + 1);
            auto right = route(op, mid, b, depth + 1);
            left.insert(left.end(), right.begin() + 1, right.end());
            return left;
        }
    }
    return {a, b};
}

inline TransportMatrix transport(const OperFamily& op,
                                 const std::vector<cplx>& waypoints, cplx t) {
    TransportMatrix M{1, 0, 0, 1};
    for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
        auto leg = route(op, waypoints[i], waypoints[i + 1]);
        for (size_t j = 0; j + 1 < leg.size(); ++j)
            M = mat_mul(transport_segment(op, leg[j], leg[j + 1], t), M);
    }
    return M;
}

// ---------------------------------------------------------------------------
// Monodromy eigendata at an order <= 2 pole

struct MonodromyEigendata {
    cplx lambda_plus, lambda_minus;     // numeric eigenvalues
    cplx predicted_plus, predicted_minus;
    std::array<cplx, 2> line_plus, line_minus;  // eigenlines at z0
    std::array<cplx, 2> distinguished;          // line of the signed eigenvalue
};


inline std::array<cplx, 2> kernel_vector(const TransportMatrix& M, cplx lambda) {
    const cplx a = M[0] - lambda, b = M[1];
    const cplx c = M[2], d = M[3] - lambda;
    // the two rows of M - lambda; pick the better-conditioned one
    std::array<cplx, 2> v;
    if (std::norm(a) + std::norm(b) >= std::norm(c) + std::norm(d))
        v = {-b, a};
    else
        v = {-(d), c};
    const double n = std::hypot(std::abs(v[0]), std::abs(v[1]));
    if (n > 0) {
        v[0] /= n;
        v[1] /= n;
    }
    return v;
}

inline MonodromyEigendata monodromy_eigendata(const OperFamily& op,
                                              size_t pole_index, cplx t) {
    const PoleSpec& p = op.qd.poles.at(pole_index);
    if (p.order > 2) throw InvalidInput("monodromy eigendata needs order <= 2");
    if (t.real() <= 0)
        throw InvalidInput("t must lie in the right half plane");
    double gap = op.scale;
    for (const auto& z : op.cp.zeros) gap = std::min(gap, std::abs(p.z - z));
    for (const auto& q : op.qd.poles)
        if (std::abs(q.z - p.z) > 1e-14) gap = std::min(gap, std::abs(p.z - q.z));
    const double rho = 0.4 * gap;
    const double base_angle = std::arg(op.z0 - p.z);
    const cplx zb = p.z + std::polar(rho, base_angle);
    // conjugate the local loop back to the basepoint
    TransportMatrix to_base{1, 0, 0, 1};
    auto leg = route(op, op.z0, zb);
    for (size_t j = 0; j + 1 < leg.size(); ++j)
        to_base = mat_mul(transport_segment(op, leg[j], leg[j + 1], t), to_base);
    TransportMatrix loop =
        transport_arc(op, p.z, rho, base_angle, base_angle + 2 * M_PI, t);
    TransportMatrix inv{to_base[3], -to_base[1], -to_base[2], to_base[0]};
    const cplx det = mat_det(to_base);
    inv = {inv[0] / det, inv[1] / det, inv[2] / det, inv[3] / det};
    TransportMatrix M = mat_mul(inv, mat_mul(loop, to_base));

    MonodromyEigendata out;
    const cplx tr = M[0] + M[3];
    const cplx disc = std::sqrt(tr * tr - 4.0);
    out.lambda_plus = 0.5 * (tr + disc);
    out.lambda_minus = 0.5 * (tr - disc);
    // the discriminant collapses like the square root of the trace error, so
    // the collision threshold sits at sqrt(ode tolerance) scale
    if (std::abs(out.lambda_plus - out.lambda_minus) <
        1e-5 * (std::abs(out.lambda_plus) + std::abs(out.lambda_minus)))
        throw ApparentSingularity("monodromy eigenvalues collide");
    ResidueDatum rd = residue(op.qd, pole_index, +1);
    out.predicted_plus = -std::exp(rd.residue / (2.0 * t));
    out.predicted_minus = -std::exp(-rd.residue / (2.0 * t));
    // align numeric eigenvalues with the predictions
    if (std::abs(out.lambda_plus - out.predicted_plus) +
            std::abs(out.lambda_minus - out.predicted_minus) >
        std::abs(out.lambda_plus - out.predicted_minus) +
            std::abs(out.lambda_minus - out.predicted_plus))
        std::swap(out.lambda_plus, out.lambda_minus);
    out.line_plus = kernel_vector(M, out.lambda_plus);
    out.line_minus = kernel_vector(M, out.lambda_minus);
    out.distinguished = (p.sign >= 0) ? out.line_plus : out.line_minus;
    return out;
}

// ---------------------------------------------------------------------------
// Subdominant lines at the boundary pole

inline double projective_distance(const std::array<cplx, 2>& u,
                                  const std::array<cplx, 2>& v) {
    const double num = std::abs(u[0] * v[1] - u[1] * v[0]);
    const double den = std::hypot(std::abs(u[0]), std::abs(u[1])) *
                       std::hypot(std::abs(v[0]), std::abs(v[1]));
    return den > 0 ? num / den : 0.0;
}

struct ScaledLine {
    std::array<cplx, 2> v{1.0, 0.0};
    double log_scale = 0;  // true vector = exp(log_scale) * v
};

inline ScaledLine transport_line_scaled(const OperFamily& op, ScaledLine s,
                                        const std::vector<cplx>& waypoints,
                                        cplx t) {
    for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
        auto leg = route(op, waypoints[i], waypoints[i + 1]);
        for (size_t j = 0; j + 1 < leg.size(); ++j) {
            oper_detail::RkState<2> Y;
            Y.v = {s.v[0], s.v[1]};
            const cplx a = leg[j], b = leg[j + 1];
            auto zf = [a, b](double u) { return a + (b - a) * u; };
            auto df = [a, b](double) { return b - a; };
            oper_detail::rk_integrate<2>(Y, op, zf, df, t, true, &s.log_scale);
            s.v = {Y.v[0], Y.v[1]};
        }
    }
    const double n = std::hypot(std::abs(s.v[0]), std::abs(s.v[1]));
    if (n > 0) {
        s.v[0] /= n;
        s.v[1] /= n;
        s.log_scale += std::log(n);
    }
    return s;
}

inline std::array<cplx, 2> transport_line(const OperFamily& op,
                                          std::array<cplx, 2> v,
                                          const std::vector<cplx>& waypoints,
                                          cplx t) {
    ScaledLine s;
    s.v = v;
    return transport_line_scaled(op, s, waypoints, t).v;
}

// WKB-normalized decaying solution in the Stokes sector around the j-th
// asymptotic direction, transported to the basepoint. radius_factor scales
// the seed distance for stability checks.
inline std::array<cplx, 2> subdominant_line_raw(const OperFamily& op,
                                                int sector, cplx t,
                                                double radius_factor = 1.0) {
    if (op.boundary_order < 3)
        throw InvalidInput("subdominant lines need a pole of order >= 3");
    const double dir_local = op.boundary_dirs.at(sector);
    cplx seed, toward_pole;
    if (op.boundary_at_infinity) {
        const double chi = -dir_local;  // z-plane angle of the direction
        seed = std::polar(op.r_big * radius_factor, chi);
        toward_pole = std::polar(1.0, chi);
    } else {
        double gap = op.scale;
        for (const auto& z : op.cp.zeros)
            gap = std::min(gap, std::abs(op.boundary_pos - z));
        for (const auto& q : op.qd.poles)
            if (std::abs(q.z - op.boundary_pos) > 1e-14)
                gap = std::min(gap, std::abs(op.boundary_pos - q.z));
        const double r = 0.2 * gap / radius_factor;
        seed = op.boundary_pos + std::polar(r, dir_local);
        toward_pole = -std::polar(1.0, dir_local);
    }
    // choose the branch of sqrt(phi) whose WKB action grows toward the pole
    cplx s = std::sqrt(phi(op.qd, seed));
    if ((s * toward_pole / t).real() < 0) s = -s;
    std::array<cplx, 2> v{1.0, -s / t};
    return transport_line(op, v, {seed, op.z0}, t);
}

inline std::array<cplx, 2> subdominant_line(const OperFamily& op, int sector,
                                            cplx t, bool stability_check = true) {
    auto v1 = subdominant_line_raw(op, sector, t, 1.0);
    if (stability_check) {
        auto v2 = subdominant_line_raw(op, sector, t, 2.0);
        if (projective_distance(v1, v2) > op.cfg.line_tol)
            throw SeedUnstable("subdominant line moved when the seed radius doubled");
    }
    return v1;
}

// ---------------------------------------------------------------------------
// Framed local systems: one line per marked point, all at the basepoint

struct FramedLineSet {
    // boundary lines indexed by marked-point label
    std::vector<std::array<cplx, 2>> boundary;
    // puncture eigenlines: the signed choice and the other one
    bool has_puncture = false;
    std::array<cplx, 2> puncture_line{}, puncture_line_alt{};
};

inline FramedLineSet framed_local_system(const OperFamily& op, cplx t,
                                         bool stability_check = true) {
    FramedLineSet out;
    if (op.boundary_order >= 3) {
        const int cnt = op.boundary_order - 2;
        out.boundary.resize(cnt);
        for (int j = 0; j < cnt; ++j)
            out.boundary[op.label_of_dir[j]] =
                subdominant_line(op, j, t, stability_check);
    }
    for (size_t i = 0; i < op.qd.poles.size(); ++i)
        if (op.qd.poles[i].order == 2) {
            auto eg = monodromy_eigendata(op, i, t);
            out.has_puncture = true;
            out.puncture_line = eg.distinguished;
            out.puncture_line_alt =
                (op.qd.poles[i].sign >= 0) ? eg.line_minus : eg.line_plus;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Fock-Goncharov coordinates from framing lines on a triangulation

inline cplx line_det(const std::array<cplx, 2>& u, const std::array<cplx, 2>& v) {
    return u[0] * v[1] - u[1] * v[0];
}

inline cplx cross_ratio_of_lines(const std::array<cplx, 2>& l1,
                                 const std::array<cplx, 2>& l2,
                                 const std::array<cplx, 2>& l3,
                                 const std::array<cplx, 2>& l4) {
    const cplx d12 = line_det(l1, l2), d34 = line_det(l3, l4);
    const cplx d23 = line_det(l2, l3), d14 = line_det(l1, l4);
    double floor_size = 0;
    for (auto& l : {l1, l2, l3, l4})
        floor_size = std::max(floor_size,
                              std::norm(l[0]) + std::norm(l[1]));
    const double tol = 1e-13 * floor_size;
    for (const cplx& d : {d12, d34, d23, d14})
        if (std::abs(d) < tol)
            throw DegenerateQuadrilateral("coinciding framing lines");
    return (d12 * d34) / (d23 * d14);
}

// signing acts by swapping the puncture eigenline before evaluation
inline std::vector<cplx> fock_goncharov_eval(const FramedLineSet& lines,
                                             const IdealTriangulation& T,
                                             int signing = +1) {
    auto line_of = [&](int label) -> const std::array<cplx, 2>& {
        if (label == kPuncture) {
            if (!lines.has_puncture)
                throw InvalidInput("triangulation has a puncture, lines do not");
            return signing >= 0 ? lines.puncture_line : lines.puncture_line_alt;
        }
        return lines.boundary.at(label);
    };
    std::vector<cplx> X(T.n());
    for (int j = 0; j < T.n(); ++j) {
        ArcQuad q = quad_of_arc(T, j);
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                if (q.corner[a] == q.corner[b])
                    throw DegenerateQuadrilateral(
                        "quadrilateral wraps a marked point; outside the "
                        "supported evaluation classes");
        X[j] = cross_ratio_of_lines(line_of(q.corner[0]), line_of(q.corner[1]),
                                    line_of(q.corner[2]), line_of(q.corner[3]));
    }
    return X;
}

// ---------------------------------------------------------------------------
// WKB-aware coordinate evaluation. Unit-normalized lines cluster projectively
// as t -> 0, so each quadrilateral-side Wronskian is evaluated at a balance
// point of its own edge (the Wronskian is transport-invariant): arc sides use
// the strip interior, boundary-segment sides use the shared anti-Stokes ray.
// Scale factors removed during renormalization are tracked as logs and
// recombined per coordinate.

struct WkbEvaluator {
    OperFamily op;
    WkbResult wkb;
    double min_gap = 1;                 // min distance between finite criticals
    std::vector<cplx> zeros;            // finite critical points
    std::vector<int> dir_of_label;

    void init() {
        dir_of_label.assign(op.label_of_dir.size(), 0);
        for (size_t j = 0; j < op.label_of_dir.size(); ++j)
            dir_of_label[op.label_of_dir[j]] = static_cast<int>(j);
    }

    double chi_of_label(int label) const {
        const double d = op.boundary_dirs[dir_of_label[label]];
        return op.boundary_at_infinity ? -d : d;
    }

    // landing radius: lateral moves happen where |int sqrt(phi)| ~ Lambda |t|
    double landing_radius(cplx t) const {
        const double lambda = 20.0;
        const int m = op.boundary_order;
        const double a0 = std::abs(phi_lead());
        if (op.boundary_at_infinity) {
            double r = std::pow((m - 2) * lambda * std::abs(t) / (2 * std::sqrt(a0)),
                                2.0 / (m - 2));
            return std::clamp(r, 1.6 * op.scale, 0.9 * op.r_big);
        }
        double gap = op.scale;
        for (const auto& z : zeros) gap = std::min(gap, std::abs(op.boundary_pos - z));
        double r = std::pow(2 * std::sqrt(a0) / ((m - 2) * lambda * std::abs(t)),
                            -2.0 / (m - 2));
        return std::clamp(r, 0.1 * gap, 0.4 * gap);
    }

    double phi_lead() const {
        if (op.boundary_at_infinity)
            return std::abs(op.qd.numerator[poly_degree(op.qd.numerator)]);
        for (size_t i = 0; i < op.qd.poles.size(); ++i)
            if (op.qd.poles[i].order >= 3)
                return std::abs(leading_coefficient_at(op.qd, i));
        return 1.0;
    }

    cplx ray_point(int label, double radius) const {
        const double chi = chi_of_label(label);
        if (op.boundary_at_infinity) return std::polar(radius, chi);
        return op.boundary_pos + std::polar(radius, chi);
    }

    ScaledLine seed_line(int label, cplx t) const {
        const cplx seed = ray_point(label, op.boundary_at_infinity
                                               ? op.r_big
                                               : 0.05 * landing_radius(t) +
                                                     0.2 * landing_radius(t));
        cplx toward_pole = op.boundary_at_infinity
                               ? std::polar(1.0, chi_of_label(label))
                               : -std::polar(1.0, chi_of_label(label));
        cplx s = std::sqrt(phi(op.qd, seed));
        if ((s * toward_pole / t).real() < 0) s = -s;
        ScaledLine line;
        line.v = {1.0, -s / t};
        const double n = std::hypot(std::abs(line.v[0]), std::abs(line.v[1]));
        line.v[0] /= n;
        line.v[1] /= n;
        return line;
    }

    // meeting point of an edge of the WKB triangulation
    cplx meeting_point(int edge, cplx t) const {
        const IdealTriangulation& T = wkb.T;
        const double r_land = landing_radius(t);
        if (T.is_arc_edge(edge)) {
            const auto& probes = wkb.strip_probes.at(edge);
            const StripProbe& p = probes.front();
            return wkb_detail::curve_anchor(p, zeros.at(p.zero), 0.12 * min_gap);
        }
        const int v = edge - T.n();
        const int k = T.marks();
        const double ca = chi_of_label(v), cb = chi_of_label((v + 1) % k);
        double delta = std::remainder(cb - ca, 2 * M_PI);
        return op.boundary_at_infinity
                   ? std::polar(r_land, ca + delta / 2)
                   : op.boundary_pos + std::polar(r_land, ca + delta / 2);
    }

    std::vector<cplx> coordinates(cplx t) const {
        const IdealTriangulation& T = wkb.T;
        const double r_land = landing_radius(t);
        // optional puncture line at the basepoint
        ScaledLine punct_line;
        bool has_punct = false;
        for (size_t i = 0; i < op.qd.poles.size(); ++i)
            if (op.qd.poles[i].order == 2) {
                auto eg = monodromy_eigendata(op, i, t);
                std::array<cplx, 2> v =
                    wkb.signing >= 0 ? eg.distinguished
                                     : (op.qd.poles[i].sign >= 0 ? eg.line_minus
                                                                 : eg.line_plus);
                punct_line.v = v;
                has_punct = true;
            }
        std::map<std::pair<int, int>, ScaledLine> cache;  // (label, edge)
        auto line_at = [&](int label, int edge) -> const ScaledLine& {
            auto key = std::make_pair(label, edge);
            auto it = cache.find(key);
            if (it != cache.end()) return it->second;
            const cplx m = meeting_point(edge, t);
            ScaledLine moved;
            if (label == kPuncture) {
                if (!has_punct) throw InvalidInput("missing puncture line");
                moved = transport_line_scaled(op, punct_line, {op.z0, m}, t);
            } else {
                ScaledLine s = seed_line(label, t);
                const cplx seed =
                    ray_point(label, op.boundary_at_infinity ? op.r_big
                                                             : 0.25 * r_land);
                const cplx land = ray_point(label, r_land);
                moved = transport_line_scaled(op, s, {seed, land, m}, t);
            }
            return cache.emplace(key, moved).first->second;
        };
        std::vector<cplx> X(T.n());
        for (int j = 0; j < T.n(); ++j) {
            ArcQuad q = quad_of_arc(T, j);
            for (int a = 0; a < 4; ++a)
                for (int b = a + 1; b < 4; ++b)
                    if (q.corner[a] == q.corner[b])
                        throw DegenerateQuadrilateral(
                            "quadrilateral wraps a marked point");
            cplx dets[4];
            double logs[4];
            for (int sdi = 0; sdi < 4; ++sdi) {
                const ScaledLine& u = line_at(q.corner[sdi], q.side[sdi]);
                const ScaledLine& w = line_at(q.corner[(sdi + 1) % 4], q.side[sdi]);
                // the cross ratio uses d(c1,c2) d(c3,c4) / (d(c2,c3) d(c1,c4))
                dets[sdi] = (sdi == 3) ? line_det(w.v, u.v) : line_det(u.v, w.v);
                logs[sdi] = u.log_scale + w.log_scale;
                if (std::abs(dets[sdi]) < 1e-10)
                    throw DegenerateQuadrilateral(
                        "framing lines coincide at the balance point");
            }
            const double le = logs[0] + logs[2] - logs[1] - logs[3];
            X[j] = std::exp(cplx(le, 0)) * (dets[0] * dets[2]) /
                   (dets[1] * dets[3]);
        }
        return X;
    }
};

// ---------------------------------------------------------------------------
// The Y functions: coordinates of the deformed monodromy in the WKB chart,
// as monomials over the hat basis. The arc <-> basis class orientation is
// fixed so that X_j exp(Z_j / t) -> 1 as t -> 0+ along the positive reals.

struct YFunction {
    WkbEvaluator eval;
    HatBasis basis;

    const OperFamily& oper() const { return eval.op; }

    std::vector<cplx> coordinates(cplx t) const { return eval.coordinates(t); }

    cplx value(const std::vector<int>& klass, cplx t) const {
        auto X = coordinates(t);
        cplx v = 1.0;
        for (size_t j = 0; j < X.size(); ++j)
            if (klass[j] != 0) v *= detail::ipow(X[j], klass[j]);
        return v;
    }
};

inline YFunction make_y_function(const QuadraticDifferential& qd,
                                 const Config& cfg = {}) {
    auto ctx = make_context(qd, cfg);
    YFunction y;
    y.eval.op = make_oper(qd, cfg);
    y.basis = hat_basis(ctx, &y.eval.wkb);
    y.eval.min_gap = ctx.min_crit_gap;
    y.eval.zeros = ctx.zeros;
    y.eval.init();
    return y;
}

}  // namespace spectra
