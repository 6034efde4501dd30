#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "spectra/config.hpp"
#include "spectra/errors.hpp"
#include "spectra/polynomial.hpp"
#include "spectra/quadrature.hpp"
#include "spectra/surface.hpp"

namespace spectra {

// phi = (N(z) / prod (z - p_i)^{m_i}) dz^2 on the sphere, with a signing at
// the order-two poles. The point at infinity is handled through w = 1/z with
// phi -> w^{-4} phi(1/w); its order is 4 + deg N - sum of finite pole orders.
struct PoleSpec {
    cplx z;
    int order = 1;
    int sign = +1;  // meaningful for order == 2
};

struct QuadraticDifferential {
    Poly numerator;
    std::vector<PoleSpec> poles;
    int infinity_sign = +1;
};

inline int infinity_order(const QuadraticDifferential& qd) {
    int sum = 0;
    for (const auto& p : qd.poles) sum += p.order;
    return 4 + poly_degree(qd.numerator) - sum;
}

inline cplx phi(const QuadraticDifferential& qd, cplx z) {
    cplx v = poly_eval(qd.numerator, z);
    for (const auto& p : qd.poles) {
        cplx d = z - p.z;
        for (int i = 0; i < p.order; ++i) v /= d;
    }
    return v;
}

// value of the differential in the w = 1/z chart, stable near w = 0
inline cplx phi_w(const QuadraticDifferential& qd, cplx w) {
    const int d = poly_degree(qd.numerator);
    cplx nrev = 0;  // w^d N(1/w)
    for (int i = d; i >= 0; --i) nrev = nrev * w + qd.numerator[i];
    cplx drev = 1;  // w^{sum m} D(1/w) with D monic from the poles
    for (const auto& p : qd.poles)
        for (int i = 0; i < p.order; ++i) drev *= (1.0 - p.z * w);
    const int m_inf = infinity_order(qd);
    cplx v = nrev / drev;
    if (m_inf >= 0)
        for (int i = 0; i < m_inf; ++i) v /= w;
    else
        for (int i = 0; i < -m_inf; ++i) v *= w;
    return v;
}

struct CriticalPoints {
    std::vector<cplx> zeros;       // finite zeros (simple)
    std::vector<PoleSpec> poles;   // finite poles
    int infinity_order = 0;        // >0 pole, <0 zero, 0 regular
};

inline double crit_extent(const QuadraticDifferential& qd,
                          const std::vector<cplx>& zeros) {
    double ext = 0;
    for (const auto& z : zeros) ext = std::max(ext, std::abs(z));
    for (const auto& p : qd.poles) ext = std::max(ext, std::abs(p.z));
    return std::max(1.0, ext);
}

inline CriticalPoints critical_points(const QuadraticDifferential& qd) {
    if (poly_degree(qd.numerator) < 0)
        throw InvalidDifferential("zero numerator");
    CriticalPoints cp;
    cp.zeros = poly_roots(qd.numerator);
    cp.poles = qd.poles;
    cp.infinity_order = infinity_order(qd);
    const double ext = crit_extent(qd, cp.zeros);
    const double tol = 1e-7 * ext;
    for (size_t i = 0; i < cp.zeros.size(); ++i)
        for (size_t j = i + 1; j < cp.zeros.size(); ++j)
            if (std::abs(cp.zeros[i] - cp.zeros[j]) < tol)
                throw NonSimpleZero("numerator has a repeated root");
    if (cp.infinity_order <= -2)
        throw NonSimpleZero("zero of order > 1 at infinity");
    for (const auto& z : cp.zeros)
        for (const auto& p : qd.poles)
            if (std::abs(z - p.z) < tol)
                throw InvalidDifferential("zero collides with a pole");
    for (size_t i = 0; i < qd.poles.size(); ++i) {
        if (qd.poles[i].order < 1)
            throw InvalidDifferential("pole order must be >= 1");
        for (size_t j = i + 1; j < qd.poles.size(); ++j)
            if (std::abs(qd.poles[i].z - qd.poles[j].z) < tol)
                throw InvalidDifferential("coincident poles");
    }
    // GMN: at least one pole, at least one finite critical point
    bool has_pole = !qd.poles.empty() || cp.infinity_order >= 1;
    if (!has_pole) throw InvalidDifferential("GMN differential needs a pole");
    bool finite_crit = !cp.zeros.empty() || cp.infinity_order == -1;
    for (const auto& p : qd.poles) finite_crit |= (p.order == 1);
    if (!finite_crit)
        throw InvalidDifferential("GMN differential needs a finite critical point");
    return cp;
}

inline bool is_complete(const QuadraticDifferential& qd) {
    for (const auto& p : qd.poles)
        if (p.order == 1) return false;
    return infinity_order(qd) != 1;
}

// ---------------------------------------------------------------------------
// residues at order-two poles

struct ResidueDatum {
    cplx pole;          // position (ignored for infinity)
    bool at_infinity = false;
    cplx r;             // leading Laurent coefficient
    cplx residue;       // sign * 4 pi i sqrt(r)
};

inline cplx leading_coefficient_at(const QuadraticDifferential& qd,
                                   size_t pole_index) {
    const PoleSpec& p = qd.poles.at(pole_index);
    cplx v = poly_eval(qd.numerator, p.z);
    for (size_t j = 0; j < qd.poles.size(); ++j) {
        if (j == pole_index) continue;
        cplx d = p.z - qd.poles[j].z;
        for (int i = 0; i < qd.poles[j].order; ++i) v /= d;
    }
    return v;
}

inline ResidueDatum residue(const QuadraticDifferential& qd, size_t pole_index,
                            int sign) {
    const PoleSpec& p = qd.poles.at(pole_index);
    if (p.order != 2) throw NotDoublePole("finite pole is not of order two");
    ResidueDatum rd;
    rd.pole = p.z;
    rd.r = leading_coefficient_at(qd, pole_index);
    rd.residue = double(sign) * 4.0 * M_PI * cplx(0, 1) * std::sqrt(rd.r);
    return rd;
}

inline ResidueDatum residue_at_infinity(const QuadraticDifferential& qd,
                                        int sign) {
    if (infinity_order(qd) != 2)
        throw NotDoublePole("infinity is not a pole of order two");
    ResidueDatum rd;
    rd.at_infinity = true;
    rd.r = qd.numerator[poly_degree(qd.numerator)];
    rd.residue = double(sign) * 4.0 * M_PI * cplx(0, 1) * std::sqrt(rd.r);
    return rd;
}

inline QuadraticDifferential rotate(const QuadraticDifferential& qd,
                                    double theta) {
    QuadraticDifferential r = qd;
    r.numerator = poly_scale(qd.numerator, std::polar(1.0, -2.0 * theta));
    return r;
}

// ---------------------------------------------------------------------------
// asymptotic horizontal directions at a pole of order m >= 3, as angles in
// the local chart (z - p, or w = 1/z at infinity), sorted in [0, 2pi)

inline std::vector<double> direction_angles(cplx a0, int m) {
    std::vector<double> out;
    const int cnt = m - 2;
    const double base = std::arg(a0);
    for (int j = 0; j < cnt; ++j) {
        double a = (base + 2 * M_PI * j) / cnt;
        a = std::fmod(a, 2 * M_PI);
        if (a < 0) a += 2 * M_PI;
        out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<double> asymptotic_directions(const QuadraticDifferential& qd,
                                                 size_t pole_index) {
    const PoleSpec& p = qd.poles.at(pole_index);
    if (p.order < 3)
        throw InvalidInput("asymptotic directions need a pole of order >= 3");
    return direction_angles(leading_coefficient_at(qd, pole_index), p.order);
}

inline std::vector<double> asymptotic_directions_at_infinity(
    const QuadraticDifferential& qd) {
    const int m = infinity_order(qd);
    if (m < 3)
        throw InvalidInput("asymptotic directions need a pole of order >= 3");
    return direction_angles(qd.numerator[poly_degree(qd.numerator)], m);
}

inline MarkedBorderedSurface marked_bordered_surface(
    const QuadraticDifferential& qd) {
    critical_points(qd);  // validation
    MarkedBorderedSurface s;
    s.genus = 0;
    const int m_inf = infinity_order(qd);
    if (m_inf == 1 || m_inf == 2) s.punctures++;
    if (m_inf >= 3) s.boundary_marks.push_back(m_inf - 2);
    for (const auto& p : qd.poles) {
        if (p.order <= 2)
            s.punctures++;
        else
            s.boundary_marks.push_back(p.order - 2);
    }
    return s;
}

// ---------------------------------------------------------------------------
// periods: Z = 2 * int sqrt(phi) dz along a polyline, with the square root
// continued from an initial sheet and z^{1/2} endpoint weights removed by the
// substitution z = zero + u^2 on the final stretch of endpoint segments.

struct PeriodPath {
    std::vector<cplx> waypoints;
    std::optional<cplx> sheet_hint;  // approximate sqrt(phi) at the first
                                     // interior point; principal if absent
};

struct PeriodResult {
    cplx Z = 0;
    double err = 0;
    cplx anchor_sheet = 0;  // sqrt(phi) value fixing the sheet at the anchor
};

namespace period_detail {

struct Piece {
    // z(t) for t in [0,1]; linear or quadratic endpoint substitution
    cplx z0, dir;           // linear: z = z0 + dir*t
    bool quadratic = false; // z = z0 + dir*t^2 (z0 is the zero)
    bool reversed = false;  // traverse t from 1 to 0
    std::optional<cplx> exempt;  // critical point allowed nearby

    cplx z(double t) const {
        const double u = reversed ? 1 - t : t;
        return quadratic ? z0 + dir * u * u : z0 + dir * u;
    }
    cplx dz(double t) const {
        const double u = reversed ? 1 - t : t;
        cplx d = quadratic ? 2.0 * dir * u : dir;
        return reversed ? -d : d;
    }
};

inline cplx sqrt_near(cplx v, cplx ref) {
    cplx s = std::sqrt(v);
    if (std::norm(s - ref) > std::norm(s + ref)) s = -s;
    return s;
}

}  // namespace period_detail

inline PeriodResult period(const QuadraticDifferential& qd,
                           const PeriodPath& path, const Config& cfg = {}) {
    using period_detail::Piece;
    if (path.waypoints.size() < 2)
        throw InvalidInput("period path needs at least two waypoints");
    CriticalPoints cp = critical_points(qd);
    const double ext = crit_extent(qd, cp.zeros);
    const double clearance = std::max(cfg.clearance_factor * 2 * ext, 1e-12);
    const double snap = 10 * cfg.eps_hit_factor * ext;

    auto near_zero = [&](cplx z) -> std::optional<cplx> {
        for (const auto& zr : cp.zeros)
            if (std::abs(z - zr) < snap) return zr;
        return std::nullopt;
    };

    std::vector<Piece> pieces;
    for (size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
        cplx A = path.waypoints[i], B = path.waypoints[i + 1];
        auto za = near_zero(A), zb = near_zero(B);
        if (za) A = *za;
        if (zb) B = *zb;
        const cplx AB = B - A;
        const double f = 0.05;
        double lo = za ? f : 0.0, hi = zb ? 1 - f : 1.0;
        if (za) {
            Piece p;  // z = A + (f*AB) u^2, forward from the zero
            p.z0 = A;
            p.dir = f * AB;
            p.quadratic = true;
            p.exempt = A;
            pieces.push_back(p);
        }
        {
            Piece p;
            p.z0 = A + lo * AB;
            p.dir = (hi - lo) * AB;
            pieces.push_back(p);
        }
        if (zb) {
            Piece p;  // z = B + (f*(-AB)) u^2 traversed from u=1 down to 0
            p.z0 = B;
            p.dir = -f * AB;
            p.quadratic = true;
            p.reversed = true;
            p.exempt = B;
            pieces.push_back(p);
        }
    }

    // walk: build sheet reference nodes along all pieces
    struct Node {
        size_t piece;
        double t;
        cplx phi_val;
        cplx sheet;  // filled later
    };
    std::vector<Node> nodes;
    for (size_t pi = 0; pi < pieces.size(); ++pi) {
        const Piece& P = pieces[pi];
        double t = 0;
        nodes.push_back({pi, 0.0, phi(qd, P.z(0.0)), 0});
        double dt = 0.125;
        while (t < 1.0) {
            double step = std::min(dt, 1.0 - t);
            cplx prev = nodes.back().phi_val;
            for (;;) {
                cplx nxt = phi(qd, P.z(t + step));
                if (std::abs(prev) > 0 && std::abs(nxt) > 0) {
                    double dang = std::abs(std::arg(nxt / prev));
                    if (dang > 0.5 && step > 1e-6) {
                        step /= 2;
                        continue;
                    }
                }
                nodes.push_back({pi, t + step, nxt, 0});
                break;
            }
            t += step;
            dt = std::min(0.25, step * 1.5);
        }
    }

    // clearance check away from exempt endpoints
    for (const Node& nd : nodes) {
        const Piece& P = pieces[nd.piece];
        cplx z = P.z(nd.t);
        for (const auto& zr : cp.zeros) {
            if (P.exempt && std::abs(*P.exempt - zr) < snap) continue;
            if (std::abs(z - zr) < clearance)
                throw SheetAmbiguity("path passes within clearance of a zero");
        }
        for (const auto& pl : qd.poles)
            if (std::abs(z - pl.z) < clearance)
                throw SheetAmbiguity("path passes within clearance of a pole");
    }

    // anchor the sheet at the first node with a healthy magnitude
    size_t anchor = 0;
    double maxmag = 0;
    for (const auto& nd : nodes) maxmag = std::max(maxmag, std::abs(nd.phi_val));
    for (size_t i = 0; i < nodes.size(); ++i)
        if (std::abs(nodes[i].phi_val) > 1e-6 * maxmag) {
            anchor = i;
            break;
        }
    cplx s = std::sqrt(nodes[anchor].phi_val);
    if (path.sheet_hint)
        s = period_detail::sqrt_near(nodes[anchor].phi_val, *path.sheet_hint);
    nodes[anchor].sheet = s;
    const cplx anchor_sheet = s;
    for (size_t i = anchor + 1; i < nodes.size(); ++i)
        nodes[i].sheet =
            period_detail::sqrt_near(nodes[i].phi_val, nodes[i - 1].sheet);
    for (size_t i = anchor; i-- > 0;)
        nodes[i].sheet =
            period_detail::sqrt_near(nodes[i].phi_val, nodes[i + 1].sheet);

    // integrate sqrt(phi) dz piecewise between consecutive nodes
    PeriodResult out;
    // coarse magnitude estimate for tolerance scaling
    double rough = 0;
    for (size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (nodes[i].piece != nodes[i + 1].piece) continue;
        const Piece& P = pieces[nodes[i].piece];
        rough += std::abs(nodes[i].sheet * P.dz(nodes[i].t)) *
                 (nodes[i + 1].t - nodes[i].t);
    }
    const double tol_unit =
        cfg.quad_tol * std::max(1.0, rough) / std::max<size_t>(1, nodes.size());
    for (size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (nodes[i].piece != nodes[i + 1].piece) continue;
        const Piece& P = pieces[nodes[i].piece];
        // reference the endpoint with the larger magnitude; a node sitting on
        // a zero has sheet 0 and cannot orient the branch
        const cplx ref = std::abs(nodes[i].phi_val) >= std::abs(nodes[i + 1].phi_val)
                             ? nodes[i].sheet
                             : nodes[i + 1].sheet;
        auto f = [&](double t) -> cplx {
            cplx v = phi(qd, P.z(t));
            return period_detail::sqrt_near(v, ref) * P.dz(t);
        };
        out.Z += gk::adaptive(f, nodes[i].t, nodes[i + 1].t, tol_unit, &out.err);
    }
    out.Z *= 2.0;
    out.err *= 2.0;
    out.anchor_sheet = anchor_sheet;
    return out;
}

}  // namespace spectra
