#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "spectra/config.hpp"
#include "spectra/differential.hpp"
#include "spectra/errors.hpp"
#include "spectra/parallel.hpp"
#include "spectra/triangulation.hpp"

namespace spectra {

// ---------------------------------------------------------------------------
// Analyzed differential: critical points, infinite-critical-point table with
// asymptotic directions, geometric scales. Shared immutable input for the
// trajectory engine.

struct InfiniteCritical {
    bool at_infinity = false;
    int pole_index = -1;  // into qd.poles when finite
    int order = 0;
    cplx z;                          // position (unused at infinity)
    std::vector<double> dirs_local;  // asymptotic directions, local chart
};

struct FoliationContext {
    QuadraticDifferential qd;
    Config cfg;
    std::vector<cplx> zeros;       // finite critical points (simple zeros and
    std::vector<int> zero_is_pole; // simple poles; 1 if a simple pole)
    std::vector<InfiniteCritical> inf;
    int boundary = -1;             // index into inf of the order >= 3 pole,
                                   // when there is exactly one
    double scale = 1, eps_hit = 0, delta_prong = 0, budget = 0, r_far = 0;

    double min_crit_gap = 0;       // min pairwise distance of finite criticals
};

inline FoliationContext make_context(const QuadraticDifferential& qd,
                                     const Config& cfg = {}) {
    FoliationContext ctx;
    ctx.qd = qd;
    ctx.cfg = cfg;
    CriticalPoints cp = critical_points(qd);
    ctx.zeros = cp.zeros;
    ctx.zero_is_pole.assign(cp.zeros.size(), 0);
    for (size_t i = 0; i < qd.poles.size(); ++i) {
        const auto& p = qd.poles[i];
        if (p.order == 1) {
            ctx.zeros.push_back(p.z);
            ctx.zero_is_pole.push_back(1);
        } else {
            InfiniteCritical ic;
            ic.pole_index = static_cast<int>(i);
            ic.order = p.order;
            ic.z = p.z;
            if (p.order >= 3) ic.dirs_local = asymptotic_directions(qd, i);
            ctx.inf.push_back(ic);
        }
    }
    const int m_inf = infinity_order(qd);
    if (m_inf >= 2) {
        InfiniteCritical ic;
        ic.at_infinity = true;
        ic.order = m_inf;
        if (m_inf >= 3) ic.dirs_local = asymptotic_directions_at_infinity(qd);
        ctx.inf.push_back(ic);
    }
    int boundary_count = 0;
    for (size_t i = 0; i < ctx.inf.size(); ++i)
        if (ctx.inf[i].order >= 3) {
            ctx.boundary = static_cast<int>(i);
            ++boundary_count;
        }
    if (boundary_count != 1) ctx.boundary = -boundary_count - 1;

    ctx.scale = crit_extent(qd, cp.zeros);
    ctx.eps_hit = cfg.eps_hit_factor * ctx.scale;
    ctx.delta_prong = cfg.prong_offset * ctx.scale;
    ctx.budget = cfg.arc_budget_factor * ctx.scale;
    ctx.r_far = 3 * ctx.scale;
    ctx.min_crit_gap = 2 * ctx.scale;
    for (size_t i = 0; i < ctx.zeros.size(); ++i) {
        for (size_t j = i + 1; j < ctx.zeros.size(); ++j)
            ctx.min_crit_gap =
                std::min(ctx.min_crit_gap, std::abs(ctx.zeros[i] - ctx.zeros[j]));
        for (const auto& ic : ctx.inf)
            if (!ic.at_infinity)
                ctx.min_crit_gap =
                    std::min(ctx.min_crit_gap, std::abs(ctx.zeros[i] - ic.z));
    }
    return ctx;
}

// ---------------------------------------------------------------------------
// Trajectory integration: dz/ds = e^{i pi theta} / sqrt(phi) with the square
// root continued along the way, arc-length parametrization in the flat metric.

enum class Termination {
    ZeroHit,
    PoleSector,
    DoublePole,
    Closed,
    BudgetExhausted,
};

struct ClosestApproach {
    double dist = 1e300;
    cplx point;       // point on the trajectory at closest approach
    cplx tangent;     // direction of travel there
    double s = 0;
};

struct Trajectory {
    double theta = 0;
    std::vector<cplx> points;
    Termination termination = Termination::BudgetExhausted;
    int hit_zero = -1;         // ZeroHit
    int inf_index = -1;        // PoleSector / DoublePole: index into ctx.inf
    int direction_index = -1;  // PoleSector
    double arc_length = 0;
    double straightness = 0;   // max drift of Im(w e^{-i pi theta})
    std::vector<ClosestApproach> approach;  // per finite critical point
};

namespace traj_detail {

inline cplx sqrt_near(cplx v, cplx ref) {
    cplx s = std::sqrt(v);
    if (std::norm(s - ref) > std::norm(s + ref)) s = -s;
    return s;
}

inline double dist_point_segment(cplx p, cplx a, cplx b, cplx& closest,
                                 double& frac) {
    const cplx ab = b - a;
    const double len2 = std::norm(ab);
    double t = len2 > 0 ? std::clamp(((p - a) / ab).real(), 0.0, 1.0) : 0.0;
    // projection parameter via real part of (p-a)/ab equals dot product ratio
    closest = a + t * ab;
    frac = t;
    return std::abs(p - closest);
}

// asymptotic directions of the rotated differential e^{-2 i pi theta} phi in
// the local chart of an infinite critical point
inline std::vector<double> rotated_dirs(const InfiniteCritical& ic,
                                        double theta) {
    std::vector<double> out = ic.dirs_local;
    const double shift = -2 * M_PI * theta / (ic.order - 2);
    for (double& a : out) {
        a = std::fmod(a + shift, 2 * M_PI);
        if (a < 0) a += 2 * M_PI;
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline int nearest_direction(const std::vector<double>& dirs, double angle) {
    int best = 0;
    double bd = 1e300;
    for (size_t j = 0; j < dirs.size(); ++j) {
        double d = std::abs(std::remainder(angle - dirs[j], 2 * M_PI));
        if (d < bd) {
            bd = d;
            best = static_cast<int>(j);
        }
    }
    return best;
}

}  // namespace traj_detail

// Integrate the straight arc of phase theta through z0. direction = +-1
// selects the ray. Both rays together form the trajectory through z0.
inline Trajectory integrate_trajectory(const FoliationContext& ctx, cplx z0,
                                       double theta, int direction = +1,
                                       double budget_override = -1) {
    using traj_detail::sqrt_near;
    Trajectory tr;
    tr.theta = theta;
    tr.approach.assign(ctx.zeros.size(), {});
    const cplx eip = std::polar(1.0, M_PI * theta) * double(direction);
    const double budget = budget_override > 0 ? budget_override : ctx.budget;

    cplx z = z0;
    cplx sheet = std::sqrt(phi(ctx.qd, z0));
    if (std::abs(sheet) == 0.0)
        throw InvalidInput("trajectory seeded at a critical point");

    // trap radii
    std::vector<double> trap(ctx.inf.size(), 0.0);
    for (size_t i = 0; i < ctx.inf.size(); ++i) {
        if (ctx.inf[i].at_infinity) continue;
        double gap = ctx.scale;
        for (const auto& zc : ctx.zeros)
            gap = std::min(gap, std::abs(ctx.inf[i].z - zc));
        for (size_t j = 0; j < ctx.inf.size(); ++j)
            if (j != i && !ctx.inf[j].at_infinity)
                gap = std::min(gap, std::abs(ctx.inf[i].z - ctx.inf[j].z));
        trap[i] = 0.4 * gap;
    }

    auto rhs = [&](cplx zz, cplx ref) -> cplx {
        cplx v = phi(ctx.qd, zz);
        if (std::abs(v) == 0.0) throw Stalled("trajectory ran into a zero");
        return eip / sqrt_near(v, ref);
    };

    tr.points.push_back(z);
    double s = 0;
    cplx w_drift = 0;  // accumulated int sqrt(phi) dz minus straight model
    double h = 0.01 * ctx.scale * std::abs(sheet);

    const double hmin = 1e-14 * ctx.scale;
    int stall = 0;
    double max_away = 0;  // largest excursion from the seed, for closure tests

    while (s < budget) {
        // cap step by distance to the nearest finite critical point
        double dmin = 1e300;
        for (const auto& zc : ctx.zeros) dmin = std::min(dmin, std::abs(z - zc));
        for (const auto& ic : ctx.inf)
            if (!ic.at_infinity) dmin = std::min(dmin, std::abs(ic.z - z));
        const double speed = 1.0 / std::abs(sheet);
        h = std::min(h, 0.35 * dmin / speed);
        if (h < hmin) {
            if (++stall > 40) throw Stalled("step size collapsed");
        } else {
            stall = 0;
        }
        h = std::max(h, hmin);

        // Dormand-Prince 5(4)
        cplx k1, k2, k3, k4, k5, k6, k7, znew;
        bool ok = true;
        try {
            k1 = rhs(z, sheet);
            k2 = rhs(z + h * (k1 / 5.0), sheet);
            k3 = rhs(z + h * (3.0 / 40 * k1 + 9.0 / 40 * k2), sheet);
            k4 = rhs(z + h * (44.0 / 45 * k1 - 56.0 / 15 * k2 + 32.0 / 9 * k3), sheet);
            k5 = rhs(z + h * (19372.0 / 6561 * k1 - 25360.0 / 2187 * k2 +
                              64448.0 / 6561 * k3 - 212.0 / 729 * k4),
                     sheet);
            k6 = rhs(z + h * (9017.0 / 3168 * k1 - 355.0 / 33 * k2 +
                              46732.0 / 5247 * k3 + 49.0 / 176 * k4 -
                              5103.0 / 18656 * k5),
                     sheet);
            znew = z + h * (35.0 / 384 * k1 + 500.0 / 1113 * k3 + 125.0 / 192 * k4 -
                            2187.0 / 6784 * k5 + 11.0 / 84 * k6);
            k7 = rhs(znew, sheet);
        } catch (const Stalled&) {
            ok = false;
        }
        if (!ok) {
            h /= 4;
            continue;
        }
        const cplx z4 = z + h * (5179.0 / 57600 * k1 + 7571.0 / 16695 * k3 +
                                 393.0 / 640 * k4 - 92097.0 / 339200 * k5 +
                                 187.0 / 2100 * k6 + k7 / 40.0);
        const double err = std::abs(znew - z4);
        const double tol = ctx.cfg.traj_tol * ctx.scale * (1 + std::abs(z) / ctx.scale);
        if (err > tol && h > hmin) {
            h *= std::max(0.2, 0.9 * std::pow(tol / (err + 1e-300), 0.2));
            continue;
        }

        // accept
        const cplx zprev = z;
        z = znew;
        s += h;
        cplx vprev = phi(ctx.qd, zprev);
        cplx vnew = phi(ctx.qd, z);
        cplx sprev = sqrt_near(vprev, sheet);
        sheet = sqrt_near(vnew, sprev);
        {
            // chord integral of sqrt(phi), 3-point Gauss; the chord is
            // homotopic to the arc so this tracks the true w-displacement
            static const double gx[3] = {-0.7745966692414834, 0.0,
                                         0.7745966692414834};
            static const double gw[3] = {5.0 / 9, 8.0 / 9, 5.0 / 9};
            const cplx mid = 0.5 * (zprev + z), half = 0.5 * (z - zprev);
            cplx acc = 0;
            for (int q = 0; q < 3; ++q)
                acc += gw[q] * sqrt_near(phi(ctx.qd, mid + gx[q] * half), sprev);
            w_drift += acc * half;
        }
        tr.straightness =
            std::max(tr.straightness,
                     std::abs(std::imag(w_drift / std::polar(1.0, M_PI * theta))));
        tr.points.push_back(z);
        if (err > 0) h *= std::min(3.0, 0.9 * std::pow(tol / err, 0.2));

        // closest-approach bookkeeping
        for (size_t i = 0; i < ctx.zeros.size(); ++i) {
            cplx closest;
            double frac;
            double d = traj_detail::dist_point_segment(ctx.zeros[i], zprev, z,
                                                       closest, frac);
            if (d < tr.approach[i].dist) {
                tr.approach[i].dist = d;
                tr.approach[i].point = closest;
                tr.approach[i].tangent = (z - zprev) / std::abs(z - zprev);
                tr.approach[i].s = s;
            }
        }

        // events --------------------------------------------------------
        // zero hit
        for (size_t i = 0; i < ctx.zeros.size(); ++i)
            if (std::abs(z - ctx.zeros[i]) < ctx.eps_hit) {
                tr.termination = Termination::ZeroHit;
                tr.hit_zero = static_cast<int>(i);
                tr.arc_length = s;
                return tr;
            }
        // infinite critical points
        for (size_t i = 0; i < ctx.inf.size(); ++i) {
            const auto& ic = ctx.inf[i];
            if (ic.at_infinity) {
                if (ic.order >= 3 && std::abs(z) > ctx.r_far) {
                    tr.termination = Termination::PoleSector;
                    tr.inf_index = static_cast<int>(i);
                    auto dirs = traj_detail::rotated_dirs(ic, theta);
                    // local chart w = 1/z: angle = -arg z
                    tr.direction_index =
                        traj_detail::nearest_direction(dirs, -std::arg(z));
                    tr.arc_length = s;
                    return tr;
                }
                if (ic.order == 2 && std::abs(z) > ctx.r_far) {
                    // double pole at infinity: inward in w means outward in z
                    const cplx v = eip / sheet;
                    if ((std::conj(z) * v).real() >
                        0.02 * std::abs(z) * std::abs(v)) {
                        tr.termination = Termination::DoublePole;
                        tr.inf_index = static_cast<int>(i);
                        tr.arc_length = s;
                        return tr;
                    }
                }
                continue;
            }
            const double d = std::abs(z - ic.z);
            if (ic.order >= 3 && d < 0.25 * trap[i]) {
                // classify once the trajectory is deep inside the trap
                tr.termination = Termination::PoleSector;
                tr.inf_index = static_cast<int>(i);
                auto dirs = traj_detail::rotated_dirs(ic, theta);
                tr.direction_index =
                    traj_detail::nearest_direction(dirs, std::arg(z - ic.z));
                tr.arc_length = s;
                return tr;
            } else if (ic.order == 2 && d < trap[i]) {
                const cplx v = eip / sheet;
                const bool inward = (std::conj(z - ic.z) * v).real() <
                                    -0.02 * d * std::abs(v);
                if (inward && d < 0.5 * trap[i]) {
                    tr.termination = Termination::DoublePole;
                    tr.inf_index = static_cast<int>(i);
                    tr.arc_length = s;
                    return tr;
                }
            }
        }
        // closure: the step segment passes back through the start point with
        // the same direction of travel, after a genuine excursion
        max_away = std::max(max_away, std::abs(z - z0));
        if (max_away > 100 * ctx.eps_hit && std::abs(z - z0) < 0.5 * max_away) {
            cplx closest;
            double frac;
            const double d0 =
                traj_detail::dist_point_segment(z0, zprev, z, closest, frac);
            if (d0 < ctx.eps_hit) {
                const cplx v = eip / sheet;
                const cplx v0 = eip / std::sqrt(phi(ctx.qd, z0));
                if ((v * std::conj(v0)).real() > 0) {
                    tr.termination = Termination::Closed;
                    tr.arc_length = s;
                    return tr;
                }
            }
        }
    }
    tr.termination = Termination::BudgetExhausted;
    tr.arc_length = s;
    return tr;
}

// Three prong directions of the phase-theta foliation at a simple zero.
inline std::vector<double> critical_prongs(const FoliationContext& ctx,
                                           int zero_index, double theta) {
    const cplx z0 = ctx.zeros.at(zero_index);
    if (ctx.zero_is_pole.at(zero_index))
        throw InvalidInput("prongs of a simple pole are not three-fold");
    // phi ~ c (z - z0): c from the derivative of the numerator part
    const double h = 1e-6 * ctx.scale;
    const cplx c = (phi(ctx.qd, z0 + h) - phi(ctx.qd, z0 - h)) / (2 * h);
    std::vector<double> out;
    const double base = (2.0 / 3.0) * (M_PI * theta - 0.5 * std::arg(c));
    for (int j = 0; j < 3; ++j) {
        double a = base + 2.0 * M_PI * j / 3.0;
        a = std::fmod(a, 2 * M_PI);
        if (a < 0) a += 2 * M_PI;
        out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Launch the separatrix ray leaving a zero along prong j at phase theta.
inline Trajectory launch_prong(const FoliationContext& ctx, int zero_index,
                               int prong_index, double theta,
                               double budget_override = -1) {
    auto prongs = critical_prongs(ctx, zero_index, theta);
    const double alpha = prongs.at(prong_index);
    const cplx z0 = ctx.zeros[zero_index];
    const cplx seed = z0 + std::polar(ctx.delta_prong, alpha);
    // choose the ray direction pointing away from the zero
    const cplx sp = std::sqrt(phi(ctx.qd, seed));
    const cplx v = std::polar(1.0, M_PI * theta) / sp;
    const int dir = ((std::conj(std::polar(1.0, alpha)) * v).real() >= 0) ? +1 : -1;
    return integrate_trajectory(ctx, seed, theta, dir, budget_override);
}

// ---------------------------------------------------------------------------
// Saddle detection

struct SaddleConnection {
    double theta = 0;        // phase in (0, 1]
    int zero_a = 0, zero_b = 0;
    bool closed = false;     // endpoints coincide
    std::vector<cplx> path;  // polyline from zero_a to zero_b
    cplx Z;                  // period in the semi-closed upper half plane
    std::vector<int> klass;  // coordinates in the hat basis (when classified)
    double period_mismatch = 0;
};

struct RingDomain {
    bool degenerate = true;
    int inf_index = -1;        // the bounding double pole
    double theta = 0;          // phase of the closed trajectories
    cplx Z;                    // period of the ring class
    std::vector<int> klass;
    bool probe_closed = false; // the probe trajectory closed up
};

struct SpectrumTable {
    std::vector<SaddleConnection> saddles;
    std::vector<RingDomain> rings;
    double theta_lo = 0, theta_hi = 1, h_max = 0;
    int grid = 0;
};

// decimate a trajectory polyline to a manageable waypoint list
inline std::vector<cplx> decimate(const std::vector<cplx>& pts, size_t target) {
    if (pts.size() <= target) return pts;
    std::vector<cplx> out;
    const double stride = double(pts.size() - 1) / double(target - 1);
    for (size_t i = 0; i < target; ++i)
        out.push_back(pts[size_t(i * stride + 0.5)]);
    out.back() = pts.back();
    return out;
}

inline SaddleConnection make_saddle(const FoliationContext& ctx, double theta,
                                    int za, int zb,
                                    const std::vector<cplx>& pts) {
    SaddleConnection sc;
    sc.theta = theta;
    sc.zero_a = za;
    sc.zero_b = zb;
    sc.closed = (za == zb);
    // keep the stretch well clear of the endpoint zeros; the straight hops to
    // the exact zeros stay inside critical-point-free disks, so the homotopy
    // class (hence the period) is unchanged
    const double keep = 0.1 * ctx.min_crit_gap;
    std::vector<cplx> mid;
    for (const auto& p : pts)
        if (std::abs(p - ctx.zeros[za]) > keep && std::abs(p - ctx.zeros[zb]) > keep)
            mid.push_back(p);
    if (mid.empty()) mid.push_back(0.5 * (ctx.zeros[za] + ctx.zeros[zb]));
    std::vector<cplx> path = decimate(mid, 64);
    path.insert(path.begin(), ctx.zeros[za]);
    path.push_back(ctx.zeros[zb]);
    sc.path = path;
    // period with the sheet oriented along the trajectory
    cplx u = path[1] - path[0];
    u /= std::abs(u);
    PeriodPath pp{path, std::polar(1.0, M_PI * theta) * std::conj(u)};
    PeriodResult pr = period(ctx.qd, pp, ctx.cfg);
    sc.Z = pr.Z;
    // normalize into the semi-closed upper half plane
    if (sc.Z.imag() < 0 || (sc.Z.imag() == 0 && sc.Z.real() > 0)) sc.Z = -sc.Z;
    sc.period_mismatch =
        std::abs(std::remainder(std::arg(sc.Z) - M_PI * theta, M_PI));
    return sc;
}

// Scan phases in (theta_lo, theta_hi] for saddle connections.
inline SpectrumTable find_saddles(const FoliationContext& ctx, double theta_lo,
                                  double theta_hi, double h_max,
                                  int grid_override = -1) {
    SpectrumTable table;
    table.theta_lo = theta_lo;
    table.theta_hi = theta_hi;
    table.h_max = h_max;
    const int zn = static_cast<int>(ctx.zeros.size());
    const int grid = grid_override > 0
                         ? grid_override
                         : std::max(8, int(ctx.cfg.theta_grid * (theta_hi - theta_lo)));
    table.grid = grid;
    const double capture = 0.45 * ctx.min_crit_gap;
    const double scan_budget = std::min(ctx.budget, 12.0 * ctx.scale);

    struct Sample {
        // per (prong, target): signed miss
        std::vector<double> miss;
        std::vector<char> def;
    };
    const int prongs = 3 * zn;
    std::vector<Sample> samples(grid + 1);

    auto signed_miss = [&](const Trajectory& tr, int launch, int target,
                           double& dist) -> std::optional<double> {
        const ClosestApproach& ca = tr.approach[target];
        if (ca.dist > capture) return std::nullopt;
        if (target == launch && ca.s < 4 * ctx.delta_prong) return std::nullopt;
        dist = ca.dist;
        const cplx rel = ctx.zeros[target] - ca.point;
        const double cross =
            (std::conj(ca.tangent) * rel).imag();
        double m = ca.dist;
        if (cross < 0) m = -m;
        if (tr.termination == Termination::ZeroHit && tr.hit_zero == target)
            m = 0;
        return m;
    };

    auto run_theta = [&](double theta) {
        Sample smp;
        smp.miss.assign(prongs * zn, 0.0);
        smp.def.assign(prongs * zn, 0);
        for (int zi = 0; zi < zn; ++zi) {
            if (ctx.zero_is_pole[zi]) continue;
            for (int pj = 0; pj < 3; ++pj) {
                Trajectory tr;
                try {
                    tr = launch_prong(ctx, zi, pj, theta, scan_budget);
                } catch (const NumericalError&) {
                    continue;
                }
                for (int t = 0; t < zn; ++t) {
                    double dist;
                    auto m = signed_miss(tr, zi, t, dist);
                    if (m) {
                        smp.miss[(zi * 3 + pj) * zn + t] = *m;
                        smp.def[(zi * 3 + pj) * zn + t] = 1;
                    }
                }
            }
        }
        return smp;
    };

    parallel_for(grid + 1, [&](int g) {
        const double theta = theta_lo + (theta_hi - theta_lo) * g / grid;
        samples[g] = run_theta(theta > 0 ? theta : theta_lo + 1e-12);
    });

    // bracket sign changes and bisect
    struct Candidate {
        double theta;
        int za, zb;
        std::vector<cplx> pts;
    };
    std::vector<Candidate> cands;
    std::mutex mtx;
    struct Bracket {
        double lo, hi;
        int zi, pj, t;
    };
    std::vector<Bracket> brackets;
    for (int g = 0; g < grid; ++g) {
        const double th0 = theta_lo + (theta_hi - theta_lo) * g / grid;
        const double th1 = theta_lo + (theta_hi - theta_lo) * (g + 1) / grid;
        for (int zi = 0; zi < zn; ++zi)
            for (int pj = 0; pj < 3; ++pj)
                for (int t = 0; t < zn; ++t) {
                    const int idx = (zi * 3 + pj) * zn + t;
                    if (!samples[g].def[idx] || !samples[g + 1].def[idx]) continue;
                    const double m0 = samples[g].miss[idx];
                    const double m1 = samples[g + 1].miss[idx];
                    if (m0 == 0 || m1 == 0 || (m0 < 0) != (m1 < 0))
                        brackets.push_back({std::max(th0, theta_lo + 1e-12), th1,
                                            zi, pj, t});
                }
    }

    parallel_for(static_cast<int>(brackets.size()), [&](int bi) {
        auto [lo, hi, zi, pj, t] = brackets[bi];
        auto miss_at = [&](double th) -> std::optional<std::pair<double, Trajectory>> {
            Trajectory tr;
            try {
                tr = launch_prong(ctx, zi, pj, th, scan_budget);
            } catch (const NumericalError&) {
                return std::nullopt;
            }
            double dist;
            auto m = signed_miss(tr, zi, t, dist);
            if (!m) return std::nullopt;
            return std::make_pair(*m, tr);
        };
        auto m_lo = miss_at(lo), m_hi = miss_at(hi);
        if (!m_lo || !m_hi) return;
        if ((m_lo->first < 0) == (m_hi->first < 0) && m_lo->first != 0 &&
            m_hi->first != 0)
            return;
        Trajectory best = m_lo->first == 0 ? m_lo->second : m_hi->second;
        while (hi - lo > ctx.cfg.theta_tol) {
            const double mid = 0.5 * (lo + hi);
            auto mm = miss_at(mid);
            if (!mm) break;
            best = mm->second;
            if (mm->first == 0) break;
            if ((mm->first < 0) == (m_lo->first < 0)) {
                lo = mid;
                m_lo = mm;
            } else {
                hi = mid;
                m_hi = mm;
            }
        }
        const double theta_star = 0.5 * (lo + hi);
        auto final_tr = miss_at(theta_star);
        const Trajectory& tr = final_tr ? final_tr->second : best;
        if (tr.approach[t].dist > 4 * ctx.eps_hit &&
            !(tr.termination == Termination::ZeroHit && tr.hit_zero == t))
            return;  // bracket did not converge onto a true connection
        // truncate the polyline at the closest approach to the target
        std::vector<cplx> pts;
        for (const auto& p : tr.points) {
            pts.push_back(p);
            if (std::abs(p - ctx.zeros[t]) < 2 * tr.approach[t].dist + ctx.eps_hit &&
                pts.size() > 2)
                break;
        }
        std::lock_guard<std::mutex> lk(mtx);
        cands.push_back({theta_star, zi, t, pts});
    });

    // deduplicate candidates and build saddle records
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.theta != b.theta) return a.theta < b.theta;
        return std::minmax(a.za, a.zb) < std::minmax(b.za, b.zb);
    });
    for (const auto& c : cands) {
        SaddleConnection sc;
        try {
            sc = make_saddle(ctx, c.theta, c.za, c.zb, c.pts);
        } catch (const NumericalError&) {
            continue;
        }
        if (std::abs(sc.Z) > h_max) continue;
        bool dup = false;
        for (const auto& prev : table.saddles) {
            if (std::minmax(prev.zero_a, prev.zero_b) !=
                std::minmax(sc.zero_a, sc.zero_b))
                continue;
            if (std::abs(std::remainder(prev.theta - sc.theta, 1.0)) <
                    1e4 * ctx.cfg.theta_tol &&
                std::abs(prev.Z - sc.Z) < 1e-5 * (1 + std::abs(sc.Z)))
                dup = true;
        }
        if (!dup) table.saddles.push_back(sc);
    }

    // degenerate ring domains: double poles whose rotated residue is real at
    // some phase in the window
    for (size_t i = 0; i < ctx.inf.size(); ++i) {
        const auto& ic = ctx.inf[i];
        if (ic.order != 2) continue;
        ResidueDatum rd = ic.at_infinity
                              ? residue_at_infinity(ctx.qd, ctx.qd.infinity_sign)
                              : residue(ctx.qd, ic.pole_index,
                                        ctx.qd.poles[ic.pole_index].sign);
        // e^{-i pi theta} Res real  =>  theta = arg(Res)/pi mod 1
        double th = std::fmod(std::arg(rd.residue) / M_PI, 1.0);
        if (th <= 0) th += 1.0;
        if (th < theta_lo || th > theta_hi) continue;
        RingDomain ring;
        ring.degenerate = true;
        ring.inf_index = static_cast<int>(i);
        ring.theta = th;
        ring.Z = rd.residue;
        if (ring.Z.imag() < 0 || (ring.Z.imag() == 0 && ring.Z.real() > 0))
            ring.Z = -ring.Z;
        // probe: launch a trajectory near the pole at that phase and check
        // that it closes up
        if (!ic.at_infinity) {
            double gap = ctx.scale;
            for (const auto& zc : ctx.zeros)
                gap = std::min(gap, std::abs(ic.z - zc));
            cplx seed = ic.z + 0.2 * gap;
            try {
                Trajectory tr = integrate_trajectory(ctx, seed, th, +1,
                                                     8 * M_PI * 0.2 * gap * 10);
                ring.probe_closed = (tr.termination == Termination::Closed);
            } catch (const NumericalError&) {
                ring.probe_closed = false;
            }
        }
        if (std::abs(ring.Z) <= h_max) table.rings.push_back(ring);
    }

    std::sort(table.saddles.begin(), table.saddles.end(),
              [](const SaddleConnection& a, const SaddleConnection& b) {
                  if (a.theta != b.theta) return a.theta < b.theta;
                  return std::minmax(a.zero_a, a.zero_b) <
                         std::minmax(b.zero_a, b.zero_b);
              });
    return table;
}

inline SpectrumTable find_saddles(const FoliationContext& ctx,
                                  double h_max = -1) {
    double hm = h_max;
    if (hm <= 0) hm = 1e300;
    return find_saddles(ctx, 0.0, 1.0, hm);
}

// ---------------------------------------------------------------------------
// Saddle-free test at the horizontal phase

struct SaddleFreeReport {
    bool saddle_free = true;
    std::optional<SaddleConnection> witness;
};

inline SaddleFreeReport is_saddle_free(const FoliationContext& ctx);

// ---------------------------------------------------------------------------
// WKB triangulation of a complete saddle-free differential: one arc per
// horizontal strip, read off from a generic trajectory of the strip.

// Marked-point labels of the boundary pole: the blowup circle is traversed in
// the positive boundary direction, which is decreasing local angle at a
// finite pole and increasing arg z at infinity.
inline std::vector<int> boundary_labels(const InfiniteCritical& ic) {
    const int cnt = static_cast<int>(ic.dirs_local.size());
    std::vector<std::pair<double, int>> order;  // (sort key, direction index)
    for (int j = 0; j < cnt; ++j) {
        double key;
        if (ic.at_infinity) {
            double chi = std::fmod(2 * M_PI - ic.dirs_local[j], 2 * M_PI);
            if (chi < 0) chi += 2 * M_PI;
            key = chi;  // ascending arg z
        } else {
            key = -ic.dirs_local[j];  // descending local angle
        }
        order.push_back({key, j});
    }
    std::sort(order.begin(), order.end());
    std::vector<int> label_of_dir(cnt);
    for (int v = 0; v < cnt; ++v) label_of_dir[order[v].second] = v;
    return label_of_dir;
}

struct StripProbe {
    int zero = -1;     // launch zero
    cplx seed;         // probe seed point
    int label_a = 0, label_b = 0;  // marked-point labels of the two ends
    std::vector<cplx> curve;       // full trajectory polyline a -> b
};

struct WkbResult {
    MarkedBorderedSurface surface;
    IdealTriangulation T;
    int signing = +1;                       // epsilon at the puncture
    std::vector<std::vector<StripProbe>> strip_probes;  // per arc id of T
};

namespace wkb_detail {

inline double winding_around(const std::vector<cplx>& curve, cplx p) {
    double total = 0;
    for (size_t i = 0; i + 1 < curve.size(); ++i) {
        const cplx a = curve[i] - p, b = curve[i + 1] - p;
        total += std::arg(b / a);
    }
    return total / (2 * M_PI);
}

}  // namespace wkb_detail

inline WkbResult wkb_triangulation(const FoliationContext& ctx) {
    MarkedBorderedSurface surface = marked_bordered_surface(ctx.qd);
    if (!is_complete(ctx.qd))
        throw UnsupportedTopology("WKB triangulation needs a complete differential");
    try {
        check_supported(surface);
    } catch (const UnsupportedSurface& e) {
        throw UnsupportedTopology(e.what());
    }
    if (ctx.boundary < 0)
        throw UnsupportedTopology("need exactly one pole of order >= 3");
    auto sf = is_saddle_free(ctx);
    if (!sf.saddle_free) throw NotSaddleFree("differential has a horizontal saddle");

    const InfiniteCritical& bic = ctx.inf[ctx.boundary];
    const std::vector<int> label_of_dir = boundary_labels(bic);
    const int k = surface.boundary_marks.at(0);
    const bool punct = surface.punctures == 1;
    cplx puncture_pos = 0;
    bool puncture_at_infinity = false;
    for (const auto& ic : ctx.inf)
        if (ic.order == 2) {
            puncture_pos = ic.z;
            puncture_at_infinity = ic.at_infinity;
        }

    struct EndInfo {
        int label;
        cplx stop;  // trajectory point where classification happened
    };
    auto classify_end = [&](const Trajectory& tr) -> EndInfo {
        if (tr.termination == Termination::PoleSector) {
            if (tr.inf_index != ctx.boundary)
                throw UnresolvedCrossing("trajectory fell into an unexpected pole");
            return {label_of_dir.at(tr.direction_index), tr.points.back()};
        }
        if (tr.termination == Termination::DoublePole)
            return {kPuncture, tr.points.back()};
        throw UnresolvedCrossing("generic probe did not reach a pole");
    };

    std::map<std::tuple<int, int, int>, std::vector<StripProbe>> arcs;
    const int zn = static_cast<int>(ctx.zeros.size());
    for (int zi = 0; zi < zn; ++zi) {
        if (ctx.zero_is_pole[zi]) continue;
        auto prongs = critical_prongs(ctx, zi, 0.0);
        for (int sj = 0; sj < 3; ++sj) {
            double a0 = prongs[sj];
            double a1 = prongs[(sj + 1) % 3] + (sj == 2 ? 2 * M_PI : 0);
            const double mid = 0.5 * (a0 + a1);
            const cplx seed = ctx.zeros[zi] + std::polar(ctx.delta_prong, mid);
            Trajectory fwd = integrate_trajectory(ctx, seed, 0.0, +1);
            Trajectory bwd = integrate_trajectory(ctx, seed, 0.0, -1);
            EndInfo ea = classify_end(bwd), eb = classify_end(fwd);

            StripProbe probe;
            probe.zero = zi;
            probe.seed = seed;
            probe.label_a = ea.label;
            probe.label_b = eb.label;
            probe.curve.assign(bwd.points.rbegin(), bwd.points.rend());
            probe.curve.insert(probe.curve.end(), fwd.points.begin(),
                               fwd.points.end());

            // arc identity
            std::optional<Arc> arc;
            const int la = ea.label, lb = eb.label;
            if (la == kPuncture && lb == kPuncture)
                throw UnresolvedCrossing("trajectory joins the puncture to itself");
            if (la == kPuncture || lb == kPuncture) {
                arc = make_radius(la == kPuncture ? lb : la);
            } else if (la == lb) {
                if (!punct)
                    throw UnresolvedCrossing("loop trajectory on an unpunctured disk");
                arc = make_loop(la);
            } else {
                int side = 0;
                if (punct) {
                    // close the trajectory along the boundary circle in the
                    // positive direction from the min-label end to the other
                    std::vector<cplx> curve =
                        la < lb ? probe.curve
                                : std::vector<cplx>(probe.curve.rbegin(),
                                                    probe.curve.rend());
                    // boundary return arc from the far end back to the start
                    cplx zu = curve.front(), zv = curve.back();
                    std::vector<cplx> cl;
                    if (bic.at_infinity) {
                        // ccw boundary = increasing arg z; return path runs
                        // v -> u against it
                        double au = std::arg(zu), av = std::arg(zv);
                        double ru = std::abs(zu), rv = std::abs(zv);
                        while (av < au) av += 2 * M_PI;
                        // u -> v boundary sweep is av - au (in [0, 2pi))
                        for (int t = 32; t >= 0; --t) {
                            double ang = au + (av - au) * t / 32.0;
                            double rr = ru + (rv - ru) * t / 32.0;
                            cl.push_back(std::polar(rr, ang));
                        }
                    } else {
                        double au = std::arg(zu - bic.z), av = std::arg(zv - bic.z);
                        double ru = std::abs(zu - bic.z), rv = std::abs(zv - bic.z);
                        while (av > au) av -= 2 * M_PI;  // ccw = decreasing angle
                        for (int t = 32; t >= 0; --t) {
                            double ang = au + (av - au) * t / 32.0;
                            double rr = ru + (rv - ru) * t / 32.0;
                            cl.push_back(bic.z + std::polar(rr, ang));
                        }
                    }
                    std::vector<cplx> closed = curve;
                    closed.insert(closed.end(), cl.begin(), cl.end());
                    if (puncture_at_infinity)
                        throw UnsupportedTopology(
                            "puncture at infinity with a finite boundary pole "
                            "is outside the supported classes");
                    double w = wkb_detail::winding_around(closed, puncture_pos);
                    side = (std::abs(w) > 0.5) ? 1 : 0;
                }
                // the winding was computed for the min-label orientation
                Arc c{std::min(la, lb), std::max(la, lb), side};
                // boundary-parallel curves bound half planes, not strips
                const int u = c.a, v = c.b;
                const bool ccw_empty = (v == u + 1);
                const bool cw_empty = (u == 0 && v == k - 1);
                bool invalid = false;
                if (!punct)
                    invalid = ccw_empty || cw_empty;
                else
                    invalid = (c.side == 1) ? cw_empty : ccw_empty;
                if (invalid)
                    arc = std::nullopt;
                else
                    arc = c;
            }
            if (arc) arcs[arc->key()].push_back(probe);
        }
    }

    const int n = dimension(surface);
    if (static_cast<int>(arcs.size()) != n)
        throw UnresolvedCrossing("strip census does not match the dimension");

    std::vector<Arc> arc_list;
    for (auto& [key, probes] : arcs)
        arc_list.push_back(Arc{std::get<0>(key), std::get<1>(key), std::get<2>(key)});

    WkbResult out;
    out.surface = surface;
    out.T = triangulation_from_arcs(surface, arc_list);
    out.strip_probes.resize(n);
    for (int j = 0; j < n; ++j)
        out.strip_probes[j] = arcs.at(out.T.arcs[j].key());
    if (punct) {
        // epsilon(p) . Res_p(phi) in the upper half plane
        ResidueDatum rd;
        bool found = false;
        for (const auto& ic : ctx.inf)
            if (ic.order == 2) {
                rd = ic.at_infinity
                         ? residue_at_infinity(ctx.qd, ctx.qd.infinity_sign)
                         : residue(ctx.qd, ic.pole_index,
                                   ctx.qd.poles[ic.pole_index].sign);
                found = true;
            }
        if (!found) throw UnresolvedCrossing("puncture without a double pole");
        out.signing = rd.residue.imag() > 0 ? +1 : -1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hat basis: one class per horizontal strip, represented by a path crossing
// the strip between its boundary zeros; periods normalized into the
// semi-closed upper half plane; skew form = exchange matrix of the WKB
// triangulation.

struct HatBasis {
    IdealTriangulation T;
    int signing = +1;
    ExchangeMatrix skew;
    std::vector<cplx> periods;
    std::vector<PeriodPath> paths;
    std::vector<std::pair<int, int>> strip_zeros;
};

namespace wkb_detail {

// point of the probe curve near the seed but at distance >= r from z_center
inline cplx curve_anchor(const StripProbe& probe, cplx z_center, double r) {
    size_t mid = 0;
    double best = 1e300;
    for (size_t i = 0; i < probe.curve.size(); ++i) {
        double d = std::abs(probe.curve[i] - probe.seed);
        if (d < best) {
            best = d;
            mid = i;
        }
    }
    for (size_t off = 0; off < probe.curve.size(); ++off) {
        if (mid + off < probe.curve.size() &&
            std::abs(probe.curve[mid + off] - z_center) >= r)
            return probe.curve[mid + off];
        if (off <= mid && std::abs(probe.curve[mid - off] - z_center) >= r)
            return probe.curve[mid - off];
    }
    return probe.curve.back();
}

}  // namespace wkb_detail

inline HatBasis hat_basis(const FoliationContext& ctx,
                          WkbResult* wkb_out = nullptr) {
    WkbResult wkb = wkb_triangulation(ctx);
    if (wkb_out) *wkb_out = wkb;
    HatBasis hb;
    hb.T = wkb.T;
    hb.signing = wkb.signing;
    hb.skew = exchange_matrix(wkb.T);
    const int n = wkb.T.n();
    const double keep = 0.12 * ctx.min_crit_gap;
    for (int j = 0; j < n; ++j) {
        const auto& probes = wkb.strip_probes[j];
        if (probes.empty()) throw UnresolvedCrossing("strip without a probe");
        int za = probes.front().zero;
        cplx seed_a = wkb_detail::curve_anchor(probes.front(), ctx.zeros[za], keep);
        int zb = -1;
        cplx seed_b;
        for (const auto& p : probes)
            if (p.zero != za) {
                zb = p.zero;
                seed_b = wkb_detail::curve_anchor(p, ctx.zeros[zb], keep);
                break;
            }
        if (zb < 0) {
            zb = za;
            seed_b = wkb_detail::curve_anchor(probes.back(), ctx.zeros[zb], keep);
        }
        PeriodPath path{{ctx.zeros[za], seed_a, seed_b, ctx.zeros[zb]}, {}};
        PeriodResult pr = period(ctx.qd, path, ctx.cfg);
        cplx Z = pr.Z;
        cplx hint = pr.anchor_sheet;
        if (Z.imag() < 0 || (Z.imag() == 0 && Z.real() > 0)) {
            Z = -Z;
            hint = -hint;
        }
        path.sheet_hint = hint;
        hb.periods.push_back(Z);
        hb.paths.push_back(path);
        hb.strip_zeros.push_back({za, zb});
    }
    return hb;
}

// ---------------------------------------------------------------------------
// Class identification and BPS invariants

inline std::vector<std::vector<int>> integer_combos(int n, int bound) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(n, -bound);
    for (;;) {
        out.push_back(cur);
        int i = 0;
        while (i < n && cur[i] == bound) cur[i++] = -bound;
        if (i == n) break;
        ++cur[i];
    }
    return out;
}

// Coordinates of a period in the hat basis by nearest-combination matching.
// When the strip boundary zeros and the connection's endpoints are supplied,
// candidates must also reproduce the endpoints as a mod-2 boundary; this
// separates classes with coinciding periods (symmetric configurations).
inline std::vector<int> identify_class(
    const std::vector<cplx>& periods, cplx Z, double tol, int bound = 10,
    const std::vector<std::pair<int, int>>& strip_zeros = {},
    std::optional<std::pair<int, int>> endpoints = std::nullopt,
    int zero_count = 0) {
    const int n = static_cast<int>(periods.size());
    if (n > 4) throw UnresolvedCrossing("class search rank too large");
    const bool use_parity = endpoints && !strip_zeros.empty() && zero_count > 0;
    std::vector<int> target_parity(zero_count, 0);
    if (use_parity && endpoints->first != endpoints->second) {
        target_parity[endpoints->first] ^= 1;
        target_parity[endpoints->second] ^= 1;
    }
    // collect matching candidates; coinciding periods are resolved by the
    // minimal crossing number (L1 norm), never guessed between equals
    std::vector<std::pair<int, std::vector<int>>> hits;  // (L1 norm, class)
    double best = 1e300;
    for (auto& a : integer_combos(n, bound)) {
        cplx s = 0;
        bool zero = true;
        int norm = 0;
        for (int i = 0; i < n; ++i) {
            s += double(a[i]) * periods[i];
            zero &= (a[i] == 0);
            norm += std::abs(a[i]);
        }
        if (zero) continue;
        if (use_parity) {
            std::vector<int> par(zero_count, 0);
            for (int i = 0; i < n; ++i)
                if (a[i] % 2 != 0) {
                    par[strip_zeros[i].first] ^= 1;
                    par[strip_zeros[i].second] ^= 1;
                }
            if (par != target_parity) continue;
        }
        const double d = std::abs(s - Z);
        best = std::min(best, d);
        if (d < 2 * tol) hits.push_back({norm, a});
    }
    if (best > tol || hits.empty())
        throw UnresolvedCrossing("period does not match a lattice vector");
    std::sort(hits.begin(), hits.end());
    if (hits.size() > 1 && hits[1].first == hits[0].first &&
        hits[1].second != hits[0].second)
        throw UnresolvedCrossing("ambiguous class identification");
    return hits[0].second;
}

inline std::vector<int> canonical_class(std::vector<int> a) {
    for (int v : a) {
        if (v > 0) return a;
        if (v < 0) {
            for (int& x : a) x = -x;
            return a;
        }
    }
    return a;
}

struct BpsOutcome {
    HatBasis basis;
    SpectrumTable table;
    std::map<std::vector<int>, int> omega;  // on canonical representatives
    bool generic = true;
    double support_constant = 0;
};

inline bool classes_proportional(const std::vector<int>& a,
                                 const std::vector<int>& b) {
    // integer proportionality of nonzero vectors
    long long cross_ok = 1;
    for (size_t i = 0; i < a.size() && cross_ok; ++i)
        for (size_t j = i + 1; j < a.size(); ++j)
            if ((long long)a[i] * b[j] != (long long)a[j] * b[i]) cross_ok = 0;
    return cross_ok == 1;
}

inline BpsOutcome bps_invariants(const FoliationContext& ctx, double h_max = -1) {
    BpsOutcome out;
    out.basis = hat_basis(ctx);
    double zmax = 0;
    for (const auto& Z : out.basis.periods) zmax = std::max(zmax, std::abs(Z));
    double hm = h_max > 0 ? h_max : (ctx.cfg.h_max > 0 ? ctx.cfg.h_max : 10 * zmax);
    out.table = find_saddles(ctx, 0.0, 1.0, hm);
    const double tol = 1e-6 * std::max(1.0, zmax);
    const int zero_count = static_cast<int>(ctx.zeros.size());
    for (auto& sc : out.table.saddles) {
        sc.klass = identify_class(out.basis.periods, sc.Z, tol, 10,
                                  out.basis.strip_zeros,
                                  std::make_pair(sc.zero_a, sc.zero_b),
                                  zero_count);
        if (!sc.closed) out.omega[canonical_class(sc.klass)] += 1;
    }
    for (auto& ring : out.table.rings) {
        try {
            // ring classes are closed: empty mod-2 boundary
            ring.klass = identify_class(out.basis.periods, ring.Z, tol, 10,
                                        out.basis.strip_zeros,
                                        std::make_pair(0, 0), zero_count);
        } catch (const UnresolvedCrossing&) {
            ring.klass.clear();
        }
        // degenerate ring domains do not contribute to Omega
    }
    // genericity: non-proportional classes must have non-parallel periods
    std::vector<std::pair<std::vector<int>, cplx>> active;
    for (auto& sc : out.table.saddles) active.push_back({sc.klass, sc.Z});
    for (size_t i = 0; i < active.size(); ++i)
        for (size_t j = i + 1; j < active.size(); ++j) {
            if (classes_proportional(active[i].first, active[j].first)) continue;
            const double cross = std::abs(
                std::remainder(std::arg(active[i].second) - std::arg(active[j].second),
                               M_PI));
            if (cross < 1e-8) out.generic = false;
        }
    // support constant over the active classes
    double c = 1e300;
    for (auto& [klass, count] : out.omega) {
        cplx Z = 0;
        double norm = 0;
        for (size_t i = 0; i < klass.size(); ++i) {
            Z += double(klass[i]) * out.basis.periods[i];
            norm = std::max(norm, std::abs(double(klass[i])));
        }
        if (norm > 0) c = std::min(c, std::abs(Z) / norm);
    }
    out.support_constant = (c == 1e300) ? 0 : c;
    return out;
}

inline bool is_generic(const FoliationContext& ctx, double h_max = -1) {
    return bps_invariants(ctx, h_max).generic;
}

inline SaddleFreeReport is_saddle_free(const FoliationContext& ctx) {
    SaddleFreeReport rep;
    // a double pole with real residue sits inside a ring domain bounded by
    // horizontal saddles
    for (size_t i = 0; i < ctx.inf.size(); ++i) {
        const auto& ic = ctx.inf[i];
        if (ic.order != 2) continue;
        ResidueDatum rd = ic.at_infinity
                              ? residue_at_infinity(ctx.qd, ctx.qd.infinity_sign)
                              : residue(ctx.qd, ic.pole_index,
                                        ctx.qd.poles[ic.pole_index].sign);
        if (std::abs(rd.residue.imag()) < 1e-10 * std::abs(rd.residue))
            rep.saddle_free = false;
    }
    const int zn = static_cast<int>(ctx.zeros.size());
    for (int zi = 0; zi < zn && rep.saddle_free; ++zi) {
        if (ctx.zero_is_pole[zi]) continue;
        for (int pj = 0; pj < 3; ++pj) {
            Trajectory tr = launch_prong(ctx, zi, pj, 0.0);
            if (tr.termination == Termination::ZeroHit) {
                rep.saddle_free = false;
                try {
                    rep.witness = make_saddle(ctx, 1.0, zi, tr.hit_zero, tr.points);
                } catch (const NumericalError&) {
                }
                break;
            }
            if (tr.termination == Termination::BudgetExhausted)
                throw Stalled(
                    "budget exhausted: possible recurrent trajectory; cannot "
                    "certify saddle-free");
            if (tr.termination == Termination::Closed) rep.saddle_free = false;
        }
    }
    return rep;
}

}  // namespace spectra
