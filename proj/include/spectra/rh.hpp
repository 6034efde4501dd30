#pragma once

#include <map>
#include <memory>
#include <vector>

#include "spectra/bps.hpp"
#include "spectra/opers.hpp"

namespace spectra {

// The Riemann-Hilbert problem of a generic complete differential: BPS data,
// the distinguished basepoint xi, and evaluation of the piecewise solution
// X_{r,gamma}(t) = xi(gamma) Y_{phi_theta,gamma}(e^{-i theta} t).
struct RHProblem {
    QuadraticDifferential qd;
    Config cfg;
    BPSStructure bps;
    std::vector<int> closed_flags;  // per basis class
    RayDiagram rays;

    // per-phase evaluation chain, built lazily and cached
    struct PhaseData {
        std::shared_ptr<YFunction> y;
        std::vector<std::vector<int>> to_theta;  // basis(0) classes in basis(theta)
    };
    mutable std::map<long long, PhaseData> phase_cache;

    TwistedTorusPoint xi() const { return xi_basepoint(bps, closed_flags); }
};

inline RHProblem make_rh_problem(const QuadraticDifferential& qd,
                                 const Config& cfg = {}) {
    RHProblem p;
    p.qd = qd;
    p.cfg = cfg;
    auto ctx = make_context(qd, cfg);
    BpsOutcome out = bps_invariants(ctx, cfg.h_max);
    p.bps = from_differential(out);
    p.closed_flags.assign(p.bps.rank, 0);
    for (int j = 0; j < p.bps.rank; ++j)
        if (out.basis.strip_zeros[j].first == out.basis.strip_zeros[j].second)
            p.closed_flags[j] = 1;
    p.rays = ray_diagram(p.bps);
    return p;
}

namespace rh_detail {

// identify each basis class of `from` inside `to` by period matching after
// rotating the `from` periods by e^{-i dtheta}
inline std::vector<std::vector<int>> basis_transition(
    const std::vector<cplx>& from_periods, const std::vector<cplx>& to_periods,
    double dtheta, double tol) {
    std::vector<std::vector<int>> cols;
    const cplx rot = std::polar(1.0, -dtheta);
    for (const auto& Z : from_periods)
        cols.push_back(identify_class(to_periods, rot * Z, tol));
    return cols;
}

inline std::vector<int> apply_transition(
    const std::vector<std::vector<int>>& cols, const std::vector<int>& a) {
    std::vector<int> out(cols.empty() ? 0 : cols[0].size(), 0);
    for (size_t j = 0; j < cols.size(); ++j)
        for (size_t k = 0; k < out.size(); ++k) out[k] += a[j] * cols[j][k];
    return out;
}

}  // namespace rh_detail

// Build (and cache) the evaluation data at phase theta: the rotated
// differential's Y function and the Gauss-Manin identification of the
// phase-0 hat basis with the phase-theta one, tracked along small steps so
// that period matching stays unambiguous.
inline const RHProblem::PhaseData& phase_data(const RHProblem& p, double theta) {
    const long long key = llround(theta * 1e12);
    auto it = p.phase_cache.find(key);
    if (it != p.phase_cache.end()) return it->second;

    const double zmax = [&] {
        double m = 0;
        for (const auto& Z : p.bps.central_charge) m = std::max(m, std::abs(Z));
        return m;
    }();
    const double tol = 1e-6 * std::max(1.0, zmax);

    RHProblem::PhaseData data;
    // start from the identity at theta = 0
    std::vector<std::vector<int>> accum;
    for (int j = 0; j < p.bps.rank; ++j) {
        std::vector<int> e(p.bps.rank, 0);
        e[j] = 1;
        accum.push_back(e);
    }
    std::vector<cplx> prev_periods = p.bps.central_charge;
    double reached = 0;
    double step = 0.05;
    int guard = 0;
    while (std::abs(theta - reached) > 1e-15) {
        if (++guard > 1000)
            throw UnresolvedCrossing("Gauss-Manin tracking failed to converge");
        double dtheta = std::clamp(theta - reached, -step, step);
        const double next = reached + dtheta;
        QuadraticDifferential rqd = rotate(p.qd, next);
        try {
            auto ctx = make_context(rqd, p.cfg);
            HatBasis hb = hat_basis(ctx);
            auto cols = rh_detail::basis_transition(prev_periods, hb.periods,
                                                    dtheta, tol);
            // compose: accum holds basis(0) -> basis(reached)
            for (auto& col : accum) col = rh_detail::apply_transition(cols, col);
            prev_periods = hb.periods;
            reached = next;
            step = std::min(0.05, step * 1.4);
        } catch (const NumericalError&) {
            step /= 2;
            if (step < 1e-4)
                throw UnresolvedCrossing(
                    "Gauss-Manin step collapsed; phase too close to a wall");
        } catch (const NotSaddleFree&) {
            step /= 2;
            if (step < 1e-4) throw ActiveRay("phase chain hit an active ray");
        }
    }
    data.y = std::make_shared<YFunction>(
        make_y_function(rotate(p.qd, theta), p.cfg));
    data.to_theta = accum;
    return p.phase_cache.emplace(key, std::move(data)).first->second;
}

// X_{r,gamma}(t) for the non-active ray r at the given phase, gamma in the
// phase-0 hat basis, t in the half plane around r. If t lands in the
// apparent-singularity set, the sample is perturbed radially by 1e-3 and the
// substitution reported through `substituted_t`.
inline cplx x_function(const RHProblem& p, double ray_phase,
                       const std::vector<int>& gamma, cplx t,
                       cplx* substituted_t = nullptr) {
    if (is_active_ray(p.rays, ray_phase))
        throw ActiveRay("evaluation ray is active");
    const cplx tt = t * std::polar(1.0, -ray_phase);
    if (tt.real() <= 0)
        throw InvalidInput("t lies outside the half plane of the ray");
    const auto& data = phase_data(p, ray_phase);
    const std::vector<int> g_theta = rh_detail::apply_transition(data.to_theta, gamma);
    cplx y;
    try {
        y = data.y->value(g_theta, tt);
        if (substituted_t) *substituted_t = t;
    } catch (const ApparentSingularity&) {
        const cplx t2 = tt * 1.001;
        y = data.y->value(g_theta, t2);
        if (substituted_t) *substituted_t = t2 * std::polar(1.0, ray_phase);
    }
    return p.xi()(gamma) * y;
}

// ---------------------------------------------------------------------------
// Verification reports

struct Rh1Report {
    double phase_minus = 0, phase_plus = 0;
    std::vector<double> t_values;
    std::vector<double> deviations;  // max over basis classes, per t
    double max_deviation = 0;
};

// RH1: across the sector between two non-active rays, X_{r-} = S(Delta) X_{r+}
inline Rh1Report check_rh1(const RHProblem& p, double phase_minus,
                           double phase_plus, const std::vector<double>& t_abs) {
    Rh1Report rep;
    rep.phase_minus = phase_minus;
    rep.phase_plus = phase_plus;
    const double mid = 0.5 * (phase_minus + phase_plus);
    for (double ta : t_abs) {
        const cplx t = std::polar(ta, mid);
        std::vector<cplx> plus_vals(p.bps.rank), minus_vals(p.bps.rank);
        for (int j = 0; j < p.bps.rank; ++j) {
            std::vector<int> e(p.bps.rank, 0);
            e[j] = 1;
            plus_vals[j] = x_function(p, phase_plus, e, t);
            minus_vals[j] = x_function(p, phase_minus, e, t);
        }
        TwistedTorusPoint gp = twisted_point(p.bps, plus_vals);
        TwistedTorusPoint jumped =
            sector_composition(p.bps, phase_minus, phase_plus, gp);
        double dev = 0;
        for (int j = 0; j < p.bps.rank; ++j)
            dev = std::max(dev, std::abs(jumped.basis_values[j] - minus_vals[j]) /
                                    std::max(1e-300, std::abs(minus_vals[j])));
        rep.t_values.push_back(ta);
        rep.deviations.push_back(dev);
        rep.max_deviation = std::max(rep.max_deviation, dev);
    }
    return rep;
}

struct Rh2Report {
    std::vector<double> t_values;
    std::vector<double> errors;  // |exp(Z/t) X(t) - xi|
    bool eventually_decreasing = false;
    double final_error = 0;
};

inline Rh2Report check_rh2(const RHProblem& p, double ray_phase,
                           const std::vector<int>& gamma,
                           const std::vector<double>& t_abs) {
    Rh2Report rep;
    const cplx Z = p.bps.Z(gamma);
    const cplx xi_g = p.xi()(gamma);
    for (double ta : t_abs) {
        const cplx t = std::polar(ta, ray_phase);
        const cplx val = x_function(p, ray_phase, gamma, t);
        rep.t_values.push_back(ta);
        rep.errors.push_back(std::abs(std::exp(Z / t) * val - xi_g));
    }
    rep.final_error = rep.errors.empty() ? 0 : rep.errors.back();
    // eventually decreasing: strict decrease past some index, ignoring
    // fluctuation below the numerical noise floor
    double emin = 1e300;
    for (double e : rep.errors) emin = std::min(emin, e);
    const double floor_level = std::max(1e-6, 3 * emin);
    size_t last_rise = 0;
    for (size_t k = 1; k < rep.errors.size(); ++k)
        if (rep.errors[k] >= rep.errors[k - 1] && rep.errors[k] > floor_level)
            last_rise = k;
    rep.eventually_decreasing =
        rep.errors.size() >= 2 && last_rise + 1 < rep.errors.size();
    return rep;
}

struct Rh3Report {
    double slope = 0;
    double residual = 0;
    std::vector<double> t_values;
    std::vector<double> magnitudes;
};

// weak-RH3 diagnostic: least-squares slope of log|X| against log|t| over a
// large-|t| grid; advisory only
inline Rh3Report check_rh3(const RHProblem& p, double ray_phase,
                           const std::vector<int>& gamma, double t_lo = 10.0,
                           double t_hi = 1000.0, int samples = 9) {
    Rh3Report rep;
    std::vector<double> xs, ys;
    for (int i = 0; i < samples; ++i) {
        const double ta = t_lo * std::pow(t_hi / t_lo, double(i) / (samples - 1));
        const cplx t = std::polar(ta, ray_phase);
        const cplx val = x_function(p, ray_phase, gamma, t);
        rep.t_values.push_back(ta);
        rep.magnitudes.push_back(std::abs(val));
        xs.push_back(std::log(ta));
        ys.push_back(std::log(std::max(1e-300, std::abs(val))));
    }
    // least squares fit
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(xs.size());
    for (int i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icept = (sy - rep.slope * sx) / n;
    for (int i = 0; i < n; ++i) {
        const double r = ys[i] - (icept + rep.slope * xs[i]);
        rep.residual += r * r;
    }
    rep.residual = std::sqrt(rep.residual / n);
    return rep;
}

}  // namespace spectra
