#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "spectra/errors.hpp"
#include "spectra/foliation.hpp"
#include "spectra/rational.hpp"

namespace spectra {

// (Gamma, Z, Omega): finite-rank lattice with skew form, central charge, and
// finitely supported BPS invariants stored on canonical representatives with
// Omega(-g) = Omega(g) implied.
struct BPSStructure {
    int rank = 0;
    ExchangeMatrix skew;                      // <e_i, e_j>
    std::vector<cplx> central_charge;         // Z(e_j)
    std::map<std::vector<int>, Rational> omega;

    cplx Z(const std::vector<int>& g) const {
        cplx s = 0;
        for (int i = 0; i < rank; ++i) s += double(g[i]) * central_charge[i];
        return s;
    }
    int pairing(const std::vector<int>& a, const std::vector<int>& b) const {
        long long s = 0;
        for (int i = 0; i < rank; ++i)
            for (int j = 0; j < rank; ++j)
                s += (long long)a[i] * skew[i][j] * b[j];
        return static_cast<int>(s);
    }
    Rational omega_of(std::vector<int> g) const {
        auto it = omega.find(canonical_class(g));
        return it == omega.end() ? Rational{0} : it->second;
    }
};

inline void validate(const BPSStructure& b) {
    for (auto& [g, om] : b.omega) {
        if (static_cast<int>(g.size()) != b.rank)
            throw InvalidInput("class of wrong rank");
        if (om.is_zero()) continue;
        bool zero = true;
        for (int v : g) zero &= (v == 0);
        if (zero) throw InvalidInput("Omega supported at 0");
        if (std::abs(b.Z(g)) == 0.0)
            throw InvalidInput("active class with vanishing central charge");
    }
    for (int i = 0; i < b.rank; ++i)
        for (int j = 0; j < b.rank; ++j)
            if (b.skew[i][j] != -b.skew[j][i])
                throw InvalidInput("intersection form is not skew");
}

// support constant: largest C with |Z(g)| > C ||g|| on the active support
inline double support_constant(const BPSStructure& b) {
    double c = 1e300;
    for (auto& [g, om] : b.omega) {
        if (om.is_zero()) continue;
        double norm = 0;
        for (int v : g) norm = std::max(norm, std::abs(double(v)));
        if (norm > 0) c = std::min(c, std::abs(b.Z(g)) / norm);
    }
    return c == 1e300 ? 0 : c;
}

// Assemble the BPS structure of a differential from its foliation output.
inline BPSStructure from_differential(const BpsOutcome& out) {
    BPSStructure b;
    b.rank = static_cast<int>(out.basis.periods.size());
    b.skew = out.basis.skew;
    b.central_charge = out.basis.periods;
    for (auto& [g, count] : out.omega) b.omega[g] = Rational{count};
    if (!out.generic) throw NotGeneric("differential failed the genericity test");
    validate(b);
    return b;
}

// ---------------------------------------------------------------------------
// DT invariants and the Moebius inversion

inline int class_divisibility(const std::vector<int>& g) {
    int d = 0;
    for (int v : g) d = std::gcd(d, std::abs(v));
    return d;
}

inline int moebius(int m) {
    int result = 1;
    for (int p = 2; p * p <= m; ++p)
        if (m % p == 0) {
            m /= p;
            if (m % p == 0) return 0;
            result = -result;
        }
    if (m > 1) result = -result;
    return result;
}

// DT(g) = sum over m > 0 dividing g of Omega(g/m) / m^2. DT is supported on
// all multiples of active classes, so it is exposed as a function of the
// class; a bounded table is available for serialization.
inline Rational dt_invariant(const BPSStructure& b, const std::vector<int>& g) {
    const int d = class_divisibility(g);
    Rational s{0};
    for (int m = 1; m <= d; ++m) {
        if (d % m != 0) continue;
        std::vector<int> a(g.size());
        for (size_t i = 0; i < g.size(); ++i) a[i] = g[i] / m;
        s = s + b.omega_of(a) / Rational{(long long)m * m};
    }
    return s;
}

// Moebius inversion: Omega(g) = sum_{g = m a} mu(m)/m^2 DT(a).
template <typename DtFunc>
Rational bps_from_dt(const DtFunc& dt, const std::vector<int>& g) {
    const int d = class_divisibility(g);
    Rational s{0};
    for (int m = 1; m <= d; ++m) {
        if (d % m != 0) continue;
        std::vector<int> a(g.size());
        for (size_t i = 0; i < g.size(); ++i) a[i] = g[i] / m;
        s = s + Rational{moebius(m)} * dt(a) / Rational{(long long)m * m};
    }
    return s;
}

// DT values on multiples of the active primitives up to the given multiplier.
inline std::map<std::vector<int>, Rational> dt_table(const BPSStructure& b,
                                                     int max_multiple) {
    std::map<std::vector<int>, Rational> dt;
    for (auto& [g, om] : b.omega) {
        if (om.is_zero()) continue;
        const int d = class_divisibility(g);
        std::vector<int> prim(g.size());
        for (size_t i = 0; i < g.size(); ++i) prim[i] = g[i] / d;
        for (int m = 1; m <= max_multiple; ++m) {
            std::vector<int> cand(g.size());
            for (size_t i = 0; i < g.size(); ++i) cand[i] = prim[i] * m;
            cand = canonical_class(cand);
            Rational v = dt_invariant(b, cand);
            if (!v.is_zero()) dt[cand] = v;
        }
    }
    return dt;
}

// ---------------------------------------------------------------------------
// Ray diagram

struct Ray {
    double phase = 0;                      // in [0, 2 pi)
    double height = 0;                     // inf |Z| over classes on the ray
    std::vector<std::vector<int>> classes; // active classes with Z on the ray
};

struct RayDiagram {
    std::vector<Ray> rays;  // sorted by phase ascending
};

inline RayDiagram ray_diagram(const BPSStructure& b, double h_max = 1e300) {
    std::map<long long, Ray> buckets;
    const double quantum = 1e-9;
    for (auto& [g, om] : b.omega) {
        if (om.is_zero()) continue;
        for (int sgn : {+1, -1}) {
            std::vector<int> cls(g.size());
            for (size_t i = 0; i < g.size(); ++i) cls[i] = sgn * g[i];
            const cplx Z = b.Z(cls);
            if (std::abs(Z) > h_max) continue;
            double ph = std::arg(Z);
            if (ph < 0) ph += 2 * M_PI;
            const long long key = llround(ph / quantum);
            Ray& r = buckets[key];
            r.phase = ph;
            r.classes.push_back(cls);
            r.height = r.height == 0 ? std::abs(Z) : std::min(r.height, std::abs(Z));
        }
    }
    RayDiagram d;
    for (auto& [k, r] : buckets) d.rays.push_back(r);
    std::sort(d.rays.begin(), d.rays.end(),
              [](const Ray& a, const Ray& b) { return a.phase < b.phase; });
    return d;
}

inline double ray_height(const RayDiagram& d, double phase) {
    for (const auto& r : d.rays)
        if (std::abs(std::remainder(r.phase - phase, 2 * M_PI)) < 1e-8)
            return r.height;
    return std::numeric_limits<double>::infinity();
}

inline bool is_active_ray(const RayDiagram& d, double phase) {
    return std::isfinite(ray_height(d, phase));
}

// ---------------------------------------------------------------------------
// The twisted torus: g(a + b) = (-1)^{<a,b>} g(a) g(b). Points are stored by
// their basis values and extended with the explicit quadratic-refinement
// cocycle (-1)^{sum_{i<j} a_i a_j <e_i, e_j>}.

struct TwistedTorusPoint {
    const BPSStructure* bps = nullptr;
    std::vector<cplx> basis_values;

    cplx operator()(const std::vector<int>& g) const {
        cplx v = 1.0;
        for (size_t i = 0; i < basis_values.size(); ++i)
            if (g[i] != 0) v *= detail::ipow(basis_values[i], g[i]);
        long long tw = 0;
        for (size_t i = 0; i < basis_values.size(); ++i)
            for (size_t j = i + 1; j < basis_values.size(); ++j)
                tw += (long long)g[i] * g[j] * bps->skew[i][j];
        if (tw & 1) v = -v;
        return v;
    }
};

inline TwistedTorusPoint twisted_point(const BPSStructure& b,
                                       std::vector<cplx> basis_values) {
    for (const auto& v : basis_values)
        if (std::abs(v) == 0.0) throw InvalidInput("twisted point with zero value");
    return TwistedTorusPoint{&b, std::move(basis_values)};
}

// The distinguished basepoint: -1 on non-closed saddle basis classes, +1 on
// closed ones, extended by twisted multiplicativity.
inline TwistedTorusPoint xi_basepoint(const BPSStructure& b,
                                      const std::vector<int>& closed_flags = {}) {
    std::vector<cplx> vals(b.rank, cplx(-1, 0));
    for (size_t i = 0; i < closed_flags.size() && i < vals.size(); ++i) {
        if (closed_flags[i] < 0 || closed_flags[i] > 1)
            throw ConflictingFlags("closed flag must be 0 or 1");
        if (closed_flags[i] == 1) vals[i] = cplx(1, 0);
    }
    return twisted_point(b, std::move(vals));
}

// ---------------------------------------------------------------------------
// BPS automorphisms S(l): x_b -> x_b prod (1 - x_g)^{Omega(g) <b, g>} over the
// active classes with Z(g) on the ray l; realized as point evaluators.

struct BpsAutomorphism {
    const BPSStructure* bps = nullptr;
    std::vector<std::vector<int>> classes;  // active classes on the ray
    std::vector<long long> omegas;          // integer Omega per class

    TwistedTorusPoint operator()(const TwistedTorusPoint& p) const {
        TwistedTorusPoint q = p;
        for (int i = 0; i < bps->rank; ++i) {
            std::vector<int> e(bps->rank, 0);
            e[i] = 1;
            cplx factor = 1.0;
            for (size_t c = 0; c < classes.size(); ++c) {
                const cplx xg = p(classes[c]);
                const long long expo = omegas[c] * bps->pairing(e, classes[c]);
                if (expo == 0) continue;
                const cplx base = 1.0 - xg;
                if (std::abs(base) < 1e-14 && expo < 0)
                    throw PoleOfMap("x_gamma = 1 on the wall");
                factor *= detail::ipow(base, static_cast<int>(expo));
            }
            q.basis_values[i] *= factor;
        }
        return q;
    }
};

inline BpsAutomorphism bps_automorphism(const BPSStructure& b, double phase) {
    BpsAutomorphism s;
    s.bps = &b;
    for (auto& [g, om] : b.omega) {
        if (om.is_zero()) continue;
        for (int sgn : {+1, -1}) {
            std::vector<int> cls(g.size());
            for (size_t i = 0; i < g.size(); ++i) cls[i] = sgn * g[i];
            const cplx Z = b.Z(cls);
            if (std::abs(std::remainder(std::arg(Z) - phase, 2 * M_PI)) < 1e-8) {
                if (om.den != 1)
                    throw InvalidInput("point evaluator needs integer Omega");
                s.classes.push_back(cls);
                s.omegas.push_back(om.num);
            }
        }
    }
    return s;
}

// Compose S(l) over the active rays inside the open sector (phase_lo,
// phase_hi) of height < h, in the clockwise order (decreasing phase).
inline TwistedTorusPoint sector_composition(const BPSStructure& b,
                                            double phase_lo, double phase_hi,
                                            const TwistedTorusPoint& p,
                                            double h = 1e300) {
    RayDiagram d = ray_diagram(b);
    for (double boundary : {phase_lo, phase_hi})
        if (is_active_ray(d, boundary))
            throw ActiveBoundary("sector boundary ray is active");
    std::vector<const Ray*> inside;
    for (const auto& r : d.rays) {
        double ph = r.phase;
        while (ph <= phase_lo) ph += 2 * M_PI;
        if (ph < phase_hi && r.height < h) inside.push_back(&r);
    }
    std::sort(inside.begin(), inside.end(),
              [](const Ray* a, const Ray* b) { return a->phase > b->phase; });
    TwistedTorusPoint q = p;
    for (const Ray* r : inside) q = bps_automorphism(b, r->phase)(q);
    return q;
}

}  // namespace spectra
