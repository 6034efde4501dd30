#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "spectra/errors.hpp"
#include "spectra/multivariate.hpp"
#include "spectra/polynomial.hpp"
#include "spectra/triangulation.hpp"

namespace spectra {

// A seed: lattice with basis e_1..e_n and skew form <e_i, e_j> = skew[i][j].
struct Seed {
    ExchangeMatrix skew;
    std::vector<std::string> basis_labels;  // optional

    int rank() const { return static_cast<int>(skew.size()); }
};

inline void validate(const Seed& s) {
    const int n = s.rank();
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(s.skew[i].size()) != n)
            throw InvalidInput("skew form is not square");
        for (int j = 0; j < n; ++j)
            if (s.skew[i][j] != -s.skew[j][i])
                throw InvalidInput("skew form is not skew-symmetric");
    }
}

using TorusPoint = std::vector<cplx>;

// Birational map between seed tori: a numeric point evaluator plus, at small
// rank, the exact coordinate functions over Q.
struct BirationalTorusMap {
    std::function<TorusPoint(const TorusPoint&)> eval;
    std::optional<std::vector<RationalFunction>> exact;

    TorusPoint operator()(const TorusPoint& p) const { return eval(p); }
};

inline BirationalTorusMap identity_map(int n) {
    BirationalTorusMap m;
    m.eval = [](const TorusPoint& p) { return p; };
    std::vector<RationalFunction> ex;
    for (int i = 0; i < n && i < kMaxVars; ++i)
        ex.push_back(RationalFunction::variable(i));
    if (n <= kMaxVars) m.exact = ex;
    return m;
}

// g after f
inline BirationalTorusMap compose(const BirationalTorusMap& g,
                                  const BirationalTorusMap& f) {
    BirationalTorusMap m;
    auto fe = f.eval;
    auto ge = g.eval;
    m.eval = [fe, ge](const TorusPoint& p) { return ge(fe(p)); };
    if (f.exact && g.exact) {
        std::vector<RationalFunction> ex;
        ex.reserve(g.exact->size());
        for (const auto& coord : *g.exact) ex.push_back(substitute(coord, *f.exact));
        m.exact = ex;
    }
    return m;
}

// iota_k: the monomial map induced by the lattice map f_k, pulled back to
// coordinates X'_k = X_k^{-1}, X'_j = X_j * X_k^{max(<e_k,e_j>,0)}.
inline BirationalTorusMap monomial_map_iota(const Seed& seed, int k) {
    validate(seed);
    const int n = seed.rank();
    if (k < 0 || k >= n) throw InvalidInput("iota index out of range");
    std::vector<int> expo(n, 0);
    for (int j = 0; j < n; ++j)
        if (j != k) expo[j] = std::max(seed.skew[k][j], 0);
    BirationalTorusMap m;
    m.eval = [n, k, expo](const TorusPoint& p) {
        TorusPoint q(n);
        for (int j = 0; j < n; ++j)
            q[j] = (j == k) ? 1.0 / p[k] : p[j] * detail::ipow(p[k], expo[j]);
        return q;
    };
    if (n <= kMaxVars) {
        std::vector<RationalFunction> ex(n);
        for (int j = 0; j < n; ++j) {
            if (j == k)
                ex[j] = RationalFunction::variable(k).inverse();
            else
                ex[j] = RationalFunction::variable(j) *
                        pow(RationalFunction::variable(k), expo[j]);
        }
        m.exact = ex;
    }
    return m;
}

// kappa_k: X'_j = X_j * (1 + X_k)^{<e_j, e_k>}; a pole where X_k = -1.
inline BirationalTorusMap cluster_automorphism_kappa(const Seed& seed, int k) {
    validate(seed);
    const int n = seed.rank();
    if (k < 0 || k >= n) throw InvalidInput("kappa index out of range");
    std::vector<int> expo(n);
    for (int j = 0; j < n; ++j) expo[j] = seed.skew[j][k];
    BirationalTorusMap m;
    m.eval = [n, k, expo](const TorusPoint& p) {
        const cplx f = 1.0 + p[k];
        TorusPoint q(n);
        for (int j = 0; j < n; ++j) {
            if (expo[j] < 0 && std::abs(f) < 1e-300)
                throw PoleOfMap("kappa evaluated at X_k = -1");
            q[j] = p[j] * detail::ipow(f, expo[j]);
        }
        return q;
    };
    if (n <= kMaxVars) {
        std::vector<RationalFunction> ex(n);
        RationalFunction onep = RationalFunction::constant(Rational{1}) +
                                RationalFunction::variable(k);
        for (int j = 0; j < n; ++j)
            ex[j] = RationalFunction::variable(j) * pow(onep, expo[j]);
        m.exact = ex;
    }
    return m;
}

// mu_k = iota_k o kappa_k; the new seed carries the mutated skew form.
inline std::pair<Seed, BirationalTorusMap> mutation_map(const Seed& seed, int k) {
    Seed next = seed;
    next.skew = matrix_mutation(seed.skew, k);
    BirationalTorusMap m =
        compose(monomial_map_iota(seed, k), cluster_automorphism_kappa(seed, k));
    return {next, m};
}

// The coordinate flip law: X'_k = X_k^{-1},
// X'_j = X_j (1 + X_k^{-sgn(eps_jk)})^{-eps_jk} for j != k.
inline BirationalTorusMap fg_flip_law(const ExchangeMatrix& eps, int k) {
    const int n = static_cast<int>(eps.size());
    if (k < 0 || k >= n) throw InvalidInput("flip index out of range");
    std::vector<int> e(n, 0);
    for (int j = 0; j < n; ++j)
        if (j != k) e[j] = eps[j][k];
    BirationalTorusMap m;
    m.eval = [n, k, e](const TorusPoint& p) {
        TorusPoint q(n);
        for (int j = 0; j < n; ++j) {
            if (j == k) {
                q[j] = 1.0 / p[k];
                continue;
            }
            if (e[j] == 0) {
                q[j] = p[j];
                continue;
            }
            const int s = e[j] > 0 ? 1 : -1;
            const cplx f = 1.0 + detail::ipow(p[k], -s);
            if (std::abs(f) < 1e-300) throw PoleOfMap("flip law pole");
            q[j] = p[j] * detail::ipow(f, -e[j]);
        }
        return q;
    };
    if (n <= kMaxVars) {
        std::vector<RationalFunction> ex(n);
        for (int j = 0; j < n; ++j) {
            if (j == k) {
                ex[j] = RationalFunction::variable(k).inverse();
            } else if (e[j] == 0) {
                ex[j] = RationalFunction::variable(j);
            } else {
                const int s = e[j] > 0 ? 1 : -1;
                RationalFunction f = RationalFunction::constant(Rational{1}) +
                                     pow(RationalFunction::variable(k), -s);
                ex[j] = RationalFunction::variable(j) * pow(f, -e[j]);
            }
        }
        m.exact = ex;
    }
    return m;
}

}  // namespace spectra
