#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>

#include "spectra/rational.hpp"

namespace spectra {

// Sparse Laurent polynomials over Q in up to kMaxVars variables, plus the
// fraction field. Fractions are kept unreduced; equality is decided by
// cross-multiplication, which is exact in an integral domain without any
// multivariate gcd.
constexpr int kMaxVars = 4;

using Exponents = std::array<int, kMaxVars>;

struct LaurentPoly {
    std::map<Exponents, Rational> terms;

    static LaurentPoly zero() { return {}; }
    static LaurentPoly constant(const Rational& c) {
        LaurentPoly p;
        if (!c.is_zero()) p.terms[{0, 0, 0, 0}] = c;
        return p;
    }
    static LaurentPoly one() { return constant(Rational{1}); }
    static LaurentPoly variable(int i, int power = 1) {
        LaurentPoly p;
        Exponents e{0, 0, 0, 0};
        e[i] = power;
        p.terms[e] = Rational{1};
        return p;
    }

    bool is_zero() const { return terms.empty(); }

    void add_term(const Exponents& e, const Rational& c) {
        auto it = terms.find(e);
        if (it == terms.end()) {
            if (!c.is_zero()) terms[e] = c;
        } else {
            it->second = it->second + c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }

    friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
        LaurentPoly r = a;
        for (auto& [e, c] : b.terms) r.add_term(e, c);
        return r;
    }
    friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) {
        LaurentPoly r = a;
        for (auto& [e, c] : b.terms) r.add_term(e, -c);
        return r;
    }
    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
        LaurentPoly r;
        for (auto& [ea, ca] : a.terms)
            for (auto& [eb, cb] : b.terms) {
                Exponents e;
                for (int i = 0; i < kMaxVars; ++i) e[i] = ea[i] + eb[i];
                r.add_term(e, ca * cb);
            }
        return r;
    }
    bool operator==(const LaurentPoly& o) const { return terms == o.terms; }

    std::complex<double> eval(const std::vector<std::complex<double>>& x) const {
        std::complex<double> s = 0;
        for (auto& [e, c] : terms) {
            std::complex<double> m = c.to_double();
            for (int i = 0; i < kMaxVars; ++i)
                if (e[i] != 0) m *= std::pow(x.at(i), e[i]);
            s += m;
        }
        return s;
    }
    Rational eval_rational(const std::vector<Rational>& x) const {
        Rational s{0};
        for (auto& [e, c] : terms) {
            Rational m = c;
            for (int i = 0; i < kMaxVars; ++i)
                if (e[i] != 0) m = m * pow(x.at(i), e[i]);
            s = s + m;
        }
        return s;
    }
};

inline LaurentPoly pow(LaurentPoly base, int e) {
    if (e < 0) throw OverflowError("negative power of a polynomial");
    LaurentPoly r = LaurentPoly::one();
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

// --- multivariate gcd over Q (primitive pseudo-remainder sequences) --------

namespace poly_detail {

inline LaurentPoly monomial(const Exponents& e, const Rational& c) {
    LaurentPoly p;
    if (!c.is_zero()) p.terms[e] = c;
    return p;
}

inline std::pair<Exponents, Rational> lex_lead(const LaurentPoly& p) {
    auto it = p.terms.rbegin();
    return {it->first, it->second};
}

// exact division; the caller guarantees divisibility
inline LaurentPoly div_exact(LaurentPoly a, const LaurentPoly& b) {
    if (b.is_zero()) throw OverflowError("polynomial division by zero");
    LaurentPoly q;
    auto [eb, cb] = lex_lead(b);
    while (!a.is_zero()) {
        auto [ea, ca] = lex_lead(a);
        Exponents e;
        for (int i = 0; i < kMaxVars; ++i) e[i] = ea[i] - eb[i];
        Rational c = ca / cb;
        q.add_term(e, c);
        a = a - monomial(e, c) * b;
    }
    return q;
}

inline int deg_in(const LaurentPoly& p, int v) {
    int d = 0;
    for (auto& [e, c] : p.terms) d = std::max(d, e[v]);
    return d;
}

inline LaurentPoly coeff_of(const LaurentPoly& p, int v, int d) {
    LaurentPoly r;
    for (auto& [e, c] : p.terms)
        if (e[v] == d) {
            Exponents e2 = e;
            e2[v] = 0;
            r.add_term(e2, c);
        }
    return r;
}

inline LaurentPoly shift_var(const LaurentPoly& p, int v, int d) {
    LaurentPoly r;
    for (auto& [e, c] : p.terms) {
        Exponents e2 = e;
        e2[v] += d;
        r.terms[e2] = c;
    }
    return r;
}

inline LaurentPoly normalize_lead(const LaurentPoly& p) {
    if (p.is_zero()) return p;
    auto [e, c] = lex_lead(p);
    LaurentPoly r;
    for (auto& [ee, cc] : p.terms) r.terms[ee] = cc / c;
    return r;
}

LaurentPoly poly_gcd(LaurentPoly a, LaurentPoly b);

inline LaurentPoly content_wrt(const LaurentPoly& p, int v) {
    LaurentPoly g;
    for (int d = 0; d <= deg_in(p, v); ++d) {
        LaurentPoly c = coeff_of(p, v, d);
        if (!c.is_zero()) g = poly_gcd(g, c);
    }
    return g;
}

inline LaurentPoly prem(LaurentPoly a, const LaurentPoly& b, int v) {
    const int db = deg_in(b, v);
    LaurentPoly lb = coeff_of(b, v, db);
    while (!a.is_zero() && deg_in(a, v) >= db) {
        const int da = deg_in(a, v);
        LaurentPoly la = coeff_of(a, v, da);
        a = lb * a - shift_var(la, v, da - db) * b;
    }
    return a;
}

inline LaurentPoly poly_gcd(LaurentPoly a, LaurentPoly b) {
    if (a.is_zero()) return normalize_lead(b);
    if (b.is_zero()) return normalize_lead(a);
    int v = -1;
    for (int i = 0; i < kMaxVars && v < 0; ++i)
        if (deg_in(a, i) > 0 || deg_in(b, i) > 0) v = i;
    if (v < 0) return LaurentPoly::one();  // both constants
    LaurentPoly ca = content_wrt(a, v), cb = content_wrt(b, v);
    a = div_exact(a, ca);
    b = div_exact(b, cb);
    if (deg_in(a, v) < deg_in(b, v)) std::swap(a, b);
    while (!b.is_zero()) {
        LaurentPoly r = prem(a, b, v);
        if (!r.is_zero()) r = div_exact(r, content_wrt(r, v));
        a = b;
        b = r;
    }
    return normalize_lead(poly_gcd(ca, cb) * a);
}

}  // namespace poly_detail

struct RationalFunction {
    LaurentPoly num = LaurentPoly::zero();
    LaurentPoly den = LaurentPoly::one();

    static RationalFunction variable(int i) {
        return {LaurentPoly::variable(i), LaurentPoly::one()};
    }
    static RationalFunction constant(const Rational& c) {
        return {LaurentPoly::constant(c), LaurentPoly::one()};
    }

    RationalFunction inverse() const {
        if (num.is_zero()) throw OverflowError("inverse of zero");
        return {den, num};
    }

    // cancel the polynomial gcd of numerator and denominator
    void reduce() {
        if (num.is_zero()) {
            den = LaurentPoly::one();
            return;
        }
        for (int v = 0; v < kMaxVars; ++v) {
            int m = 0;
            for (auto& [e, c] : num.terms) m = std::min(m, e[v]);
            for (auto& [e, c] : den.terms) m = std::min(m, e[v]);
            if (m != 0) {
                num = poly_detail::shift_var(num, v, -m);
                den = poly_detail::shift_var(den, v, -m);
            }
        }
        LaurentPoly g = poly_detail::poly_gcd(num, den);
        if (!(g == LaurentPoly::one())) {
            num = poly_detail::div_exact(num, g);
            den = poly_detail::div_exact(den, g);
        }
        const Rational lead = poly_detail::lex_lead(den).second;
        if (!(lead == Rational{1})) {
            LaurentPoly n2, d2;
            for (auto& [e, c] : num.terms) n2.terms[e] = c / lead;
            for (auto& [e, c] : den.terms) d2.terms[e] = c / lead;
            num = n2;
            den = d2;
        }
    }
    friend RationalFunction operator*(const RationalFunction& a,
                                      const RationalFunction& b) {
        return {a.num * b.num, a.den * b.den};
    }
    friend RationalFunction operator+(const RationalFunction& a,
                                      const RationalFunction& b) {
        return {a.num * b.den + b.num * a.den, a.den * b.den};
    }
    friend RationalFunction operator-(const RationalFunction& a,
                                      const RationalFunction& b) {
        return {a.num * b.den - b.num * a.den, a.den * b.den};
    }
    // equality in the fraction field: a/b = c/d iff ad = cb
    bool operator==(const RationalFunction& o) const {
        return num * o.den == o.num * den;
    }

    std::complex<double> eval(const std::vector<std::complex<double>>& x) const {
        auto d = den.eval(x);
        if (std::abs(d) == 0.0) throw PoleOfMap("rational function pole");
        return num.eval(x) / d;
    }
    Rational eval_rational(const std::vector<Rational>& x) const {
        Rational d = den.eval_rational(x);
        if (d.is_zero()) throw PoleOfMap("rational function pole");
        return num.eval_rational(x) / d;
    }
};

inline RationalFunction pow(const RationalFunction& base, int e) {
    if (e < 0) return pow(base.inverse(), -e);
    return RationalFunction{pow(base.num, e), pow(base.den, e)};
}

// Evaluate a Laurent polynomial with rational-function arguments.
inline RationalFunction substitute(const LaurentPoly& p,
                                   const std::vector<RationalFunction>& args) {
    RationalFunction s = RationalFunction::constant(Rational{0});
    for (auto& [e, c] : p.terms) {
        RationalFunction m = RationalFunction::constant(c);
        for (int i = 0; i < kMaxVars; ++i)
            if (e[i] != 0) m = m * pow(args.at(i), e[i]);
        s = s + m;
        s.reduce();
    }
    return s;
}

inline RationalFunction substitute(const RationalFunction& f,
                                   const std::vector<RationalFunction>& args) {
    RationalFunction n = substitute(f.num, args);
    RationalFunction d = substitute(f.den, args);
    if (d.num.is_zero()) throw PoleOfMap("substitution hit a pole");
    RationalFunction r{n.num * d.den, n.den * d.num};
    r.reduce();
    return r;
}

}  // namespace spectra
