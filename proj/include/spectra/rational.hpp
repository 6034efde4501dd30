#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "spectra/errors.hpp"

namespace spectra {

// Exact rational arithmetic on int64 with overflow-checked operations.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n) : num(n), den(1) {}
    Rational(long long n, long long d) : num(n), den(d) { normalize(); }

    static long long checked(__int128 v) {
        if (v > INT64_MAX || v < INT64_MIN)
            throw OverflowError("rational arithmetic exceeded 64 bits");
        return static_cast<long long>(v);
    }

    void normalize() {
        if (den == 0) throw OverflowError("zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num * b.den + (__int128)b.num * a.den;
        __int128 d = (__int128)a.den * b.den;
        Rational r;
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        r.num = checked(n);
        r.den = checked(d);
        return r;
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return a + Rational{-b.num, b.den, true};
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num * b.num;
        __int128 d = (__int128)a.den * b.den;
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        Rational r;
        r.num = checked(n);
        r.den = checked(d);
        return r;
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num == 0) throw OverflowError("division by zero rational");
        return a * Rational{b.den, b.num, true};
    }
    Rational operator-() const { return Rational{-num, den, true}; }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const {
        return (__int128)num * o.den < (__int128)o.num * den;
    }
    bool is_zero() const { return num == 0; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const {
        return den == 1 ? std::to_string(num)
                        : std::to_string(num) + "/" + std::to_string(den);
    }

  private:
    // raw constructor, assumes already normalized up to sign
    Rational(long long n, long long d, bool) : num(n), den(d) {
        if (den < 0) { num = -num; den = -den; }
    }
    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a < 0 ? -a : a;
    }
};

inline Rational pow(Rational base, int e) {
    if (e < 0) return Rational{1} / pow(base, -e);
    Rational r{1};
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

}  // namespace spectra
