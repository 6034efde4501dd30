#include <doctest.h>

#include <cmath>
#include <random>

#include "spectra/bps.hpp"

using namespace spectra;

namespace {

std::mt19937_64 rng(777);

cplx random_value() {
    std::uniform_real_distribution<double> mag(0.2, 5.0), arg(-2.8, 2.8);
    return std::polar(mag(rng), arg(rng));
}

std::vector<int> random_class(int n, int bound = 4) {
    std::uniform_int_distribution<int> d(-bound, bound);
    std::vector<int> g(n);
    for (int& v : g) v = d(rng);
    return g;
}

// abstract A2 structure with unit invariants on e1, e2, e1+e2
BPSStructure abstract_a2() {
    BPSStructure b;
    b.rank = 2;
    b.skew = {{0, 1}, {-1, 0}};
    b.central_charge = {std::polar(1.0, 0.4), std::polar(1.3, 2.2)};
    b.omega[{1, 0}] = Rational{1};
    b.omega[{0, 1}] = Rational{1};
    b.omega[{1, 1}] = Rational{1};
    validate(b);
    return b;
}

BPSStructure a1_structure() {
    auto ctx = make_context(QuadraticDifferential{Poly{-1, 0, 1}, {}, +1});
    return from_differential(bps_invariants(ctx, 10.0));
}

}  // namespace

TEST_CASE("BPS structure of the A1 differential") {
    BPSStructure b = a1_structure();
    CHECK(b.rank == 1);
    CHECK(std::abs(b.central_charge[0] - cplx(0, M_PI)) < 1e-8);
    CHECK(b.omega_of({1}) == Rational{1});
    CHECK(b.omega_of({-1}) == Rational{1});
    CHECK(b.omega_of({2}) == Rational{0});
    CHECK(support_constant(b) > 3.0);
}

TEST_CASE("A2 differentials have |Omega| <= 2") {
    auto ctx = make_context(QuadraticDifferential{Poly{cplx(0, 2), -3, 0, 1}, {}, +1});
    BPSStructure b = from_differential(bps_invariants(ctx, 40.0));
    for (auto& [g, om] : b.omega) {
        Rational a = om;
        if (a.num < 0) a = -a;
        CHECK((a < Rational{2} || a == Rational{2}));
    }
}

TEST_CASE("DT invariants: primitive classes and the m=2 term") {
    BPSStructure b;
    b.rank = 1;
    b.skew = {{0}};
    b.central_charge = {cplx(0, 1)};
    b.omega[{1}] = Rational{1};
    validate(b);
    CHECK(dt_invariant(b, {1}) == Rational{1});
    CHECK(dt_invariant(b, {2}) == Rational{1, 4});  // only the m=2 term
    CHECK(dt_invariant(b, {3}) == Rational{1, 9});
}

TEST_CASE("DT <-> Omega Moebius round trip is exact on Q") {
    for (int trial = 0; trial < 30; ++trial) {
        BPSStructure b;
        b.rank = 2;
        b.skew = {{0, 1}, {-1, 0}};
        b.central_charge = {random_value(), random_value()};
        // random finite support on multiples of a primitive, divisors <= 20
        std::uniform_int_distribution<int> num(-3, 3);
        for (int m = 1; m <= 20; ++m)
            if (num(rng) != 0)
                b.omega[canonical_class({m, m})] = Rational{num(rng)};
        b.omega[{1, 0}] = Rational{2};
        auto dt = [&](const std::vector<int>& g) { return dt_invariant(b, g); };
        for (int m = 1; m <= 20; ++m) {
            std::vector<int> g{m, m};
            CHECK(bps_from_dt(dt, g) == b.omega_of(g));
        }
        CHECK(bps_from_dt(dt, {1, 0}) == Rational{2});
        CHECK(bps_from_dt(dt, {0, 1}) == Rational{0});
    }
}

TEST_CASE("ray diagrams") {
    BPSStructure a1 = a1_structure();
    RayDiagram d1 = ray_diagram(a1);
    REQUIRE(d1.rays.size() == 2);
    CHECK(std::abs(d1.rays[0].phase - M_PI / 2) < 1e-9);
    CHECK(std::abs(d1.rays[1].phase - 3 * M_PI / 2) < 1e-9);
    CHECK(std::abs(d1.rays[0].height - M_PI) < 1e-8);

    BPSStructure a2 = abstract_a2();
    RayDiagram d2 = ray_diagram(a2);
    CHECK(d2.rays.size() == 6);

    CHECK(std::isinf(ray_height(d1, 0.3)));  // non-active ray
}

TEST_CASE("xi basepoint values") {
    BPSStructure b = abstract_a2();
    TwistedTorusPoint xi = xi_basepoint(b);
    CHECK(std::abs(xi({1, 0}) - cplx(-1, 0)) < 1e-14);
    CHECK(std::abs(xi({0, 1}) - cplx(-1, 0)) < 1e-14);
    // xi(e1+e2) = (-1)^{<e1,e2>} (-1)(-1) = -1
    CHECK(std::abs(xi({1, 1}) - cplx(-1, 0)) < 1e-14);
    CHECK(std::abs(xi({0, 0}) - cplx(1, 0)) < 1e-14);
    // xi(2 e1) = (-1)^{<e1,e1>} xi(e1)^2 = +1
    CHECK(std::abs(xi({2, 0}) - cplx(1, 0)) < 1e-14);
    // a closed basis class flips to +1
    TwistedTorusPoint xi2 = xi_basepoint(b, {0, 1});
    CHECK(std::abs(xi2({0, 1}) - cplx(1, 0)) < 1e-14);
}

TEST_CASE("twisted multiplicativity on 200 random lattice pairs") {
    BPSStructure b = abstract_a2();
    for (int t = 0; t < 10; ++t) {
        TwistedTorusPoint g = twisted_point(b, {random_value(), random_value()});
        for (int p = 0; p < 20; ++p) {
            auto g1 = random_class(2), g2 = random_class(2);
            std::vector<int> sum{g1[0] + g2[0], g1[1] + g2[1]};
            const double sgn = (b.pairing(g1, g2) % 2 == 0) ? 1.0 : -1.0;
            const cplx lhs = g(sum);
            const cplx rhs = sgn * g(g1) * g(g2);
            CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("BPS automorphism formula cases") {
    BPSStructure b = abstract_a2();
    // single class gamma = e2, Omega = 1, <e1, gamma> = 1: x1 -> x1 (1 - x_g)
    BpsAutomorphism s;
    s.bps = &b;
    s.classes = {{0, 1}};
    s.omegas = {1};
    TwistedTorusPoint p = twisted_point(b, {cplx(2, 0), cplx(3, 0)});
    auto q = s(p);
    CHECK(std::abs(q.basis_values[0] - cplx(2, 0) * (1.0 - cplx(3, 0))) < 1e-13);
    CHECK(std::abs(q.basis_values[1] - cplx(3, 0)) < 1e-13);

    // Omega = -2 (ring class): exponent -2 <beta, gamma>
    BpsAutomorphism r;
    r.bps = &b;
    r.classes = {{0, 1}};
    r.omegas = {-2};
    auto q2 = r(p);
    CHECK(std::abs(q2.basis_values[0] - cplx(2, 0) / ((1.0 - cplx(3, 0)) *
                                                      (1.0 - cplx(3, 0)))) < 1e-13);
}

TEST_CASE("pentagon identity for the twisted wall-crossing maps") {
    BPSStructure b = abstract_a2();
    BpsAutomorphism s1{&b, {{1, 0}}, {1}};
    BpsAutomorphism s2{&b, {{0, 1}}, {1}};
    BpsAutomorphism s12{&b, {{1, 1}}, {1}};
    for (int t = 0; t < 100; ++t) {
        TwistedTorusPoint p = twisted_point(b, {random_value(), random_value()});
        auto lhs = s1(s2(p));
        auto rhs = s2(s12(s1(p)));
        for (int i = 0; i < 2; ++i)
            CHECK(std::abs(lhs.basis_values[i] - rhs.basis_values[i]) <
                  1e-10 * std::max(1.0, std::abs(rhs.basis_values[i])));
    }
}

TEST_CASE("S(l) preserves the twisted Poisson bracket") {
    BPSStructure b = abstract_a2();
    BpsAutomorphism s{&b, {{0, 1}}, {1}};
    const double h = 1e-6;
    for (int t = 0; t < 20; ++t) {
        std::vector<cplx> x{random_value(), random_value()};
        auto F = [&](const std::vector<cplx>& v) {
            return s(twisted_point(b, v)).basis_values[0];
        };
        auto G = [&](const std::vector<cplx>& v) {
            return s(twisted_point(b, v)).basis_values[1];
        };
        cplx dF[2], dG[2];
        for (int i = 0; i < 2; ++i) {
            auto xp = x, xm = x;
            const double step = h * std::abs(x[i]);
            xp[i] += step;
            xm[i] -= step;
            dF[i] = (F(xp) - F(xm)) / (2 * step);
            dG[i] = (G(xp) - G(xm)) / (2 * step);
        }
        cplx lhs = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (b.skew[i][j] != 0)
                    lhs += double(b.skew[i][j]) * x[i] * x[j] * dF[i] * dG[j];
        cplx rhs = double(b.skew[0][1]) * F(x) * G(x);
        CHECK(std::abs(lhs - rhs) < 1e-6 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("sector composition: empty, single ray, H-stability") {
    BPSStructure b = abstract_a2();
    TwistedTorusPoint p = twisted_point(b, {random_value(), random_value()});
    // a sector with no active rays acts as the identity
    auto q = sector_composition(b, 3.5, 4.0, p);
    CHECK(std::abs(q.basis_values[0] - p.basis_values[0]) < 1e-14);
    // a single-ray sector equals the ray automorphism
    const double ph = std::arg(b.Z({1, 0}));
    auto single = sector_composition(b, ph - 0.05, ph + 0.05, p);
    auto direct = bps_automorphism(b, ph)(p);
    CHECK(std::abs(single.basis_values[0] - direct.basis_values[0]) < 1e-13);
    CHECK(std::abs(single.basis_values[1] - direct.basis_values[1]) < 1e-13);
    // independence of the height cutoff once it exceeds every |Z|
    auto full1 = sector_composition(b, 0.1, 3.1, p, 50.0);
    auto full2 = sector_composition(b, 0.1, 3.1, p, 5000.0);
    CHECK(std::abs(full1.basis_values[0] - full2.basis_values[0]) < 1e-14);
    // boundary on an active ray is rejected
    CHECK_THROWS_AS(sector_composition(b, ph, ph + 1.0, p), ActiveBoundary);
}

TEST_CASE("chamber invariance of the A2 sector composition") {
    // detected spectra on the two sides of the wall
    auto ctx_small = make_context(QuadraticDifferential{Poly{cplx(0.4, 0.2), -3, 0, 1}, {}, +1});
    auto ctx_big = make_context(QuadraticDifferential{Poly{cplx(0, 2), -3, 0, 1}, {}, +1});
    BPSStructure small = from_differential(bps_invariants(ctx_small, 40.0));
    BPSStructure big = from_differential(bps_invariants(ctx_big, 40.0));
    REQUIRE(small.omega.size() == 2);
    REQUIRE(big.omega.size() == 3);
    REQUIRE(std::abs(small.skew[0][1]) == 1);
    REQUIRE(std::abs(big.skew[0][1]) == 1);
    // match the bases so that <e1, e2> = 1 in both structures
    auto orient = [](BPSStructure& b) {
        if (b.skew[0][1] == -1) {
            std::swap(b.central_charge[0], b.central_charge[1]);
            b.skew = {{0, 1}, {-1, 0}};
            std::map<std::vector<int>, Rational> om;
            for (auto& [g, v] : b.omega) om[canonical_class({g[1], g[0]})] = v;
            b.omega = om;
        }
    };
    orient(small);
    orient(big);
    // all active rays live in the upper half plane; compose across it
    for (int t = 0; t < 100; ++t) {
        TwistedTorusPoint ps = twisted_point(small, {random_value(), random_value()});
        TwistedTorusPoint pb = twisted_point(big, ps.basis_values);
        auto qs = sector_composition(small, 1e-4, M_PI - 1e-4, ps);
        auto qb = sector_composition(big, 1e-4, M_PI - 1e-4, pb);
        for (int i = 0; i < 2; ++i)
            CHECK(std::abs(qs.basis_values[i] - qb.basis_values[i]) <
                  1e-10 * std::max(1.0, std::abs(qb.basis_values[i])));
    }
}

TEST_CASE("non-generic differentials are rejected by from_differential") {
    QuadraticDifferential quartic{Poly{4, 0, -5, 0, 1}, {}, +1};
    auto ctx = make_context(rotate(quartic, 0.3));
    BpsOutcome out = bps_invariants(ctx, 1e9);
    CHECK_THROWS_AS(from_differential(out), NotGeneric);
}
