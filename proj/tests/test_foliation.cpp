#include <doctest.h>

#include <cmath>
#include <set>

#include "spectra/foliation.hpp"

using namespace spectra;

namespace {

QuadraticDifferential a1() { return {Poly{-1, 0, 1}, {}, +1}; }

// cubic z^3 - 3z + c; chamber depends on c
QuadraticDifferential a2(cplx c) { return {Poly{c, -3, 0, 1}, {}, +1}; }

bool angle_set_equal(std::vector<double> a, std::vector<double> b, double tol) {
    if (a.size() != b.size()) return false;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (size_t i = 0; i < a.size(); ++i) {
        double d = std::abs(a[i] - b[i]);
        d = std::min(d, std::abs(d - 2 * M_PI));
        if (d > tol) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("vertical saddle of (z^2-1) dz^2 through the origin") {
    auto ctx = make_context(a1());
    // the segment [-1,1] is a theta = 1/2 trajectory through the origin
    Trajectory up = integrate_trajectory(ctx, cplx(0, 0), 0.5, +1);
    Trajectory dn = integrate_trajectory(ctx, cplx(0, 0), 0.5, -1);
    std::set<int> hits;
    REQUIRE(up.termination == Termination::ZeroHit);
    REQUIRE(dn.termination == Termination::ZeroHit);
    hits.insert(up.hit_zero);
    hits.insert(dn.hit_zero);
    CHECK(hits == std::set<int>{0, 1});
}

TEST_CASE("z dz^2 horizontal trajectory escapes along an asymptotic direction") {
    QuadraticDifferential qd{Poly{0, 1}, {}, +1};
    auto ctx = make_context(qd);
    Trajectory tr = integrate_trajectory(ctx, cplx(1, 0), 0.0, +1);
    CHECK(tr.termination == Termination::PoleSector);
    const double ang = std::arg(tr.points.back());
    bool near_dir = false;
    for (double d : {0.0, 2 * M_PI / 3, -2 * M_PI / 3})
        if (std::abs(std::remainder(ang - d, 2 * M_PI)) < 0.05) near_dir = true;
    CHECK(near_dir);
}

TEST_CASE("double pole with real residue has closed circle trajectories") {
    // phi = (-2 + z/4)/z^2: r = -2 at the pole, residue -+ 4 pi sqrt(2) real
    QuadraticDifferential probe{Poly{-2, 0.25}, {{cplx(0, 0), 2, +1}}, +1};
    auto rd = residue(probe, 0, +1);
    CHECK(std::abs(rd.residue.imag()) < 1e-12);
    auto ctx = make_context(probe);
    Trajectory tr = integrate_trajectory(ctx, cplx(0.05, 0), 0.0, +1);
    CHECK(tr.termination == Termination::Closed);
}

TEST_CASE("straightness drift stays small along trajectories") {
    auto ctx = make_context(a1());
    for (double theta : {0.13, 0.47, 0.81}) {
        Trajectory tr = integrate_trajectory(ctx, cplx(0.2, 0.4), theta, +1);
        CHECK(tr.straightness < 1e-6 * std::max(1.0, tr.arc_length));
    }
}

TEST_CASE("prong directions of z dz^2") {
    QuadraticDifferential qd{Poly{0, 1}, {}, +1};
    auto ctx = make_context(qd);
    auto p0 = critical_prongs(ctx, 0, 0.0);
    CHECK(angle_set_equal(p0, {0, 2 * M_PI / 3, 4 * M_PI / 3}, 1e-6));
    // spacing is exactly 2 pi / 3
    CHECK(std::abs((p0[1] - p0[0]) - 2 * M_PI / 3) < 1e-9);
    CHECK(std::abs((p0[2] - p0[1]) - 2 * M_PI / 3) < 1e-9);
    // prongs at phase theta equal prongs of the rotated differential at 0
    const double theta = 0.29;
    auto rot_ctx = make_context(rotate(qd, M_PI * theta));
    CHECK(angle_set_equal(critical_prongs(ctx, 0, theta),
                          critical_prongs(rot_ctx, 0, 0.0), 1e-9));
    // back-integration: a horizontal trajectory seeded on a prong hits the zero
    Trajectory back = integrate_trajectory(
        ctx, cplx(0.3, 0), 0.0, -1);
    CHECK(back.termination == Termination::ZeroHit);
}

TEST_CASE("A1 spectrum: a single saddle at theta = 1/2 with Z = i pi") {
    auto ctx = make_context(a1());
    SpectrumTable table = find_saddles(ctx, 10.0);
    REQUIRE(table.saddles.size() == 1);
    const auto& sc = table.saddles[0];
    CHECK(std::abs(sc.theta - 0.5) < 1e-8);
    CHECK(std::abs(sc.Z - cplx(0, M_PI)) < 1e-8);
    CHECK(std::minmax(sc.zero_a, sc.zero_b) == std::minmax(0, 1));
    CHECK(sc.period_mismatch < 1e-8);
    CHECK(table.rings.empty());
}

TEST_CASE("rotate-equivariance of the saddle spectrum") {
    auto ctx = make_context(a1());
    const double t0 = 0.2;
    auto rot = make_context(rotate(a1(), M_PI * t0));
    SpectrumTable base = find_saddles(ctx, 10.0);
    SpectrumTable shifted = find_saddles(rot, 10.0);
    REQUIRE(base.saddles.size() == shifted.saddles.size());
    double th = base.saddles[0].theta - t0;
    if (th <= 0) th += 1;
    CHECK(std::abs(shifted.saddles[0].theta - th) < 1e-7);
    CHECK(std::abs(shifted.saddles[0].Z -
                   std::polar(1.0, -M_PI * t0) * base.saddles[0].Z) < 1e-7);
}

TEST_CASE("saddle-free tests") {
    auto ctx = make_context(a1());
    auto rep = is_saddle_free(ctx);
    CHECK(rep.saddle_free);  // the only saddle is vertical

    // rotating by pi/4 keeps it saddle-free
    auto rot = make_context(rotate(a1(), M_PI / 4));
    CHECK(is_saddle_free(rot).saddle_free);

    // rotating the saddle to horizontal makes it fail, with a witness
    auto bad = make_context(rotate(a1(), M_PI / 2));
    auto brep = is_saddle_free(bad);
    CHECK_FALSE(brep.saddle_free);
    REQUIRE(brep.witness.has_value());
}

TEST_CASE("WKB triangulation of (z^2-1) dz^2: square with one diagonal") {
    auto ctx = make_context(a1());
    WkbResult wkb = wkb_triangulation(ctx);
    CHECK(wkb.surface == MarkedBorderedSurface{0, {4}, 0});
    CHECK(wkb.T.n() == 1);
    CHECK(wkb.T.arcs[0].is_chord());
}

TEST_CASE("WKB triangulation of a cubic: pentagon with two arcs") {
    auto ctx = make_context(a2(cplx(0, 2)));
    WkbResult wkb = wkb_triangulation(ctx);
    CHECK(wkb.surface == MarkedBorderedSurface{0, {5}, 0});
    CHECK(wkb.T.n() == 2);
    // strip census: every strip hosts at least one probe, 9 probes in total
    size_t probes = 0;
    for (auto& sp : wkb.strip_probes) {
        CHECK(!sp.empty());
        probes += sp.size();
    }
    CHECK(probes <= 9);
}

TEST_CASE("hat basis of A1: rank 1, Z = i pi") {
    auto ctx = make_context(a1());
    HatBasis hb = hat_basis(ctx);
    REQUIRE(hb.periods.size() == 1);
    CHECK(std::abs(hb.periods[0] - cplx(0, M_PI)) < 1e-8);
    CHECK(hb.skew == ExchangeMatrix{{0}});
}

TEST_CASE("A2 hat basis: periods in H and saddle classes decompose") {
    auto ctx = make_context(a2(cplx(0, 2)));
    HatBasis hb = hat_basis(ctx);
    REQUIRE(hb.periods.size() == 2);
    for (const auto& Z : hb.periods) {
        CHECK((Z.imag() > 0 || (Z.imag() == 0 && Z.real() < 0)));
    }
    // the exchange matrix of the A2 triangulation has a single +-1 pair
    CHECK(std::abs(hb.skew[0][1]) == 1);
}

TEST_CASE("BPS invariants of A1") {
    auto ctx = make_context(a1());
    BpsOutcome bps = bps_invariants(ctx, 10.0);
    REQUIRE(bps.omega.size() == 1);
    auto it = bps.omega.begin();
    CHECK(it->first == std::vector<int>{1});
    CHECK(it->second == 1);
    CHECK(bps.generic);
    CHECK(bps.support_constant > 0);
}

TEST_CASE("A2 chambers: 2 saddles on one side of the wall, 3 on the other") {
    // chamber representatives located by the dense-scan oracle
    auto small_ctx = make_context(a2(cplx(0.4, 0.2)));
    BpsOutcome small = bps_invariants(small_ctx, 40.0);
    auto big_ctx = make_context(a2(cplx(0, 2)));
    BpsOutcome big = bps_invariants(big_ctx, 40.0);
    const size_t counts[2] = {small.omega.size(), big.omega.size()};
    const size_t lo = std::min(counts[0], counts[1]);
    const size_t hi = std::max(counts[0], counts[1]);
    CHECK(lo == 2);
    CHECK(hi == 3);
    // every invariant is 1 and the third class is the sum of the basis ones
    for (auto& [klass, om] : small.omega) CHECK(om == 1);
    for (auto& [klass, om] : big.omega) CHECK(om == 1);
    const auto& bigger = counts[0] > counts[1] ? small : big;
    bool has_sum = bigger.omega.count({1, 1}) > 0;
    CHECK(has_sum);
    // period additivity for the sum class
    const auto& bb = bigger.basis;
    for (auto& sc : bigger.table.saddles)
        if (sc.klass == std::vector<int>{1, 1})
            CHECK(std::abs(sc.Z - (bb.periods[0] + bb.periods[1])) < 1e-8);
}

TEST_CASE("Omega of the zero class vanishes and symmetry is by construction") {
    auto ctx = make_context(a1());
    BpsOutcome bps = bps_invariants(ctx, 10.0);
    CHECK(bps.omega.count(std::vector<int>{0}) == 0);
}

TEST_CASE("parallel saddle classes are flagged as non-generic") {
    // (z^2-1)(z^2-4) has two vertical saddles with non-proportional classes
    // and parallel periods; rotating clears the horizontal saddle
    QuadraticDifferential quartic{Poly{4, 0, -5, 0, 1}, {}, +1};
    auto sym = make_context(rotate(quartic, 0.3));
    BpsOutcome bad = bps_invariants(sym, 1e9);
    CHECK_FALSE(bad.generic);
    // a perturbation separates the parallel periods
    QuadraticDifferential pert{Poly{cplx(4, 0.9), cplx(0.4, 0), -5, 0, 1}, {}, +1};
    auto gen = make_context(rotate(pert, 0.3));
    CHECK(is_generic(gen, 1e9));
}

TEST_CASE("WKB triangulation of (z^3+1) dz^2 is a pentagon with 2 arcs") {
    QuadraticDifferential qd{Poly{1, 0, 0, 1}, {}, +1};
    auto ctx = make_context(qd);
    REQUIRE(is_saddle_free(ctx).saddle_free);
    WkbResult wkb = wkb_triangulation(ctx);
    CHECK(wkb.surface == MarkedBorderedSurface{0, {5}, 0});
    CHECK(wkb.T.n() == 2);
}
