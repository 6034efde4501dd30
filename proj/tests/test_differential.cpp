#include <doctest.h>

#include <cmath>

#include "spectra/differential.hpp"

using namespace spectra;

namespace {

QuadraticDifferential a1() {  // (z^2 - 1) dz^2
    return QuadraticDifferential{Poly{-1, 0, 1}, {}, +1};
}

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

TEST_CASE("critical points of the basic examples") {
    {
        QuadraticDifferential qd{Poly{0, 1}, {}, +1};  // z dz^2
        auto cp = critical_points(qd);
        REQUIRE(cp.zeros.size() == 1);
        CHECK(std::abs(cp.zeros[0]) < 1e-12);
        CHECK(cp.infinity_order == 5);
    }
    {
        auto cp = critical_points(a1());
        REQUIRE(cp.zeros.size() == 2);
        CHECK(std::abs(cp.zeros[0] + 1.0) < 1e-12);
        CHECK(std::abs(cp.zeros[1] - 1.0) < 1e-12);
        CHECK(cp.infinity_order == 6);
    }
    {
        QuadraticDifferential qd{Poly{0, 1}, {{cplx(2, 0), 2, +1}}, +1};
        auto cp = critical_points(qd);
        REQUIRE(cp.zeros.size() == 1);
        CHECK(cp.infinity_order == 3);
    }
}

TEST_CASE("repeated zeros are rejected") {
    QuadraticDifferential qd{Poly{0, 0, 1}, {{cplx(2, 0), 2, +1}}, +1};  // z^2
    CHECK_THROWS_AS(critical_points(qd), NonSimpleZero);
}

TEST_CASE("degree identity: zeros minus pole orders is -4") {
    auto check = [](const QuadraticDifferential& qd) {
        auto cp = critical_points(qd);
        int zeros = static_cast<int>(cp.zeros.size()) +
                    std::max(0, -cp.infinity_order);
        int poles = std::max(0, cp.infinity_order);
        for (auto& p : cp.poles) poles += p.order;
        CHECK(zeros - poles == -4);
    };
    check(QuadraticDifferential{Poly{0, 1}, {}, +1});
    check(a1());
    check(QuadraticDifferential{Poly{0, 1}, {{cplx(2, 0), 2, +1}}, +1});
    check(QuadraticDifferential{Poly{1, 0, 0, 1}, {}, +1});
    check(QuadraticDifferential{Poly{0, 1}, {{cplx(1, 1), 3, +1}}, +1});
}

TEST_CASE("residues at double poles") {
    {
        QuadraticDifferential qd{Poly{1}, {{cplx(0, 0), 2, +1}}, +1};  // 1/z^2
        auto rd = residue(qd, 0, +1);
        CHECK(std::abs(rd.r - cplx(1, 0)) < 1e-14);
        CHECK(std::abs(rd.residue - cplx(0, 4 * M_PI)) < 1e-12);
    }
    {
        QuadraticDifferential qd{Poly{-0.25}, {{cplx(0, 0), 2, +1}}, +1};
        auto rd = residue(qd, 0, +1);
        CHECK(std::abs(rd.residue - cplx(-2 * M_PI, 0)) < 1e-12);
        auto rm = residue(qd, 0, -1);
        CHECK(std::abs(rm.residue + rd.residue) < 1e-14);
    }
}

TEST_CASE("residue at infinity matches the w-chart series oracle") {
    // 1/(z(z-1)) has a double pole at infinity with leading coefficient 1
    QuadraticDifferential qd{Poly{1}, {{cplx(0, 0), 1, +1}, {cplx(1, 0), 1, +1}}, +1};
    CHECK(infinity_order(qd) == 2);
    auto rd = residue_at_infinity(qd, +1);
    CHECK(std::abs(rd.r - cplx(1, 0)) < 1e-14);
    // series oracle: lim w^2 * phi_w(w) as w -> 0
    for (double w : {1e-3, 1e-4, 1e-5}) {
        cplx est = w * w * phi_w(qd, cplx(w, 0));
        CHECK(std::abs(est - rd.r) < 10 * w);
    }
    // and at a complex approach direction
    cplx w = cplx(1e-5, 2e-5);
    CHECK(std::abs(w * w * phi_w(qd, w) - rd.r) < 1e-3);
}

TEST_CASE("rotation scales the numerator") {
    auto qd = a1();
    auto full = rotate(qd, M_PI);
    for (size_t i = 0; i < qd.numerator.size(); ++i)
        CHECK(std::abs(full.numerator[i] - qd.numerator[i]) < 1e-14);
    auto half = rotate(qd, M_PI / 2);
    for (size_t i = 0; i < qd.numerator.size(); ++i)
        CHECK(std::abs(half.numerator[i] + qd.numerator[i]) < 1e-14);
}

TEST_CASE("asymptotic directions") {
    QuadraticDifferential qd{Poly{0, 1}, {}, +1};  // z dz^2, order 5 at infinity
    auto dirs = asymptotic_directions_at_infinity(qd);
    CHECK(angle_set_equal(dirs, {0, 2 * M_PI / 3, 4 * M_PI / 3}, 1e-12));

    // m = 3 with a0 = 1: single direction at angle 0
    QuadraticDifferential q3{Poly{1}, {{cplx(0, 0), 3, +1}}, +1};
    auto d3 = asymptotic_directions(q3, 0);
    REQUIRE(d3.size() == 1);
    CHECK(std::abs(d3[0]) < 1e-12);

    // rotation shifts every direction by -2 theta / (m - 2)
    const double theta = 0.37;
    auto rot = asymptotic_directions_at_infinity(rotate(qd, theta));
    std::vector<double> expect;
    for (double a : dirs) {
        double b = std::fmod(a - 2 * theta / 3 + 4 * M_PI, 2 * M_PI);
        expect.push_back(b);
    }
    CHECK(angle_set_equal(rot, expect, 1e-12));
}

TEST_CASE("marked bordered surfaces of the desk examples") {
    {
        QuadraticDifferential qd{Poly{1, 0, 0, 1}, {}, +1};  // z^3 + 1
        auto s = marked_bordered_surface(qd);
        CHECK(s == MarkedBorderedSurface{0, {5}, 0});
    }
    {
        auto s = marked_bordered_surface(a1());
        CHECK(s == MarkedBorderedSurface{0, {4}, 0});
    }
    {
        QuadraticDifferential qd{Poly{0, 1}, {{cplx(2, 0), 2, +1}}, +1};
        auto s = marked_bordered_surface(qd);
        CHECK(s == MarkedBorderedSurface{0, {1}, 1});
    }
}

TEST_CASE("A1 period has closed form i pi") {
    auto qd = a1();
    PeriodPath path{{cplx(-1, 0), cplx(1, 0)}, cplx(0, 1)};
    auto pr = period(qd, path);
    CHECK(std::abs(pr.Z - cplx(0, M_PI)) < 1e-10);

    // reversed orientation negates
    PeriodPath rev{{cplx(1, 0), cplx(-1, 0)}, cplx(0, 1)};
    CHECK(std::abs(period(qd, rev).Z + cplx(0, M_PI)) < 1e-10);

    // opposite initial sheet negates
    PeriodPath opp{{cplx(-1, 0), cplx(1, 0)}, cplx(0, -1)};
    CHECK(std::abs(period(qd, opp).Z + cplx(0, M_PI)) < 1e-10);
}

TEST_CASE("periods are homotopy invariant and additive on subdivisions") {
    auto qd = a1();
    PeriodPath direct{{cplx(-1, 0), cplx(1, 0)}, cplx(0, 1)};
    PeriodPath bent{{cplx(-1, 0), cplx(0, 0.6), cplx(1, 0)}, cplx(0, 1)};
    auto zd = period(qd, direct).Z;
    auto zb = period(qd, bent).Z;
    CHECK(std::abs(zd - zb) < 1e-9);
}

TEST_CASE("period rotation law") {
    auto qd = a1();
    const double theta = 0.3;
    PeriodPath path{{cplx(-1, 0), cplx(1, 0)},
                    std::polar(1.0, -theta) * cplx(0, 1)};
    auto zr = period(rotate(qd, theta), path).Z;
    CHECK(std::abs(zr - std::polar(1.0, -theta) * cplx(0, M_PI)) < 1e-9);
}

TEST_CASE("quadrature error tracks the tolerance") {
    auto qd = a1();
    PeriodPath path{{cplx(-1, 0), cplx(1, 0)}, cplx(0, 1)};
    Config loose, tight;
    loose.quad_tol = 1e-8;
    tight.quad_tol = 1e-13;
    auto zl = period(qd, path, loose);
    auto zt = period(qd, path, tight);
    CHECK(std::abs(zl.Z - zt.Z) <= std::max(1e-12, 10 * zl.err));
    CHECK(std::abs(zt.Z - cplx(0, M_PI)) < 1e-11);
}

TEST_CASE("paths through a zero are rejected") {
    auto qd = a1();
    // straight through the zero at z = 1 midway
    PeriodPath bad{{cplx(0.5, 0), cplx(1.5, 0)}, {}};
    CHECK_THROWS_AS(period(qd, bad), SheetAmbiguity);
}
