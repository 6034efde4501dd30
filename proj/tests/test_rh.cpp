#include <doctest.h>

#include <cmath>

#include "spectra/rh.hpp"

using namespace spectra;

namespace {

QuadraticDifferential a1() { return {Poly{-1, 0, 1}, {}, +1}; }

}  // namespace

TEST_CASE("x function basics on A1") {
    RHProblem p = make_rh_problem(a1());
    REQUIRE(p.bps.rank == 1);
    // gamma = 0 evaluates to 1 on any non-active ray
    CHECK(std::abs(x_function(p, 0.0, {0}, cplx(0.4, 0)) - 1.0) < 1e-12);
    // active ray is rejected
    CHECK_THROWS_AS(x_function(p, M_PI / 2, {1}, cplx(0.1, 0.1)), ActiveRay);
    // half-plane membership enforced
    CHECK_THROWS_AS(x_function(p, 0.0, {1}, cplx(-1, 0)), InvalidInput);
}

TEST_CASE("A1 small-t value matches the RH2 trend") {
    RHProblem p = make_rh_problem(a1());
    const cplx val = x_function(p, 0.0, {1}, cplx(0.2, 0));
    // Z = i pi, xi(gamma) = -1
    CHECK(std::abs(std::exp(cplx(0, M_PI) / 0.2) * val - cplx(-1, 0)) < 0.05);
}

TEST_CASE("twisted monomiality of the solution") {
    QuadraticDifferential cubic{Poly{cplx(0, 2), -3, 0, 1}, {}, +1};
    RHProblem p = make_rh_problem(cubic);
    REQUIRE(p.bps.rank == 2);
    const cplx t(0.6, 0.1);
    const cplx x1 = x_function(p, 0.0, {1, 0}, t);
    const cplx x2 = x_function(p, 0.0, {0, 1}, t);
    const cplx x12 = x_function(p, 0.0, {1, 1}, t);
    const double sgn = (p.bps.pairing({1, 0}, {0, 1}) % 2 == 0) ? 1.0 : -1.0;
    CHECK(std::abs(x12 - sgn * x1 * x2) < 1e-8 * std::abs(x12));
}

TEST_CASE("ray independence within a chamber") {
    RHProblem p = make_rh_problem(a1());
    const cplx t = std::polar(0.35, 0.2);
    const cplx a = x_function(p, 0.1, {1}, t);
    const cplx b = x_function(p, 0.3, {1}, t);
    CHECK(std::abs(a - b) < 1e-7 * std::max(1.0, std::abs(a)));
}

TEST_CASE("RH2 report on A1") {
    RHProblem p = make_rh_problem(a1());
    std::vector<double> ts;
    for (int k = 0; k <= 6; ++k) ts.push_back(0.3 * std::pow(2.0, -k));
    Rh2Report rep = check_rh2(p, 0.0, {1}, ts);
    CHECK(rep.eventually_decreasing);
    CHECK(rep.final_error < 1e-3);
    // gamma = 0: identically zero errors
    Rh2Report zero = check_rh2(p, 0.0, {0}, {0.3, 0.1});
    for (double e : zero.errors) CHECK(e < 1e-12);
    // -gamma mirrors gamma
    Rh2Report neg = check_rh2(p, 0.0, {-1}, ts);
    CHECK(neg.final_error < 1e-3);
}

TEST_CASE("RH1 across the single active ray of A1") {
    RHProblem p = make_rh_problem(a1());
    // the active rays sit at phases pi/2 and 3pi/2
    Rh1Report rep = check_rh1(p, 0.3 * M_PI, 0.7 * M_PI, {0.05});
    CHECK(rep.max_deviation < 1e-4);
    // a sector with no active rays compares the same function with itself
    Rh1Report trivial = check_rh1(p, 0.05 * M_PI, 0.35 * M_PI, {0.05});
    CHECK(trivial.max_deviation < 1e-8);
}

TEST_CASE("weak RH3 diagnostic") {
    RHProblem p = make_rh_problem(a1());
    // gamma = 0: slope exactly 0
    Rh3Report zero = check_rh3(p, 0.0, {0}, 10, 100, 5);
    CHECK(std::abs(zero.slope) < 1e-12);
    // A1 slope finite over the grid
    Rh3Report rep = check_rh3(p, 0.0, {1}, 10, 1000, 7);
    CHECK(std::abs(rep.slope) < 10.0);
}

TEST_CASE("reports are deterministic") {
    RHProblem p1 = make_rh_problem(a1());
    RHProblem p2 = make_rh_problem(a1());
    const cplx v1 = x_function(p1, 0.2, {1}, cplx(0.3, 0.05));
    const cplx v2 = x_function(p2, 0.2, {1}, cplx(0.3, 0.05));
    CHECK(v1 == v2);
}
