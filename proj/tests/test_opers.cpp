#include <doctest.h>

#include <cmath>

#include "spectra/opers.hpp"

using namespace spectra;

namespace {

QuadraticDifferential a1() { return {Poly{-1, 0, 1}, {}, +1}; }

// simple zero plus a double pole at 2, order-3 pole at infinity
QuadraticDifferential dp(cplx a = cplx(1, 0)) {
    return {Poly{0, a}, {{cplx(2, 0), 2, +1}}, +1};  // a z / (z-2)^2
}

}  // namespace

TEST_CASE("potential assembly") {
    // polynomial differential: no correction terms at all
    auto op = make_oper(a1());
    CHECK(op.qcorr.empty());
    cplx q = potential(op, cplx(2, 0), cplx(1, 0));
    CHECK(std::abs(q - cplx(3, 0)) < 1e-14);
    // t-scaling: Q(z, 2t) = Q(z, t) / 4 for a polynomial potential
    cplx q2 = potential(op, cplx(2, 0), cplx(2, 0));
    CHECK(std::abs(q2 - q / 4.0) < 1e-14);

    // z/(z-2)^2: Q = t^{-2} phi - 1/(4 (z-2)^2) + ...
    auto op2 = make_oper(dp());
    REQUIRE(op2.qcorr.size() == 1);
    CHECK(std::abs(op2.qcorr[0].c2 - cplx(-0.25, 0)) < 1e-14);
    // m_inf = 3: no constraints force a simple-pole term
    CHECK(std::abs(op2.qcorr[0].c1) < 1e-14);
}

TEST_CASE("infinity polar conditions are solved when infinity is special") {
    // phi = (z^2 + 1) / (z^2 (z-1)^2): poles 0, 1 double; m_inf = 2
    QuadraticDifferential qd{Poly{1, 0, 1},
                             {{cplx(0, 0), 2, +1}, {cplx(1, 0), 2, +1}},
                             +1};
    auto op = make_oper(qd);
    // S1 = sum c1 = 0 and S2 = sum(c1 p + c2) = -1/4
    cplx s1 = 0, s2 = 0;
    for (auto& c : op.qcorr) {
        s1 += c.c1;
        s2 += c.c1 * c.pole + c.c2;
    }
    CHECK(std::abs(s1) < 1e-10);
    CHECK(std::abs(s2 - cplx(-0.25, 0)) < 1e-10);
}

TEST_CASE("transport closed forms") {
    // Q ~ 0: huge t makes the potential negligible: [[1, L], [0, 1]]
    auto op = make_oper(a1());
    auto M = transport_segment(op, cplx(0, 0), cplx(1, 0), cplx(1e8, 0));
    CHECK(std::abs(M[0] - 1.0) < 1e-12);
    CHECK(std::abs(M[1] - 1.0) < 1e-12);
    CHECK(std::abs(M[2]) < 1e-12);
    CHECK(std::abs(M[3] - 1.0) < 1e-12);

    // Q ~ 1: phi = (z + K) dz^2 at t = sqrt(K) gives Q = 1 + z/K, K huge:
    // cosh/sinh over length L up to O(1/K)
    const double K = 1e10;
    QuadraticDifferential unit{Poly{K, 1}, {}, +1};
    auto opu = make_oper(unit);
    const double L = 1.3;
    auto Mu = transport_segment(opu, cplx(0, 0), cplx(L, 0), cplx(std::sqrt(K), 0));
    CHECK(std::abs(Mu[0] - std::cosh(L)) < 1e-8);
    CHECK(std::abs(Mu[1] - std::sinh(L)) < 1e-8);
    CHECK(std::abs(Mu[2] - std::sinh(L)) < 1e-8);
    CHECK(std::abs(Mu[3] - std::cosh(L)) < 1e-8);
}

TEST_CASE("transport concatenation and unit determinant") {
    auto op = make_oper(a1());
    const cplx t(0.7, 0.2);
    const cplx A(-1.5, 0.4), B(0.3, 1.1), C(1.4, -0.2);
    auto M1 = transport_segment(op, A, B, t);
    auto M2 = transport_segment(op, B, C, t);
    auto M = transport_segment(op, A, C, t);
    auto MM = mat_mul(M2, M1);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(M[i] - MM[i]) < 1e-9);
    CHECK(std::abs(mat_det(M) - 1.0) < 1e-9);
    CHECK(std::abs(mat_det(M1) - 1.0) < 1e-9);
}

TEST_CASE("path independence within a homotopy class") {
    auto op = make_oper(a1());
    const cplx t(1, 0);
    auto direct = transport(op, {cplx(-2, 0.5), cplx(2, 0.5)}, t);
    auto bent = transport(op, {cplx(-2, 0.5), cplx(0, 1.5), cplx(2, 0.5)}, t);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(direct[i] - bent[i]) < 1e-8);
}

TEST_CASE("monodromy eigenvalues match -exp(+-Res/(2t))") {
    auto qd = dp();
    auto op = make_oper(qd);
    ResidueDatum rd = residue(qd, 0, +1);
    for (cplx t : {cplx(1, 0), cplx(1, 1), cplx(0.3, 0)}) {
        auto eg = monodromy_eigendata(op, 0, t);
        const cplx pred_p = -std::exp(rd.residue / (2.0 * t));
        const cplx pred_m = -std::exp(-rd.residue / (2.0 * t));
        CHECK(std::abs(eg.lambda_plus - pred_p) / std::abs(pred_p) < 1e-6);
        CHECK(std::abs(eg.lambda_minus - pred_m) / std::abs(pred_m) < 1e-6);
    }
}

TEST_CASE("eigenline is stable and signing swaps it") {
    auto qd = dp();
    auto op = make_oper(qd);
    auto eg = monodromy_eigendata(op, 0, cplx(1, 0));
    CHECK(projective_distance(eg.line_plus, eg.line_minus) > 1e-6);
    CHECK(projective_distance(eg.distinguished, eg.line_plus) < 1e-12);
    auto qd2 = qd;
    qd2.poles[0].sign = -1;
    auto op2 = make_oper(qd2);
    auto eg2 = monodromy_eigendata(op2, 0, cplx(1, 0));
    CHECK(projective_distance(eg2.distinguished, eg.line_minus) < 1e-6);
}

TEST_CASE("subdominant lines of the Airy-type differential") {
    QuadraticDifferential airy{Poly{0, 1}, {}, +1};  // z dz^2, 3 sectors
    auto op = make_oper(airy);
    const cplx t(1, 0);
    std::array<std::array<cplx, 2>, 3> lines;
    for (int j = 0; j < 3; ++j) lines[j] = subdominant_line(op, j, t);
    // pairwise distinct
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            CHECK(projective_distance(lines[a], lines[b]) > 1e-6);
    // R_big robustness, explicitly
    auto v1 = subdominant_line_raw(op, 0, t, 1.0);
    auto v2 = subdominant_line_raw(op, 0, t, 2.0);
    CHECK(projective_distance(v1, v2) < 1e-7);
}

TEST_CASE("framed local system of A1 has 4 boundary lines") {
    auto op = make_oper(a1());
    auto lines = framed_local_system(op, cplx(1, 0));
    CHECK(lines.boundary.size() == 4);
    CHECK_FALSE(lines.has_puncture);
    // deterministic rerun gives identical lines
    auto lines2 = framed_local_system(op, cplx(1, 0));
    for (int i = 0; i < 4; ++i) {
        CHECK(lines.boundary[i][0] == lines2.boundary[i][0]);
        CHECK(lines.boundary[i][1] == lines2.boundary[i][1]);
    }
}

TEST_CASE("cross ratio formula on explicit lines") {
    // lines through 0, 1, infinity, w as projective points
    auto at = [](cplx z) { return std::array<cplx, 2>{z, cplx(1, 0)}; };
    std::array<cplx, 2> inf{cplx(1, 0), cplx(0, 0)};
    const cplx w(2.5, 0.5);
    cplx Y = cross_ratio_of_lines(at(cplx(0, 0)), at(cplx(1, 0)), inf, at(w));
    CHECK(std::abs(Y - (-1.0 / w)) < 1e-13);
}

TEST_CASE("cross ratio is Moebius invariant and reversal invariant") {
    auto at = [](cplx z) { return std::array<cplx, 2>{z, cplx(1, 0)}; };
    std::array<cplx, 2> l1 = at(cplx(0.3, 1)), l2 = at(cplx(-1, 0.2)),
                        l3 = at(cplx(2, -1)), l4 = at(cplx(0.5, 0.5));
    cplx Y = cross_ratio_of_lines(l1, l2, l3, l4);
    // apply a projective transformation to every line
    const cplx a(1, 2), b(0.5, -1), c(2, 0.3), d(-1, 1);
    auto mob = [&](const std::array<cplx, 2>& l) {
        return std::array<cplx, 2>{a * l[0] + b * l[1], c * l[0] + d * l[1]};
    };
    cplx Ym = cross_ratio_of_lines(mob(l1), mob(l2), mob(l3), mob(l4));
    CHECK(std::abs(Y - Ym) < 1e-10 * std::abs(Y));
    // the two admissible orderings agree: (1,2,3,4) vs (3,4,1,2)
    cplx Yr = cross_ratio_of_lines(l3, l4, l1, l2);
    CHECK(std::abs(Y - Yr) < 1e-12 * std::abs(Y));
}

TEST_CASE("basepoint independence of the plain evaluator") {
    auto ctx = make_context(a1());
    HatBasis hb = hat_basis(ctx);
    auto op1 = make_oper(a1());
    auto op2 = op1;
    op2.z0 = op1.z0 + cplx(0.31, -0.22);
    const cplx t(0.8, 0.1);
    auto X1 = fock_goncharov_eval(framed_local_system(op1, t), hb.T, hb.signing);
    auto X2 = fock_goncharov_eval(framed_local_system(op2, t), hb.T, hb.signing);
    REQUIRE(X1.size() == X2.size());
    for (size_t j = 0; j < X1.size(); ++j)
        CHECK(std::abs(X1[j] - X2[j]) < 1e-9 * std::max(1.0, std::abs(X1[j])));
}

TEST_CASE("the two evaluators agree at moderate t") {
    QuadraticDifferential qd = a1();
    YFunction y = make_y_function(qd);
    const cplx t(0.8, 0.15);
    auto Xw = y.coordinates(t);
    auto Xp = fock_goncharov_eval(framed_local_system(y.oper(), t), y.basis.T,
                                  y.basis.signing);
    REQUIRE(Xw.size() == Xp.size());
    for (size_t j = 0; j < Xw.size(); ++j)
        CHECK(std::abs(Xw[j] - Xp[j]) < 1e-7 * std::max(1.0, std::abs(Xp[j])));
}

TEST_CASE("Y function: trivial class, monomiality, self-convergence") {
    YFunction y = make_y_function(a1());
    const cplx t(0.5, 0);
    CHECK(std::abs(y.value({0}, t) - 1.0) < 1e-14);
    // A1 at t = 1: finite nonzero, stable under tightened tolerance
    Config tight;
    tight.ode_tol = 1e-13;
    YFunction y2 = make_y_function(a1(), tight);
    const cplx v1 = y.value({1}, cplx(1, 0));
    const cplx v2 = y2.value({1}, cplx(1, 0));
    CHECK(std::abs(v1) > 1e-6);
    CHECK(std::abs(v1 - v2) < 1e-6 * std::abs(v1));
    // monomiality on a rank-2 example
    QuadraticDifferential cubic{Poly{cplx(0, 2), -3, 0, 1}, {}, +1};
    YFunction yc = make_y_function(cubic);
    auto X = yc.coordinates(cplx(0.9, 0.1));
    const cplx sum_val = yc.value({1, 1}, cplx(0.9, 0.1));
    CHECK(std::abs(sum_val - X[0] * X[1]) < 1e-9 * std::abs(sum_val));
}

TEST_CASE("exp(Z/t) Y -> 1 along the positive reals (orientation pin)") {
    YFunction y = make_y_function(a1());
    const cplx Z = y.basis.periods[0];
    for (double t : {0.3, 0.15, 0.075}) {
        const cplx v = std::exp(Z / t) * y.value({1}, cplx(t, 0));
        CHECK(std::abs(v - 1.0) < 1e-6);
    }
}

TEST_CASE("apparent singularities are detected") {
    // residue 2 pi i at t = 1 makes both monodromy eigenvalues equal to 1
    QuadraticDifferential qd{Poly{0.25, 0.1}, {{cplx(0, 0), 2, +1}}, +1};
    auto rd = residue(qd, 0, +1);
    REQUIRE(std::abs(rd.residue - cplx(0, 2 * M_PI)) < 1e-12);
    auto op = make_oper(qd);
    CHECK_THROWS_AS(monodromy_eigendata(op, 0, cplx(1, 0)), ApparentSingularity);
    // away from the bad set the eigendata works
    auto eg = monodromy_eigendata(op, 0, cplx(1.3, 0.2));
    CHECK(std::abs(eg.lambda_plus * eg.lambda_minus - cplx(1, 0)) < 1e-7);
}

TEST_CASE("degenerate quadrilaterals are rejected") {
    auto at = [](cplx z) { return std::array<cplx, 2>{z, cplx(1, 0)}; };
    CHECK_THROWS_AS(
        cross_ratio_of_lines(at(cplx(0, 0)), at(cplx(0, 0)), at(cplx(1, 0)),
                             at(cplx(2, 0))),
        DegenerateQuadrilateral);
}

TEST_CASE("residue demands a double pole") {
    QuadraticDifferential qd{Poly{0, 1}, {{cplx(2, 0), 3, +1}}, +1};
    CHECK_THROWS_AS(residue(qd, 0, +1), NotDoublePole);
}
