#pragma once

#include <cstdint>

namespace spectra {

// Numeric knobs shared across the pipeline. Defaults follow the values
// quoted in the per-module descriptions; everything scales with the
// geometric size of the critical point set where noted.
struct Config {
    // ODE transport and trajectory integration
    double ode_tol = 1e-11;        // local error target per step
    double traj_tol = 1e-10;       // trajectory integrator tolerance
    double arc_budget_factor = 50; // arc-length budget = factor * scale

    // saddle scan
    int theta_grid = 400;          // grid points per unit phase
    double theta_tol = 1e-10;      // bisection tolerance in theta
    double eps_hit_factor = 1e-6;  // hit radius = factor * scale
    double prong_offset = 1e-4;    // prong seed offset = factor * scale

    // quadrature
    double quad_tol = 1e-12;

    // framing lines
    double line_tol = 1e-7;
    double rbig_factor = 10;       // WKB seed radius = factor * spread

    // clearance radius = factor * diameter of critical point set
    double clearance_factor = 1e-3;

    // RH verification
    double tol_rh2 = 1e-3;
    double tol_rh1 = 1e-4;

    // misc
    std::uint64_t seed = 12345;
    double h_max = -1;             // <0: auto (10 * max |Z_j|)
    int svg_width = 640;
    int svg_height = 640;
};

}  // namespace spectra
