#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "limitnls/spectral.hpp"
#include "limitnls/types.hpp"

namespace limitnls {

struct SolverConfig {
    int k = 1;
    FlowMode mode = FlowMode::defocusing;
    double dt = 1e-3;
    int snapshot_stride = 10;       // steps between stored snapshots
    double linf_guard = 1e6;        // abort threshold on the sup norm
    double energy_guard = 0.1;      // abort on relative Hamiltonian drift
    void validate() const;          // k in 1..4, dt != 0, focusing only with k == 1
};

struct DiagnosticsRow {
    double t = 0;
    double mass = 0;
    double hamiltonian = 0;
    double h1 = 0;    // inhomogeneous Sobolev norm, s = 1
    double linf = 0;
};

struct TrajectoryPoint {
    double t = 0;
    SpectralField u;
};

// Snapshots at strictly increasing times plus the matching diagnostics rows.
struct Trajectory {
    double lambda = 1.0;
    SolverConfig config;
    std::vector<TrajectoryPoint> snapshots;
    std::vector<DiagnosticsRow> diagnostics;

    const SpectralField& at_time(double t, double tol = 1e-9) const;
};

struct SolverError : std::runtime_error {
    long step;
    SolverError(const std::string& what, long step_) : std::runtime_error(what), step(step_) {}
};

// exp(i t d^2/dx^2): coefficient n multiplied by exp(-i (2 pi n / lambda)^2 t).
SpectralField linear_propagate(const SpectralField& F, double t);

// Strang splitting for i u_t + u_xx = sign |u|^{2k} u: half-step nonlinear
// phase u <- u * exp(-i sign |u|^{2k} dt/2) at the collocation points, full
// linear step, half-step phase.  The phase rotation preserves |u| pointwise
// and the DFT is unitary, so the discrete mass is conserved to roundoff by
// construction.  T may be negative; it must be an integer multiple of dt.
// Snapshots at t=0, every snapshot_stride steps, and T.
Trajectory evolve(const SpectralField& g, double T, const SolverConfig& cfg);

struct PicardResult {
    SpectralField u_final;
    std::vector<double> iterate_deltas;  // sup-in-time H^1 distance per sweep
    int iterations = 0;
    bool converged = false;
};

// Fixed point of the integral form
//   v(t) = exp(i t d^2) g - i integral_0^t exp(i (t-s) d^2) sign |v|^{2k} v(s) ds
// on `nodes` equispaced time nodes (composite trapezoid), iterated until the
// sup-in-time H^1 increment drops below tol or max_iter sweeps.  Three
// consecutive growing increments raise SolverError (window outside the
// contraction regime).
PicardResult duhamel_picard(const SpectralField& g, double T, const SolverConfig& cfg,
                            int nodes = 32, int max_iter = 64, double tol = 1e-12);

// c0 * ||g||_{H^1}^{-2k}; +infinity for the zero field.
double local_time_estimate(const SpectralField& g, int k, double c0 = 0.1);

}  // namespace limitnls
