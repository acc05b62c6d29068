#include "limitnls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "limitnls/fft.hpp"

namespace limitnls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool finite_field(const SpectralField& F) {
    for (const auto& c : F.data())
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

// u <- u * exp(-i * sign * |u|^{2k} * tau) at the collocation points of the
// native N-point grid.  The rotation is unimodular and the N-point DFT pair
// is unitary up to the 1/N factor, so sum |c_n|^2 is exactly preserved up to
// roundoff.  Returns the grid sup seen along the way.
double nonlinear_phase_step(SpectralField& F, int k, double sign, double tau) {
    const std::size_t N = F.modes();
    GridField g = synthesize(F, N);
    double sup = 0.0;
    for (auto& u : g.samples) {
        const double a2 = std::norm(u);
        sup = std::max(sup, a2);
        const double phi = -sign * std::pow(a2, static_cast<double>(k)) * tau;
        u *= Complex(std::cos(phi), std::sin(phi));
    }
    F = analyze(g, N);
    return std::sqrt(sup);
}

DiagnosticsRow diagnostics_at(const SpectralField& F, double t, const SolverConfig& cfg) {
    DiagnosticsRow row;
    row.t = t;
    row.mass = mass(F);
    row.hamiltonian = hamiltonian(F, cfg.k, cfg.mode);
    row.h1 = sobolev_norm(F, 1.0, false);
    row.linf = linf_norm(F);
    return row;
}

}  // namespace

void SolverConfig::validate() const {
    if (k < 1 || k > 4) throw std::invalid_argument("solver: k must be in 1..4");
    if (dt == 0.0 || !std::isfinite(dt)) throw std::invalid_argument("solver: dt must be nonzero");
    if (snapshot_stride < 1) throw std::invalid_argument("solver: snapshot stride must be >= 1");
    if (!(linf_guard > 0.0)) throw std::invalid_argument("solver: sup guard must be positive");
    if (!(energy_guard > 0.0)) throw std::invalid_argument("solver: energy guard must be positive");
    if (mode == FlowMode::focusing && k != 1)
        throw std::invalid_argument("solver: the focusing flow is supported for k == 1 only");
}

const SpectralField& Trajectory::at_time(double t, double tol) const {
    for (const auto& p : snapshots)
        if (std::abs(p.t - t) <= tol) return p.u;
    throw std::out_of_range("trajectory: no snapshot near t = " + std::to_string(t));
}

SpectralField linear_propagate(const SpectralField& F, double t) {
    SpectralField out(F.lambda(), F.modes());
    for (int n = F.min_mode(); n <= F.max_mode(); ++n) {
        const double xi = kTwoPi * static_cast<double>(n) / F.lambda();
        const double phi = -xi * xi * t;
        out.set_coeff(n, F.coeff(n) * Complex(std::cos(phi), std::sin(phi)));
    }
    return out;
}

Trajectory evolve(const SpectralField& g, double T, const SolverConfig& cfg) {
    cfg.validate();
    const double ratio = T / cfg.dt;
    const long long steps = std::llround(ratio);
    if (steps < 0 || std::abs(static_cast<double>(steps) * cfg.dt - T) >
                         1e-9 * std::max(1.0, std::abs(T)))
        throw std::invalid_argument(
            "evolve: horizon must be a nonnegative integer multiple of dt");

    const double sign = flow_sign(cfg.mode);
    Trajectory traj;
    traj.lambda = g.lambda();
    traj.config = cfg;

    SpectralField u = g;
    traj.snapshots.push_back({0.0, u});
    traj.diagnostics.push_back(diagnostics_at(u, 0.0, cfg));
    const double h0 = traj.diagnostics.front().hamiltonian;

    for (long long step = 1; step <= steps; ++step) {
        nonlinear_phase_step(u, cfg.k, sign, 0.5 * cfg.dt);
        u = linear_propagate(u, cfg.dt);
        const double sup = nonlinear_phase_step(u, cfg.k, sign, 0.5 * cfg.dt);
        if (!finite_field(u))
            throw SolverError("evolve: non-finite state", static_cast<long>(step));
        if (sup > cfg.linf_guard)
            throw SolverError("evolve: sup norm exceeded the guard", static_cast<long>(step));
        if (step % cfg.snapshot_stride == 0 || step == steps) {
            const double t = static_cast<double>(step) * cfg.dt;
            DiagnosticsRow row = diagnostics_at(u, t, cfg);
            if (std::abs(row.hamiltonian - h0) > cfg.energy_guard * std::max(1.0, std::abs(h0)))
                throw SolverError("evolve: Hamiltonian drift exceeded the guard",
                                  static_cast<long>(step));
            traj.snapshots.push_back({t, u});
            traj.diagnostics.push_back(std::move(row));
        }
    }
    return traj;
}

PicardResult duhamel_picard(const SpectralField& g, double T, const SolverConfig& cfg,
                            int nodes, int max_iter, double tol) {
    cfg.validate();
    if (nodes < 2) throw std::invalid_argument("duhamel_picard: need >= 2 time nodes");
    if (max_iter < 1) throw std::invalid_argument("duhamel_picard: need >= 1 sweep");
    if (!(tol > 0.0)) throw std::invalid_argument("duhamel_picard: tolerance must be positive");
    if (!std::isfinite(T)) throw std::invalid_argument("duhamel_picard: non-finite horizon");

    const std::size_t N = g.modes();
    const std::size_t M = static_cast<std::size_t>(cfg.k + 1) * N;  // alias-free product grid
    const double sign = flow_sign(cfg.mode);
    const double h = T / static_cast<double>(nodes - 1);
    std::vector<double> tnode(static_cast<std::size_t>(nodes));
    for (int j = 0; j < nodes; ++j) tnode[static_cast<std::size_t>(j)] = h * j;

    // Free evolution of the datum at every node; also the first iterate.
    std::vector<SpectralField> lin(static_cast<std::size_t>(nodes));
    for (int j = 0; j < nodes; ++j)
        lin[static_cast<std::size_t>(j)] = linear_propagate(g, tnode[static_cast<std::size_t>(j)]);
    std::vector<SpectralField> v = lin;

    PicardResult out;
    int grow_streak = 0;
    double prev_delta = -1.0;
    for (int sweep = 1; sweep <= max_iter; ++sweep) {
        // Dealconvolved nonlinearity at each node: |v|^{2k} v sampled on the
        // padded grid, then truncated back to the native band.
        std::vector<SpectralField> w(static_cast<std::size_t>(nodes));
        for (int j = 0; j < nodes; ++j) {
            GridField grid = synthesize(v[static_cast<std::size_t>(j)], M);
            for (auto& uval : grid.samples)
                uval *= std::pow(std::norm(uval), static_cast<double>(cfg.k));
            w[static_cast<std::size_t>(j)] = analyze(grid, N);
        }
        std::vector<SpectralField> next(static_cast<std::size_t>(nodes));
        double delta = 0.0;
        for (int j = 0; j < nodes; ++j) {
            SpectralField acc(g.lambda(), N);
            if (j > 0) {
                // Composite trapezoid prefix of exp(i (t_j - s) d^2) w(s).
                for (int l = 0; l <= j; ++l) {
                    const double weight = (l == 0 || l == j) ? 0.5 : 1.0;
                    const SpectralField prop = linear_propagate(
                        w[static_cast<std::size_t>(l)],
                        tnode[static_cast<std::size_t>(j)] - tnode[static_cast<std::size_t>(l)]);
                    for (std::size_t i = 0; i < acc.data().size(); ++i)
                        acc.data()[i] += weight * h * prop.data()[i];
                }
            }
            SpectralField cand = lin[static_cast<std::size_t>(j)];
            for (std::size_t i = 0; i < cand.data().size(); ++i)
                cand.data()[i] -= Complex(0.0, sign) * acc.data()[i];
            delta = std::max(delta,
                             sobolev_norm(subtract(cand, v[static_cast<std::size_t>(j)]), 1.0,
                                          false));
            next[static_cast<std::size_t>(j)] = std::move(cand);
        }
        v = std::move(next);
        out.iterate_deltas.push_back(delta);
        out.iterations = sweep;
        if (delta < tol) {
            out.converged = true;
            break;
        }
        if (prev_delta >= 0.0 && delta > prev_delta)
            ++grow_streak;
        else
            grow_streak = 0;
        if (grow_streak >= 3)
            throw SolverError("duhamel_picard: increments grew three sweeps running", sweep);
        prev_delta = delta;
    }
    out.u_final = v.back();
    return out;
}

double local_time_estimate(const SpectralField& g, int k, double c0) {
    if (k < 1 || k > 4) throw std::invalid_argument("local_time_estimate: k must be in 1..4");
    if (!(c0 > 0.0)) throw std::invalid_argument("local_time_estimate: c0 must be positive");
    const double h1 = sobolev_norm(g, 1.0, false);
    if (h1 == 0.0) return std::numeric_limits<double>::infinity();
    return c0 * std::pow(h1, -2.0 * static_cast<double>(k));
}

}  // namespace limitnls
