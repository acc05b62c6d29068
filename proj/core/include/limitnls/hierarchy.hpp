#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "limitnls/conditions.hpp"
#include "limitnls/periodization.hpp"
#include "limitnls/series.hpp"
#include "limitnls/solver.hpp"
#include "limitnls/spectral.hpp"

namespace limitnls {

struct ResolutionPolicy {
    std::size_t min_modes = 16;
    std::size_t max_modes = 1u << 20;
    int oversample = 8;  // modes kept per occupied data mode, before pow2 rounding
    // Explicit per-level overrides (level j -> mode count).  The default run
    // pins {3:16, 4:256, 5:1024}: the coarse level deliberately truncates the
    // first product generation that the next level resolves, which keeps the
    // level-to-level distances deterministic instead of roundoff-dominated,
    // while the two fine levels resolve a common frequency band.
    std::vector<std::pair<int, std::size_t>> explicit_levels;

    std::size_t pick(int j, std::int64_t max_data_mode) const;
};

struct HierarchyLevel {
    int j = 0;
    double lambda = 0;             // j!/omega
    LimitPeriodicSeries series;    // periodization of the truncated data
    SpectralField data;            // the same coefficients, placed exactly
    Trajectory traj;               // snapshots over [-T, T] (or [0,0] if T=0)
};

// The whole ladder: truncate once at `depth`, periodize per level, place the
// coefficients exactly on each level's torus, and evolve every level over
// |t| <= T with a shared clock.  Refuses ranges whose tails blow the decay
// budget (the theorem's hypothesis) unless skip_gate is set.
struct HierarchyRun {
    GeneratorSpec generator;
    ConditionParams checks;
    SolverConfig solver;
    double T = 0;
    std::vector<HierarchyLevel> levels;  // j = checks.j_min .. checks.j_max

    const HierarchyLevel& level(int j) const;
};

struct ConditionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

HierarchyRun build_hierarchy(const SeriesGenerator& gen, const ConditionParams& checks,
                             const SolverConfig& solver, double T,
                             const ResolutionPolicy& res, int threads, bool skip_gate = false);

// max over shared snapshot times of the sup and windowed-Sobolev distances
// between u_j (extended exactly onto the next torus) and u_{j+1}.
struct CauchyPair {
    int j = 0;            // lower level of the pair
    double L_next = 0;    // period of the upper level
    double d_linf = 0;
    double d_line = 0;    // S^{1,2} distance
    int snapshots = 0;
};

struct CauchyReport {
    std::vector<CauchyPair> pairs;
    bool monotone_linf = false;
    bool monotone_line = false;
    // Least-squares fit of log d_j against the envelope
    //   log L_{j+1} + 1 - L_{j+1}^{2k+eps} + c * T * L_{j+1}^{2k}
    // over pairs with d_j > 0 (line-norm distances).
    double fitted_c = 0;
    std::vector<double> fit_residuals;
};

CauchyReport cauchy_experiment(const HierarchyRun& run, const StepanovOptions& opt = {});

// Undo the dilation per level and compare sup_t ||v_j(t)||_{H^1(T_1)} and the
// data norms against L_{j+1}^{1+1/k} (L^3 in the focusing regime).
struct AprioriRow {
    int j = 0;
    double L_next = 0;
    double envelope = 0;        // L_next^{1+1/k} or L_next^3
    double data_norm = 0;       // ||inverse_dilate(f_j)||_{H^1}
    double data_next_norm = 0;  // same for f_{j+1}
    double flow_sup = 0;        // sup_t ||inverse_dilate(u_j(t))||_{H^1}
    double flow_next_sup = 0;
    double ratio = 0;           // max of the four over the envelope
};

struct AprioriReport {
    std::vector<AprioriRow> rows;
    double C_data = 0;  // max data ratio
    double C_flow = 0;  // max flow ratio
};

AprioriReport apriori_bound_check(const HierarchyRun& run);

// Averaging leakage at time t: for each incommensurate proxy L (exact
// rational) and each n, the sup over the torus of |A_{n,L} u_top(t)|; for the
// levels' own commensurate periods, the sup of |A_{n,L_j} u_j(t) - u_j(t)|
// (identically 0 up to roundoff).
struct LeakageRow {
    std::string kind;  // "proxy" or "torus"
    std::int64_t num = 0;
    std::int64_t den = 1;
    int level = 0;  // torus rows: which level was averaged
    int n = 0;
    double sup = 0;
};

struct LeakageReport {
    double t = 0;
    std::vector<LeakageRow> rows;
};

LeakageReport leakage_check(const HierarchyRun& run, double t,
                            const std::vector<Rational>& proxies, const std::vector<int>& ns);

// Coefficients of the top level at time t, split by the least lattice level
// containing each mode's frequency; per-block l1 sums against the
// exp(-L^{2k}) envelope.  Sums run over the generator's frequency module
// only (the additive span of the data frequencies): the nonlinearity maps
// that lattice into itself, so any grid coefficient outside it is pure
// roundoff and is reported separately as off_lattice instead of polluting a
// block that is exactly zero in the true flow.  The head row j = j_min
// aggregates everything in A(j_min); later rows hold one block each.
struct BlockSumRow {
    int j = 0;        // j_min: all of A(j_min); j > j_min: modes new at level j
    double L = 0;     // level period
    double sum = 0;   // l1 sum of |coeff| over the module modes of the row
    double log_envelope = 0;  // -L^{2k}
};

struct BlockSumReport {
    double t = 0;
    double total = 0;        // empirical A_omega norm of u_top(t) on the module
    double off_lattice = 0;  // l1 mass outside the module (roundoff floor)
    std::vector<BlockSumRow> rows;
    bool decaying = false;  // strictly decreasing from the first nonzero row
                            // (trailing exactly-zero pairs allowed)
};

BlockSumReport a_omega_trace(const HierarchyRun& run, double t);

// Flow continuity at the top level: evolve f and f + delta * (unit direction)
// and report the S^{1,2} distance at time t for each delta.  The perturbation
// bumps one existing block mode, so the perturbed data stays inside the
// admissible lattice; its tail budget is re-checked.
struct ContinuityRow {
    double delta = 0;
    double response = 0;
    double ratio = 0;  // response / delta
};

struct ContinuityReport {
    double t = 0;
    int block = 0;
    int mode_n = 0;
    std::vector<ContinuityRow> rows;
    bool monotone = false;  // responses shrink with delta
};

ContinuityReport continuity_experiment(const HierarchyRun& run, double t, double delta0,
                                       int halvings, int block, int mode_n,
                                       const StepanovOptions& opt = {});

// Aggregate of every convergence diagnostic, the payload of the converge
// stage.
struct ConvergenceReport {
    CauchyReport cauchy;
    AprioriReport apriori;
    LeakageReport leakage;
    BlockSumReport block_sums;
    std::optional<ContinuityReport> continuity;
};

}  // namespace limitnls
