#include "limitnls/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "limitnls/parallel.hpp"

namespace limitnls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t pow2_at_least(std::size_t n) {
    std::size_t p = 2;
    while (p < n) {
        if (p > (std::numeric_limits<std::size_t>::max() >> 1))
            throw std::overflow_error("resolution: mode count overflow");
        p <<= 1;
    }
    return p;
}

// Smallest power of two >= n that also fits max data mode mdm.
void require_capacity(std::size_t n, std::int64_t mdm, int j) {
    // Modes live in [-N/2, N/2); the largest usable magnitude is N/2 - 1.
    if (mdm > static_cast<std::int64_t>(n / 2) - 1)
        throw std::invalid_argument("resolution: " + std::to_string(n) +
                                    " modes cannot resolve data mode " + std::to_string(mdm) +
                                    " at level " + std::to_string(j));
}

}  // namespace

std::size_t ResolutionPolicy::pick(int j, std::int64_t max_data_mode) const {
    if (max_data_mode < 0) throw std::invalid_argument("resolution: negative data mode");
    for (const auto& [lvl, n] : explicit_levels) {
        if (lvl != j) continue;
        const std::size_t p = pow2_at_least(std::max<std::size_t>(n, 2));
        if (p != n) throw std::invalid_argument("resolution: explicit mode counts must be powers of two");
        require_capacity(p, max_data_mode, j);
        return p;
    }
    if (oversample < 1) throw std::invalid_argument("resolution: oversample must be >= 1");
    const std::size_t want = static_cast<std::size_t>(oversample) *
                             static_cast<std::size_t>(std::max<std::int64_t>(max_data_mode, 1));
    std::size_t n = pow2_at_least(std::clamp(want, std::max<std::size_t>(min_modes, 2), max_modes));
    while (n <= 2 * static_cast<std::size_t>(max_data_mode) + 1) {
        if (n >= max_modes)
            throw std::invalid_argument("resolution: max_modes too small for the data band");
        n <<= 1;
    }
    require_capacity(n, max_data_mode, j);
    return n;
}

const HierarchyLevel& HierarchyRun::level(int j) const {
    for (const auto& l : levels)
        if (l.j == j) return l;
    throw std::out_of_range("hierarchy: no level " + std::to_string(j));
}

namespace {

Trajectory two_sided_evolve(const SpectralField& data, double T, const SolverConfig& solver) {
    Trajectory fwd = evolve(data, T, solver);
    if (T == 0.0) return fwd;
    SolverConfig back_cfg = solver;
    back_cfg.dt = -solver.dt;
    Trajectory back = evolve(data, -T, back_cfg);
    Trajectory merged;
    merged.lambda = fwd.lambda;
    merged.config = fwd.config;
    merged.snapshots.reserve(back.snapshots.size() + fwd.snapshots.size() - 1);
    merged.diagnostics.reserve(merged.snapshots.capacity());
    for (std::size_t i = back.snapshots.size(); i-- > 1;) {
        merged.snapshots.push_back(std::move(back.snapshots[i]));
        merged.diagnostics.push_back(back.diagnostics[i]);
    }
    for (std::size_t i = 0; i < fwd.snapshots.size(); ++i) {
        merged.snapshots.push_back(std::move(fwd.snapshots[i]));
        merged.diagnostics.push_back(fwd.diagnostics[i]);
    }
    return merged;
}

}  // namespace

HierarchyRun build_hierarchy(const SeriesGenerator& gen, const ConditionParams& checks,
                             const SolverConfig& solver, double T, const ResolutionPolicy& res,
                             int threads, bool skip_gate) {
    checks.validate();
    solver.validate();
    if (!(T >= 0.0) || !std::isfinite(T))
        throw std::invalid_argument("hierarchy: horizon must be finite and >= 0");

    const LimitPeriodicSeries trunc = truncate(gen, checks.depth);
    if (!skip_gate) {
        const ConditionReport gate = check_tail_budget(trunc, checks);
        if (!gate.pass) {
            std::ostringstream msg;
            msg << "tail budget violated:";
            for (const auto& row : gate.rows)
                if (!row.pass)
                    msg << " j=" << row.j << " margin=" << row.margin;
            throw ConditionFailure(msg.str());
        }
    }

    const int count = checks.j_max - checks.j_min + 1;
    std::vector<std::optional<HierarchyLevel>> slots(static_cast<std::size_t>(count));
    const int cap = threads > 0 ? threads : thread_cap();
    parallel_for(static_cast<std::size_t>(count), cap, [&](std::size_t idx) {
        const int j = checks.j_min + static_cast<int>(idx);
        PeriodizationLevel per = periodize(trunc, j);
        const std::int64_t fact = factorial_checked(j);
        std::int64_t mdm = 0;
        for (const auto& t : per.series.terms())
            mdm = std::max(mdm, std::abs(exact_mode(t.freq, fact)));
        const std::size_t n_modes = res.pick(j, mdm);
        SpectralField data(per.period, n_modes);
        for (const auto& t : per.series.terms())
            data.set_coeff(static_cast<int>(exact_mode(t.freq, fact)), t.amp);
        Trajectory traj = two_sided_evolve(data, T, solver);
        slots[idx] = HierarchyLevel{j, per.period, std::move(per.series), std::move(data),
                                    std::move(traj)};
    });

    HierarchyRun run{gen.spec(), checks, solver, T, {}};
    run.levels.reserve(slots.size());
    for (auto& s : slots) run.levels.push_back(std::move(*s));
    return run;
}

CauchyReport cauchy_experiment(const HierarchyRun& run, const StepanovOptions& opt) {
    if (run.levels.size() < 2)
        throw std::invalid_argument("cauchy: need at least two levels");
    CauchyReport report;
    for (std::size_t i = 0; i + 1 < run.levels.size(); ++i) {
        const HierarchyLevel& a = run.levels[i];
        const HierarchyLevel& b = run.levels[i + 1];
        const int factor = b.j;  // L_{j+1} / L_j = j + 1
        if (a.traj.snapshots.size() != b.traj.snapshots.size())
            throw std::runtime_error("cauchy: snapshot counts differ between levels");
        const std::size_t band = pow2_at_least(
            std::max(static_cast<std::size_t>(factor) * a.data.modes(), b.data.modes()));
        CauchyPair pair;
        pair.j = a.j;
        pair.L_next = b.lambda;
        pair.snapshots = static_cast<int>(a.traj.snapshots.size());
        for (std::size_t s = 0; s < a.traj.snapshots.size(); ++s) {
            const auto& pa = a.traj.snapshots[s];
            const auto& pb = b.traj.snapshots[s];
            if (std::abs(pa.t - pb.t) > 1e-9 * std::max(1.0, std::abs(pa.t)))
                throw std::runtime_error("cauchy: snapshot clocks differ between levels");
            const SpectralField ext_a = extend_periodic(pa.u, factor, band);
            const SpectralField ext_b = extend_periodic(pb.u, 1, band);
            const SpectralField diff = subtract(ext_a, ext_b);
            pair.d_linf = std::max(pair.d_linf, linf_norm(diff));
            pair.d_line = std::max(pair.d_line, stepanov_norm(diff, 1, 2.0, opt));
        }
        report.pairs.push_back(pair);
    }
    report.monotone_linf = true;
    report.monotone_line = true;
    for (std::size_t i = 0; i + 1 < report.pairs.size(); ++i) {
        report.monotone_linf = report.monotone_linf &&
                               report.pairs[i + 1].d_linf <= report.pairs[i].d_linf;
        report.monotone_line = report.monotone_line &&
                               report.pairs[i + 1].d_line <= report.pairs[i].d_line;
    }
    // log d = log L + 1 - L^{2k+eps} + c * T * L^{2k}, least squares in c.
    const double twok = 2.0 * static_cast<double>(run.solver.k);
    const double q = twok + run.checks.epsilon;
    double num = 0.0, den = 0.0;
    std::vector<std::pair<double, double>> included;  // (log d - a, b)
    for (const auto& p : report.pairs) {
        if (!(p.d_line > 0.0)) continue;
        const double a = std::log(p.L_next) + 1.0 - std::pow(p.L_next, q);
        const double bcoef = run.T * std::pow(p.L_next, twok);
        const double resid0 = std::log(p.d_line) - a;
        included.emplace_back(resid0, bcoef);
        num += bcoef * resid0;
        den += bcoef * bcoef;
    }
    report.fitted_c = den > 0.0 ? num / den : 0.0;
    for (const auto& [resid0, bcoef] : included)
        report.fit_residuals.push_back(resid0 - report.fitted_c * bcoef);
    return report;
}

AprioriReport apriori_bound_check(const HierarchyRun& run) {
    if (run.levels.size() < 2)
        throw std::invalid_argument("apriori: need at least two levels");
    const int k = run.solver.k;
    const double expo =
        run.solver.mode == FlowMode::focusing ? 3.0 : 1.0 + 1.0 / static_cast<double>(k);
    AprioriReport report;
    for (std::size_t i = 0; i + 1 < run.levels.size(); ++i) {
        const HierarchyLevel& a = run.levels[i];
        const HierarchyLevel& b = run.levels[i + 1];
        AprioriRow row;
        row.j = a.j;
        row.L_next = b.lambda;
        row.envelope = std::pow(b.lambda, expo);
        row.data_norm = sobolev_norm(inverse_dilate(a.data, k), 1.0, false);
        row.data_next_norm = sobolev_norm(inverse_dilate(b.data, k), 1.0, false);
        for (const auto& p : a.traj.snapshots)
            row.flow_sup = std::max(row.flow_sup, sobolev_norm(inverse_dilate(p.u, k), 1.0, false));
        for (const auto& p : b.traj.snapshots)
            row.flow_next_sup =
                std::max(row.flow_next_sup, sobolev_norm(inverse_dilate(p.u, k), 1.0, false));
        row.ratio = std::max(std::max(row.data_norm, row.data_next_norm),
                             std::max(row.flow_sup, row.flow_next_sup)) /
                    row.envelope;
        report.C_data = std::max(report.C_data,
                                 std::max(row.data_norm, row.data_next_norm) / row.envelope);
        report.C_flow = std::max(report.C_flow,
                                 std::max(row.flow_sup, row.flow_next_sup) / row.envelope);
        report.rows.push_back(row);
    }
    return report;
}

LeakageReport leakage_check(const HierarchyRun& run, double t, const std::vector<Rational>& proxies,
                            const std::vector<int>& ns) {
    if (run.levels.empty()) throw std::invalid_argument("leakage: empty hierarchy");
    LeakageReport report;
    report.t = t;
    const HierarchyLevel& top = run.levels.back();
    const SpectralField& u_top = top.traj.at_time(t);
    for (const auto& proxy : proxies) {
        if (!(proxy.value() > 0.0))
            throw std::invalid_argument("leakage: proxy periods must be positive");
        const double ratio = proxy.value() / top.lambda;
        for (int n : ns) {
            LeakageRow row;
            row.kind = "proxy";
            row.num = proxy.num;
            row.den = proxy.den;
            row.level = top.j;
            row.n = n;
            row.sup = linf_norm(apply_averaging(u_top, n, ratio));
            report.rows.push_back(row);
        }
    }
    for (const auto& lvl : run.levels) {
        const SpectralField& u = lvl.traj.at_time(t);
        for (int n : ns) {
            LeakageRow row;
            row.kind = "torus";
            row.num = 0;
            row.den = 1;
            row.level = lvl.j;
            row.n = n;
            // Averaging at the field's own period: theta is exactly integral,
            // so the difference is identically zero coefficient by coefficient.
            row.sup = linf_norm(subtract(apply_averaging(u, n, Rational(1, 1)), u));
            report.rows.push_back(row);
        }
    }
    return report;
}

BlockSumReport a_omega_trace(const HierarchyRun& run, double t) {
    if (run.levels.empty()) throw std::invalid_argument("block sums: empty hierarchy");
    const HierarchyLevel& top = run.levels.back();
    const SpectralField& u = top.traj.at_time(t);
    const std::int64_t top_fact = factorial_checked(top.j);

    // Frequency module of the evolved data: gcd of the data frequencies.
    // The nonlinearity only ever lands on integer combinations of these.
    Rational module(0, 1);
    {
        std::int64_t lcm_den = 1;
        for (const auto& term : top.series.terms()) {
            const __int128 l =
                static_cast<__int128>(lcm_den) / std::gcd(lcm_den, term.freq.den) * term.freq.den;
            if (l > std::numeric_limits<std::int64_t>::max())
                throw std::overflow_error("block sums: module denominator overflow");
            lcm_den = static_cast<std::int64_t>(l);
        }
        std::int64_t g = 0;
        for (const auto& term : top.series.terms()) {
            const std::int64_t scaled = term.freq.num * (lcm_den / term.freq.den);
            g = std::gcd(g, scaled < 0 ? -scaled : scaled);
        }
        if (g > 0) module = Rational(g, lcm_den);
    }
    const bool have_module = !module.is_zero();
    const Rational module_recip = have_module ? Rational(module.den, module.num) : Rational(0, 1);

    BlockSumReport report;
    report.t = t;
    const double base = 2.0 * static_cast<double>(run.solver.k);
    for (int j = run.checks.j_min; j <= run.checks.j_max; ++j) {
        BlockSumRow row;
        row.j = j;
        row.L = level_period(j, top.series.omega());
        row.log_envelope = -std::pow(row.L, base);
        report.rows.push_back(row);
    }

    for (int m = u.min_mode(); m <= u.max_mode(); ++m) {
        const double mag = std::abs(u.coeff(m));
        if (mag == 0.0) continue;
        const Rational r(m, top_fact);
        const bool on_module = r.is_zero() || (have_module && integral_product(r, module_recip));
        if (!on_module) {
            report.off_lattice += mag;
            continue;
        }
        int least = 1;
        while (least <= top.j && !is_in_level(r, least)) ++least;
        const int slot = std::max(least, run.checks.j_min);
        report.rows[static_cast<std::size_t>(slot - run.checks.j_min)].sum += mag;
        report.total += mag;
    }

    report.decaying = true;
    bool seen_nonzero = false;
    bool seen_zero_after = false;
    double prev = 0.0;
    for (const auto& row : report.rows) {
        if (!seen_nonzero) {
            if (row.sum > 0.0) {
                seen_nonzero = true;
                prev = row.sum;
            }
            continue;
        }
        if (row.sum == 0.0) {
            seen_zero_after = true;
            continue;
        }
        if (seen_zero_after || row.sum >= prev) {
            report.decaying = false;
            break;
        }
        prev = row.sum;
    }
    return report;
}

ContinuityReport continuity_experiment(const HierarchyRun& run, double t, double delta0,
                                       int halvings, int block, int mode_n,
                                       const StepanovOptions& opt) {
    if (run.levels.empty()) throw std::invalid_argument("continuity: empty hierarchy");
    if (!(delta0 > 0.0)) throw std::invalid_argument("continuity: delta0 must be > 0");
    if (halvings < 0) throw std::invalid_argument("continuity: halvings must be >= 0");
    const int b = block == 0 ? run.checks.j_min : block;
    if (b < 1 || b > run.checks.j_max)
        throw std::invalid_argument("continuity: block outside the hierarchy range");
    const SeriesGenerator gen(run.generator);
    const std::vector<int> modes = gen.block_modes(b);
    if (std::find(modes.begin(), modes.end(), mode_n) == modes.end())
        throw std::invalid_argument("continuity: mode " + std::to_string(mode_n) +
                                    " is not in block " + std::to_string(b));

    const HierarchyLevel& top = run.levels.back();
    const SpectralField& u_ref = top.traj.at_time(t);
    const Rational freq(mode_n, factorial_checked(b));
    const double nu = freq.value() * top.series.omega();
    const double unit_amp = 1.0 / std::sqrt(1.0 + kTwoPi * kTwoPi * nu * nu);
    const std::int64_t grid_mode = exact_mode(freq, factorial_checked(top.j));

    SolverConfig cfg = run.solver;
    if (t < 0.0) cfg.dt = -std::abs(cfg.dt);

    const LimitPeriodicSeries trunc = truncate(gen, run.checks.depth);

    ContinuityReport report;
    report.t = t;
    report.block = b;
    report.mode_n = mode_n;
    double delta = delta0;
    for (int h = 0; h <= halvings; ++h, delta *= 0.5) {
        LimitPeriodicSeries pert_series = trunc;
        pert_series.set(freq, pert_series.amplitude(freq) + delta * unit_amp);
        const ConditionReport gate = check_tail_budget(pert_series, run.checks);
        if (!gate.pass)
            throw ConditionFailure("continuity: perturbed data fails the tail budget");
        SpectralField pert = top.data;
        pert.set_coeff(static_cast<int>(grid_mode),
                       pert.coeff(static_cast<int>(grid_mode)) + delta * unit_amp);
        const Trajectory traj = evolve(pert, t, cfg);
        const SpectralField diff = subtract(traj.at_time(t), u_ref);
        ContinuityRow row;
        row.delta = delta;
        row.response = stepanov_norm(diff, 1, 2.0, opt);
        row.ratio = row.response / delta;
        report.rows.push_back(row);
    }
    report.monotone = true;
    for (std::size_t i = 0; i + 1 < report.rows.size(); ++i)
        report.monotone = report.monotone && report.rows[i + 1].response < report.rows[i].response;
    return report;
}

}  // namespace limitnls
