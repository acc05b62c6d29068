#include "limitnls/conditions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace limitnls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// S^{1,2} of a trigonometric sum, evaluated as a periodic function with the
// given period (exact for any series whose frequencies are commensurate with
// 1/period).
double series_stepanov_s12(const LimitPeriodicSeries& f, double period,
                           const StepanovOptions& opt) {
    if (f.size() == 0) return 0.0;
    LimitPeriodicSeries df(f.omega());
    for (const auto& t : f.terms())
        df.set(t.freq, t.amp * Complex(0.0, kTwoPi * t.freq.value() * f.omega()));
    return stepanov_norm([&](double x) { return evaluate(f, x); },
                         [&](double x) { return evaluate(df, x); }, period, 1, 2.0, opt);
}

// Exact H^1 on the block's own torus from the amplitudes:
// sqrt(L * sum (1 + nu^2) |amp|^2), nu the physical frequency.
double block_torus_h1(const std::vector<SeriesTerm>& terms, double omega, double L) {
    double acc = 0.0;
    for (const auto& t : terms) {
        const double nu = t.freq.value() * omega;
        acc += (1.0 + nu * nu) * std::norm(t.amp);
    }
    return std::sqrt(L * acc);
}

std::vector<SeriesTerm> block_terms(const LimitPeriodicSeries& f, int j) {
    std::vector<SeriesTerm> out;
    for (const auto& t : f.terms()) {
        if (!is_in_level(t.freq, j)) continue;
        if (j >= 2 && is_in_level(t.freq, j - 1)) continue;
        out.push_back(t);
    }
    return out;
}

void require_resolvable(const LimitPeriodicSeries& trunc, const ConditionParams& p) {
    for (const auto& t : trunc.terms())
        if (!is_in_level(t.freq, p.depth))
            throw std::invalid_argument(
                "condition check: unresolvable tail: series holds frequency " + t.freq.str() +
                " outside the declared truncation depth");
}

}  // namespace

void ConditionParams::validate() const {
    if (k < 1 || k > 4) throw std::invalid_argument("conditions: k must be in 1..4");
    if (mode == CheckMode::focusing_k1 && k != 1)
        throw std::invalid_argument("conditions: the focusing regime requires k == 1");
    if (!(epsilon > 0.0)) throw std::invalid_argument("conditions: epsilon must be > 0");
    if (!(B > 0.0) || !(C > 0.0) || !(C_nec > 0.0))
        throw std::invalid_argument("conditions: budgets B, C, C_nec must be > 0");
    if (j_min < 1 || j_min > j_max) throw std::invalid_argument("conditions: need 1 <= j_min <= j_max");
    if (depth <= j_max)
        throw std::invalid_argument("conditions: truncation depth must exceed j_max");
    if (depth > 20) throw std::invalid_argument("conditions: depth must be <= 20");
    if (stepanov.window_starts < 1 || stepanov.points_per_unit < 1)
        throw std::invalid_argument("conditions: window options must be positive");
}

double ConditionParams::tail_exponent() const {
    const double base = mode == CheckMode::focusing_k1 ? 6.0 : 2.0 * static_cast<double>(k);
    return base + epsilon;
}

double ConditionParams::necessary_exponent() const {
    const double base = mode == CheckMode::focusing_k1 ? 6.0 : 2.0 * static_cast<double>(k);
    return base + 0.5 * epsilon;
}

ConditionReport check_tail_budget(const LimitPeriodicSeries& trunc, const ConditionParams& p) {
    p.validate();
    require_resolvable(trunc, p);
    const double q = p.tail_exponent();
    const double common_period = level_period(p.depth, trunc.omega());
    ConditionReport report;
    report.check = "tail_budget";
    report.pass = true;
    for (int j = p.j_min; j <= p.j_max; ++j) {
        const double L_next = level_period(j + 1, trunc.omega());
        std::vector<SeriesTerm> tail;
        for (const auto& t : trunc.terms())
            if (!is_in_level(t.freq, j)) tail.push_back(t);
        const double norm = series_stepanov_s12(
            LimitPeriodicSeries(trunc.omega(), std::move(tail)), common_period, p.stepanov);
        ConditionRow row;
        row.j = j;
        row.L = L_next;
        row.value = norm;
        row.log_lhs = norm == 0.0 ? -kInf : std::pow(L_next, q) + std::log(norm);
        row.log_rhs = std::log(p.B);
        row.margin = row.log_rhs - row.log_lhs;
        row.pass = row.margin >= 0.0;
        report.pass = report.pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

BlockEnvelopeReport check_block_envelope(const LimitPeriodicSeries& trunc,
                                         const ConditionParams& p) {
    p.validate();
    require_resolvable(trunc, p);
    const double q = p.tail_exponent();
    BlockEnvelopeReport report;
    report.pass_line = true;
    report.pass_torus = true;
    for (int j = p.j_min; j <= p.j_max; ++j) {
        const double L = level_period(j, trunc.omega());
        const std::vector<SeriesTerm> terms = block_terms(trunc, j);
        BlockEnvelopeRow row;
        row.j = j;
        row.L = L;
        row.line_norm =
            series_stepanov_s12(LimitPeriodicSeries(trunc.omega(), terms), L, p.stepanov);
        row.torus_norm = block_torus_h1(terms, trunc.omega(), L);
        row.log_rhs = std::log(p.C) - std::pow(L, q);
        row.margin_line =
            row.log_rhs - (row.line_norm == 0.0 ? -kInf : std::log(row.line_norm));
        row.margin_torus =
            row.log_rhs - (row.torus_norm == 0.0 ? -kInf : std::log(row.torus_norm));
        row.pass_line = row.margin_line >= 0.0;
        row.pass_torus = row.margin_torus >= 0.0;
        report.pass_line = report.pass_line && row.pass_line;
        report.pass_torus = report.pass_torus && row.pass_torus;
        report.rows.push_back(row);
    }
    return report;
}

ConditionReport check_necessary_bound(const LimitPeriodicSeries& trunc,
                                      const ConditionParams& p) {
    p.validate();
    require_resolvable(trunc, p);
    const double q = p.necessary_exponent();
    ConditionReport report;
    report.check = "necessary";
    report.pass = true;
    for (int j = p.j_min; j <= p.j_max; ++j) {
        const double L = level_period(j, trunc.omega());
        double acc = 0.0;
        for (const auto& t : block_terms(trunc, j)) {
            const double nu = t.freq.value() * trunc.omega();
            acc += (1.0 + nu * nu) * std::norm(t.amp);
        }
        const double value = std::sqrt(acc);
        ConditionRow row;
        row.j = j;
        row.L = L;
        row.value = value;
        row.log_lhs = value == 0.0 ? -kInf : std::log(value);
        row.log_rhs = std::log(p.C_nec) - std::pow(L, q);
        row.margin = row.log_rhs - row.log_lhs;
        row.pass = row.margin >= 0.0;
        report.pass = report.pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

ConditionReport check_tail_budget(const SeriesGenerator& g, const ConditionParams& p) {
    return check_tail_budget(truncate(g, p.depth), p);
}

BlockEnvelopeReport check_block_envelope(const SeriesGenerator& g, const ConditionParams& p) {
    return check_block_envelope(truncate(g, p.depth), p);
}

ConditionReport check_necessary_bound(const SeriesGenerator& g, const ConditionParams& p) {
    return check_necessary_bound(truncate(g, p.depth), p);
}

SeriesGenerator make_compliant_generator(double omega, int k, double epsilon, double C,
                                         std::vector<int> per_block_modes, std::uint64_t seed,
                                         CheckMode mode) {
    if (per_block_modes.empty())
        throw std::invalid_argument("make_compliant_generator: empty block request");
    GeneratorSpec spec;
    spec.omega = omega;
    spec.profile = "exp_block";
    spec.C = C;
    spec.epsilon = epsilon;
    spec.k = k;
    spec.mode = mode == CheckMode::focusing_k1 ? FlowMode::focusing : FlowMode::defocusing;
    spec.per_block_modes = std::move(per_block_modes);
    spec.seed = seed;
    return SeriesGenerator(spec);
}

double line_vs_torus_factor(double L) {
    if (!(L > 0.0)) throw std::invalid_argument("line_vs_torus_factor: L must be > 0");
    return kTwoPi * std::sqrt(std::floor(1.0 / L) + 1.0);
}

double torus_vs_line_factor(double L) {
    if (!(L > 0.0)) throw std::invalid_argument("torus_vs_line_factor: L must be > 0");
    return std::sqrt(std::ceil(L));
}

}  // namespace limitnls
