#include "limitnls/series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "limitnls/rng.hpp"

namespace limitnls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

LimitPeriodicSeries::LimitPeriodicSeries(double omega) : omega_(omega) {
    if (omega_ == 0.0 || !std::isfinite(omega_))
        throw std::invalid_argument("series: omega must be finite and nonzero");
    if (omega_ < 0.0) omega_ = -omega_;  // (r, omega) -> (-r, -omega) leaves terms invariant
}

LimitPeriodicSeries::LimitPeriodicSeries(double omega, std::vector<SeriesTerm> terms)
    : LimitPeriodicSeries(omega) {
    const bool flip = omega < 0.0;
    for (auto& t : terms) {
        if (!finite(t.amp)) throw std::invalid_argument("series: non-finite amplitude");
        if (flip) t.freq = Rational(-t.freq.num, t.freq.den);
    }
    std::erase_if(terms, [](const SeriesTerm& t) { return t.amp == Complex(0.0, 0.0); });
    std::sort(terms.begin(), terms.end(),
              [](const SeriesTerm& a, const SeriesTerm& b) { return a.freq < b.freq; });
    for (std::size_t i = 1; i < terms.size(); ++i)
        if (terms[i - 1].freq == terms[i].freq)
            throw std::invalid_argument("series: duplicate frequency " + terms[i].freq.str());
    terms_ = std::move(terms);
}

void LimitPeriodicSeries::set(const Rational& r, Complex amp) {
    if (!finite(amp)) throw std::invalid_argument("series: non-finite amplitude");
    auto it = std::lower_bound(
        terms_.begin(), terms_.end(), r,
        [](const SeriesTerm& t, const Rational& key) { return t.freq < key; });
    const bool present = it != terms_.end() && it->freq == r;
    if (amp == Complex(0.0, 0.0)) {
        if (present) terms_.erase(it);
        return;
    }
    if (present)
        it->amp = amp;
    else
        terms_.insert(it, SeriesTerm{r, amp});
}

Complex LimitPeriodicSeries::amplitude(const Rational& r) const {
    auto it = std::lower_bound(
        terms_.begin(), terms_.end(), r,
        [](const SeriesTerm& t, const Rational& key) { return t.freq < key; });
    if (it != terms_.end() && it->freq == r) return it->amp;
    return {0.0, 0.0};
}

Complex evaluate(const LimitPeriodicSeries& f, double x) {
    Complex acc{0.0, 0.0};
    for (const auto& t : f.terms()) {
        const double phase = kTwoPi * t.freq.value() * f.omega() * x;
        acc += t.amp * Complex(std::cos(phase), std::sin(phase));
    }
    return acc;
}

Complex mean_value(const LimitPeriodicSeries& f) { return f.amplitude(Rational(0, 1)); }

Complex fourier_coefficient(const LimitPeriodicSeries& f, const Rational& r) {
    return f.amplitude(r);
}

Complex fourier_coefficient(const LimitPeriodicSeries& f, double theta) {
    for (const auto& t : f.terms())
        if (t.freq.value() * f.omega() == theta) return t.amp;
    return {0.0, 0.0};
}

double l2_norm(const LimitPeriodicSeries& f) {
    double s = 0.0;
    for (const auto& t : f.terms()) s += std::norm(t.amp);
    return std::sqrt(s);
}

double a_omega_norm(const LimitPeriodicSeries& f) {
    double s = 0.0;
    for (const auto& t : f.terms()) s += std::abs(t.amp);
    return s;
}

Complex mean_value_quadrature(const std::function<Complex(double)>& f, double L,
                              std::size_t samples) {
    if (!(L > 0.0) || !std::isfinite(L))
        throw std::invalid_argument("mean_value_quadrature: window must be positive");
    if (samples < 2) throw std::invalid_argument("mean_value_quadrature: need >= 2 samples");
    const double h = 2.0 * L / static_cast<double>(samples - 1);
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < samples; ++i) {
        const double x = -L + h * static_cast<double>(i);
        Complex v = f(x);
        if (!finite(v))
            throw std::runtime_error("mean_value_quadrature: non-finite sample at x=" +
                                     std::to_string(x));
        const double w = (i == 0 || i + 1 == samples) ? 0.5 : 1.0;
        acc += w * v;
    }
    return acc * (h / (2.0 * L));
}

Complex fourier_coefficient_quadrature(const std::function<Complex(double)>& f, double theta,
                                       double L, std::size_t samples) {
    return mean_value_quadrature(
        [&](double x) {
            const double phase = -kTwoPi * theta * x;
            return f(x) * Complex(std::cos(phase), std::sin(phase));
        },
        L, samples);
}

SeriesGenerator::SeriesGenerator(GeneratorSpec spec) : spec_(std::move(spec)) {
    if (spec_.omega == 0.0 || !std::isfinite(spec_.omega))
        throw std::invalid_argument("generator: omega must be finite and nonzero");
    if (spec_.omega < 0.0) spec_.omega = -spec_.omega;
    if (spec_.k < 1 || spec_.k > 4) throw std::invalid_argument("generator: k must be in 1..4");
    if (!(spec_.epsilon > 0.0)) throw std::invalid_argument("generator: epsilon must be > 0");
    if (!(spec_.C >= 0.0)) throw std::invalid_argument("generator: C must be >= 0");
    if (spec_.profile != "exp_block" && spec_.profile != "poly_block" && spec_.profile != "zero")
        throw std::invalid_argument("generator: unknown profile " + spec_.profile);
    for (int m : spec_.per_block_modes)
        if (m < 0) throw std::invalid_argument("generator: negative mode budget");
}

std::vector<int> SeriesGenerator::block_modes(int j) const {
    if (j < 1) throw std::invalid_argument("generator: block index must be >= 1");
    if (j > depth()) return {};
    const int budget = spec_.per_block_modes[static_cast<std::size_t>(j - 1)];
    std::vector<int> out;
    out.reserve(2 * static_cast<std::size_t>(budget));
    for (int n = -budget; n <= budget; ++n) {
        if (n == 0) continue;
        if (j >= 2 && n % j == 0) continue;  // already in the coarser lattice
        out.push_back(n);
    }
    return out;
}

double SeriesGenerator::block_period(int j) const {
    return static_cast<double>(factorial_checked(j)) / spec_.omega;
}

double SeriesGenerator::block_target(int j) const {
    const double L = block_period(j);
    if (spec_.profile == "zero") return 0.0;
    if (spec_.profile == "poly_block") return spec_.C * std::pow(L, -3.0);
    const double q = (spec_.mode == FlowMode::focusing ? 6.0 : 2.0 * spec_.k) +
                     2.0 * spec_.epsilon;
    return spec_.C * std::exp(-std::pow(L, q));
}

Complex SeriesGenerator::raw_amplitude(int j, int n) const {
    SplitMix64 rng(mix_key(mix_key(spec_.seed, static_cast<std::uint64_t>(j)),
                           static_cast<std::uint64_t>(static_cast<std::int64_t>(n)) ^
                               0xa5a5a5a5a5a5a5a5ull));
    const double mag = 0.25 + 0.75 * rng.uniform();  // bounded away from zero
    const double phase = kTwoPi * rng.uniform();
    return Complex(mag * std::cos(phase), mag * std::sin(phase));
}

double SeriesGenerator::raw_block_h1(int j) const {
    const double L = block_period(j);
    double s = 0.0;
    for (int n : block_modes(j)) {
        const double nu = static_cast<double>(n) / L;
        s += (1.0 + nu * nu) * std::norm(raw_amplitude(j, n));
    }
    return std::sqrt(L * s);
}

Complex SeriesGenerator::amplitude(int j, int n) const {
    if (j < 1 || j > depth()) return {0.0, 0.0};
    const int budget = spec_.per_block_modes[static_cast<std::size_t>(j - 1)];
    if (n == 0 || n < -budget || n > budget) return {0.0, 0.0};
    if (j >= 2 && n % j == 0) return {0.0, 0.0};
    const double target = block_target(j);
    if (target <= 0.0) return {0.0, 0.0};  // exp underflow: the whole block vanishes
    const double raw = raw_block_h1(j);
    return raw_amplitude(j, n) * (target / raw);
}

LimitPeriodicSeries truncate(const SeriesGenerator& g, int J) {
    if (J < 1) throw std::invalid_argument("truncate: depth must be >= 1");
    if (J > g.depth())
        throw std::invalid_argument("truncate: no mode budget beyond block " +
                                    std::to_string(g.depth()));
    std::vector<SeriesTerm> terms;
    for (int j = 1; j <= J; ++j) {
        const std::int64_t fact = factorial_checked(j);
        for (int n : g.block_modes(j)) {
            const Complex a = g.amplitude(j, n);
            if (a == Complex(0.0, 0.0)) continue;
            terms.push_back(SeriesTerm{Rational(n, fact), a});
        }
    }
    // The series constructor rejects duplicate frequencies, which doubles as
    // the cross-block collision assertion.
    return LimitPeriodicSeries(g.spec().omega, std::move(terms));
}

}  // namespace limitnls
