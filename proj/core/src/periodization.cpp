#include "limitnls/periodization.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace limitnls {

namespace {

constexpr double kPi = std::numbers::pi;

// Largest e with p^e | j!  (Legendre: sum_i floor(j / p^i)).
std::int64_t factorial_valuation(std::int64_t j, std::int64_t p) {
    std::int64_t v = 0;
    for (std::int64_t q = j / p; q > 0; q /= p) v += q;
    return v;
}

}  // namespace

bool is_in_level(const Rational& r, int j) {
    if (j < 0) throw std::invalid_argument("is_in_level: level must be >= 0");
    std::int64_t d = r.den;  // > 0, coprime to num, so d | j! decides membership
    for (std::int64_t p = 2; p * p <= d; ++p) {
        if (d % p != 0) continue;
        std::int64_t e = 0;
        while (d % p == 0) {
            d /= p;
            ++e;
        }
        if (p > j || factorial_valuation(j, p) < e) return false;
    }
    if (d > 1) {  // one prime factor > sqrt(original d), exponent 1
        if (d > j || factorial_valuation(j, d) < 1) return false;
    }
    return true;
}

double level_period(int j, double omega) {
    if (j < 1 || j > 20) throw std::invalid_argument("level_period: need 1 <= j <= 20");
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw std::invalid_argument("level_period: omega must be positive");
    return static_cast<double>(factorial_checked(j)) / omega;
}

PeriodizationLevel periodize(const LimitPeriodicSeries& f, int j) {
    const double period = level_period(j, f.omega());
    std::vector<SeriesTerm> kept;
    for (const auto& t : f.terms())
        if (is_in_level(t.freq, j)) kept.push_back(t);
    return PeriodizationLevel{j, period, LimitPeriodicSeries(f.omega(), std::move(kept))};
}

LimitPeriodicSeries spectral_projection(const LimitPeriodicSeries& f, const Rational& rho) {
    if (rho.is_zero()) throw std::invalid_argument("spectral_projection: rho must be nonzero");
    std::vector<SeriesTerm> kept;
    for (const auto& t : f.terms())
        if (integral_product(t.freq, rho)) kept.push_back(t);
    return LimitPeriodicSeries(f.omega(), std::move(kept));
}

Complex averaging_apply(const std::function<Complex(double)>& f, int n, double L, double x) {
    if (n < 1) throw std::invalid_argument("averaging_apply: need n >= 1");
    Complex acc{0.0, 0.0};
    for (int l = 0; l < n; ++l) acc += f(x + static_cast<double>(l) * L);
    return acc / static_cast<double>(n);
}

Complex dirichlet_factor(double theta, int n) {
    if (n < 1) throw std::invalid_argument("dirichlet_factor: need n >= 1");
    if (!std::isfinite(theta)) throw std::invalid_argument("dirichlet_factor: non-finite theta");
    // Reduce mod 1: every summand exp(2*pi*i*theta*l) only sees theta mod 1,
    // and working with the reduced residue keeps sin/cos arguments small.
    const double t = theta - std::round(theta);
    if (t == 0.0) return {1.0, 0.0};
    // Closed form: (1/n) * e^{i*pi*t*(n-1)} * sin(pi*t*n) / sin(pi*t).
    const double s = std::sin(kPi * t);
    if (s == 0.0) return {1.0, 0.0};  // t rounded to 0 in sin; theta was integral
    const double ratio = std::sin(kPi * t * static_cast<double>(n)) /
                         (static_cast<double>(n) * s);
    const double phi = kPi * t * static_cast<double>(n - 1);
    return Complex(ratio * std::cos(phi), ratio * std::sin(phi));
}

}  // namespace limitnls
