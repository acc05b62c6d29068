#pragma once

#include <functional>

#include "limitnls/series.hpp"

namespace limitnls {

// Membership of r in the level-j lattice: r * j! integral, decided exactly by
// prime-factorizing den(r) and comparing against the factorial's valuations
// (works for any j, no 64-bit factorial needed).
bool is_in_level(const Rational& r, int j);

// Period of the level-j component, j!/omega.  Requires 1 <= j <= 20 (64-bit
// factorial) and omega > 0.
double level_period(int j, double omega);

struct PeriodizationLevel {
    int j;
    double period;
    LimitPeriodicSeries series;
};

// Terms of f inside the level-j lattice; an L_j-periodic function.  Levels
// are nested: every term survives into periodize(f, j+1).
PeriodizationLevel periodize(const LimitPeriodicSeries& f, int j);

// Terms whose frequency is an integer multiple of 1/L, for L given exactly
// as rho/omega (rho rational): keeps r with r * rho integral.
// periodize(f, j) keeps the same terms as spectral_projection(f, j!).
LimitPeriodicSeries spectral_projection(const LimitPeriodicSeries& f, const Rational& rho);

// Literal shifted average (1/n) * sum_{l<n} f(x + l*L).
Complex averaging_apply(const std::function<Complex(double)>& f, int n, double L, double x);

// Dirichlet factor (1/n) * sum_{l<n} exp(2*pi*i*theta*l): the multiplier the
// averaging operator applies to a frequency with theta = freq * L.  Exactly 1
// at integer theta; evaluated through argument reduction so large theta keeps
// full precision.
Complex dirichlet_factor(double theta, int n);

}  // namespace limitnls
