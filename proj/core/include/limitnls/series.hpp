#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "limitnls/rational.hpp"
#include "limitnls/types.hpp"

namespace limitnls {

struct SeriesTerm {
    Rational freq;  // frequency in physical units is freq * omega
    Complex amp;
};

// Trigonometric sum
//
//     f(x) = sum_m  amp_m * exp(2*pi*i * r_m * omega * x),
//
// with exact rational multipliers r_m of a single base frequency omega.
// Terms are unique, sorted by (den, num), and carry nonzero amplitudes;
// every reduction over terms walks that order.
class LimitPeriodicSeries {
public:
    explicit LimitPeriodicSeries(double omega);
    LimitPeriodicSeries(double omega, std::vector<SeriesTerm> terms);

    double omega() const { return omega_; }
    const std::vector<SeriesTerm>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    // Upsert; a zero amplitude erases the term.
    void set(const Rational& r, Complex amp);
    // 0 for frequencies not present.
    Complex amplitude(const Rational& r) const;

private:
    double omega_;
    std::vector<SeriesTerm> terms_;
};

Complex evaluate(const LimitPeriodicSeries& f, double x);

// Amplitude at frequency 0 (the mean value of f over the line).
Complex mean_value(const LimitPeriodicSeries& f);

// Exact lookups: the amplitude if theta (or r*omega) is a stored frequency,
// else 0.  The real-theta overload compares against the floated frequency.
Complex fourier_coefficient(const LimitPeriodicSeries& f, const Rational& r);
Complex fourier_coefficient(const LimitPeriodicSeries& f, double theta);

double l2_norm(const LimitPeriodicSeries& f);       // sqrt(sum |amp|^2)
double a_omega_norm(const LimitPeriodicSeries& f);  // sum |amp|

// (1/(2L)) * integral_{-L}^{L} f(x) dx, composite trapezoid with `samples`
// nodes (>= 2).  Non-finite samples raise.
Complex mean_value_quadrature(const std::function<Complex(double)>& f, double L,
                              std::size_t samples);

// Mean of f(x) * exp(-2*pi*i*theta*x) over [-L, L], same quadrature.
Complex fourier_coefficient_quadrature(const std::function<Complex(double)>& f,
                                       double theta, double L, std::size_t samples);

// Deterministic amplitude rule on (block j, mode n).  Block j >= 2 contains
// modes with j not dividing n; block 1 contains every nonzero integer mode.
// Frequencies across blocks never collide: r = n/j! reduced lies in the
// level-j lattice but not the level-(j-1) one.
struct GeneratorSpec {
    double omega = 1.0;
    std::string profile = "exp_block";  // exp_block | poly_block | zero
    double C = 1.0;
    double epsilon = 0.5;
    int k = 1;
    FlowMode mode = FlowMode::defocusing;
    std::vector<int> per_block_modes;  // entry b is the mode budget of block b+1
    std::uint64_t seed = 0;
};

class SeriesGenerator {
public:
    explicit SeriesGenerator(GeneratorSpec spec);

    const GeneratorSpec& spec() const { return spec_; }
    int depth() const { return static_cast<int>(spec_.per_block_modes.size()); }

    // Modes of block j in ascending order (budget m_j: -m_j..m_j, 0 skipped,
    // multiples of j skipped for j >= 2).
    std::vector<int> block_modes(int j) const;

    // Pure: same (j, n) always yields the same amplitude, independent of any
    // other call.  Zero outside the block budget.
    Complex amplitude(int j, int n) const;

    // Period of the level-j lattice, j!/omega.
    double block_period(int j) const;

    // Target norm of block j as a homogeneous-plus-mass Sobolev norm on its
    // own torus; the sampled block is rescaled to hit it exactly.
    double block_target(int j) const;

private:
    double raw_block_h1(int j) const;
    Complex raw_amplitude(int j, int n) const;

    GeneratorSpec spec_;
};

// Blocks 1..J of the generator as a series.  Truncations are nested: the
// level-J term set is a subset of the level-(J+1) one.
LimitPeriodicSeries truncate(const SeriesGenerator& g, int J);

}  // namespace limitnls
