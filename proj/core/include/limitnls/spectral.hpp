#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "limitnls/rational.hpp"
#include "limitnls/types.hpp"

namespace limitnls {

// Equispaced samples u(i * lambda / M) on the circle of circumference lambda.
struct GridField {
    double lambda = 1.0;
    std::vector<Complex> samples;
};

// Band-limited field on the circle of circumference lambda, stored as Fourier
// coefficients c_n for n in [-N/2, N/2) in FFT order (0..N/2-1, -N/2..-1),
// with u(x) = sum_n c_n exp(2*pi*i*n*x/lambda).  N is a power of two.
class SpectralField {
public:
    SpectralField() = default;
    SpectralField(double lambda, std::size_t n_modes);  // zero field

    double lambda() const { return lambda_; }
    std::size_t modes() const { return coeff_.size(); }
    int min_mode() const { return -static_cast<int>(coeff_.size() / 2); }
    int max_mode() const { return static_cast<int>(coeff_.size() / 2) - 1; }

    Complex coeff(int n) const;         // range-checked
    void set_coeff(int n, Complex c);

    const std::vector<Complex>& data() const { return coeff_; }
    std::vector<Complex>& data() { return coeff_; }

private:
    double lambda_ = 1.0;
    std::vector<Complex> coeff_;
};

// Sampling of the band-limited interpolant on M >= N points (zero-padded
// inverse DFT).
GridField synthesize(const SpectralField& F, std::size_t M);

// Leading N modes of the grid's DFT, c_n = (1/M) sum_i u_i exp(-2 pi i n i/M).
// Requires M >= N, N a power of two.  analyze(synthesize(F, M), N) == F.
SpectralField analyze(const GridField& g, std::size_t n_modes);

// True spatial derivative: coefficient n scaled by 2*pi*i*n/lambda.
SpectralField derivative(const SpectralField& F);

// lambda^{1/2} * (sum_n w(n) |c_n|^2)^{1/2} with w = |n/lambda|^{2s}
// (homogeneous; w(0) = 0 for s > 0) or (1 + |n/lambda|^2)^s.
double sobolev_norm(const SpectralField& F, double s, bool homogeneous);

// integral |u|^2 over the torus = lambda * sum |c_n|^2 (exact Plancherel).
double mass(const SpectralField& F);

// (1/2) integral |u_x|^2 + sign/(2k+2) integral |u|^{2k+2}.  The quartic-or-
// higher integrand is integrated on a grid of dealias_grid points (default
// (k+1)*N); with modes in [-N/2, N/2) the product degree is (2k+2) and
// (k+1)*N points make the quadrature exact, so smaller grids raise.
double hamiltonian(const SpectralField& F, int k, FlowMode mode, std::size_t dealias_grid = 0);

// max_i |u_i| on a synthesis grid (default 4N, minimum 16).
double linf_norm(const SpectralField& F, std::size_t grid = 0);

// f_lambda(x) = lambda^{-1/k} f(x/lambda): unit-circle field to T_lambda,
// same mode indices, amplitudes scaled by lambda^{-1/k}.  Requires the input
// to live on lambda = 1 and lambda >= 1.
SpectralField dilate(const SpectralField& F_unit, double lambda, int k);

// Inverse of dilate: T_lambda field to the unit circle, amplitudes scaled by
// lambda^{+1/k}.
SpectralField inverse_dilate(const SpectralField& F, int k);

// The exact factor lambda^{1/2 - s - 1/k} relating homogeneous Sobolev norms
// across dilate().
double dilation_norm_factor(double lambda, double s, int k);

// Periodic extension onto the circle of circumference factor * lambda:
// mode n becomes mode factor * n.  Exact; requires n_modes_out large enough.
SpectralField extend_periodic(const SpectralField& F, int factor, std::size_t n_modes_out);

// a - b on a common torus (lambda must agree; mode sets are aligned).
SpectralField subtract(const SpectralField& a, const SpectralField& b);

struct StepanovOptions {
    int window_starts = 256;    // window positions per period
    int points_per_unit = 256;  // quadrature resolution inside the unit window
};

// sup over window starts y of ( integral_y^{y+1} |f|^p + |d^s f|^p )^{1/p},
// s in {0, 1} (derivative taken spectrally), p >= 1.  For periodic f the sup
// over one period equals the sup over the line, so starts cover [0, lambda).
double stepanov_norm(const SpectralField& F, int s, double p, const StepanovOptions& opt = {});

// Same norm for a closed-form function with period `period`; df may be empty
// when s == 0.
double stepanov_norm(const std::function<Complex(double)>& f,
                     const std::function<Complex(double)>& df, double period, int s, double p,
                     const StepanovOptions& opt = {});

// Averaging operator A_{n,L} applied to a band-limited field, computed as the
// exact per-mode Dirichlet multiplier with theta_m = m * ratio, ratio = L /
// lambda.  The Rational overload detects integral theta exactly (commensurate
// L), where the factor is exactly 1.
SpectralField apply_averaging(const SpectralField& F, int n, double ratio);
SpectralField apply_averaging(const SpectralField& F, int n, const Rational& ratio);

// Measured sharp constants of the pointwise/space embeddings on one field.
// All ratios are (left side) / (right side) of the certified inequality.
struct EmbeddingReport {
    double linf = 0;       // grid sup
    double coeff_l1 = 0;   // sum |c_n|
    double mean_abs = 0;   // |c_0|
    double sobolev_h = 0;  // inhomogeneous H^s
    double sobolev_hom = 0;
    double linf_vs_coeff_l1 = 0;    // <= 1 always
    double coeff_l1_vs_sobolev = 0; // <= 1 with the lattice-sum constant folded in
    double linf_vs_hom = 0;         // (linf - |c_0|) / (lambda^{s-1/2} ||.||_hom)
    double gagliardo_max = 0;       // max over unit windows and p in {2,4,6,inf}
};
EmbeddingReport embedding_checks(const SpectralField& F, double s,
                                 const StepanovOptions& opt = {});

// sup-norm of dilate(F, lambda, k) against lambda^{-1/k} (|c_0| + ||F||_hom):
// the measured ratio of the scaled embedding.
double dilated_sup_ratio(const SpectralField& F_unit, double lambda, int k, double s);

}  // namespace limitnls
