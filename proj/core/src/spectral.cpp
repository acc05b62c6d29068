#include "limitnls/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "limitnls/fft.hpp"
#include "limitnls/periodization.hpp"

namespace limitnls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pow2(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

void require_field(const SpectralField& F, const char* where) {
    if (F.modes() == 0) throw std::invalid_argument(std::string(where) + ": empty field");
}

// Direct evaluation of the band-limited interpolant at one point.
Complex eval_point(const SpectralField& F, double x) {
    Complex acc{0.0, 0.0};
    for (int n = F.min_mode(); n <= F.max_mode(); ++n) {
        const Complex c = F.coeff(n);
        if (c == Complex(0.0, 0.0)) continue;
        const double phase = kTwoPi * static_cast<double>(n) * x / F.lambda();
        acc += c * Complex(std::cos(phase), std::sin(phase));
    }
    return acc;
}

// Unit-length window [y, y+1] trapezoid integral of |f|^p (plus |f'|^p when
// s == 1), maximized over window starts.  Returns max_y integral, not yet
// raised to 1/p.  `value(x)` and `dvalue(x)` supply samples.
double window_sup_integral(const std::function<Complex(double)>& value,
                           const std::function<Complex(double)>& dvalue, double period, int s,
                           double p, const StepanovOptions& opt) {
    if (s != 0 && s != 1) throw std::invalid_argument("stepanov_norm: s must be 0 or 1");
    if (!(p >= 1.0)) throw std::invalid_argument("stepanov_norm: p must be >= 1");
    if (opt.window_starts < 1 || opt.points_per_unit < 1)
        throw std::invalid_argument("stepanov_norm: options must be positive");
    if (!(period > 0.0) || !std::isfinite(period))
        throw std::invalid_argument("stepanov_norm: period must be positive");
    const int W = opt.window_starts;
    const int P = opt.points_per_unit;
    const double h = 1.0 / static_cast<double>(P);
    double best = 0.0;
    for (int w = 0; w < W; ++w) {
        const double y = period * static_cast<double>(w) / static_cast<double>(W);
        double acc = 0.0;
        for (int i = 0; i <= P; ++i) {
            const double x = y + h * static_cast<double>(i);
            const double weight = (i == 0 || i == P) ? 0.5 : 1.0;
            double val = std::pow(std::abs(value(x)), p);
            if (s == 1) val += std::pow(std::abs(dvalue(x)), p);
            if (!std::isfinite(val)) throw std::runtime_error("stepanov_norm: non-finite sample");
            acc += weight * val;
        }
        best = std::max(best, acc * h);
    }
    return best;
}

// Grid-aligned variant: when P * lambda is an integer, every window node of
// every window start lies on the global grid of G = W * P * lambda points, so
// one zero-padded synthesis serves all windows.
bool aligned_grid(const SpectralField& F, const StepanovOptions& opt, std::size_t* g_out,
                  std::size_t* start_stride, std::size_t* node_stride) {
    const double pl = static_cast<double>(opt.points_per_unit) * F.lambda();
    const double r = std::round(pl);
    if (r < 1.0 || std::abs(pl - r) > 1e-9 * std::max(1.0, pl)) return false;
    const std::size_t G =
        static_cast<std::size_t>(r) * static_cast<std::size_t>(opt.window_starts);
    if (G < F.modes()) return false;
    *g_out = G;
    *start_stride = static_cast<std::size_t>(r);                 // lambda/W in grid units
    *node_stride = static_cast<std::size_t>(opt.window_starts);  // 1/P in grid units
    return true;
}

double window_sup_integral_field(const SpectralField& F, int s, double p,
                                 const StepanovOptions& opt) {
    std::size_t G = 0, start_stride = 0, node_stride = 0;
    if (!aligned_grid(F, opt, &G, &start_stride, &node_stride)) {
        SpectralField dF;
        if (s == 1) dF = derivative(F);
        return window_sup_integral([&](double x) { return eval_point(F, x); },
                                   [&](double x) { return eval_point(dF, x); }, F.lambda(), s,
                                   p, opt);
    }
    if (s != 0 && s != 1) throw std::invalid_argument("stepanov_norm: s must be 0 or 1");
    if (!(p >= 1.0)) throw std::invalid_argument("stepanov_norm: p must be >= 1");
    const GridField g = synthesize(F, G);
    GridField dg;
    if (s == 1) dg = synthesize(derivative(F), G);
    const int W = opt.window_starts;
    const int P = opt.points_per_unit;
    const double h = 1.0 / static_cast<double>(P);
    double best = 0.0;
    for (int w = 0; w < W; ++w) {
        const std::size_t base = static_cast<std::size_t>(w) * start_stride;
        double acc = 0.0;
        for (int i = 0; i <= P; ++i) {
            const std::size_t idx = (base + static_cast<std::size_t>(i) * node_stride) % G;
            const double weight = (i == 0 || i == P) ? 0.5 : 1.0;
            double val = std::pow(std::abs(g.samples[idx]), p);
            if (s == 1) val += std::pow(std::abs(dg.samples[idx]), p);
            if (!std::isfinite(val)) throw std::runtime_error("stepanov_norm: non-finite sample");
            acc += weight * val;
        }
        best = std::max(best, acc * h);
    }
    return best;
}

}  // namespace

SpectralField::SpectralField(double lambda, std::size_t n_modes) : lambda_(lambda) {
    if (!(lambda_ > 0.0) || !std::isfinite(lambda_))
        throw std::invalid_argument("SpectralField: circumference must be positive");
    if (!is_pow2(n_modes))
        throw std::invalid_argument("SpectralField: mode count must be a power of two >= 2");
    coeff_.assign(n_modes, Complex(0.0, 0.0));
}

Complex SpectralField::coeff(int n) const {
    if (n < min_mode() || n > max_mode())
        throw std::out_of_range("SpectralField: mode " + std::to_string(n) + " out of range");
    return coeff_[n >= 0 ? static_cast<std::size_t>(n)
                         : coeff_.size() - static_cast<std::size_t>(-n)];
}

void SpectralField::set_coeff(int n, Complex c) {
    if (n < min_mode() || n > max_mode())
        throw std::out_of_range("SpectralField: mode " + std::to_string(n) + " out of range");
    coeff_[n >= 0 ? static_cast<std::size_t>(n) : coeff_.size() - static_cast<std::size_t>(-n)] =
        c;
}

GridField synthesize(const SpectralField& F, std::size_t M) {
    require_field(F, "synthesize");
    const std::size_t N = F.modes();
    if (M < N) throw std::invalid_argument("synthesize: grid smaller than mode count");
    std::vector<Complex> padded(M, Complex(0.0, 0.0));
    const std::size_t half = N / 2;
    for (std::size_t i = 0; i < half; ++i) padded[i] = F.data()[i];              // modes 0..N/2-1
    for (std::size_t i = half; i < N; ++i) padded[M - N + i] = F.data()[i];      // modes -N/2..-1
    return GridField{F.lambda(), dft_inverse(padded)};
}

SpectralField analyze(const GridField& g, std::size_t n_modes) {
    const std::size_t M = g.samples.size();
    if (!is_pow2(n_modes)) throw std::invalid_argument("analyze: mode count must be a power of two >= 2");
    if (M < n_modes) throw std::invalid_argument("analyze: grid smaller than mode count");
    const std::vector<Complex> hat = dft_forward(g.samples);
    SpectralField F(g.lambda, n_modes);
    const std::size_t half = n_modes / 2;
    for (std::size_t i = 0; i < half; ++i) F.data()[i] = hat[i];
    for (std::size_t i = half; i < n_modes; ++i) F.data()[i] = hat[M - n_modes + i];
    return F;
}

SpectralField derivative(const SpectralField& F) {
    require_field(F, "derivative");
    SpectralField out(F.lambda(), F.modes());
    for (int n = F.min_mode(); n <= F.max_mode(); ++n) {
        const double xi = kTwoPi * static_cast<double>(n) / F.lambda();
        out.set_coeff(n, F.coeff(n) * Complex(0.0, xi));
    }
    return out;
}

double sobolev_norm(const SpectralField& F, double s, bool homogeneous) {
    require_field(F, "sobolev_norm");
    if (!(s >= 0.0)) throw std::invalid_argument("sobolev_norm: s must be >= 0");
    double acc = 0.0;
    for (int n = F.min_mode(); n <= F.max_mode(); ++n) {
        const double a2 = std::norm(F.coeff(n));
        if (a2 == 0.0) continue;
        const double nu = static_cast<double>(n) / F.lambda();
        double w;
        if (homogeneous)
            w = (n == 0 && s > 0.0) ? 0.0 : std::pow(std::abs(nu), 2.0 * s);
        else
            w = std::pow(1.0 + nu * nu, s);
        acc += w * a2;
    }
    return std::sqrt(F.lambda() * acc);
}

double mass(const SpectralField& F) {
    require_field(F, "mass");
    double acc = 0.0;
    for (const auto& c : F.data()) acc += std::norm(c);
    return F.lambda() * acc;
}

double hamiltonian(const SpectralField& F, int k, FlowMode mode, std::size_t dealias_grid) {
    require_field(F, "hamiltonian");
    if (k < 1 || k > 4) throw std::invalid_argument("hamiltonian: k must be in 1..4");
    const std::size_t N = F.modes();
    const std::size_t needed = static_cast<std::size_t>(k + 1) * N;
    const std::size_t M = dealias_grid == 0 ? needed : dealias_grid;
    if (M < needed)
        throw std::invalid_argument("hamiltonian: quadrature grid too small for |u|^(2k+2)");
    const double kinetic = 0.5 * mass(derivative(F));
    const GridField g = synthesize(F, M);
    double pot = 0.0;
    for (const auto& u : g.samples) pot += std::pow(std::norm(u), static_cast<double>(k + 1));
    pot *= F.lambda() / static_cast<double>(M);
    const double sign = flow_sign(mode);
    return kinetic + sign / (2.0 * static_cast<double>(k) + 2.0) * pot;
}

double linf_norm(const SpectralField& F, std::size_t grid) {
    require_field(F, "linf_norm");
    const std::size_t N = F.modes();
    std::size_t G = grid == 0 ? std::max<std::size_t>(4 * N, 16) : std::max(grid, N);
    const GridField g = synthesize(F, G);
    double best = 0.0;
    for (const auto& u : g.samples) best = std::max(best, std::abs(u));
    return best;
}

SpectralField dilate(const SpectralField& F_unit, double lambda, int k) {
    require_field(F_unit, "dilate");
    if (F_unit.lambda() != 1.0)
        throw std::invalid_argument("dilate: input must live on the unit circle");
    if (!(lambda >= 1.0) || !std::isfinite(lambda))
        throw std::invalid_argument("dilate: lambda must be >= 1");
    if (k < 1) throw std::invalid_argument("dilate: k must be >= 1");
    SpectralField out(lambda, F_unit.modes());
    const double scale = std::pow(lambda, -1.0 / static_cast<double>(k));
    for (std::size_t i = 0; i < F_unit.data().size(); ++i)
        out.data()[i] = F_unit.data()[i] * scale;
    return out;
}

SpectralField inverse_dilate(const SpectralField& F, int k) {
    require_field(F, "inverse_dilate");
    if (k < 1) throw std::invalid_argument("inverse_dilate: k must be >= 1");
    SpectralField out(1.0, F.modes());
    const double scale = std::pow(F.lambda(), 1.0 / static_cast<double>(k));
    for (std::size_t i = 0; i < F.data().size(); ++i) out.data()[i] = F.data()[i] * scale;
    return out;
}

double dilation_norm_factor(double lambda, double s, int k) {
    if (!(lambda > 0.0)) throw std::invalid_argument("dilation_norm_factor: lambda must be > 0");
    if (k < 1) throw std::invalid_argument("dilation_norm_factor: k must be >= 1");
    return std::pow(lambda, 0.5 - s - 1.0 / static_cast<double>(k));
}

SpectralField extend_periodic(const SpectralField& F, int factor, std::size_t n_modes_out) {
    require_field(F, "extend_periodic");
    if (factor < 1) throw std::invalid_argument("extend_periodic: factor must be >= 1");
    SpectralField out(F.lambda() * static_cast<double>(factor), n_modes_out);
    for (int n = F.min_mode(); n <= F.max_mode(); ++n) {
        const Complex c = F.coeff(n);
        if (c == Complex(0.0, 0.0)) continue;
        const long long m = static_cast<long long>(n) * factor;
        if (m < out.min_mode() || m > out.max_mode())
            throw std::invalid_argument("extend_periodic: output mode count too small");
        out.set_coeff(static_cast<int>(m), c);
    }
    return out;
}

SpectralField subtract(const SpectralField& a, const SpectralField& b) {
    require_field(a, "subtract");
    require_field(b, "subtract");
    if (a.modes() != b.modes()) throw std::invalid_argument("subtract: mode counts differ");
    if (std::abs(a.lambda() - b.lambda()) > 1e-12 * std::max(1.0, a.lambda()))
        throw std::invalid_argument("subtract: circumferences differ");
    SpectralField out(a.lambda(), a.modes());
    for (std::size_t i = 0; i < a.data().size(); ++i)
        out.data()[i] = a.data()[i] - b.data()[i];
    return out;
}

double stepanov_norm(const SpectralField& F, int s, double p, const StepanovOptions& opt) {
    require_field(F, "stepanov_norm");
    return std::pow(window_sup_integral_field(F, s, p, opt), 1.0 / p);
}

double stepanov_norm(const std::function<Complex(double)>& f,
                     const std::function<Complex(double)>& df, double period, int s, double p,
                     const StepanovOptions& opt) {
    if (!f) throw std::invalid_argument("stepanov_norm: missing function");
    if (s == 1 && !df) throw std::invalid_argument("stepanov_norm: s=1 needs a derivative");
    return std::pow(window_sup_integral(f, df, period, s, p, opt), 1.0 / p);
}

SpectralField apply_averaging(const SpectralField& F, int n, double ratio) {
    require_field(F, "apply_averaging");
    if (n < 1) throw std::invalid_argument("apply_averaging: need n >= 1");
    if (!(ratio > 0.0) || !std::isfinite(ratio))
        throw std::invalid_argument("apply_averaging: ratio must be positive");
    SpectralField out(F.lambda(), F.modes());
    for (int m = F.min_mode(); m <= F.max_mode(); ++m)
        out.set_coeff(m, F.coeff(m) * dirichlet_factor(static_cast<double>(m) * ratio, n));
    return out;
}

SpectralField apply_averaging(const SpectralField& F, int n, const Rational& ratio) {
    require_field(F, "apply_averaging");
    if (n < 1) throw std::invalid_argument("apply_averaging: need n >= 1");
    if (ratio.num <= 0) throw std::invalid_argument("apply_averaging: ratio must be positive");
    SpectralField out(F.lambda(), F.modes());
    for (int m = F.min_mode(); m <= F.max_mode(); ++m) {
        const Rational theta = Rational(m, 1) * ratio;
        Complex factor;
        if (theta.is_integer()) {
            factor = {1.0, 0.0};  // exact commensure: averaging is the identity here
        } else {
            // Use the reduced residue so the double never carries the integer part.
            const std::int64_t res = ((theta.num % theta.den) + theta.den) % theta.den;
            factor = dirichlet_factor(static_cast<double>(res) / static_cast<double>(theta.den),
                                      n);
        }
        out.set_coeff(m, F.coeff(m) * factor);
    }
    return out;
}

EmbeddingReport embedding_checks(const SpectralField& F, double s, const StepanovOptions& opt) {
    require_field(F, "embedding_checks");
    if (!(s > 0.5)) throw std::invalid_argument("embedding_checks: need s > 1/2");
    EmbeddingReport r;
    r.linf = linf_norm(F);
    for (const auto& c : F.data()) r.coeff_l1 += std::abs(c);
    r.mean_abs = std::abs(F.coeff(0));
    r.sobolev_h = sobolev_norm(F, s, false);
    r.sobolev_hom = sobolev_norm(F, s, true);
    // Cauchy-Schwarz lattice sums over the actual mode set.
    double lattice_inhom = 0.0;
    double lattice_hom = 0.0;
    for (int n = F.min_mode(); n <= F.max_mode(); ++n) {
        const double nu = static_cast<double>(n) / F.lambda();
        lattice_inhom += std::pow(1.0 + nu * nu, -s);
        if (n != 0) lattice_hom += std::pow(std::abs(nu), -2.0 * s);
    }
    const double root_l = std::sqrt(F.lambda());
    if (r.coeff_l1 > 0.0)
        r.linf_vs_coeff_l1 = r.linf / r.coeff_l1;
    if (r.sobolev_h > 0.0)
        r.coeff_l1_vs_sobolev = r.coeff_l1 / (std::sqrt(lattice_inhom) * r.sobolev_h / root_l);
    if (r.sobolev_hom > 0.0)
        r.linf_vs_hom = std::max(0.0, r.linf - r.mean_abs) /
                        (std::pow(F.lambda(), s - 0.5) * r.sobolev_hom);
    const double s_norm = stepanov_norm(F, 1, 2.0, opt);
    if (s_norm > 0.0) {
        for (double p : {2.0, 4.0, 6.0}) {
            const double lp = std::pow(window_sup_integral_field(F, 0, p, opt), 1.0 / p);
            r.gagliardo_max = std::max(r.gagliardo_max, lp / s_norm);
        }
        r.gagliardo_max = std::max(r.gagliardo_max, r.linf / s_norm);
    }
    return r;
}

double dilated_sup_ratio(const SpectralField& F_unit, double lambda, int k, double s) {
    const SpectralField G = dilate(F_unit, lambda, k);
    const double sup = linf_norm(G);
    const double budget = std::pow(lambda, -1.0 / static_cast<double>(k)) *
                          (std::abs(F_unit.coeff(0)) + sobolev_norm(F_unit, s, true));
    if (budget == 0.0) return 0.0;
    return sup / budget;
}

}  // namespace limitnls
