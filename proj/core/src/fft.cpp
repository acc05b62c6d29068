#include "limitnls/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace limitnls {

namespace {

// FFTW planning is not thread-safe and plans are expensive; keep one plan per
// (size, sign) behind a mutex and execute via the new-array interface.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    std::vector<Complex> run(const std::vector<Complex>& in, int sign) {
        const std::size_t m = in.size();
        fftw_complex* buf_in;
        fftw_complex* buf_out;
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lock(mu_);
            plan = get_plan_locked(m, sign);
            buf_in = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m));
            buf_out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m));
        }
        if (buf_in == nullptr || buf_out == nullptr) {
            if (buf_in) fftw_free(buf_in);
            if (buf_out) fftw_free(buf_out);
            throw std::bad_alloc();
        }
        static_assert(sizeof(fftw_complex) == sizeof(Complex));
        std::memcpy(buf_in, in.data(), sizeof(Complex) * m);
        fftw_execute_dft(plan, buf_in, buf_out);
        std::vector<Complex> out(m);
        std::memcpy(out.data(), buf_out, sizeof(Complex) * m);
        fftw_free(buf_in);
        fftw_free(buf_out);
        return out;
    }

private:
    fftw_plan get_plan_locked(std::size_t m, int sign) {
        const auto key = std::make_pair(m, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        // Plan on scratch arrays; FFTW_ESTIMATE keeps planning deterministic
        // and leaves the scratch contents untouched.
        fftw_complex* a = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m));
        fftw_complex* b = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m));
        if (a == nullptr || b == nullptr) {
            if (a) fftw_free(a);
            if (b) fftw_free(b);
            throw std::bad_alloc();
        }
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m), a, b, sign, FFTW_ESTIMATE);
        fftw_free(a);
        fftw_free(b);
        if (plan == nullptr) throw std::runtime_error("fft: planner failed");
        plans_.emplace(key, plan);
        return plan;
    }

    std::mutex mu_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

}  // namespace

std::vector<Complex> dft_forward(const std::vector<Complex>& in) {
    if (in.empty()) throw std::invalid_argument("dft_forward: empty input");
    std::vector<Complex> out = PlanCache::instance().run(in, FFTW_FORWARD);
    const double scale = 1.0 / static_cast<double>(in.size());
    for (auto& z : out) z *= scale;
    return out;
}

std::vector<Complex> dft_inverse(const std::vector<Complex>& in) {
    if (in.empty()) throw std::invalid_argument("dft_inverse: empty input");
    return PlanCache::instance().run(in, FFTW_BACKWARD);
}

}  // namespace limitnls
