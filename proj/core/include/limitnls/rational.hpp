#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace limitnls {

// Reduced fraction num/den with den > 0.  The total order used everywhere is
// (den, num) lexicographic, not numeric order: it fixes the term order of
// every series reduction, so floating-point accumulations reproduce bit for
// bit between runs.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;

    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (num == std::numeric_limits<std::int64_t>::min() ||
            den == std::numeric_limits<std::int64_t>::min())
            throw std::invalid_argument("Rational: magnitude overflow");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    bool operator==(const Rational&) const = default;

    bool is_integer() const { return den == 1; }
    bool is_zero() const { return num == 0; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

inline bool operator<(const Rational& a, const Rational& b) {
    if (a.den != b.den) return a.den < b.den;
    return a.num < b.num;
}

inline Rational operator*(const Rational& a, const Rational& b) {
    const std::int64_t g1 = std::gcd(a.num < 0 ? -a.num : a.num, b.den);
    const std::int64_t g2 = std::gcd(b.num < 0 ? -b.num : b.num, a.den);
    const __int128 n = static_cast<__int128>(a.num / g1) * (b.num / g2);
    const __int128 d = static_cast<__int128>(a.den / g2) * (b.den / g1);
    if (n > std::numeric_limits<std::int64_t>::max() ||
        n < -static_cast<__int128>(std::numeric_limits<std::int64_t>::max()) ||
        d > std::numeric_limits<std::int64_t>::max())
        throw std::overflow_error("Rational: product overflow");
    return Rational(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
}

// r * q is an integer?  Exact, overflow-safe.
inline bool integral_product(const Rational& r, const Rational& q) {
    const __int128 n = static_cast<__int128>(r.num) * q.num;
    const __int128 d = static_cast<__int128>(r.den) * q.den;
    return n % d == 0;
}

// j! as int64; defined for 0 <= j <= 20 only (21! overflows 64 bits).
inline std::int64_t factorial_checked(int j) {
    if (j < 0 || j > 20) throw std::invalid_argument("factorial_checked: need 0 <= j <= 20");
    std::int64_t f = 1;
    for (int i = 2; i <= j; ++i) f *= i;
    return f;
}

// num * (mult / den), requiring den | mult.  Used for exact mode placement.
inline std::int64_t exact_mode(const Rational& r, std::int64_t mult) {
    if (mult % r.den != 0) throw std::invalid_argument("exact_mode: denominator does not divide");
    const __int128 m = static_cast<__int128>(r.num) * (mult / r.den);
    if (m > std::numeric_limits<std::int64_t>::max() ||
        m < std::numeric_limits<std::int64_t>::min())
        throw std::overflow_error("exact_mode: overflow");
    return static_cast<std::int64_t>(m);
}

}  // namespace limitnls
