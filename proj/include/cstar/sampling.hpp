#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace cstar {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Additive-recurrence (R2) sequence on the unit square with a seeded
/// starting offset. Pure IEEE arithmetic, so samples are reproducible
/// bit-for-bit across platforms and standard libraries.
class R2Sequence {
public:
    explicit R2Sequence(std::uint64_t seed) noexcept
        : offset_{to_unit(splitmix64(seed)), to_unit(splitmix64(seed ^ 0xa5a5a5a5a5a5a5a5ULL))} {}

    [[nodiscard]] std::array<double, 2> operator()(std::size_t k) const noexcept {
        constexpr double g = 1.32471795724474602596;
        constexpr double a1 = 1.0 / g;
        constexpr double a2 = 1.0 / (g * g);
        const double kk = static_cast<double>(k);
        return {frac(offset_[0] + kk * a1), frac(offset_[1] + kk * a2)};
    }

private:
    static double to_unit(std::uint64_t x) noexcept {
        return static_cast<double>(x >> 11) * 0x1.0p-53;
    }
    static double frac(double x) noexcept { return x - std::floor(x); }

    std::array<double, 2> offset_;
};

/// n points spread uniformly by area over r_lo <= |z| <= r_hi.
inline std::vector<std::complex<double>> sample_annulus(double r_lo, double r_hi, std::size_t n,
                                                        std::uint64_t seed) {
    const R2Sequence seq(seed);
    std::vector<std::complex<double>> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto [u, v] = seq(k);
        const double r = std::sqrt(r_lo * r_lo + u * (r_hi * r_hi - r_lo * r_lo));
        out.push_back(std::polar(r, 2.0 * std::numbers::pi * v));
    }
    return out;
}

} // namespace cstar
