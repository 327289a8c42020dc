#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "cstar/errors.hpp"

namespace cstar {

using Complex = std::complex<double>;

namespace detail {

// Plain component-wise products. Unlike the library operators these never
// take the C99 Annex G slow path, and they are exactly symmetric under
// negation and conjugation of their operands.
inline Complex cmul(Complex a, Complex b) noexcept {
    return {a.real() * b.real() - a.imag() * b.imag(),
            a.real() * b.imag() + a.imag() * b.real()};
}

inline Complex cdiv(Complex a, Complex b) noexcept {
    const double d = b.real() * b.real() + b.imag() * b.imag();
    return {(a.real() * b.real() + a.imag() * b.imag()) / d,
            (a.imag() * b.real() - a.real() * b.imag()) / d};
}

inline bool finite(Complex a) noexcept {
    return std::isfinite(a.real()) && std::isfinite(a.imag());
}

} // namespace detail

/// Complex number with an extended binary exponent, value = m * 2^k.
///
/// The mantissa is kept normalised so that max(|Re m|, |Im m|) lies in
/// [0.5, 1); the exponent is a double holding an integral value, which
/// leaves room for magnitudes up to roughly exp(1e308). Orbits of
/// transcendental maps routinely leave the range of double within a few
/// steps; this type lets them be followed one exponential level further.
class XComplex {
public:
    XComplex() = default;
    XComplex(Complex v) : m_(v) { normalize(); } // NOLINT(implicit)
    XComplex(double v) : m_(v, 0.0) { normalize(); } // NOLINT(implicit)

    static XComplex from_parts(Complex mantissa, double exponent) {
        XComplex r;
        r.m_ = mantissa;
        r.k_ = exponent;
        r.normalize();
        return r;
    }

    [[nodiscard]] Complex mantissa() const noexcept { return m_; }
    [[nodiscard]] double exponent() const noexcept { return k_; }
    [[nodiscard]] bool is_zero() const noexcept {
        return m_.real() == 0.0 && m_.imag() == 0.0;
    }

    /// True when the value converts to a normal double without loss of range.
    [[nodiscard]] bool fits_double() const noexcept {
        return is_zero() || (k_ > -1000.0 && k_ < 1000.0);
    }

    /// Conversion to double precision; saturates to inf / 0 out of range.
    [[nodiscard]] Complex to_complex() const noexcept {
        if (is_zero()) {
            return {0.0, 0.0};
        }
        if (k_ > 1100.0) {
            return {std::copysign(HUGE_VAL, m_.real()),
                    std::copysign(HUGE_VAL, m_.imag())};
        }
        if (k_ < -1200.0) {
            return {0.0, 0.0};
        }
        const int e = static_cast<int>(k_);
        return {std::ldexp(m_.real(), e), std::ldexp(m_.imag(), e)};
    }

    /// log|value|; -inf for zero.
    [[nodiscard]] double log_abs() const noexcept {
        if (is_zero()) {
            return -HUGE_VAL;
        }
        if (k_ > -1000.0 && k_ < 1000.0) {
            return std::log(std::abs(to_complex()));
        }
        return std::log(std::abs(m_)) + k_ * std::numbers::ln2;
    }

    XComplex operator-() const noexcept {
        XComplex r = *this;
        r.m_ = -r.m_;
        return r;
    }

    friend XComplex operator*(const XComplex& a, const XComplex& b) {
        return from_parts(detail::cmul(a.m_, b.m_), a.k_ + b.k_);
    }

    friend XComplex operator/(const XComplex& a, const XComplex& b) {
        if (b.is_zero()) {
            throw DomainError("extended division by zero");
        }
        return from_parts(detail::cdiv(a.m_, b.m_), a.k_ - b.k_);
    }

    friend XComplex operator+(const XComplex& a, const XComplex& b) {
        if (a.is_zero()) {
            return b;
        }
        if (b.is_zero()) {
            return a;
        }
        const double d = a.k_ - b.k_;
        if (d > 64.0) {
            return a;
        }
        if (d < -64.0) {
            return b;
        }
        if (d >= 0.0) {
            const int s = -static_cast<int>(d);
            return from_parts(
                {a.m_.real() + std::ldexp(b.m_.real(), s), a.m_.imag() + std::ldexp(b.m_.imag(), s)},
                a.k_);
        }
        const int s = static_cast<int>(d);
        return from_parts(
            {std::ldexp(a.m_.real(), s) + b.m_.real(), std::ldexp(a.m_.imag(), s) + b.m_.imag()},
            b.k_);
    }

    friend XComplex operator-(const XComplex& a, const XComplex& b) { return a + (-b); }

private:
    void normalize() {
        const double a = std::max(std::abs(m_.real()), std::abs(m_.imag()));
        if (a == 0.0) {
            m_ = {0.0, 0.0};
            k_ = 0.0;
            return;
        }
        if (!std::isfinite(a) || !std::isfinite(k_)) {
            throw OverflowError("extended value is not finite");
        }
        int e = 0;
        std::frexp(a, &e);
        m_ = {std::ldexp(m_.real(), -e), std::ldexp(m_.imag(), -e)};
        k_ += e;
    }

    Complex m_{0.0, 0.0};
    double k_ = 0.0;
};

inline XComplex xexp(const XComplex& x) {
    if (x.is_zero() || x.exponent() <= -1000.0) {
        return XComplex(1.0);
    }
    if (!x.fits_double()) {
        const double s = x.mantissa().real();
        if (s < 0.0) {
            return {};
        }
        throw BeyondRangeError("exp argument beyond extended range", s > 0.0 ? 1 : 0);
    }
    const Complex v = x.to_complex();
    const double re = v.real();
    const double im = v.imag();
    const Complex phase{std::cos(im), std::sin(im)};
    if (std::abs(re) < 700.0) {
        return XComplex(std::exp(re) * phase);
    }
    const double t = re / std::numbers::ln2;
    const double whole = std::floor(t);
    return XComplex::from_parts(std::exp2(t - whole) * phase, whole);
}

inline XComplex xlog(const XComplex& x) {
    if (x.is_zero()) {
        throw DomainError("log of zero");
    }
    if (x.exponent() > -1000.0 && x.exponent() < 1000.0) {
        return XComplex(std::log(x.to_complex()));
    }
    return XComplex(Complex(std::log(std::abs(x.mantissa())) + x.exponent() * std::numbers::ln2,
                            std::arg(x.mantissa())));
}

inline XComplex xipow(const XComplex& x, int n) {
    if (n < 0) {
        return XComplex(1.0) / xipow(x, -n);
    }
    XComplex result(1.0);
    XComplex base = x;
    while (n > 0) {
        if ((n & 1) != 0) {
            result = result * base;
        }
        n >>= 1;
        if (n > 0) {
            base = base * base;
        }
    }
    return result;
}

namespace detail {
inline bool moderate(const XComplex& x) {
    if (!x.fits_double()) {
        return false;
    }
    const Complex v = x.to_complex();
    return std::abs(v.real()) < 700.0 && std::abs(v.imag()) < 700.0;
}
} // namespace detail

inline XComplex xcosh(const XComplex& x) {
    if (detail::moderate(x)) {
        return XComplex(std::cosh(x.to_complex()));
    }
    return (xexp(x) + xexp(-x)) * XComplex(0.5);
}

inline XComplex xsinh(const XComplex& x) {
    if (detail::moderate(x)) {
        return XComplex(std::sinh(x.to_complex()));
    }
    return (xexp(x) - xexp(-x)) * XComplex(0.5);
}

inline XComplex xcos(const XComplex& x) {
    if (detail::moderate(x)) {
        return XComplex(std::cos(x.to_complex()));
    }
    const XComplex ix = x * XComplex(Complex(0.0, 1.0));
    return (xexp(ix) + xexp(-ix)) * XComplex(0.5);
}

inline XComplex xsin(const XComplex& x) {
    if (detail::moderate(x)) {
        return XComplex(std::sin(x.to_complex()));
    }
    const XComplex ix = x * XComplex(Complex(0.0, 1.0));
    return (xexp(ix) - xexp(-ix)) * XComplex(Complex(0.0, -0.5));
}

} // namespace cstar
