#pragma once

#include <complex>

namespace cstar {

using Complex = std::complex<double>;

/// First-order dual number over C: value plus exact derivative with respect
/// to the expression variable.
struct Dual {
    Complex v;
    Complex d;

    static Dual variable(Complex z) { return {z, Complex(1.0, 0.0)}; }
    static Dual constant(Complex c) { return {c, Complex(0.0, 0.0)}; }
};

inline Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
inline Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(const Dual& a, const Dual& b) {
    const Complex q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
}

inline Dual exp(const Dual& a) {
    const Complex e = std::exp(a.v);
    return {e, e * a.d};
}
inline Dual log(const Dual& a) { return {std::log(a.v), a.d / a.v}; }
inline Dual sinh(const Dual& a) { return {std::sinh(a.v), std::cosh(a.v) * a.d}; }
inline Dual cosh(const Dual& a) { return {std::cosh(a.v), std::sinh(a.v) * a.d}; }
inline Dual sin(const Dual& a) { return {std::sin(a.v), std::cos(a.v) * a.d}; }
inline Dual cos(const Dual& a) { return {std::cos(a.v), -std::sin(a.v) * a.d}; }

inline Dual ipow(const Dual& a, int n) {
    if (n == 0) {
        return Dual::constant(Complex(1.0, 0.0));
    }
    if (n < 0) {
        return Dual::constant(Complex(1.0, 0.0)) / ipow(a, -n);
    }
    Complex p(1.0, 0.0);
    for (int i = 0; i < n - 1; ++i) {
        p *= a.v;
    }
    return {p * a.v, static_cast<double>(n) * p * a.d};
}

} // namespace cstar
