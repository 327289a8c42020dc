#pragma once

// Closed-form reference formulas written independently of the library's
// expression evaluator. Shared by the unit tests and the acceptance run.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>

namespace oracle {

using C = std::complex<double>;

struct Canonical {
    int n = 0;
    std::function<C(C)> G;
};

// z^n exp(G(z)) for the registry maps at their default parameters.
inline Canonical canonical(const std::string& name) {
    if (name == "ex4.1") {
        return {1, [](C z) { return std::log(10.0) + std::exp(-z) / z; }};
    }
    if (name == "ex4.2") {
        return {1, [](C z) { return std::log(2.0) + z * z + std::exp(-1.0 / (z * z * z * z)); }};
    }
    if (name == "ex4.2-axis") {
        return {1, [](C z) { return std::log(2.0) - z * z + std::exp(-1.0 / (z * z * z * z)); }};
    }
    if (name == "ex4.3") {
        return {0, [](C z) { return 0.3 * (z + 1.0 / z); }};
    }
    if (name == "ex4.4") {
        return {1, [](C z) { return C(0.0, 3.1) + 0.8 * (z - 1.0 / z) / 2.0; }};
    }
    if (name == "ex4.5") {
        return {0, [](C z) { return 0.5 * (z + 1.0 / z); }};
    }
    return {};
}

inline C map(const std::string& name, C z) {
    const Canonical c = canonical(name);
    return std::pow(z, c.n) * std::exp(c.G(z));
}

// Lift w -> n w + G(e^w).
inline C lift(const std::string& name, C w) {
    const Canonical c = canonical(name);
    return static_cast<double>(c.n) * w + c.G(std::exp(w));
}

// Bisection for a sign change of g on [lo, hi].
inline double bisect(const std::function<double(double)>& g, double lo, double hi) {
    double glo = g(lo);
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) {
            break;
        }
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace oracle
