#include "cstar/lift.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "cstar/errors.hpp"
#include "cstar/sampling.hpp"

namespace cstar {

LiftDescriptor::LiftDescriptor(MapDescriptor source) : source_(std::move(source)) {
    if (!source_.canonical()) {
        throw LiftUnavailable("map '" + source_.name() + "' has no canonical form to lift");
    }
}

Complex LiftDescriptor::eval(Complex w) const {
    const Complex z = std::exp(w);
    if (!detail::finite(z) || z == Complex(0.0, 0.0)) {
        throw OverflowError("exp(w) out of range in subterm z");
    }
    return static_cast<double>(index()) * w + source_.exponent_program().eval(z);
}

Complex LiftDescriptor::derivative(Complex w) const {
    const Complex z = std::exp(w);
    if (!detail::finite(z) || z == Complex(0.0, 0.0)) {
        throw OverflowError("exp(w) out of range in subterm z");
    }
    return static_cast<double>(index()) + source_.exponent_program().eval_dual(z).d * z;
}

XComplex LiftDescriptor::eval_ext(Complex w) const {
    const XComplex z = xexp(XComplex(w));
    return XComplex(static_cast<double>(index()) * w) + source_.exponent_program().eval_ext(z);
}

Complex lift_eval(const LiftDescriptor& lift, Complex w) { return lift.eval(w); }

double verify_semiconjugacy(const LiftDescriptor& lift, std::size_t n_samples, const Strip& strip,
                            std::uint64_t seed) {
    const R2Sequence seq(seed);
    double worst = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const auto [u, v] = seq(k);
        const Complex w(strip.re_lo + u * (strip.re_hi - strip.re_lo),
                        strip.im_lo + v * (strip.im_hi - strip.im_lo));
        Complex lhs;
        Complex rhs;
        try {
            lhs = std::exp(lift.eval(w));
            rhs = eval_map(lift.source(), std::exp(w));
        } catch (const OverflowError& e) {
            std::ostringstream os;
            os.precision(17);
            os << e.what() << " (sample w = " << w << ")";
            throw OverflowError(os.str());
        }
        if (!detail::finite(lhs)) {
            std::ostringstream os;
            os.precision(17);
            os << "exp(lift) overflows at sample w = " << w;
            throw OverflowError(os.str());
        }
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    return worst;
}

Strip safe_strip(std::string_view name) {
    constexpr double pi = std::numbers::pi;
    if (name == "ex4.1") {
        return {0.5, 2.0, -pi, pi};
    }
    if (name == "ex4.2" || name == "ex4.2-axis") {
        // exp(-1/z^4) grows like exp(e^{-4 Re w}) on the inner side.
        return {-0.2, 1.0, -pi, pi};
    }
    if (name == "ex4.3") {
        return {-3.0, 3.0, -pi, pi};
    }
    if (name == "ex4.5") {
        return {-2.0, 2.0, -pi, pi};
    }
    return {-1.0, 1.0, -pi, pi};
}

} // namespace cstar
