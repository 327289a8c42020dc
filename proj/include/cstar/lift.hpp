#pragma once

#include <cstdint>
#include <string_view>

#include "cstar/maps.hpp"

namespace cstar {

/// Entire lift w -> n*w + G(e^w) of a map with canonical form z^n exp(G),
/// normalised so that exp(lift(w)) = f(exp(w)) with no extra 2*pi*i*k.
class LiftDescriptor {
public:
    /// Throws LiftUnavailable when the source map has no canonical form.
    explicit LiftDescriptor(MapDescriptor source);

    [[nodiscard]] const MapDescriptor& source() const noexcept { return source_; }
    [[nodiscard]] int index() const noexcept { return source_.canonical()->index; }

    /// Throws OverflowError naming the offending subterm of G.
    [[nodiscard]] Complex eval(Complex w) const;
    [[nodiscard]] Complex derivative(Complex w) const;
    [[nodiscard]] XComplex eval_ext(Complex w) const;

private:
    MapDescriptor source_;
};

Complex lift_eval(const LiftDescriptor& lift, Complex w);

/// Axis-aligned rectangle in the w-plane.
struct Strip {
    double re_lo;
    double re_hi;
    double im_lo;
    double im_hi;
};

/// Maximum over samples of |exp(lift(w)) - f(exp(w))| / max(1, |f(exp(w))|).
double verify_semiconjugacy(const LiftDescriptor& lift, std::size_t n_samples, const Strip& strip,
                            std::uint64_t seed = 1);

/// Region of the w-plane where both sides of the semiconjugacy stay well
/// inside double range for the named registry map.
Strip safe_strip(std::string_view registry_name);

} // namespace cstar
