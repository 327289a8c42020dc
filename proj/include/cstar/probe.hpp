#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cstar/maps.hpp"

namespace cstar {

/// r_lo <= |z| <= r_hi and theta_lo <= arg z <= theta_hi (angles in
/// radians, taken modulo 2*pi). r_hi may be +infinity; it is then sampled
/// up to e^log_r_cap.
struct AnnularSector {
    double r_lo = 1.0;
    double r_hi = 2.0;
    double theta_lo = -3.141592653589793;
    double theta_hi = 3.141592653589793;
    double log_r_cap = 25.0;
};

/// Re w >= c in lift coordinates, sampled on [c, c + depth] x [-pi, pi].
struct HalfPlane {
    double c = 0.0;
    double depth = 10.0;
};

struct RegionSpec {
    std::variant<AnnularSector, HalfPlane> shape;
    std::size_t n_samples = 4096;
    std::uint64_t seed = 1;

    /// Throws InvalidRegion for an empty region or zero samples.
    void validate() const;
    /// Deterministic R2 samples, log-uniform in the radial direction.
    /// Points are returned in z-coordinates.
    [[nodiscard]] std::vector<Complex> samples() const;
    /// Membership of a point given in z-coordinates.
    [[nodiscard]] bool contains(Complex z) const;
};

enum class DriftMode : std::uint8_t { LogModulus, LiftRe };

struct ProbeFailure {
    Complex z;
    Complex image;
};

struct ProbeReport {
    bool membership_ok = true;
    double min_drift = 0.0;
    double delta = 0.0;
    std::vector<ProbeFailure> failures;
    std::size_t n_samples = 0;

    [[nodiscard]] bool pass() const noexcept { return membership_ok && min_drift >= delta; }
};

/// Samples the region, maps every sample once and checks that the image
/// stays in the region with drift at least delta. Drift is
/// log|f(z)| - log|z|, or Re lift(w) - Re w with w the principal log of z.
/// Throws OverflowError naming the sample, LiftUnavailable for LIFT_RE on
/// maps without a canonical form.
ProbeReport invariance_probe(const MapDescriptor& m, const RegionSpec& region, DriftMode drift,
                             double delta);

nlohmann::json probe_to_json(const ProbeReport& r);

} // namespace cstar
