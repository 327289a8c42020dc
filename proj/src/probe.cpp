#include "cstar/probe.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>

#include "cstar/errors.hpp"
#include "cstar/lift.hpp"
#include "cstar/sampling.hpp"

namespace cstar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string where(Complex z) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.17g, %.17g)", z.real(), z.imag());
    return buf;
}

double upper_log(const AnnularSector& s) {
    return std::isinf(s.r_hi) ? s.log_r_cap : std::log(s.r_hi);
}

} // namespace

void RegionSpec::validate() const {
    if (n_samples == 0) {
        throw InvalidRegion("region needs at least one sample");
    }
    if (const auto* s = std::get_if<AnnularSector>(&shape)) {
        if (!(s->r_lo > 0.0) || !(s->r_hi > s->r_lo) || !(s->theta_hi > s->theta_lo) ||
            !std::isfinite(s->theta_lo) || !std::isfinite(s->theta_hi)) {
            throw InvalidRegion("annular sector needs 0 < r_lo < r_hi and theta_lo < theta_hi");
        }
        if (std::isinf(s->r_hi) && !(s->log_r_cap > std::log(s->r_lo))) {
            throw InvalidRegion("radial cap e^L must exceed r_lo");
        }
    } else {
        const auto& h = std::get<HalfPlane>(shape);
        if (!std::isfinite(h.c) || !(h.depth > 0.0) || !std::isfinite(h.depth)) {
            throw InvalidRegion("half-plane needs finite c and positive depth");
        }
    }
}

std::vector<Complex> RegionSpec::samples() const {
    validate();
    const R2Sequence seq(seed);
    std::vector<Complex> out;
    out.reserve(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        const auto [u, v] = seq(k);
        if (const auto* s = std::get_if<AnnularSector>(&shape)) {
            const double lo = std::log(s->r_lo);
            const double rho = lo + u * (upper_log(*s) - lo);
            const double width = std::min(s->theta_hi - s->theta_lo, kTwoPi);
            out.push_back(std::polar(std::exp(rho), s->theta_lo + v * width));
        } else {
            const auto& h = std::get<HalfPlane>(shape);
            const double re = h.c + u * h.depth;
            out.push_back(std::polar(std::exp(re), -std::numbers::pi + v * kTwoPi));
        }
    }
    return out;
}

bool RegionSpec::contains(Complex z) const {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || z == Complex(0.0, 0.0)) {
        return false;
    }
    const double r = std::abs(z);
    if (const auto* s = std::get_if<AnnularSector>(&shape)) {
        if (r < s->r_lo || r > s->r_hi) {
            return false;
        }
        const double width = s->theta_hi - s->theta_lo;
        if (width >= kTwoPi) {
            return true;
        }
        double t = std::fmod(std::arg(z) - s->theta_lo, kTwoPi);
        if (t < 0.0) {
            t += kTwoPi;
        }
        return t <= width;
    }
    return std::log(r) >= std::get<HalfPlane>(shape).c;
}

ProbeReport invariance_probe(const MapDescriptor& m, const RegionSpec& region, DriftMode drift,
                             double delta) {
    const std::vector<Complex> pts = region.samples();
    std::optional<LiftDescriptor> lift;
    if (drift == DriftMode::LiftRe) {
        lift.emplace(m);
    }
    ProbeReport rep;
    rep.delta = delta;
    rep.n_samples = pts.size();
    rep.min_drift = std::numeric_limits<double>::infinity();
    for (const Complex z : pts) {
        Complex fz;
        double d = 0.0;
        try {
            fz = eval_map(m, z);
            if (lift) {
                const Complex w = std::log(z);
                d = lift->eval(w).real() - w.real();
            } else {
                d = std::log(std::abs(fz)) - std::log(std::abs(z));
            }
        } catch (const OverflowError& e) {
            throw OverflowError(std::string(e.what()) + " at sample " + where(z));
        }
        rep.min_drift = std::min(rep.min_drift, d);
        if (!region.contains(fz)) {
            rep.failures.push_back({z, fz});
        }
    }
    rep.membership_ok = rep.failures.empty();
    return rep;
}

nlohmann::json probe_to_json(const ProbeReport& r) {
    nlohmann::json fails = nlohmann::json::array();
    for (const auto& f : r.failures) {
        fails.push_back({{"z", {f.z.real(), f.z.imag()}},
                         {"image", {f.image.real(), f.image.imag()}}});
    }
    return {{"pass", r.pass()},
            {"min_drift", r.min_drift},
            {"delta", r.delta},
            {"n_samples", r.n_samples},
            {"n_fail", r.failures.size()},
            {"failures", fails}};
}

} // namespace cstar
