#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cstar/maps.hpp"

namespace cstar {

struct ClaimResult {
    std::string id;
    bool pass = false;
    nlohmann::json detail;
};

/// E = iR together with the lines Im w = k*pi. Checks that the lift
/// cosh of ex4.5 is real on E, bounded away from real at distance 0.1 from
/// E, and that points of exp(E) with |Re w| >= 2 escape with an all-INF tail.
/// Throws Error for n_samples < 100.
ClaimResult check_backbone_E(std::size_t n_samples, std::uint64_t seed = 1);

struct Disc {
    Complex center;
    double radius = 0.0;
};

struct BlowingUpOptions {
    std::size_t n_disc = 10000;
    double hit_tol = 1e-3;
};

/// Pushes a Vogel-spiral sample of the disc forward and records, per
/// target, the least n <= n_max at which some sample lands within hit_tol.
/// Samples whose orbit leaves double range are dropped.
ClaimResult check_blowing_up(const MapDescriptor& m, const Disc& seed_disc,
                             const std::vector<Complex>& targets, int n_max,
                             const BlowingUpOptions& opts = {});

/// Buckets the escaping points of a log-uniform sample of e^-4 <= |z| <= e^4
/// by their itinerary prefix of length `horizon`. Prefixes cut short because
/// the orbit left the extended range keep their observed length and are
/// bucketed separately. Throws Error for horizon < 8.
ClaimResult check_itinerary_partition(const MapDescriptor& m, std::size_t n_samples,
                                      int horizon, std::uint64_t seed = 1);

/// Preset claims run by `verify`: backbone-E, blowing-up-ex4.4,
/// itinerary-partition-ex4.2, itinerary-partition-ex4.3.
std::vector<std::string> claim_names();
ClaimResult run_claim(const std::string& name);

/// {"testsuite": {"name", "tests", "failures", "testcases": [...]}}
nlohmann::json claims_to_junit(const std::vector<ClaimResult>& results);

} // namespace cstar
