#include <doctest.h>

#include "cstar/errors.hpp"
#include "cstar/orbit.hpp"
#include "cstar/probe.hpp"
#include "oracles.hpp"

using namespace cstar;

namespace {

RegionSpec ex41_sector() {
    RegionSpec r;
    r.shape = AnnularSector{10.0, HUGE_VAL, -std::numbers::pi / 4, std::numbers::pi / 4, 25.0};
    r.n_samples = 2000;
    return r;
}

} // namespace

TEST_CASE("ex4.1 sector is invariant with drift log 10") {
    const MapDescriptor m = registry_map("ex4.1");
    const RegionSpec region = ex41_sector();
    const ProbeReport rep = invariance_probe(m, region, DriftMode::LogModulus, 1.0);
    CHECK(rep.pass());
    CHECK(rep.n_samples == 2000);
    // Independent drift from the closed form on the same samples.
    double want = HUGE_VAL;
    for (const Complex z : region.samples()) {
        const Complex fz = oracle::map("ex4.1", z);
        want = std::min(want, std::log(std::abs(fz)) - std::log(std::abs(z)));
        CHECK(std::abs(z) >= 10.0);
        CHECK(std::abs(std::arg(z)) <= std::numbers::pi / 4 + 1e-15);
    }
    CHECK(rep.min_drift == doctest::Approx(want).epsilon(1e-12));
    CHECK(rep.min_drift > std::log(10.0) - 1e-3);
    const ProbeReport lift = invariance_probe(m, region, DriftMode::LiftRe, 1.0);
    CHECK(lift.pass());
    CHECK(lift.min_drift == doctest::Approx(rep.min_drift).epsilon(1e-9));
}

TEST_CASE("a thin annulus around the ex4.3 fixed point is not invariant") {
    RegionSpec region;
    region.shape = AnnularSector{0.9, 1.1, -std::numbers::pi, std::numbers::pi, 25.0};
    region.n_samples = 500;
    const ProbeReport rep = invariance_probe(registry_map("ex4.3"), region, DriftMode::LogModulus, 0.0);
    CHECK_FALSE(rep.membership_ok);
    CHECK_FALSE(rep.pass());
    CHECK_FALSE(rep.failures.empty());
    for (const ProbeFailure& f : rep.failures) {
        CHECK_FALSE(region.contains(f.image));
    }
    const nlohmann::json j = probe_to_json(rep);
    CHECK(j["pass"] == false);
    CHECK(j["n_fail"].get<std::size_t>() > 0);
}

TEST_CASE("map 2z drifts by exactly log 2 in the half-plane") {
    const MapDescriptor m =
        MapDescriptor::from_text("double", "(* 2 z)", std::make_pair(1, std::string("(log 2)")), {});
    RegionSpec region;
    region.shape = HalfPlane{0.5, 10.0};
    region.n_samples = 300;
    const ProbeReport rep = invariance_probe(m, region, DriftMode::LiftRe, 0.69);
    CHECK(rep.pass());
    CHECK(rep.min_drift == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK_FALSE(invariance_probe(m, region, DriftMode::LiftRe, 0.7).pass());
}

TEST_CASE("samples of an invariant sector escape with an all-INF tail") {
    const MapDescriptor m = registry_map("ex4.1");
    RegionSpec region = ex41_sector();
    region.n_samples = 200;
    CHECK(invariance_probe(m, region, DriftMode::LiftRe, 1.0).pass());
    for (const Complex z : region.samples()) {
        CHECK(region.contains(z));
        const OrbitResult r = classify_point(m, z);
        const auto* e = std::get_if<Escaping>(&r.classification);
        REQUIRE(e != nullptr);
        CHECK(e->tail == Tail::AllInf);
    }
}

TEST_CASE("sampling is deterministic") {
    RegionSpec a = ex41_sector();
    RegionSpec b = ex41_sector();
    CHECK(a.samples() == b.samples());
    b.seed = 2;
    CHECK(a.samples() != b.samples());
    a.n_samples = 10;
    CHECK(a.samples().size() == 10);
}

TEST_CASE("invalid regions and unavailable lifts") {
    RegionSpec r;
    r.shape = AnnularSector{2.0, 1.0};
    CHECK_THROWS_AS(r.validate(), InvalidRegion);
    r.shape = AnnularSector{1.0, 2.0, 1.0, 0.5};
    CHECK_THROWS_AS(r.validate(), InvalidRegion);
    r.shape = HalfPlane{0.0, 0.0};
    CHECK_THROWS_AS(r.validate(), InvalidRegion);
    r.shape = HalfPlane{};
    r.n_samples = 0;
    CHECK_THROWS_AS(r.validate(), InvalidRegion);
    r.n_samples = 10;
    const MapDescriptor opaque = MapDescriptor::from_text("opaque", "(+ z (exp z))", std::nullopt, {});
    CHECK_THROWS_AS(invariance_probe(opaque, r, DriftMode::LiftRe, 0.0), LiftUnavailable);
}

TEST_CASE("overflow names the sample") {
    const MapDescriptor m = MapDescriptor::from_text("tower", "(exp (exp z))", std::nullopt, {});
    RegionSpec r;
    r.shape = AnnularSector{800.0, 900.0, -0.1, 0.1};
    r.n_samples = 16;
    try {
        (void)invariance_probe(m, r, DriftMode::LogModulus, 0.0);
        FAIL("expected overflow");
    } catch (const OverflowError& e) {
        CHECK(std::string(e.what()).find("at sample") != std::string::npos);
    }
}

TEST_CASE("the ex4.1 lift half-plane reaches the left half of the plane") {
    // Re w >= 3 contains points with Re z << 0, where e^{-z}/z explodes.
    RegionSpec region;
    region.shape = HalfPlane{3.0, 10.0};
    region.n_samples = 200;
    CHECK_THROWS_AS(invariance_probe(registry_map("ex4.1"), region, DriftMode::LiftRe, 1.0),
                    OverflowError);
}
