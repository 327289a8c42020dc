#include <doctest.h>

#include <sstream>

#include "cstar/errors.hpp"
#include "cstar/raster.hpp"

using namespace cstar;

namespace {

PixelCode direct_code(const MapDescriptor& m, Complex z) {
    const OrbitResult r = classify_point(m, z);
    if (const auto* e = std::get_if<Escaping>(&r.classification)) {
        switch (e->tail) {
        case Tail::AllInf: return PixelCode::EscInfTail;
        case Tail::AllZero: return PixelCode::EscZeroTail;
        case Tail::Mixed: return PixelCode::EscMixed;
        }
    }
    return std::holds_alternative<Attracted>(r.classification) ? PixelCode::Attracted
                                                               : PixelCode::Ambiguous;
}

} // namespace

TEST_CASE("grid geometry") {
    const GridSpec g = GridSpec::log_polar(std::exp(-4.0), std::exp(4.0), 8, 8);
    CHECK(std::abs(g.center(0, 0) - Complex(std::exp(-4.0), 0.0)) <= 1e-15);
    CHECK(std::abs(std::abs(g.center(3, 4)) - 1.0) <= 1e-15);
    const GridSpec c = GridSpec::cartesian(-2.0, 2.0, -2.0, 2.0, 4, 4);
    CHECK(c.center(0, 0) == Complex(-1.5, 1.5));
    CHECK(c.center(3, 3) == Complex(1.5, -1.5));
    CHECK_THROWS_AS(GridSpec::log_polar(2.0, 1.0, 8, 8).validate(), Error);
    CHECK_THROWS_AS(GridSpec::cartesian(-1.0, 1.0, -1.0, 1.0, 0, 4).validate(), Error);
}

TEST_CASE("pixels match direct classification") {
    const MapDescriptor m = registry_map("ex4.3");
    const GridSpec g = GridSpec::log_polar(std::exp(-3.0), std::exp(3.0), 24, 24);
    const RasterResult r = classify_grid(m, g, {}, {2});
    REQUIRE(r.codes.size() == g.size());
    for (int j = 0; j < g.height; j += 5) {
        for (int i = 0; i < g.width; i += 5) {
            CHECK(r.code(i, j) == direct_code(m, g.center(i, j)));
            CHECK((r.basin_ids[r.index(i, j)] >= 0) == (r.code(i, j) == PixelCode::Attracted));
        }
    }
}

TEST_CASE("output does not depend on the worker count") {
    const MapDescriptor m = registry_map("ex4.2");
    const GridSpec g = GridSpec::log_polar(std::exp(-2.0), std::exp(2.0), 48, 32);
    const RasterResult a = classify_grid(m, g, {}, {1});
    for (const int w : {3, 8}) {
        const RasterResult b = classify_grid(m, g, {}, {w});
        CHECK(a.codes == b.codes);
        CHECK(a.basin_ids == b.basin_ids);
        CHECK(a.itinerary_bits == b.itinerary_bits);
        CHECK(a.steps_used == b.steps_used);
        CHECK(render_ppm(a, "paper") == render_ppm(b, "paper"));
    }
}

TEST_CASE("ex4.2 Cartesian raster is symmetric under both reflections") {
    const GridSpec g = GridSpec::cartesian(-2.0, 2.0, -2.0, 2.0, 40, 40);
    const RasterResult r = classify_grid(registry_map("ex4.2"), g, {}, {});
    int mismatches = 0;
    for (int j = 0; j < g.height; ++j) {
        for (int i = 0; i < g.width; ++i) {
            mismatches += r.code(i, j) != r.code(g.width - 1 - i, j);
            mismatches += r.code(i, j) != r.code(i, g.height - 1 - j);
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("the unit circle does not escape under ex4.4") {
    const GridSpec g = GridSpec::log_polar(std::exp(-2.0), std::exp(2.0), 256, 16);
    const RasterResult r = classify_grid(registry_map("ex4.4"), g, {}, {});
    int attracted = 0;
    for (int i = 0; i < g.width; ++i) {
        CHECK_FALSE(is_escaping(r.code(i, 8)));
        attracted += r.code(i, 8) == PixelCode::Attracted;
    }
    CHECK(attracted > 200);
    REQUIRE_FALSE(r.basins.empty());
    CHECK(r.basins[0].cycle.size() == 2);
}

TEST_CASE("PPM output") {
    const GridSpec g = GridSpec::log_polar(std::exp(-1.0), std::exp(1.0), 6, 4);
    const RasterResult r = classify_grid(registry_map("ex4.3"), g, {}, {});
    const std::string ppm = render_ppm(r, "paper");
    const std::string head = "P6\n6 4\n255\n";
    REQUIRE(ppm.size() == head.size() + 3 * 24);
    CHECK(ppm.compare(0, head.size(), head) == 0);
    for (std::size_t k = 0; k < r.codes.size(); ++k) {
        const auto px = [&](int c) { return static_cast<unsigned char>(ppm[head.size() + 3 * k + c]); };
        if (is_escaping(r.codes[k])) {
            CHECK(px(0) == 128);
            CHECK(px(1) == 128);
            CHECK(px(2) == 128);
        } else if (r.codes[k] == PixelCode::Attracted) {
            CHECK(px(0) == 240);
        }
    }
    CHECK(render_ppm(r, "itinerary").size() == ppm.size());
    CHECK_THROWS_AS(render_ppm(r, "rainbow"), UnknownPalette);
}

TEST_CASE("CSV output") {
    const GridSpec g = GridSpec::log_polar(std::exp(-1.0), std::exp(1.0), 3, 2);
    const RasterResult r = classify_grid(registry_map("ex4.2"), g, {}, {});
    std::ostringstream out;
    write_csv(r, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "pixel_i,pixel_j,re,im,code,basin_id,itinerary_prefix,steps_used");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 7);
    }
    CHECK(rows == 6);
    // Row 0, column 0 sits on the positive real axis at r_min.
    CHECK(out.str().find("\n0,0,0.36787944117144233,0,ESC_INF_TAIL,-1,") != std::string::npos);
}

TEST_CASE("metadata describes the run") {
    const GridSpec g = GridSpec::log_polar(std::exp(-1.0), std::exp(1.0), 4, 4);
    const RasterResult r = classify_grid(registry_map("ex4.3"), g, {}, {});
    const nlohmann::json j = raster_metadata(r);
    CHECK(j["grid"]["width"] == 4);
    CHECK(j["grid"]["coordinates"] == "LOG_POLAR");
    CHECK(j["map"]["name"] == "ex4.3");
    CHECK(j["options"]["max_iter"] == 500);
    std::size_t total = 0;
    for (const auto& [k, v] : j["counts"].items()) {
        total += v.get<std::size_t>();
    }
    CHECK(total == 16);
}
