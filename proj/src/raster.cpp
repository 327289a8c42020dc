#include "cstar/raster.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <thread>

#include "cstar/errors.hpp"

namespace cstar {

GridSpec GridSpec::log_polar(double r_min, double r_max, int width, int height) {
    GridSpec g;
    g.coords = Coordinates::LogPolar;
    g.r_min = r_min;
    g.r_max = r_max;
    g.width = width;
    g.height = height;
    g.validate();
    return g;
}

GridSpec GridSpec::cartesian(double x_min, double x_max, double y_min, double y_max, int width,
                             int height) {
    GridSpec g;
    g.coords = Coordinates::Cartesian;
    g.x_min = x_min;
    g.x_max = x_max;
    g.y_min = y_min;
    g.y_max = y_max;
    g.width = width;
    g.height = height;
    g.validate();
    return g;
}

void GridSpec::validate() const {
    if (width < 1 || height < 1) {
        throw Error("grid width and height must be at least 1");
    }
    if (coords == Coordinates::LogPolar) {
        if (!(r_min > 0.0) || !(r_max > r_min) || !std::isfinite(r_max)) {
            throw Error("log-polar grid needs 0 < r_min < r_max");
        }
    } else if (!(x_max > x_min) || !(y_max > y_min)) {
        throw Error("cartesian grid needs x_min < x_max and y_min < y_max");
    }
}

Complex GridSpec::center(int i, int j) const noexcept {
    if (coords == Coordinates::LogPolar) {
        const double lo = std::log(r_min);
        const double hi = std::log(r_max);
        // Both coordinates are sampled at the left end of each cell: row 0
        // lies on |z| = r_min, and for even sizes the unit circle and the
        // coordinate axes fall exactly on pixel rows and columns.
        const double rho = lo + static_cast<double>(j) / height * (hi - lo);
        const double theta = 2.0 * std::numbers::pi * i / width;
        return std::polar(std::exp(rho), theta);
    }
    // Written so that mirrored pixels of a symmetric window get exactly
    // negated coordinates.
    const double x = static_cast<double>(2 * i + 1 - width) / (2.0 * width) * (x_max - x_min) +
                     0.5 * (x_max + x_min);
    const double y = static_cast<double>(height - 1 - 2 * j) / (2.0 * height) * (y_max - y_min) +
                     0.5 * (y_max + y_min);
    return {x, y};
}

const char* code_name(PixelCode c) noexcept {
    switch (c) {
    case PixelCode::EscInfTail: return "ESC_INF_TAIL";
    case PixelCode::EscZeroTail: return "ESC_ZERO_TAIL";
    case PixelCode::EscMixed: return "ESC_MIXED";
    case PixelCode::Attracted: return "ATTRACTED";
    case PixelCode::Ambiguous: return "AMBIGUOUS";
    }
    return "?";
}

int resolve_workers(int requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("CSTAR_DYN_WORKERS")) {
        int n = 0;
        const std::string_view s(env);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
        if (ec == std::errc() && ptr == s.data() + s.size() && n > 0) {
            return n;
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

namespace {

struct Candidate {
    Complex point;
    int period = 0;
};

} // namespace

RasterResult classify_grid(const MapDescriptor& m, const GridSpec& grid, const OrbitOptions& opts,
                           const RasterOptions& ropts) {
    grid.validate();
    opts.validate();
    OrbitOptions run_opts = opts;
    run_opts.store_iterates = false;

    RasterResult r;
    r.grid = grid;
    r.options = run_opts;
    r.map_name = m.name();
    r.map_hash = descriptor_hash(m);
    const std::size_t n = grid.size();
    r.codes.assign(n, PixelCode::Ambiguous);
    r.basin_ids.assign(n, -1);
    r.itinerary_bits.assign(n, 0);
    r.itinerary_len.assign(n, 0);
    r.steps_used.assign(n, 0);
    std::vector<Candidate> cand(n);

    auto do_row = [&](int j) {
        for (int i = 0; i < grid.width; ++i) {
            const std::size_t k = r.index(i, j);
            const Complex z = grid.center(i, j);
            if (z == Complex(0.0, 0.0)) {
                continue;
            }
            OrbitResult res;
            try {
                res = classify_point(m, z, run_opts);
            } catch (const Error&) {
                continue;
            }
            std::uint64_t bits = 0;
            const std::size_t len = std::min<std::size_t>(64, res.itinerary.symbols.size());
            for (std::size_t b = 0; b < len; ++b) {
                if (res.itinerary.symbols[b] == Symbol::Inf) {
                    bits |= std::uint64_t{1} << b;
                }
            }
            r.itinerary_bits[k] = bits;
            r.itinerary_len[k] = static_cast<std::uint8_t>(len);
            r.steps_used[k] = res.steps_used;
            if (const auto* e = std::get_if<Escaping>(&res.classification)) {
                r.codes[k] = e->tail == Tail::AllInf    ? PixelCode::EscInfTail
                             : e->tail == Tail::AllZero ? PixelCode::EscZeroTail
                                                        : PixelCode::EscMixed;
            } else if (const auto* a = std::get_if<Attracted>(&res.classification)) {
                r.codes[k] = PixelCode::Attracted;
                cand[k] = {a->cycle.front(), static_cast<int>(a->cycle.size())};
            }
        }
    };

    const int workers = std::min(resolve_workers(ropts.workers), grid.height);
    if (workers <= 1) {
        for (int j = 0; j < grid.height; ++j) {
            do_row(j);
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int j = next.fetch_add(1); j < grid.height; j = next.fetch_add(1)) {
                    do_row(j);
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    // Sequential basin registry in row-major discovery order.
    for (std::size_t k = 0; k < n; ++k) {
        if (r.codes[k] != PixelCode::Attracted) {
            continue;
        }
        const Candidate& c = cand[k];
        int id = -1;
        for (std::size_t b = 0; b < r.basins.size() && id < 0; ++b) {
            for (const Complex q : r.basins[b].cycle) {
                if (std::abs(q - c.point) <= 1e-6) {
                    id = static_cast<int>(b);
                    break;
                }
            }
        }
        if (id < 0) {
            Basin basin;
            try {
                Cycle cyc = find_attractor(m, c.point, c.period);
                basin = {std::move(cyc.points), cyc.multiplier};
            } catch (const Error&) {
                basin = {{c.point}, Complex(0.0, 0.0)};
            }
            r.basins.push_back(std::move(basin));
            id = static_cast<int>(r.basins.size()) - 1;
        }
        r.basin_ids[k] = id;
    }
    return r;
}

namespace {

using Rgb = std::array<unsigned char, 3>;

Rgb colour(PixelCode c, bool itinerary) {
    switch (c) {
    case PixelCode::EscInfTail: return itinerary ? Rgb{200, 60, 50} : Rgb{128, 128, 128};
    case PixelCode::EscZeroTail: return itinerary ? Rgb{50, 90, 210} : Rgb{128, 128, 128};
    case PixelCode::EscMixed: return itinerary ? Rgb{150, 60, 170} : Rgb{128, 128, 128};
    case PixelCode::Attracted: return {240, 220, 60};
    case PixelCode::Ambiguous: return {0, 0, 0};
    }
    return {0, 0, 0};
}

} // namespace

std::string render_ppm(const RasterResult& r, std::string_view palette) {
    bool itinerary = false;
    if (palette == "itinerary") {
        itinerary = true;
    } else if (palette != "paper") {
        throw UnknownPalette("unknown palette '" + std::string(palette) + "'");
    }
    std::string out = "P6\n" + std::to_string(r.grid.width) + " " + std::to_string(r.grid.height) +
                      "\n255\n";
    const std::size_t header = out.size();
    out.resize(header + 3 * r.codes.size());
    for (std::size_t k = 0; k < r.codes.size(); ++k) {
        const Rgb c = colour(r.codes[k], itinerary);
        out[header + 3 * k] = static_cast<char>(c[0]);
        out[header + 3 * k + 1] = static_cast<char>(c[1]);
        out[header + 3 * k + 2] = static_cast<char>(c[2]);
    }
    return out;
}

void write_csv(const RasterResult& r, std::ostream& out) {
    out << "pixel_i,pixel_j,re,im,code,basin_id,itinerary_prefix,steps_used\n";
    char buf[64];
    for (int j = 0; j < r.grid.height; ++j) {
        for (int i = 0; i < r.grid.width; ++i) {
            const std::size_t k = r.index(i, j);
            const Complex z = r.grid.center(i, j);
            out << i << ',' << j << ',';
            std::snprintf(buf, sizeof buf, "%.17g", z.real());
            out << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g", z.imag());
            out << buf << ',' << code_name(r.codes[k]) << ',' << r.basin_ids[k] << ',';
            for (int b = 0; b < r.itinerary_len[k]; ++b) {
                out << (((r.itinerary_bits[k] >> b) & 1U) != 0 ? '1' : '0');
            }
            out << ',' << r.steps_used[k] << '\n';
        }
    }
}

nlohmann::json grid_to_json(const GridSpec& g) {
    nlohmann::json j;
    j["width"] = g.width;
    j["height"] = g.height;
    if (g.coords == Coordinates::LogPolar) {
        j["coordinates"] = "LOG_POLAR";
        j["r_min"] = g.r_min;
        j["r_max"] = g.r_max;
    } else {
        j["coordinates"] = "CARTESIAN";
        j["window"] = {g.x_min, g.x_max, g.y_min, g.y_max};
    }
    return j;
}

nlohmann::json options_to_json(const OrbitOptions& o) {
    return {{"max_iter", o.max_iter},
            {"escape_log_radius", o.escape_log_radius},
            {"confirm_steps", o.confirm_steps},
            {"cycle_tol", o.cycle_tol},
            {"cycle_max_period", o.cycle_max_period}};
}

nlohmann::json raster_metadata(const RasterResult& r) {
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.map_hash));
    std::array<std::size_t, 5> counts{};
    for (const PixelCode c : r.codes) {
        ++counts[static_cast<std::size_t>(c)];
    }
    nlohmann::json basins = nlohmann::json::array();
    for (const auto& b : r.basins) {
        nlohmann::json cyc = nlohmann::json::array();
        for (const Complex q : b.cycle) {
            cyc.push_back({q.real(), q.imag()});
        }
        basins.push_back({{"cycle", cyc},
                          {"multiplier", {b.multiplier.real(), b.multiplier.imag()}}});
    }
    nlohmann::json counts_j;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        counts_j[code_name(static_cast<PixelCode>(c))] = counts[c];
    }
    return {{"grid", grid_to_json(r.grid)},
            {"options", options_to_json(r.options)},
            {"map", {{"name", r.map_name}, {"hash", hash}}},
            {"counts", counts_j},
            {"basins", basins}};
}

} // namespace cstar
