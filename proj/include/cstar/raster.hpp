#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cstar/maps.hpp"
#include "cstar/orbit.hpp"

namespace cstar {

enum class Coordinates : std::uint8_t { LogPolar, Cartesian };

/// Pixel (i, j): i is the column (angle in log-polar mode, x in Cartesian
/// mode), j the row. Row 0 is the inner ring in log-polar mode and the top
/// edge (y_max) in Cartesian mode; images are written in row order.
struct GridSpec {
    Coordinates coords = Coordinates::LogPolar;
    int width = 1;
    int height = 1;
    double r_min = std::exp(-4.0);
    double r_max = std::exp(4.0);
    double x_min = -2.0;
    double x_max = 2.0;
    double y_min = -2.0;
    double y_max = 2.0;

    static GridSpec log_polar(double r_min, double r_max, int width, int height);
    static GridSpec cartesian(double x_min, double x_max, double y_min, double y_max, int width,
                              int height);

    void validate() const;
    [[nodiscard]] Complex center(int i, int j) const noexcept;
    [[nodiscard]] std::size_t size() const noexcept {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
};

enum class PixelCode : std::uint8_t { EscInfTail, EscZeroTail, EscMixed, Attracted, Ambiguous };

const char* code_name(PixelCode c) noexcept;
inline bool is_escaping(PixelCode c) noexcept {
    return c == PixelCode::EscInfTail || c == PixelCode::EscZeroTail || c == PixelCode::EscMixed;
}

struct Basin {
    std::vector<Complex> cycle;
    Complex multiplier;
};

struct RasterResult {
    GridSpec grid;
    OrbitOptions options;
    std::string map_name;
    std::uint64_t map_hash = 0;

    std::vector<PixelCode> codes;
    std::vector<std::int32_t> basin_ids; // -1 unless Attracted
    std::vector<Basin> basins;

    // First 64 itinerary symbols (bit n = symbol n, INF = 1) and their count.
    std::vector<std::uint64_t> itinerary_bits;
    std::vector<std::uint8_t> itinerary_len;
    std::vector<std::int32_t> steps_used;

    [[nodiscard]] std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(grid.width) +
               static_cast<std::size_t>(i);
    }
    [[nodiscard]] PixelCode code(int i, int j) const noexcept { return codes[index(i, j)]; }
};

struct RasterOptions {
    /// 0 selects CSTAR_DYN_WORKERS, then the hardware concurrency.
    int workers = 0;
};

int resolve_workers(int requested);

/// Classifies every pixel centre. Output is independent of the worker count.
RasterResult classify_grid(const MapDescriptor& m, const GridSpec& grid, const OrbitOptions& opts,
                           const RasterOptions& ropts = {});

/// Binary P6 image; palettes "paper" and "itinerary".
std::string render_ppm(const RasterResult& r, std::string_view palette);

void write_csv(const RasterResult& r, std::ostream& out);

nlohmann::json grid_to_json(const GridSpec& g);
nlohmann::json options_to_json(const OrbitOptions& o);
nlohmann::json raster_metadata(const RasterResult& r);

} // namespace cstar
