#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "cstar/maps.hpp"
#include "cstar/raster.hpp"

namespace cstar {

/// Set of pixel codes, used as the predicate for component labelling.
class CodeSet {
public:
    constexpr CodeSet() = default;
    constexpr CodeSet(std::initializer_list<PixelCode> codes) {
        for (const PixelCode c : codes) {
            mask_ |= static_cast<std::uint8_t>(1U << static_cast<unsigned>(c));
        }
    }
    [[nodiscard]] constexpr bool contains(PixelCode c) const noexcept {
        return ((mask_ >> static_cast<unsigned>(c)) & 1U) != 0;
    }
    [[nodiscard]] constexpr CodeSet complement() const noexcept {
        CodeSet s;
        s.mask_ = static_cast<std::uint8_t>(~mask_ & 0x1FU);
        return s;
    }

    static constexpr CodeSet escaping() {
        return {PixelCode::EscInfTail, PixelCode::EscZeroTail, PixelCode::EscMixed};
    }

private:
    std::uint8_t mask_ = 0;
};

enum class Connectivity : std::uint8_t { Four = 4, Eight = 8 };

struct ComponentStats {
    std::size_t pixels = 0;
    bool touches_inner_ring = false;
    bool touches_outer_ring = false;
};

struct ComponentLabeling {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels; // -1 where the predicate is false
    std::vector<ComponentStats> stats;
    bool ring_flags = false;

    [[nodiscard]] std::size_t count() const noexcept { return stats.size(); }
};

/// Union-find labelling of a width x height mask (row-major, row 0 = inner
/// ring). Ids are dense and follow the row-major order of each component's
/// first pixel. `wrap` joins column 0 with column width-1.
ComponentLabeling label_mask(int width, int height, const std::vector<std::uint8_t>& mask,
                             Connectivity conn, bool wrap);

/// Labels pixels whose code is in `predicate`. Log-polar rasters wrap in
/// angle and carry ring flags; asking for ring flags on a Cartesian raster
/// throws RingFlagsUnavailable.
ComponentLabeling label_components(const RasterResult& r, CodeSet predicate,
                                   Connectivity conn = Connectivity::Eight,
                                   bool want_ring_flags = true);

enum class Verdict : std::uint8_t { I1, I2, I3, Inconclusive };
const char* verdict_name(Verdict v) noexcept;

struct TrichotomyVerdict {
    Verdict verdict = Verdict::Inconclusive;
    std::size_t escaping_component_count = 0;
    bool touching_both = false;
    bool spider_web_evidence = false;
    double ambiguous_fraction = 0.0;
};

/// Pixel-scale evidence only. INCONCLUSIVE for Cartesian rasters and when
/// more than 5% of pixels are ambiguous.
TrichotomyVerdict trichotomy_verdict(const RasterResult& r);

/// One escaping component touching both rings, and no 4-connected
/// non-escaping component touching either ring.
bool spider_web_check(const RasterResult& r);

enum class IndexRoute : std::uint8_t { ArgumentTracking, LiftBranch };

struct IndexResult {
    int index = 0;
    IndexRoute route = IndexRoute::ArgumentTracking;
    std::size_t samples = 0;
};

/// Winding number of theta -> f(radius e^{i theta}) about 0. Steps whose
/// argument jump exceeds pi/2 are bisected, up to 2^20 samples in total.
/// When f itself cannot be evaluated on the circle, the continuous branch
/// n*theta + Im G of arg f is tracked instead (canonical maps only).
IndexResult compute_index_detailed(const MapDescriptor& m, double radius, int n_samples);
int compute_index(const MapDescriptor& m, double radius, int n_samples);

/// A component of one class (a basin or the escaping set) that meets every
/// column and separates the inner ring from the outer ring: no 4-connected
/// component of its complement touches both. The component itself may touch
/// a ring, since basins of disjoint-type maps reach both ends between hairs.
struct SeparatingRegion {
    PixelCode code = PixelCode::Attracted;
    int basin_id = -1;
    std::size_t pixels = 0;
    bool contains_fixed_point = false;
};

std::vector<SeparatingRegion> find_separating_regions(const RasterResult& r);

struct IndexZeroCheck {
    bool consistent = true;
    std::vector<SeparatingRegion> regions;
    int index = 0;
};

/// A doubly connected invariant region may only occur for maps of index 0.
IndexZeroCheck check_separating_index(const MapDescriptor& m, const RasterResult& r);

nlohmann::json verdict_to_json(const TrichotomyVerdict& v, bool spider_web, int index,
                               const GridSpec& grid);

} // namespace cstar
