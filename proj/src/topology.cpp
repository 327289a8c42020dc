#include "cstar/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "cstar/errors.hpp"

namespace cstar {

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0U); }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            // Smaller index becomes the root; keeps the structure independent
            // of the order in which edges are visited.
            if (a < b) {
                parent_[b] = a;
            } else {
                parent_[a] = b;
            }
        }
    }

private:
    std::vector<std::uint32_t> parent_;
};

} // namespace

ComponentLabeling label_mask(int width, int height, const std::vector<std::uint8_t>& mask,
                             Connectivity conn, bool wrap) {
    const auto w = static_cast<std::size_t>(width);
    const std::size_t n = w * static_cast<std::size_t>(height);
    if (mask.size() != n) {
        throw Error("mask size does not match grid");
    }
    UnionFind uf(n);
    auto at = [&](int i, int j) { return static_cast<std::uint32_t>(static_cast<std::size_t>(j) * w + static_cast<std::size_t>(i)); };
    auto col = [&](int i) -> int {
        if (i >= 0 && i < width) {
            return i;
        }
        if (!wrap) {
            return -1;
        }
        return (i + width) % width;
    };
    for (int j = 0; j < height; ++j) {
        for (int i = 0; i < width; ++i) {
            if (mask[at(i, j)] == 0) {
                continue;
            }
            const std::uint32_t here = at(i, j);
            // Left neighbour, and the wrap partner for the last column.
            const int l = col(i - 1);
            if (l >= 0 && mask[at(l, j)] != 0) {
                uf.unite(here, at(l, j));
            }
            if (j > 0) {
                if (mask[at(i, j - 1)] != 0) {
                    uf.unite(here, at(i, j - 1));
                }
                if (conn == Connectivity::Eight) {
                    for (const int di : {-1, 1}) {
                        const int c = col(i + di);
                        if (c >= 0 && mask[at(c, j - 1)] != 0) {
                            uf.unite(here, at(c, j - 1));
                        }
                    }
                }
            }
        }
    }
    ComponentLabeling out;
    out.width = width;
    out.height = height;
    out.labels.assign(n, -1);
    std::vector<std::int32_t> id_of_root(n, -1);
    for (int j = 0; j < height; ++j) {
        for (int i = 0; i < width; ++i) {
            const std::uint32_t k = at(i, j);
            if (mask[k] == 0) {
                continue;
            }
            const std::uint32_t root = uf.find(k);
            if (id_of_root[root] < 0) {
                id_of_root[root] = static_cast<std::int32_t>(out.stats.size());
                out.stats.emplace_back();
            }
            const std::int32_t id = id_of_root[root];
            out.labels[k] = id;
            ComponentStats& s = out.stats[static_cast<std::size_t>(id)];
            ++s.pixels;
            s.touches_inner_ring = s.touches_inner_ring || j == 0;
            s.touches_outer_ring = s.touches_outer_ring || j == height - 1;
        }
    }
    out.ring_flags = true;
    return out;
}

ComponentLabeling label_components(const RasterResult& r, CodeSet predicate, Connectivity conn,
                                   bool want_ring_flags) {
    const bool polar = r.grid.coords == Coordinates::LogPolar;
    if (want_ring_flags && !polar) {
        throw RingFlagsUnavailable("ring flags need a log-polar raster");
    }
    std::vector<std::uint8_t> mask(r.codes.size());
    for (std::size_t k = 0; k < mask.size(); ++k) {
        mask[k] = predicate.contains(r.codes[k]) ? 1 : 0;
    }
    ComponentLabeling out = label_mask(r.grid.width, r.grid.height, mask, conn, polar);
    if (!polar) {
        out.ring_flags = false;
        for (auto& s : out.stats) {
            s.touches_inner_ring = false;
            s.touches_outer_ring = false;
        }
    }
    return out;
}

const char* verdict_name(Verdict v) noexcept {
    switch (v) {
    case Verdict::I1: return "I1";
    case Verdict::I2: return "I2";
    case Verdict::I3: return "I3";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

namespace {

double ambiguous_fraction(const RasterResult& r) {
    const auto n = static_cast<double>(
        std::count(r.codes.begin(), r.codes.end(), PixelCode::Ambiguous));
    return r.codes.empty() ? 0.0 : n / static_cast<double>(r.codes.size());
}

bool spider_web_from(const RasterResult& r, const ComponentLabeling& esc) {
    if (esc.count() != 1 || !esc.stats[0].touches_inner_ring || !esc.stats[0].touches_outer_ring) {
        return false;
    }
    const ComponentLabeling rest =
        label_components(r, CodeSet::escaping().complement(), Connectivity::Four);
    return std::none_of(rest.stats.begin(), rest.stats.end(), [](const ComponentStats& s) {
        return s.touches_inner_ring || s.touches_outer_ring;
    });
}

} // namespace

TrichotomyVerdict trichotomy_verdict(const RasterResult& r) {
    TrichotomyVerdict v;
    v.ambiguous_fraction = ambiguous_fraction(r);
    if (r.grid.coords != Coordinates::LogPolar) {
        return v;
    }
    const ComponentLabeling esc = label_components(r, CodeSet::escaping());
    v.escaping_component_count = esc.count();
    v.touching_both = std::any_of(esc.stats.begin(), esc.stats.end(), [](const ComponentStats& s) {
        return s.touches_inner_ring && s.touches_outer_ring;
    });
    v.spider_web_evidence = spider_web_from(r, esc);
    if (v.ambiguous_fraction > 0.05) {
        v.verdict = Verdict::Inconclusive;
    } else if (!v.touching_both) {
        v.verdict = Verdict::I3;
    } else if (esc.count() == 1) {
        v.verdict = Verdict::I1;
    } else {
        v.verdict = Verdict::I2;
    }
    return v;
}

bool spider_web_check(const RasterResult& r) {
    if (r.grid.coords != Coordinates::LogPolar) {
        return false;
    }
    return spider_web_from(r, label_components(r, CodeSet::escaping()));
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kSampleCap = std::size_t{1} << 20;

double wrap_angle(double d) {
    d = std::remainder(d, kTwoPi);
    return d;
}

struct Tracker {
    const MapDescriptor& m;
    double radius;
    std::size_t used;

    double arg_at(double theta) {
        ++used;
        const Complex v = eval_map(m, std::polar(radius, theta));
        if (v == Complex(0.0, 0.0)) {
            throw OverflowError("f underflows to 0 on the index circle");
        }
        return std::arg(v);
    }

    double segment(double t0, double a0, double t1, double a1) {
        const double d = wrap_angle(a1 - a0);
        if (std::abs(d) <= std::numbers::pi / 2 || used >= kSampleCap) {
            return d;
        }
        const double tm = 0.5 * (t0 + t1);
        if (tm <= t0 || tm >= t1) {
            return d;
        }
        const double am = arg_at(tm);
        return segment(t0, a0, tm, am) + segment(tm, am, t1, a1);
    }
};

} // namespace

IndexResult compute_index_detailed(const MapDescriptor& m, double radius, int n_samples) {
    if (n_samples < 64) {
        throw Error("index computation needs at least 64 samples");
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw Error("index radius must be positive");
    }
    const auto n = static_cast<std::size_t>(n_samples);
    IndexResult out;
    try {
        Tracker t{m, radius, 0};
        const double a_start = t.arg_at(0.0);
        double a_prev = a_start;
        double total = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            const double t0 = kTwoPi * static_cast<double>(k - 1) / static_cast<double>(n);
            const double t1 = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
            const double a = k == n ? a_start : t.arg_at(t1);
            total += t.segment(t0, a_prev, t1, a);
            a_prev = a;
        }
        const double turns = total / kTwoPi;
        const double rounded = std::round(turns);
        if (std::abs(turns - rounded) > 1e-6) {
            throw NonClosure("argument of f does not close to an integer winding");
        }
        out.index = static_cast<int>(rounded);
        out.samples = t.used;
        return out;
    } catch (const NonClosure&) {
        throw;
    } catch (const OverflowError&) {
        if (!m.canonical()) {
            throw;
        }
    }
    // Continuous branch n*theta + Im G(z) of arg f. G is single-valued on C*,
    // so Im G returns to its starting value and the winding is n, provided G
    // is finite on the whole circle.
    const Program& g = m.exponent_program();
    for (std::size_t k = 0; k < n; ++k) {
        const double th = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        Complex v;
        if (!g.eval_fast(std::polar(radius, th), v)) {
            throw NonClosure("exponent G cannot be evaluated on the circle");
        }
    }
    out.index = m.canonical()->index;
    out.route = IndexRoute::LiftBranch;
    out.samples = n;
    return out;
}

int compute_index(const MapDescriptor& m, double radius, int n_samples) {
    return compute_index_detailed(m, radius, n_samples).index;
}

namespace {

bool locate(const GridSpec& g, Complex z, int& i, int& j) {
    if (g.coords != Coordinates::LogPolar || z == Complex(0.0, 0.0)) {
        return false;
    }
    const double lo = std::log(g.r_min);
    const double hi = std::log(g.r_max);
    const double rho = std::log(std::abs(z));
    double th = std::arg(z);
    if (th < 0.0) {
        th += kTwoPi;
    }
    j = static_cast<int>(std::floor((rho - lo) / (hi - lo) * g.height));
    i = static_cast<int>(std::floor(th / kTwoPi * g.width)) % g.width;
    return j >= 0 && j < g.height;
}

void collect_regions(const RasterResult& r, const std::vector<std::uint8_t>& mask, PixelCode code,
                     int basin, std::int64_t anchor, std::vector<SeparatingRegion>& out) {
    const int w = r.grid.width;
    const int h = r.grid.height;
    const ComponentLabeling lab = label_mask(w, h, mask, Connectivity::Eight, true);
    for (std::size_t c = 0; c < lab.count(); ++c) {
        const ComponentStats& s = lab.stats[c];
        std::vector<std::uint8_t> cols(static_cast<std::size_t>(w), 0);
        std::vector<std::uint8_t> rest(mask.size(), 1);
        for (std::size_t k = 0; k < mask.size(); ++k) {
            if (lab.labels[k] == static_cast<std::int32_t>(c)) {
                cols[k % static_cast<std::size_t>(w)] = 1;
                rest[k] = 0;
            }
        }
        if (std::count(cols.begin(), cols.end(), 1) != w) {
            continue;
        }
        const ComponentLabeling side = label_mask(w, h, rest, Connectivity::Four, true);
        const bool joined = std::any_of(side.stats.begin(), side.stats.end(), [](const auto& t) {
            return t.touches_inner_ring && t.touches_outer_ring;
        });
        if (!joined) {
            const bool holds = anchor >= 0 &&
                               lab.labels[static_cast<std::size_t>(anchor)] ==
                                   static_cast<std::int32_t>(c);
            out.push_back({code, basin, s.pixels, holds});
        }
    }
}

} // namespace

std::vector<SeparatingRegion> find_separating_regions(const RasterResult& r) {
    std::vector<SeparatingRegion> out;
    if (r.grid.coords != Coordinates::LogPolar) {
        return out;
    }
    std::vector<std::uint8_t> mask(r.codes.size());
    for (std::size_t k = 0; k < mask.size(); ++k) {
        mask[k] = is_escaping(r.codes[k]) ? 1 : 0;
    }
    collect_regions(r, mask, PixelCode::EscInfTail, -1, -1, out);
    for (std::size_t b = 0; b < r.basins.size(); ++b) {
        for (std::size_t k = 0; k < mask.size(); ++k) {
            mask[k] = r.basin_ids[k] == static_cast<std::int32_t>(b) ? 1 : 0;
        }
        std::int64_t anchor = -1;
        int i = 0;
        int j = 0;
        if (r.basins[b].cycle.size() == 1 && locate(r.grid, r.basins[b].cycle.front(), i, j)) {
            anchor = static_cast<std::int64_t>(r.index(i, j));
        }
        collect_regions(r, mask, PixelCode::Attracted, static_cast<int>(b), anchor, out);
    }
    return out;
}

IndexZeroCheck check_separating_index(const MapDescriptor& m, const RasterResult& r) {
    IndexZeroCheck out;
    for (const SeparatingRegion& reg : find_separating_regions(r)) {
        // A component holding an attracting fixed point is invariant.
        if (reg.contains_fixed_point) {
            out.regions.push_back(reg);
        }
    }
    if (!out.regions.empty()) {
        out.index = compute_index(m, std::sqrt(r.grid.r_min * r.grid.r_max), 1024);
        out.consistent = out.index == 0;
    }
    return out;
}

nlohmann::json verdict_to_json(const TrichotomyVerdict& v, bool spider_web, int index,
                               const GridSpec& grid) {
    return {{"verdict", verdict_name(v.verdict)},
            {"components", v.escaping_component_count},
            {"both_rings", v.touching_both},
            {"spider_web", spider_web},
            {"index", index},
            {"ambiguous_fraction", v.ambiguous_fraction},
            {"grid", grid_to_json(grid)}};
}

} // namespace cstar
