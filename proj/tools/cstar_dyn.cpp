// cstar-dyn: command-line front end for the cstar_dyn library.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cstar/errors.hpp"
#include "cstar/lift.hpp"
#include "cstar/maps.hpp"
#include "cstar/orbit.hpp"
#include "cstar/probe.hpp"
#include "cstar/raster.hpp"
#include "cstar/topology.hpp"
#include "cstar/verify.hpp"

using namespace cstar;

namespace {

constexpr int kOk = 0;
constexpr int kClaimFailed = 1;
constexpr int kUsage = 2;
constexpr int kNumeric = 3;

class UsageError : public Error {
public:
    using Error::Error;
};

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<double> split_numbers(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw UsageError("cannot read " + what + " from '" + s + "'");
        }
    }
    return out;
}

Complex parse_point(const std::string& s) {
    const std::vector<double> v = split_numbers(s, "point");
    if (v.size() == 1) {
        return {v[0], 0.0};
    }
    if (v.size() != 2) {
        throw UsageError("point must be 're' or 're,im', got '" + s + "'");
    }
    return {v[0], v[1]};
}

struct MapArgs {
    std::string map;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> lambda;

    void add(CLI::App* app, bool required = true) {
        auto* opt = app->add_option("--map", map, "Registry name or JSON descriptor path");
        if (required) {
            opt->required();
        }
        app->add_option("--alpha", alpha, "Parameter alpha (ex4.4)");
        app->add_option("--beta", beta, "Parameter beta (ex4.4)");
        app->add_option("--lambda", lambda, "Parameter lambda (ex4.1)");
    }

    [[nodiscard]] MapDescriptor resolve() const {
        ParamTable p;
        if (alpha) {
            p["alpha"] = *alpha;
        }
        if (beta) {
            p["beta"] = *beta;
        }
        if (lambda) {
            p["lambda"] = *lambda;
        }
        return resolve_map(map, p);
    }
};

struct OrbitArgs {
    OrbitOptions o;

    void add(CLI::App* app) {
        app->add_option("--max-iter", o.max_iter, "Budget of map evaluations")->capture_default_str();
        app->add_option("--escape-log-radius", o.escape_log_radius, "Escape threshold L on |log|z||")
            ->capture_default_str();
        app->add_option("--confirm-steps", o.confirm_steps, "Monotone steps needed to confirm escape")
            ->capture_default_str();
        app->add_option("--cycle-tol", o.cycle_tol, "Cycle detection tolerance")->capture_default_str();
        app->add_option("--cycle-max-period", o.cycle_max_period, "Longest period searched")
            ->capture_default_str();
    }
};

struct GridArgs {
    int size = 1024;
    std::optional<int> width;
    std::optional<int> height;
    std::string coords = "log-polar";
    double r_min = std::exp(-4.0);
    double r_max = std::exp(4.0);
    std::string window = "-2,2,-2,2";
    int workers = 0;

    void add(CLI::App* app) {
        app->add_option("--size", size, "Square grid size")->capture_default_str();
        app->add_option("--width", width, "Grid width (overrides --size)");
        app->add_option("--height", height, "Grid height (overrides --size)");
        app->add_option("--coords", coords, "log-polar or cartesian")
            ->check(CLI::IsMember({"log-polar", "cartesian"}))
            ->capture_default_str();
        app->add_option("--r-min", r_min, "Inner radius (log-polar)");
        app->add_option("--r-max", r_max, "Outer radius (log-polar)");
        app->add_option("--window", window, "x_min,x_max,y_min,y_max (cartesian)")
            ->capture_default_str();
        app->add_option("--workers", workers,
                        "Worker threads for the raster phase (0: CSTAR_DYN_WORKERS or all cores)")
            ->capture_default_str();
    }

    [[nodiscard]] GridSpec grid() const {
        const int w = width.value_or(size);
        const int h = height.value_or(size);
        try {
            if (coords == "cartesian") {
                const std::vector<double> v = split_numbers(window, "window");
                if (v.size() != 4) {
                    throw UsageError("window needs four numbers");
                }
                return GridSpec::cartesian(v[0], v[1], v[2], v[3], w, h);
            }
            return GridSpec::log_polar(r_min, r_max, w, h);
        } catch (const UsageError&) {
            throw;
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
};

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw UsageError("cannot open '" + path + "' for writing");
    }
    out << data;
}

nlohmann::json point_json(Complex z) { return {z.real(), z.imag()}; }

// ---------------------------------------------------------------- render

struct Preset {
    std::string map;
    ParamTable params;
    double window[4];
    int size;
};

std::optional<Preset> preset(const std::string& name) {
    if (name == "fig2") {
        return Preset{"ex4.2", {}, {-2.0, 2.0, -2.0, 2.0}, 1024};
    }
    if (name == "fig3") {
        return Preset{"ex4.3", {}, {-8.0, 8.0, -8.0, 8.0}, 1024};
    }
    if (name == "fig4") {
        return Preset{"ex4.4", {{"alpha", 3.1}, {"beta", 0.8}}, {-3.0, 3.0, -3.0, 3.0}, 1024};
    }
    return std::nullopt;
}

int run_render(const MapArgs& ma, const OrbitArgs& oa, const GridArgs& ga,
               const std::string& preset_name, const std::string& palette, const std::string& out,
               const std::string& csv, const std::string& meta) {
    std::optional<MapDescriptor> m;
    GridSpec grid;
    if (!preset_name.empty()) {
        const std::optional<Preset> p = preset(preset_name);
        if (!p) {
            throw UsageError("unknown preset '" + preset_name + "'");
        }
        m.emplace(registry_map(p->map, p->params));
        grid = GridSpec::cartesian(p->window[0], p->window[1], p->window[2], p->window[3], p->size,
                                   p->size);
    } else {
        if (ma.map.empty()) {
            throw UsageError("render needs --map or --preset");
        }
        m.emplace(ma.resolve());
        grid = ga.grid();
    }
    RasterOptions ro;
    ro.workers = ga.workers;
    const RasterResult r = classify_grid(*m, grid, oa.o, ro);
    std::string ppm;
    try {
        ppm = render_ppm(r, palette);
    } catch (const UnknownPalette& e) {
        throw UsageError(e.what());
    }
    write_file(out, ppm);
    if (!csv.empty()) {
        std::ofstream f(csv, std::ios::binary);
        if (!f) {
            throw UsageError("cannot open '" + csv + "' for writing");
        }
        write_csv(r, f);
    }
    const nlohmann::json md = raster_metadata(r);
    if (!meta.empty()) {
        write_file(meta, md.dump(2) + "\n");
    }
    std::cout << md["counts"].dump() << "\n";
    return kOk;
}

// -------------------------------------------------------------- classify

nlohmann::json classification_json(const OrbitResult& r) {
    nlohmann::json j;
    if (const auto* e = std::get_if<Escaping>(&r.classification)) {
        j["class"] = "ESCAPING";
        j["tail"] = tail_name(e->tail);
    } else if (const auto* a = std::get_if<Attracted>(&r.classification)) {
        j["class"] = "ATTRACTED";
        nlohmann::json cyc = nlohmann::json::array();
        for (const Complex q : a->cycle) {
            cyc.push_back(point_json(q));
        }
        j["cycle"] = cyc;
        j["multiplier"] = point_json(a->multiplier);
    } else {
        j["class"] = "AMBIGUOUS";
        j["reason"] = reason_name(std::get<Ambiguous>(r.classification).reason);
    }
    j["itinerary"] = r.itinerary.to_string();
    j["itinerary_truncated"] = r.itinerary.truncated;
    j["steps_used"] = r.steps_used;
    j["orbit_length"] = r.orbit_length;
    return j;
}

// ----------------------------------------------------------------- probe

RegionSpec parse_region(const std::string& text, std::size_t samples, std::uint64_t seed) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw UsageError("region must be 'sector:r_lo,r_hi,theta_lo,theta_hi' or 'halfplane:c,depth'");
    }
    const std::string kind = text.substr(0, colon);
    const std::vector<double> v = split_numbers(text.substr(colon + 1), "region");
    RegionSpec r;
    r.n_samples = samples;
    r.seed = seed;
    if (kind == "sector" && v.size() == 4) {
        r.shape = AnnularSector{v[0], v[1], v[2], v[3]};
    } else if (kind == "halfplane" && v.size() == 2) {
        r.shape = HalfPlane{v[0], v[1]};
    } else {
        throw UsageError("cannot read region '" + text + "'");
    }
    try {
        r.validate();
    } catch (const InvalidRegion& e) {
        throw UsageError(e.what());
    }
    return r;
}

RasterResult verdict_raster(const MapDescriptor& m, const OrbitArgs& oa, const GridArgs& ga) {
    GridSpec grid = ga.grid();
    if (grid.coords != Coordinates::LogPolar) {
        throw UsageError("topological verdicts need a log-polar grid");
    }
    RasterOptions ro;
    ro.workers = ga.workers;
    return classify_grid(m, grid, oa.o, ro);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamics of transcendental self-maps of the punctured plane"};
    app.require_subcommand(1);

    MapArgs ma;
    OrbitArgs oa;
    GridArgs ga;
    std::string point;
    std::string preset_name;
    std::string palette = "paper";
    std::string out = "out.ppm";
    std::string csv;
    std::string meta;
    int n_symbols = 32;
    double radius = 1.0;
    int samples = 1024;
    std::string guess;
    int period = 1;
    std::string region;
    std::string drift = "log-modulus";
    double delta = 1.0;
    std::size_t probe_samples = 4096;
    std::uint64_t seed = 1;
    std::string strip;
    std::size_t lift_samples = 10000;
    double lift_tol = 1e-9;
    std::vector<std::string> claims;
    std::string report;

    auto* render = app.add_subcommand("render", "Classify a grid and write PPM, CSV and JSON");
    ma.add(render, false);
    oa.add(render);
    ga.add(render);
    render->add_option("--preset", preset_name, "fig2, fig3 or fig4");
    render->add_option("--palette", palette, "paper or itinerary")->capture_default_str();
    render->add_option("--out", out, "PPM output path")->capture_default_str();
    render->add_option("--csv", csv, "CSV output path");
    render->add_option("--meta", meta, "JSON metadata output path");

    auto* classify = app.add_subcommand("classify", "Classify the orbit of one point");
    ma.add(classify);
    oa.add(classify);
    classify->add_option("--point", point, "re,im")->required();

    auto* itinerary = app.add_subcommand("itinerary", "Print an itinerary prefix");
    ma.add(itinerary);
    itinerary->add_option("--point", point, "re,im")->required();
    itinerary->add_option("--n", n_symbols, "Number of symbols")->capture_default_str();

    auto* index = app.add_subcommand("index", "Winding number of f on a circle");
    ma.add(index);
    index->add_option("--radius", radius, "Circle radius")->capture_default_str();
    index->add_option("--samples", samples, "Initial samples (>= 64)")->capture_default_str();

    auto* attractor = app.add_subcommand("attractor", "Locate an attracting cycle by Newton");
    ma.add(attractor);
    attractor->add_option("--guess", guess, "re,im")->required();
    attractor->add_option("--period", period, "Cycle period")->capture_default_str();

    auto* trichotomy = app.add_subcommand("trichotomy", "I1/I2/I3 verdict from a log-polar raster");
    ma.add(trichotomy);
    oa.add(trichotomy);
    ga.add(trichotomy);

    auto* spiderweb = app.add_subcommand("spiderweb", "Spider's-web evidence from a log-polar raster");
    ma.add(spiderweb);
    oa.add(spiderweb);
    ga.add(spiderweb);

    auto* probe = app.add_subcommand("probe", "Forward invariance and drift on a region");
    ma.add(probe);
    probe->add_option("--region", region, "sector:r_lo,r_hi,theta_lo,theta_hi or halfplane:c,depth")
        ->required();
    probe->add_option("--drift", drift, "log-modulus or lift-re")
        ->check(CLI::IsMember({"log-modulus", "lift-re"}))
        ->capture_default_str();
    probe->add_option("--delta", delta, "Required minimum drift")->capture_default_str();
    probe->add_option("--samples", probe_samples, "Number of samples")->capture_default_str();
    probe->add_option("--seed", seed, "Sampling seed")->capture_default_str();

    auto* lift_check = app.add_subcommand("lift-check", "Check exp(lift(w)) = f(exp(w)) on a strip");
    ma.add(lift_check);
    lift_check->add_option("--strip", strip, "re_lo,re_hi,im_lo,im_hi (default: documented safe strip)");
    lift_check->add_option("--samples", lift_samples, "Number of samples")->capture_default_str();
    lift_check->add_option("--tol", lift_tol, "Residual tolerance")->capture_default_str();
    lift_check->add_option("--seed", seed, "Sampling seed")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "Run preset claims and print a JUnit-style report");
    verify->add_option("claims", claims, "Claim names (default: all)");
    verify->add_option("--report", report, "Also write the report to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (render->parsed()) {
            return run_render(ma, oa, ga, preset_name, palette, out, csv, meta);
        }
        if (classify->parsed()) {
            const OrbitResult r = classify_point(ma.resolve(), parse_point(point), oa.o);
            std::cout << classification_json(r).dump() << "\n";
            return kOk;
        }
        if (itinerary->parsed()) {
            if (n_symbols < 1) {
                throw UsageError("--n must be positive");
            }
            const ItineraryPrefix p = itinerary_prefix(ma.resolve(), parse_point(point), n_symbols);
            std::cout << p.to_string() << "\n";
            if (p.truncated) {
                std::cerr << "orbit left the extended range after " << p.symbols.size()
                          << " symbols\n";
            }
            return kOk;
        }
        if (index->parsed()) {
            if (samples < 64 || !(radius > 0.0)) {
                throw UsageError("index needs --samples >= 64 and a positive --radius");
            }
            std::cout << compute_index(ma.resolve(), radius, samples) << "\n";
            return kOk;
        }
        if (attractor->parsed()) {
            if (period < 1) {
                throw UsageError("--period must be positive");
            }
            const Cycle c = find_attractor(ma.resolve(), parse_point(guess), period);
            std::cout << "period " << c.points.size() << "\n";
            for (const Complex q : c.points) {
                std::cout << "point " << fmt(q.real()) << " " << fmt(q.imag()) << "\n";
            }
            std::cout << "multiplier " << fmt(c.multiplier.real()) << " "
                      << fmt(c.multiplier.imag()) << "\n";
            std::cout << "abs_multiplier " << fmt(std::abs(c.multiplier)) << "\n";
            std::cout << "attracting " << (std::abs(c.multiplier) < 1.0 ? "true" : "false") << "\n";
            return kOk;
        }
        if (trichotomy->parsed() || spiderweb->parsed()) {
            const MapDescriptor m = ma.resolve();
            const RasterResult r = verdict_raster(m, oa, ga);
            const TrichotomyVerdict v = trichotomy_verdict(r);
            const bool web = spider_web_check(r);
            const int ind = compute_index(m, 1.0, 1024);
            std::cout << verdict_to_json(v, web, ind, r.grid).dump() << "\n";
            if (spiderweb->parsed()) {
                return web ? kOk : kClaimFailed;
            }
            return kOk;
        }
        if (probe->parsed()) {
            const RegionSpec reg = parse_region(region, probe_samples, seed);
            const ProbeReport rep = invariance_probe(
                ma.resolve(), reg, drift == "lift-re" ? DriftMode::LiftRe : DriftMode::LogModulus,
                delta);
            std::cout << probe_to_json(rep).dump() << "\n";
            return rep.pass() ? kOk : kClaimFailed;
        }
        if (lift_check->parsed()) {
            const MapDescriptor m = ma.resolve();
            Strip s{};
            if (strip.empty()) {
                s = safe_strip(m.name());
            } else {
                const std::vector<double> v = split_numbers(strip, "strip");
                if (v.size() != 4) {
                    throw UsageError("strip needs four numbers");
                }
                s = {v[0], v[1], v[2], v[3]};
            }
            const double res = verify_semiconjugacy(LiftDescriptor(m), lift_samples, s, seed);
            std::cout << "residual " << fmt(res) << "\n";
            return res <= lift_tol ? kOk : kClaimFailed;
        }
        if (verify->parsed()) {
            if (claims.empty()) {
                claims = claim_names();
            }
            std::vector<ClaimResult> results;
            for (const auto& name : claims) {
                const auto known = claim_names();
                if (std::find(known.begin(), known.end(), name) == known.end()) {
                    throw UsageError("unknown claim '" + name + "'");
                }
                results.push_back(run_claim(name));
            }
            const nlohmann::json j = claims_to_junit(results);
            std::cout << j.dump(2) << "\n";
            if (!report.empty()) {
                write_file(report, j.dump(2) + "\n");
            }
            return j["testsuite"]["failures"].get<std::size_t>() == 0 ? kOk : kClaimFailed;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const UnknownMap& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InvalidRegion& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const LiftUnavailable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const UnknownParameter& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kNumeric;
    }
    return kUsage;
}
