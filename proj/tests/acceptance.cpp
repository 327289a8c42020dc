// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "cstar/errors.hpp"
#include "cstar/lift.hpp"
#include "cstar/orbit.hpp"
#include "cstar/probe.hpp"
#include "cstar/raster.hpp"
#include "cstar/sampling.hpp"
#include "cstar/topology.hpp"
#include "cstar/verify.hpp"
#include "oracles.hpp"

using namespace cstar;

namespace {

// Tolerances and budgets.
constexpr double kY0 = 1.087;
constexpr double kY0Tol = 1e-3;
constexpr double kCircleTol = 1e-12;
constexpr double kSemiconjugacyTol = 1e-9;
constexpr double kBoundaryTol = 1e-12;
constexpr double kBackboneTol = 1e-10;
constexpr double kProbeDelta = 1.0;
constexpr double kDerivativeTol = 1e-6;
constexpr double kMultiplierTol = 1e-10;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(int id, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = budget_s <= 0.0 || dt < budget_s;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s criterion %d: %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", id, o.detail.c_str(), dt,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : s) {
        h = (h ^ c) * 1099511628211ULL;
    }
    return h;
}

// Every byte a raster run produces: image, CSV and metadata.
std::string raster_bytes(const RasterResult& r) {
    std::ostringstream csv;
    write_csv(r, csv);
    return render_ppm(r, "paper") + csv.str() + raster_metadata(r).dump();
}

GridSpec annulus_grid(int size) {
    return GridSpec::log_polar(std::exp(-4.0), std::exp(4.0), size, size);
}

struct VerdictCase {
    const char* label;
    MapDescriptor map;
    Verdict want;
};

std::vector<VerdictCase> verdict_cases() {
    return {{"ex4.3", registry_map("ex4.3"), Verdict::I3},
            {"ex4.4", registry_map("ex4.4", {{"alpha", 3.1}, {"beta", 0.8}}), Verdict::I3},
            {"ex4.2", registry_map("ex4.2"), Verdict::I2}};
}

// Criterion-6 rasters at 1024, kept for the determinism check.
std::vector<std::string> reference_bytes;

Outcome c1() {
    const Cycle c = find_attractor(registry_map("ex4.2-axis"), Complex(1.0, 0.0), 1);
    const double y0 = c.points.at(0).real();
    const bool ok = std::abs(y0 - kY0) <= kY0Tol && std::abs(c.points[0].imag()) == 0.0 &&
                    std::abs(c.multiplier) < 1.0;
    return {ok, fmt("y0 = %.15g, |multiplier| = %.6g", y0, std::abs(c.multiplier))};
}

Outcome c2() {
    const MapDescriptor m = registry_map("ex4.4", {{"alpha", 3.1}, {"beta", 0.8}});
    double worst = 0.0;
    const int n = 10000;
    for (int k = 0; k < n; ++k) {
        const Complex z = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
        worst = std::max(worst, std::abs(std::abs(eval_map(m, z)) - 1.0));
    }
    return {worst <= kCircleTol, fmt("max ||f(e^it)| - 1| = %.3g over 10000 samples", worst)};
}

Outcome c3() {
    int checked = 0;
    std::string bad;
    for (const auto& name : registry_names()) {
        const MapDescriptor m = registry_map(name);
        for (const double r : {0.25, 1.0, 4.0}) {
            for (const int n : {256, 4096}) {
                const int got = compute_index(m, r, n);
                ++checked;
                if (got != m.canonical()->index) {
                    bad += " " + name + "@" + fmt("%g", r) + "=" + std::to_string(got);
                }
            }
        }
    }
    return {bad.empty(), std::to_string(checked) + " index evaluations match n" + bad};
}

Outcome c4() {
    double worst = 0.0;
    for (const auto& name : registry_names()) {
        const LiftDescriptor lift(registry_map(name));
        worst = std::max(worst, verify_semiconjugacy(lift, 10000, safe_strip(name)));
    }
    return {worst <= kSemiconjugacyTol, fmt("max residual %.3g over all registry lifts", worst)};
}

Outcome c5() {
    std::size_t compared = 0;
    std::size_t mismatched = 0;
    const R2Sequence seq(2024);
    for (const auto& name : registry_names()) {
        const MapDescriptor m = registry_map(name);
        for (std::size_t k = 0; k < 1000; ++k) {
            const auto [u, v] = seq(k);
            XComplex z(std::polar(std::exp(-4.0 + 8.0 * u), 2.0 * std::numbers::pi * v));
            for (int step = 0; step < 64; ++step) {
                if (!z.fits_double()) {
                    break;
                }
                const StepResult st = step_orbit(m, z);
                if (st.kind != StepResult::Kind::Value) {
                    break;
                }
                // Re of the lift at w = log z is log|f(z)|.
                const Complex big = oracle::lift(name, std::log(z.to_complex()));
                if (std::isfinite(big.real()) && std::abs(big.real()) >= kBoundaryTol &&
                    std::abs(st.value.log_abs()) >= kBoundaryTol) {
                    ++compared;
                    mismatched += (big.real() > 0.0) != (symbol_of(st.value) == Symbol::Inf);
                }
                z = st.value;
            }
        }
    }
    return {mismatched == 0 && compared > 0,
            std::to_string(compared) + " steps compared, " + std::to_string(mismatched) + " mismatches"};
}

Outcome c6() {
    std::string detail;
    bool ok = true;
    for (const VerdictCase& vc : verdict_cases()) {
        const RasterResult r1 = classify_grid(vc.map, annulus_grid(1024), {}, {});
        reference_bytes.push_back(raster_bytes(r1));
        const Verdict v1 = trichotomy_verdict(r1).verdict;
        const Verdict v2 = trichotomy_verdict(classify_grid(vc.map, annulus_grid(2048), {}, {})).verdict;
        ok = ok && v1 == vc.want && v2 == vc.want;
        detail += std::string(vc.label) + " " + verdict_name(v1) + "/" + verdict_name(v2) + "; ";
    }
    return {ok, detail + "at 1024/2048"};
}

Outcome c7() {
    const RasterResult r = classify_grid(registry_map("ex4.1", {{"lambda", 10.0}}), annulus_grid(1024), {}, {});
    const TrichotomyVerdict v = trichotomy_verdict(r);
    const bool web = spider_web_check(r);
    return {v.verdict == Verdict::I1 && web,
            std::string("verdict ") + verdict_name(v.verdict) + ", spider web " + (web ? "true" : "false")};
}

Outcome c8() {
    const MapDescriptor m = registry_map("ex4.2");
    const R2Sequence seq(8);
    int real_ok = 0;
    int imag_ok = 0;
    for (std::size_t k = 0; k < 200; ++k) {
        const auto [u, v] = seq(k);
        const double t = 0.01 * std::pow(1000.0, u) * (v < 0.5 ? -1.0 : 1.0);
        const OrbitResult re = classify_point(m, Complex(t, 0.0));
        if (const auto* e = std::get_if<Escaping>(&re.classification); e && e->tail == Tail::AllInf) {
            ++real_ok;
        }
        const OrbitResult im = classify_point(m, Complex(0.0, t));
        if (const auto* a = std::get_if<Attracted>(&im.classification)) {
            const Complex want(0.0, t > 0.0 ? kY0 : -kY0);
            if (a->cycle.size() == 1 && std::abs(a->cycle[0] - want) <= kY0Tol) {
                ++imag_ok;
            }
        }
    }
    return {real_ok == 200 && imag_ok == 200,
            std::to_string(real_ok) + "/200 real escape ALL_INF, " + std::to_string(imag_ok) +
                "/200 imaginary attracted to +-1.087i"};
}

Outcome c9() {
    RegionSpec region;
    region.shape = AnnularSector{10.0, HUGE_VAL, -std::numbers::pi / 4, std::numbers::pi / 4, 25.0};
    const ProbeReport rep =
        invariance_probe(registry_map("ex4.1", {{"lambda", 10.0}}), region, DriftMode::LogModulus, kProbeDelta);
    return {rep.pass() && rep.min_drift >= kProbeDelta,
            fmt("min_drift %.6g on %g samples", rep.min_drift, static_cast<double>(rep.n_samples))};
}

Outcome c10() {
    const ClaimResult r = check_backbone_E(1000);
    const double res = r.detail["a"]["max_residual"].get<double>();
    return {r.pass && res <= kBackboneTol, fmt("backbone passes, part (a) residual %.3g", res)};
}

Outcome c11() {
    std::string detail;
    bool ok = reference_bytes.size() == 3;
    const auto cases = verdict_cases();
    for (std::size_t c = 0; c < cases.size() && ok; ++c) {
        for (const int w : {1, 4, 8}) {
            const std::string b = raster_bytes(classify_grid(cases[c].map, annulus_grid(1024), {}, {w}));
            ok = ok && b == reference_bytes[c];
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s %016llx; ", cases[c].label,
                      static_cast<unsigned long long>(fnv1a(reference_bytes[c])));
        detail += buf;
    }
    return {ok, detail + "workers 1/4/8 identical"};
}

Outcome c12() {
    // Symmetry of ex4.2 under z -> -z and conjugation.
    const MapDescriptor m = registry_map("ex4.2");
    const R2Sequence seq(12);
    int asym = 0;
    for (std::size_t k = 0; k < 1000; ++k) {
        const auto [u, v] = seq(k);
        const Complex z = std::polar(std::exp(-4.0 + 8.0 * u), 2.0 * std::numbers::pi * v);
        const OrbitResult a = classify_point(m, z);
        for (const Complex t : {-z, std::conj(z)}) {
            const OrbitResult b = classify_point(m, t);
            asym += a.classification.index() != b.classification.index() ||
                    a.itinerary.to_string() != b.itinerary.to_string();
        }
    }
    // Derivative against central differences for every registry map.
    double dworst = 0.0;
    for (const auto& name : registry_names()) {
        const MapDescriptor mm = registry_map(name);
        for (const Complex z : sample_annulus(0.7, 1.4, 200, 3)) {
            const double h = 1e-6;
            const Complex fd = (eval_map(mm, z + h) - eval_map(mm, z - h)) / (2.0 * h);
            const Complex d = eval_derivative(mm, z);
            dworst = std::max(dworst, std::abs(d - fd) / std::max(1.0, std::abs(d)));
        }
    }
    // Cyclic multiplier invariance on the ex4.4 two-cycle.
    const MapDescriptor m4 = registry_map("ex4.4");
    const Cycle cyc = find_attractor(m4, Complex(0.99686, -0.0792), 2);
    double mworst = 0.0;
    const Complex m0 = cycle_multiplier(m4, cyc.points.at(0), 2);
    for (const Complex q : cyc.points) {
        mworst = std::max(mworst, std::abs(cycle_multiplier(m4, q, 2) - m0));
    }
    const bool ok = asym == 0 && dworst <= kDerivativeTol && mworst <= kMultiplierTol && cyc.points.size() == 2;
    return {ok, std::to_string(asym) + " asymmetric seeds of 1000, derivative error " + fmt("%.2g", dworst) +
                    ", multiplier spread " + fmt("%.2g", mworst)};
}

} // namespace

int main() {
    run(1, 1.0, c1);
    run(2, 1.0, c2);
    run(3, 5.0, c3);
    run(4, 5.0, c4);
    run(5, 30.0, c5);
    run(6, 600.0, c6);
    run(7, 0.0, c7);
    run(8, 10.0, c8);
    run(9, 2.0, c9);
    run(10, 5.0, c10);
    run(11, 0.0, c11);
    run(12, 0.0, c12);
    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
