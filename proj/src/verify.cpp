#include "cstar/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "cstar/errors.hpp"
#include "cstar/lift.hpp"
#include "cstar/orbit.hpp"
#include "cstar/sampling.hpp"

namespace cstar {

namespace {

constexpr double kPi = std::numbers::pi;

nlohmann::json pair(Complex z) { return {z.real(), z.imag()}; }

// Distance from w to iR and the lines Im w = k*pi.
double distance_to_E(Complex w) {
    const double dy = std::abs(w.imag() - kPi * std::round(w.imag() / kPi));
    return std::min(std::abs(w.real()), dy);
}

} // namespace

ClaimResult check_backbone_E(std::size_t n_samples, std::uint64_t seed) {
    if (n_samples < 100) {
        throw Error("check_backbone_E needs at least 100 samples");
    }
    const MapDescriptor m = registry_map("ex4.5");
    const LiftDescriptor lift(m);
    const R2Sequence seq(seed);

    // (a) the lift is real on E.
    double residual_a = 0.0;
    Complex worst_a;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double u = seq(k)[0];
        const int line = static_cast<int>(k % 8); // 0: iR, 1..7: Im w = (line - 4) * pi
        const Complex w = line == 0 ? Complex(0.0, -10.0 + 20.0 * u)
                                    : Complex(-10.0 + 20.0 * u, (line - 4) * kPi);
        const double im = std::abs(lift.eval(w).imag());
        if (im > residual_a) {
            residual_a = im;
            worst_a = w;
        }
    }

    // (b) away from E the lift is not real.
    double min_b = std::numeric_limits<double>::infinity();
    Complex arg_min_b;
    std::size_t taken = 0;
    for (std::size_t k = 0; taken < n_samples; ++k) {
        const auto [u, v] = seq(n_samples + k);
        const Complex w(-10.0 + 20.0 * u, -10.0 + 20.0 * v);
        if (distance_to_E(w) < 0.1) {
            continue;
        }
        ++taken;
        const double im = std::abs(lift.eval(w).imag());
        if (im < min_b) {
            min_b = im;
            arg_min_b = w;
        }
    }

    // (c) exp(E) away from the unit circle escapes with an all-INF tail.
    std::size_t escaping_inf = 0;
    nlohmann::json misses = nlohmann::json::array();
    for (std::size_t k = 0; k < n_samples; ++k) {
        const auto [u, v] = seq(2 * n_samples + k);
        const double x = (v < 0.5 ? -1.0 : 1.0) * (2.0 + 8.0 * u);
        // exp(x + i*n*pi) = (-1)^n e^x, built exactly on the real axis: any
        // rounding in the phase is amplified beyond recovery within a few
        // steps.
        const int line = static_cast<int>(k % 7) - 3;
        const Complex z((line % 2 == 0 ? 1.0 : -1.0) * std::exp(x), 0.0);
        const OrbitResult res = classify_point(m, z);
        const auto* e = std::get_if<Escaping>(&res.classification);
        if (e != nullptr && e->tail == Tail::AllInf) {
            ++escaping_inf;
        } else if (misses.size() < 16) {
            misses.push_back(pair(z));
        }
    }

    const bool pass_a = residual_a <= 1e-10;
    const bool pass_b = min_b > 0.0;
    const bool pass_c = escaping_inf == n_samples;
    ClaimResult out;
    out.id = "backbone-E";
    out.pass = pass_a && pass_b && pass_c;
    out.detail = {{"n_samples", n_samples},
                  {"a", {{"pass", pass_a}, {"max_residual", residual_a}, {"at", pair(worst_a)}}},
                  {"b", {{"pass", pass_b}, {"min_abs_im", min_b}, {"at", pair(arg_min_b)}}},
                  {"c",
                   {{"pass", pass_c}, {"escaping_all_inf", escaping_inf}, {"misses", misses}}}};
    return out;
}

ClaimResult check_blowing_up(const MapDescriptor& m, const Disc& seed_disc,
                             const std::vector<Complex>& targets, int n_max,
                             const BlowingUpOptions& opts) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    const auto n_disc = static_cast<double>(opts.n_disc);
    std::vector<Complex> pts;
    pts.reserve(opts.n_disc);
    for (std::size_t k = 0; k < opts.n_disc; ++k) {
        const double r = seed_disc.radius * std::sqrt((static_cast<double>(k) + 0.5) / n_disc);
        pts.push_back(seed_disc.center + std::polar(r, static_cast<double>(k) * golden));
    }

    std::vector<int> first_hit(targets.size(), -1);
    std::vector<double> closest(targets.size(), std::numeric_limits<double>::infinity());
    std::size_t remaining = targets.size();
    for (int n = 1; n <= n_max && remaining > 0 && !pts.empty(); ++n) {
        std::size_t kept = 0;
        for (const Complex z : pts) {
            Complex w;
            try {
                w = eval_map(m, z);
            } catch (const Error&) {
                continue;
            }
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || w == Complex(0.0, 0.0)) {
                continue;
            }
            pts[kept++] = w;
            for (std::size_t t = 0; t < targets.size(); ++t) {
                const double d = std::abs(w - targets[t]);
                closest[t] = std::min(closest[t], d);
                if (first_hit[t] < 0 && d <= opts.hit_tol) {
                    first_hit[t] = n;
                    --remaining;
                }
            }
        }
        pts.resize(kept);
    }

    nlohmann::json per = nlohmann::json::array();
    for (std::size_t t = 0; t < targets.size(); ++t) {
        per.push_back({{"target", pair(targets[t])},
                       {"first_hit", first_hit[t] < 0 ? nlohmann::json(nullptr)
                                                      : nlohmann::json(first_hit[t])},
                       {"closest", closest[t]}});
    }
    ClaimResult out;
    out.id = "blowing-up";
    out.pass = remaining == 0;
    out.detail = {{"map", m.name()},
                  {"disc", {{"center", pair(seed_disc.center)}, {"radius", seed_disc.radius}}},
                  {"n_disc", opts.n_disc},
                  {"hit_tol", opts.hit_tol},
                  {"n_max", n_max},
                  {"surviving_samples", pts.size()},
                  {"targets", per}};
    return out;
}

ClaimResult check_itinerary_partition(const MapDescriptor& m, std::size_t n_samples, int horizon,
                                      std::uint64_t seed) {
    if (horizon < 8) {
        throw Error("itinerary partition needs horizon >= 8");
    }
    const R2Sequence seq(seed);
    std::map<std::string, std::size_t> buckets;
    std::size_t escaping = 0;
    std::size_t assigned = 0;
    std::size_t truncated = 0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const auto [u, v] = seq(k);
        const Complex z = std::polar(std::exp(-4.0 + 8.0 * u), 2.0 * kPi * v);
        if (!std::holds_alternative<Escaping>(classify_point(m, z).classification)) {
            continue;
        }
        ++escaping;
        const ItineraryPrefix p = itinerary_prefix(m, z, horizon);
        std::string key = p.to_string();
        if (p.truncated) {
            key += '~';
            ++truncated;
        }
        ++buckets[key];
        ++assigned;
    }
    std::size_t covered = 0;
    std::size_t full_length = 0;
    for (const auto& [key, count] : buckets) {
        covered += count;
        if (key.back() != '~') {
            ++full_length;
        }
    }

    std::vector<std::pair<std::size_t, std::string>> top;
    for (const auto& [key, count] : buckets) {
        top.emplace_back(count, key);
    }
    std::sort(top.begin(), top.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    nlohmann::json top_j = nlohmann::json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(16, top.size()); ++i) {
        top_j.push_back({{"prefix", top[i].second}, {"count", top[i].first}});
    }

    ClaimResult out;
    out.id = "itinerary-partition";
    out.pass = covered == escaping && assigned == escaping;
    out.detail = {{"map", m.name()},
                  {"n_samples", n_samples},
                  {"horizon", horizon},
                  {"escaping", escaping},
                  {"buckets", buckets.size()},
                  {"full_length_buckets", full_length},
                  {"truncated", truncated},
                  {"top", top_j}};
    return out;
}

std::vector<std::string> claim_names() {
    return {"backbone-E", "blowing-up-ex4.4", "itinerary-partition-ex4.2",
            "itinerary-partition-ex4.3"};
}

ClaimResult run_claim(const std::string& name) {
    ClaimResult r;
    if (name == "backbone-E") {
        r = check_backbone_E(1000);
    } else if (name == "blowing-up-ex4.4") {
        r = check_blowing_up(registry_map("ex4.4"), {{1.0, 0.2}, 0.05},
                             {{2.0, 0.0}, {-2.0, 0.0}, {0.0, 0.5}}, 40);
    } else if (name == "itinerary-partition-ex4.2") {
        r = check_itinerary_partition(registry_map("ex4.2"), 10000, 8);
    } else if (name == "itinerary-partition-ex4.3") {
        r = check_itinerary_partition(registry_map("ex4.3"), 10000, 8);
    } else {
        throw Error("unknown claim '" + name + "'");
    }
    r.id = name;
    return r;
}

nlohmann::json claims_to_junit(const std::vector<ClaimResult>& results) {
    nlohmann::json cases = nlohmann::json::array();
    std::size_t failures = 0;
    for (const auto& r : results) {
        failures += r.pass ? 0 : 1;
        cases.push_back(
            {{"name", r.id}, {"status", r.pass ? "passed" : "failed"}, {"detail", r.detail}});
    }
    return {{"testsuite",
             {{"name", "cstar-verify"},
              {"tests", results.size()},
              {"failures", failures},
              {"testcases", cases}}}};
}

} // namespace cstar
