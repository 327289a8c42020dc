#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "cstar/errors.hpp"
#include "cstar/orbit.hpp"
#include "cstar/sampling.hpp"
#include "oracles.hpp"

using namespace cstar;
using boost::multiprecision::cpp_bin_float_50;

namespace {

std::string word(const MapDescriptor& m, Complex z, int n) {
    return itinerary_prefix(m, z, n).to_string();
}

int kind(const OrbitResult& r) { return static_cast<int>(r.classification.index()); }

} // namespace

TEST_CASE("itinerary of 0.1 under ex4.2 against a 50-digit orbit") {
    // Real orbit of f(x) = 2x exp(x^2 + exp(-x^-4)); the exponent range of
    // cpp_bin_float is wide enough to hold every iterate used here.
    cpp_bin_float_50 x = cpp_bin_float_50(1) / 10;
    std::string want;
    for (int i = 0; i < 6; ++i) {
        want.push_back(x > 1 ? '1' : '0');
        x = 2 * x * exp(x * x + exp(-1 / (x * x * x * x)));
    }
    CHECK(want == "000111");
    CHECK(word(registry_map("ex4.2"), Complex(0.1, 0.0), 6) == want);
}

TEST_CASE("real points escape under ex4.2") {
    const MapDescriptor m = registry_map("ex4.2");
    for (const double x : {2.0, -2.0, 0.3, -0.05, 7.5}) {
        const OrbitResult r = classify_point(m, Complex(x, 0.0));
        const auto* e = std::get_if<Escaping>(&r.classification);
        REQUIRE(e != nullptr);
        CHECK(e->tail == Tail::AllInf);
        CHECK(r.steps_used <= OrbitOptions{}.max_iter);
    }
    CHECK_THROWS_AS(classify_point(m, Complex(0.0, 0.0)), DomainError);
}

TEST_CASE("fixed point of the axis map against bisection") {
    const auto g = [](double y) { return std::log(2.0) - y * y + std::exp(-1.0 / std::pow(y, 4)); };
    const double y0 = oracle::bisect(g, 0.5, 2.0);
    const Cycle c = find_attractor(registry_map("ex4.2-axis"), Complex(1.0, 0.0), 1);
    REQUIRE(c.points.size() == 1);
    CHECK(std::abs(c.points[0] - Complex(y0, 0.0)) <= 1e-12);
    CHECK(y0 == doctest::Approx(1.087).epsilon(1e-3));
    // f' = 1 + y G'(y) at a fixed point of 2y exp(G(y)).
    const double dg = -2.0 * y0 + 4.0 * std::pow(y0, -5) * std::exp(-std::pow(y0, -4));
    CHECK(std::abs(c.multiplier - Complex(1.0 + y0 * dg, 0.0)) <= 1e-10);
    CHECK(std::abs(c.multiplier) < 1.0);
}

TEST_CASE("attracting fixed point of ex4.3 against bisection") {
    const auto g = [](double x) { return x - std::exp(0.3 * (x + 1.0 / x)); };
    const double x0 = oracle::bisect(g, 1.5, 3.0);
    CHECK(x0 == doctest::Approx(2.2373503459017945).epsilon(1e-14));
    const Cycle c = find_attractor(registry_map("ex4.3"), Complex(2.0, 0.1), 1);
    CHECK(std::abs(c.points[0] - Complex(x0, 0.0)) <= 1e-12);
    CHECK(std::abs(c.multiplier - Complex(0.3 * (x0 - 1.0 / x0), 0.0)) <= 1e-10);
}

TEST_CASE("imaginary axis is attracted to +-i y0 under ex4.2") {
    const MapDescriptor m = registry_map("ex4.2");
    const double y0 = find_attractor(registry_map("ex4.2-axis"), Complex(1.0, 0.0), 1).points[0].real();
    for (const double y : {0.3, 1.0, 2.5, -0.7, -4.0}) {
        const OrbitResult r = classify_point(m, Complex(0.0, y));
        const auto* a = std::get_if<Attracted>(&r.classification);
        REQUIRE(a != nullptr);
        REQUIRE(a->cycle.size() == 1);
        CHECK(std::abs(a->cycle[0] - Complex(0.0, y > 0 ? y0 : -y0)) <= 1e-9);
    }
}

TEST_CASE("period reduction and Newton failures") {
    const MapDescriptor m = registry_map("ex4.3");
    const Cycle c = find_attractor(m, Complex(2.2, 0.0), 3);
    CHECK(c.points.size() == 1);
    CHECK_THROWS_AS(find_attractor(m, Complex(0.0, 0.0), 1), DomainError);
}

TEST_CASE("cyclic multiplier invariance on the ex4.4 two-cycle") {
    const MapDescriptor m = registry_map("ex4.4");
    const OrbitResult r = classify_point(m, Complex(1.0, 0.2));
    const auto* a = std::get_if<Attracted>(&r.classification);
    REQUIRE(a != nullptr);
    REQUIRE(a->cycle.size() == 2);
    CHECK(std::abs(std::abs(a->cycle[0]) - 1.0) <= 1e-12);
    const Complex m0 = cycle_multiplier(m, a->cycle[0], 2);
    const Complex m1 = cycle_multiplier(m, a->cycle[1], 2);
    CHECK(std::abs(m0 - m1) <= 1e-10 * std::abs(m0));
    CHECK(std::abs(m0) < 1.0);
    // The product of f' along the cycle, with f' from the closed form.
    Complex prod(1.0, 0.0);
    for (const Complex q : a->cycle) {
        prod *= 1.0 + 0.8 * (q + 1.0 / q) / 2.0;
    }
    CHECK(std::abs(prod - m0) <= 1e-10);
}

TEST_CASE("ex4.2 orbits are symmetric under z -> -z and conjugation") {
    const MapDescriptor m = registry_map("ex4.2");
    const R2Sequence seq(99);
    for (std::size_t k = 0; k < 200; ++k) {
        const auto [u, v] = seq(k);
        const Complex z = std::polar(std::exp(-2.0 + 4.0 * u), 2.0 * std::numbers::pi * v);
        const OrbitResult base = classify_point(m, z);
        for (const Complex t : {-z, std::conj(z), -std::conj(z)}) {
            const OrbitResult r = classify_point(m, t);
            CHECK(kind(r) == kind(base));
            CHECK(r.itinerary.to_string() == base.itinerary.to_string());
            CHECK(r.steps_used == base.steps_used);
        }
    }
}

TEST_CASE("per-step symbols agree with the sign of the lift") {
    const R2Sequence seq(5);
    for (const auto& n : registry_names()) {
        const MapDescriptor m = registry_map(n);
        std::size_t compared = 0;
        for (std::size_t k = 0; k < 100; ++k) {
            const auto [u, v] = seq(k);
            XComplex z(std::polar(std::exp(-3.0 + 6.0 * u), 2.0 * std::numbers::pi * v));
            for (int step = 0; step < 40; ++step) {
                const StepResult st = step_orbit(m, z);
                if (st.kind != StepResult::Kind::Value || z.exponent() > 1000 || z.exponent() < -1000) {
                    break;
                }
                const Complex w = std::log(z.to_complex());
                const Complex big = oracle::lift(n, w);
                if (std::isfinite(big.real()) && std::abs(big.real()) >= 1e-12) {
                    CHECK((big.real() > 0.0) == (symbol_of(st.value) == Symbol::Inf));
                    ++compared;
                }
                z = st.value;
            }
        }
        CHECK(compared > 100);
    }
}

TEST_CASE("escape declaration follows monotone growth") {
    const MapDescriptor m = registry_map("ex4.3");
    OrbitOptions o;
    o.store_iterates = true;
    const R2Sequence seq(8);
    int escaping = 0;
    for (std::size_t k = 0; k < 300; ++k) {
        const auto [u, v] = seq(k);
        const Complex z = std::polar(std::exp(-4.0 + 8.0 * u), 2.0 * std::numbers::pi * v);
        const OrbitResult r = classify_point(m, z, o);
        if (const auto* e = std::get_if<Escaping>(&r.classification)) {
            ++escaping;
            const std::string w = r.itinerary.to_string();
            if (e->tail == Tail::AllInf) {
                CHECK(w.substr(w.size() - 3) == "111");
            } else if (e->tail == Tail::AllZero) {
                CHECK(w.substr(w.size() - 3) == "000");
            }
        }
    }
    CHECK(escaping > 0);
}

TEST_CASE("options are validated") {
    OrbitOptions o;
    o.confirm_steps = 0;
    CHECK_THROWS_AS(o.validate(), Error);
    o = {};
    o.max_iter = 2;
    CHECK_THROWS_AS(classify_point(registry_map("ex4.3"), Complex(1.0, 0.0), o), Error);
    o = {};
    o.escape_log_radius = 0.0;
    CHECK_THROWS_AS(o.validate(), Error);
}

TEST_CASE("budget exhaustion is reported as MAX_ITER") {
    // A rotation never escapes and has no attracting cycle.
    const MapDescriptor rot = MapDescriptor::from_text("rotation", "(* z (exp 1i))", std::nullopt, {});
    const OrbitResult r = classify_point(rot, Complex(0.5, 0.5));
    const auto* a = std::get_if<Ambiguous>(&r.classification);
    REQUIRE(a != nullptr);
    CHECK(a->reason == AmbiguousReason::MaxIter);
    CHECK(r.steps_used == 500);
}

TEST_CASE("itinerary alignment") {
    ItineraryPrefix a;
    ItineraryPrefix b;
    for (const char c : std::string("0011111")) {
        a.symbols.push_back(c == '1' ? Symbol::Inf : Symbol::Zero);
    }
    for (const char c : std::string("11111")) {
        b.symbols.push_back(c == '1' ? Symbol::Inf : Symbol::Zero);
    }
    const auto al = align_itineraries(a, b, 3);
    REQUIRE(al);
    CHECK(al->l == 2);
    CHECK(al->k == 0);
    CHECK_FALSE(al->immediate);
    const auto self = align_itineraries(a, a, 3);
    REQUIRE(self);
    CHECK(self->immediate);
    ItineraryPrefix zeros;
    zeros.symbols.assign(5, Symbol::Zero);
    CHECK_FALSE(align_itineraries(b, zeros, 1));
}

TEST_CASE("orbits beyond double range keep their symbols") {
    // f(30) = 60 e^900 is beyond double; ex4.2 keeps following it.
    const ItineraryPrefix p = itinerary_prefix(registry_map("ex4.2"), Complex(30.0, 0.0), 4);
    CHECK(p.to_string() == "1111");
}
