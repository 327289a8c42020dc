#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cstar/maps.hpp"

namespace cstar {

/// Essential-itinerary symbol: ZERO for |z| <= 1, INF for |z| > 1.
enum class Symbol : std::uint8_t { Zero = 0, Inf = 1 };

Symbol symbol_of(const XComplex& z) noexcept;

struct ItineraryPrefix {
    std::vector<Symbol> symbols;
    int start_index = 0;
    /// Set when the orbit could not be followed for the requested length.
    bool truncated = false;

    /// '0' for ZERO, '1' for INF.
    [[nodiscard]] std::string to_string() const;
};

/// Shift offsets (l, k) with a[l + j] == b[k + j] over the rest of the
/// observed window. `immediate` holds when l == k.
struct Alignment {
    int l = 0;
    int k = 0;
    bool immediate = false;
};

/// Smallest l + k (ties broken by smaller l) for which the shifted words
/// agree on an overlap of at least `min_overlap` symbols.
std::optional<Alignment> align_itineraries(const ItineraryPrefix& a, const ItineraryPrefix& b,
                                           int min_overlap);

struct OrbitOptions {
    /// Budget of map evaluations. A closed-form jump through a slow drift
    /// regime counts as one evaluation.
    int max_iter = 500;
    double escape_log_radius = 25.0;
    int confirm_steps = 3;
    double cycle_tol = 1e-9;
    int cycle_max_period = 8;
    bool store_iterates = false;

    /// Throws Error when the invariants max_iter >= confirm_steps >= 1 and
    /// L > 0 do not hold.
    void validate() const;
};

enum class Tail : std::uint8_t { AllInf, AllZero, Mixed };
enum class AmbiguousReason : std::uint8_t { MaxIter, Numeric };

struct Escaping {
    ItineraryPrefix itinerary;
    Tail tail = Tail::AllInf;
};

struct Attracted {
    std::vector<Complex> cycle;
    Complex multiplier;
};

struct Ambiguous {
    AmbiguousReason reason = AmbiguousReason::MaxIter;
};

using EscapeClassification = std::variant<Escaping, Attracted, Ambiguous>;

struct OrbitResult {
    EscapeClassification classification;
    /// Itinerary of the orbit (also for non-escaping orbits), capped at
    /// 4096 symbols with the truncation flag set beyond that.
    ItineraryPrefix itinerary;
    /// Filled only with OrbitOptions::store_iterates; values beyond double
    /// range are saturated.
    std::vector<Complex> iterates;
    /// Map evaluations spent, at most max_iter.
    int steps_used = 0;
    /// Orbit index of the last iterate reached.
    std::int64_t orbit_length = 0;
};

/// Throws DomainError for z0 = 0.
OrbitResult classify_point(const MapDescriptor& m, Complex z0, const OrbitOptions& opts = {});

ItineraryPrefix itinerary_prefix(const MapDescriptor& m, Complex z0, int n);

struct Cycle {
    std::vector<Complex> points;
    Complex multiplier;
};

/// Newton on f^p(z) - z. The returned cycle has its exact (possibly smaller)
/// period and starts at the root.
Cycle find_attractor(const MapDescriptor& m, Complex guess, int period);

/// (f^p)'(z) by the chain rule along the orbit of z.
Complex cycle_multiplier(const MapDescriptor& m, Complex z, int period);

const char* tail_name(Tail t) noexcept;
const char* reason_name(AmbiguousReason r) noexcept;

/// One step of the extended-range iteration. Exposed for tests and tools.
struct StepResult {
    enum class Kind : std::uint8_t { Value, Terminal, Failed } kind = Kind::Failed;
    XComplex value;
    /// For Terminal: the symbol of the iterate that left the extended range,
    /// when its sign could be read off the lift.
    Symbol terminal_symbol = Symbol::Inf;
    bool symbol_known = true;
    /// For Terminal: the lift is exactly real, so the iterate is a positive
    /// real number at the end given by terminal_symbol.
    bool positive_real = false;
};

StepResult step_orbit(const MapDescriptor& m, const XComplex& z);

} // namespace cstar
