#include "cstar/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "cstar/errors.hpp"

namespace cstar {

Symbol symbol_of(const XComplex& z) noexcept {
    if (z.is_zero()) {
        return Symbol::Zero;
    }
    if (z.exponent() > -1000.0 && z.exponent() < 1000.0) {
        return std::abs(z.to_complex()) > 1.0 ? Symbol::Inf : Symbol::Zero;
    }
    return z.exponent() > 0.0 ? Symbol::Inf : Symbol::Zero;
}

std::string ItineraryPrefix::to_string() const {
    std::string s;
    s.reserve(symbols.size());
    for (const Symbol x : symbols) {
        s.push_back(x == Symbol::Inf ? '1' : '0');
    }
    return s;
}

std::optional<Alignment> align_itineraries(const ItineraryPrefix& a, const ItineraryPrefix& b,
                                           int min_overlap) {
    const int na = static_cast<int>(a.symbols.size());
    const int nb = static_cast<int>(b.symbols.size());
    for (int total = 0; total <= na + nb; ++total) {
        for (int l = 0; l <= total; ++l) {
            const int k = total - l;
            const int overlap = std::min(na - l, nb - k);
            if (overlap < min_overlap || overlap <= 0) {
                continue;
            }
            if (std::equal(a.symbols.begin() + l, a.symbols.begin() + l + overlap,
                           b.symbols.begin() + k)) {
                return Alignment{l, k, l == k};
            }
        }
    }
    return std::nullopt;
}

void OrbitOptions::validate() const {
    if (confirm_steps < 1 || max_iter < confirm_steps) {
        throw Error("orbit options need max_iter >= confirm_steps >= 1");
    }
    if (!(escape_log_radius > 0.0)) {
        throw Error("escape log radius must be positive");
    }
    if (!(cycle_tol > 0.0) || cycle_max_period < 1) {
        throw Error("cycle tolerance must be positive and cycle_max_period >= 1");
    }
}

const char* tail_name(Tail t) noexcept {
    switch (t) {
    case Tail::AllInf: return "ALL_INF";
    case Tail::AllZero: return "ALL_ZERO";
    case Tail::Mixed: return "MIXED";
    }
    return "?";
}

const char* reason_name(AmbiguousReason r) noexcept {
    return r == AmbiguousReason::MaxIter ? "MAX_ITER" : "NUMERIC";
}

namespace {

constexpr double kExponentResolution = 0x1p52;
constexpr std::size_t kItineraryCap = 4096;
constexpr std::int64_t kMaxOrbitIndex = std::int64_t{1} << 60;

// Outcome of reading the next iterate off the lift W = n log z + G(z) when
// f(z) itself is out of reach: |f(z)| = exp(Re W).
enum class LiftRead : std::uint8_t { Inf, Zero, Huge, Unknown };

LiftRead read_lift(const MapDescriptor& m, const XComplex& z, bool* real_w = nullptr) {
    if (!m.canonical()) {
        return LiftRead::Unknown;
    }
    try {
        const XComplex w = xlog(z);
        const XComplex g = m.exponent_program().eval_ext(z);
        const XComplex big = XComplex(static_cast<double>(m.canonical()->index)) * w + g;
        if (real_w != nullptr) {
            *real_w = big.mantissa().imag() == 0.0;
        }
        const double re = big.mantissa().real();
        if (std::abs(re) >= 1e-10) {
            return re > 0.0 ? LiftRead::Inf : LiftRead::Zero;
        }
        return big.exponent() >= 100.0 ? LiftRead::Huge : LiftRead::Unknown;
    } catch (const BeyondRangeError& e) {
        // Some term of G is itself beyond the extended range; its phase is
        // lost but |Re W| is astronomically large.
        return e.sign() > 0 ? LiftRead::Huge : LiftRead::Unknown;
    } catch (const Error&) {
        return LiftRead::Unknown;
    }
}

StepResult from_lift(const MapDescriptor& m, const XComplex& z) {
    StepResult r;
    bool real_w = false;
    const LiftRead read = read_lift(m, z, &real_w);
    r.positive_real = real_w && (read == LiftRead::Inf || read == LiftRead::Zero);
    switch (read) {
    case LiftRead::Inf:
        r.kind = StepResult::Kind::Terminal;
        r.terminal_symbol = Symbol::Inf;
        break;
    case LiftRead::Zero:
        r.kind = StepResult::Kind::Terminal;
        r.terminal_symbol = Symbol::Zero;
        break;
    case LiftRead::Huge:
        r.kind = StepResult::Kind::Terminal;
        r.symbol_known = false;
        break;
    case LiftRead::Unknown: break;
    }
    return r;
}

} // namespace

StepResult step_orbit(const MapDescriptor& m, const XComplex& z) {
    StepResult r;
    if (z.is_zero()) {
        return r;
    }
    if (std::abs(z.exponent()) >= kExponentResolution) {
        // The exponent no longer moves by small increments.
        return from_lift(m, z);
    }
    if (z.exponent() > -850.0 && z.exponent() < 850.0) {
        Complex f;
        if (m.program().eval_fast(z.to_complex(), f)) {
            const double a = std::max(std::abs(f.real()), std::abs(f.imag()));
            if (a > 1e-300 && a < 1e300) {
                r.kind = StepResult::Kind::Value;
                r.value = XComplex(f);
                return r;
            }
        }
    }
    try {
        r.value = m.program().eval_ext(z);
        if (!r.value.is_zero()) {
            r.kind = StepResult::Kind::Value;
            return r;
        }
        if (!m.canonical()) {
            // An exact zero from the extended evaluator means the image lies
            // below exp(-2^1000).
            r.kind = StepResult::Kind::Terminal;
            r.terminal_symbol = Symbol::Zero;
            return r;
        }
    } catch (const BeyondRangeError&) {
        // fall through to the lift
    } catch (const Error&) {
        return r;
    }
    return from_lift(m, z);
}

namespace {

Tail tail_of(const std::vector<Symbol>& s, int c) {
    const int n = static_cast<int>(s.size());
    const int from = std::max(0, n - c);
    bool inf = true;
    bool zero = true;
    for (int i = from; i < n; ++i) {
        inf = inf && s[static_cast<std::size_t>(i)] == Symbol::Inf;
        zero = zero && s[static_cast<std::size_t>(i)] == Symbol::Zero;
    }
    if (inf) {
        return Tail::AllInf;
    }
    return zero ? Tail::AllZero : Tail::Mixed;
}

bool increasing_tail(const std::vector<double>& v, int c) {
    const int n = static_cast<int>(v.size());
    const int from = std::max(0, n - c);
    for (int i = from + 1; i < n; ++i) {
        if (!(v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(i - 1)])) {
            return false;
        }
    }
    return true;
}

bool fits(const XComplex& z) { return z.exponent() > -1000.0 && z.exponent() < 1000.0; }

// A terminal whose lift is exactly real leaves the orbit on the positive
// real axis at one of its ends. For maps that are real on the positive
// axis the orbit stays there, and the next symbol is read off the lift at a
// proxy point 2^(+-2^60) of that end. nullopt when the map is not real or
// the sign cannot be read.
std::optional<Symbol> end_transition(const MapDescriptor& m, Symbol end) {
    if (!m.canonical()) {
        return std::nullopt;
    }
    const Program& g = m.exponent_program();
    try {
        if (g.eval(Complex(2.0, 0.0)).imag() != 0.0 || g.eval(Complex(0.5, 0.0)).imag() != 0.0) {
            return std::nullopt;
        }
    } catch (const Error&) {
        return std::nullopt;
    }
    const double k = end == Symbol::Inf ? 0x1p60 : -0x1p60;
    bool real_w = false;
    const LiftRead read = read_lift(m, XComplex::from_parts(Complex(1.0, 0.0), k), &real_w);
    if (!real_w || (read != LiftRead::Inf && read != LiftRead::Zero)) {
        return std::nullopt;
    }
    return read == LiftRead::Inf ? Symbol::Inf : Symbol::Zero;
}

// Index-one maps can creep back from near 0 (or infinity) very slowly when
// G is numerically constant there, e.g. f(z) ~ 2z. In lift coordinates
// the orbit is then w_{j+1} = w_j + g0, which is followed in closed form
// for as long as G stays at g0 on sampled points of the path and
// |log|z|| stays above L. Returns the number of steps taken (0 for none).
// Endpoints are formed as z exp(j g0), which commutes exactly with
// z -> -z and conjugation.
std::int64_t drift_jump(const MapDescriptor& m, const XComplex& z, double big_l, Complex& g0_out) {
    constexpr int kMinJump = 16;
    constexpr int kChecks = 4;
    if (!m.canonical() || m.canonical()->index != 1) {
        return 0;
    }
    const Program& g = m.exponent_program();
    Complex g0;
    try {
        const XComplex gx = g.eval_ext(z);
        if (!fits(gx)) {
            return 0;
        }
        g0 = gx.to_complex();
    } catch (const Error&) {
        return 0;
    }
    const double la = z.log_abs();
    const double d = g0.real();
    if (la * d >= 0.0 || std::abs(la) <= big_l) {
        return 0;
    }
    const double room = (std::abs(la) - big_l) / std::abs(d) - 1.0;
    if (!(room >= kMinJump)) {
        return 0;
    }
    const auto k = static_cast<std::int64_t>(std::min(room, 0x1p48));
    const double tol = 1e-13 * std::max(1.0, std::abs(g0));
    std::int64_t good = 0;
    for (int s = 1; s <= kChecks; ++s) {
        const std::int64_t j = k / kChecks * s + (s == kChecks ? k % kChecks : 0);
        if (j <= good) {
            continue;
        }
        try {
            const XComplex gj = g.eval_ext(z * xexp(XComplex(static_cast<double>(j) * g0)));
            if (!fits(gj) || std::abs(gj.to_complex() - g0) > tol) {
                break;
            }
        } catch (const Error&) {
            break;
        }
        good = j;
    }
    if (good < kMinJump) {
        return 0;
    }
    g0_out = g0;
    return good;
}

} // namespace

OrbitResult classify_point(const MapDescriptor& m, Complex z0, const OrbitOptions& opts) {
    if (z0 == Complex(0.0, 0.0)) {
        throw DomainError("cannot classify z0 = 0");
    }
    opts.validate();
    const int c = opts.confirm_steps;
    const int pmax = opts.cycle_max_period;
    const double big_l = opts.escape_log_radius;

    OrbitResult out;
    std::vector<Symbol>& sym = out.itinerary.symbols;
    sym.reserve(64);

    // The last c values of |log|z|| and the last c known symbols.
    std::vector<double> recent_v;
    std::vector<Symbol> recent_s;
    auto keep_last = [c](auto& buf, auto x) {
        buf.push_back(x);
        if (static_cast<int>(buf.size()) > c) {
            buf.erase(buf.begin());
        }
    };

    // Last pmax + 1 iterates that fit in double; NaN marks a gap.
    const Complex gap(std::numeric_limits<double>::quiet_NaN(), 0.0);
    std::vector<Complex> ring(static_cast<std::size_t>(pmax + 1), gap);
    auto ring_at = [&](std::int64_t n) -> Complex& {
        return ring[static_cast<std::size_t>(n % (pmax + 1))];
    };

    auto record = [&](const XComplex& x, double vx, std::int64_t copies) {
        const Symbol s = symbol_of(x);
        for (std::int64_t j = 0; j < std::min<std::int64_t>(copies, c); ++j) {
            keep_last(recent_v, vx);
            keep_last(recent_s, s);
        }
        const auto room = static_cast<std::int64_t>(kItineraryCap - sym.size());
        const std::int64_t stored = std::min(copies, room);
        sym.insert(sym.end(), static_cast<std::size_t>(stored), s);
        if (opts.store_iterates) {
            out.iterates.insert(out.iterates.end(), static_cast<std::size_t>(stored), x.to_complex());
        }
        if (stored < copies) {
            out.itinerary.truncated = true;
        }
    };

    XComplex z(z0);
    std::int64_t n = 0; // orbit index of z
    int evals = 0;
    int run = 0;
    int next_certify = 0;

    auto finish = [&](EscapeClassification cls) {
        out.steps_used = evals;
        out.orbit_length = n;
        out.classification = std::move(cls);
        return out;
    };
    auto escaped = [&] { return finish(Escaping{out.itinerary, tail_of(recent_s, c)}); };

    record(z, std::abs(z.log_abs()), 1);
    for (;;) {
        const double vn = recent_v.back();
        if (vn > big_l && n >= c - 1 && increasing_tail(recent_v, c)) {
            if (++run >= c) {
                return escaped();
            }
        } else {
            run = 0;
        }

        const Complex zd = fits(z) ? z.to_complex() : gap;
        ring_at(n) = zd;
        if (!std::isnan(zd.real()) && evals >= next_certify) {
            const double tol = opts.cycle_tol * std::max(1.0, std::abs(zd));
            for (int p = 1; p <= pmax && p <= n; ++p) {
                const Complex prev = ring_at(n - p);
                if (std::isnan(prev.real()) || std::abs(zd - prev) > tol) {
                    continue;
                }
                try {
                    Cycle cyc = find_attractor(m, zd, p);
                    double near = std::numeric_limits<double>::infinity();
                    for (const Complex q : cyc.points) {
                        near = std::min(near, std::abs(q - zd));
                    }
                    if (near <= 1e-6 && std::abs(cyc.multiplier) < 1.0) {
                        return finish(Attracted{std::move(cyc.points), cyc.multiplier});
                    }
                } catch (const Error&) {
                }
                next_certify = evals + 16;
                break;
            }
        }

        if (evals >= opts.max_iter || n >= kMaxOrbitIndex) {
            return finish(Ambiguous{AmbiguousReason::MaxIter});
        }
        ++evals;

        if (vn > big_l && run == 0) {
            Complex g0;
            const std::int64_t k = drift_jump(m, z, big_l, g0);
            if (k > 0) {
                const XComplex zk = z * xexp(XComplex(static_cast<double>(k) * g0));
                // All skipped iterates share the symbol of the endpoint.
                record(zk, std::abs(z.log_abs() + static_cast<double>(k) * g0.real()), k);
                std::fill(ring.begin(), ring.end(), gap);
                z = zk;
                n += k;
                continue;
            }
        }

        const StepResult st = step_orbit(m, z);
        if (st.kind == StepResult::Kind::Value) {
            z = st.value;
            ++n;
            record(z, std::abs(z.log_abs()), 1);
            continue;
        }
        if (st.kind == StepResult::Kind::Terminal) {
            // The next iterate lies beyond the extended range: |log|z|| is
            // effectively infinite. Its symbol is kept only when the lift
            // decides it.
            ++n;
            keep_last(recent_v, std::numeric_limits<double>::infinity());
            if (st.symbol_known) {
                keep_last(recent_s, st.terminal_symbol);
                if (sym.size() < kItineraryCap) {
                    sym.push_back(st.terminal_symbol);
                    if (opts.store_iterates) {
                        out.iterates.push_back(st.terminal_symbol == Symbol::Inf
                                                   ? Complex(HUGE_VAL, 0.0)
                                                   : Complex(0.0, 0.0));
                    }
                }
                if (st.positive_real) {
                    // Follow the orbit between the ends of the positive axis
                    // for c more symbols. These steps carry no magnitude, so
                    // only the symbol window is extended.
                    Symbol at = st.terminal_symbol;
                    for (int j = 0; j < c; ++j) {
                        const std::optional<Symbol> next = end_transition(m, at);
                        if (!next) {
                            break;
                        }
                        at = *next;
                        ++n;
                        keep_last(recent_s, at);
                        if (sym.size() < kItineraryCap) {
                            sym.push_back(at);
                            if (opts.store_iterates) {
                                out.iterates.push_back(at == Symbol::Inf ? Complex(HUGE_VAL, 0.0)
                                                                         : Complex(0.0, 0.0));
                            }
                        }
                    }
                }
            } else {
                out.itinerary.truncated = true;
            }
            if (increasing_tail(recent_v, c)) {
                return escaped();
            }
            return finish(Ambiguous{AmbiguousReason::Numeric});
        }
        return finish(Ambiguous{AmbiguousReason::Numeric});
    }
}

ItineraryPrefix itinerary_prefix(const MapDescriptor& m, Complex z0, int n) {
    if (z0 == Complex(0.0, 0.0)) {
        throw DomainError("itinerary of z0 = 0");
    }
    ItineraryPrefix out;
    XComplex z(z0);
    while (static_cast<int>(out.symbols.size()) < n) {
        out.symbols.push_back(symbol_of(z));
        if (static_cast<int>(out.symbols.size()) == n) {
            break;
        }
        const StepResult st = step_orbit(m, z);
        if (st.kind == StepResult::Kind::Value) {
            z = st.value;
            continue;
        }
        if (st.kind == StepResult::Kind::Terminal && st.symbol_known) {
            out.symbols.push_back(st.terminal_symbol);
            Symbol at = st.terminal_symbol;
            while (st.positive_real && static_cast<int>(out.symbols.size()) < n) {
                const std::optional<Symbol> next = end_transition(m, at);
                if (!next) {
                    break;
                }
                at = *next;
                out.symbols.push_back(at);
            }
        }
        out.truncated = static_cast<int>(out.symbols.size()) < n;
        break;
    }
    return out;
}

namespace {

// f^p at z with derivative by the chain rule.
Dual iterate_dual(const MapDescriptor& m, Complex z, int p) {
    Dual acc = Dual::variable(z);
    for (int i = 0; i < p; ++i) {
        if (acc.v == Complex(0.0, 0.0)) {
            throw DomainError("orbit hits z = 0");
        }
        const Dual step = m.program().eval_dual(acc.v);
        if (!detail::finite(step.v) || !detail::finite(step.d)) {
            throw OverflowError("iterate overflows during Newton step");
        }
        acc = Dual{step.v, step.d * acc.d};
    }
    return acc;
}

Complex iterate(const MapDescriptor& m, Complex z, int p) {
    for (int i = 0; i < p; ++i) {
        z = eval_map(m, z);
    }
    return z;
}

} // namespace

Complex cycle_multiplier(const MapDescriptor& m, Complex z, int period) {
    return iterate_dual(m, z, period).d;
}

Cycle find_attractor(const MapDescriptor& m, Complex guess, int period) {
    if (period < 1) {
        throw Error("period must be at least 1");
    }
    if (guess == Complex(0.0, 0.0)) {
        throw DomainError("Newton guess at z = 0");
    }
    Complex z = guess;
    bool converged = false;
    try {
        for (int it = 0; it <= 100; ++it) {
            const Dual fp = iterate_dual(m, z, period);
            const Complex r = fp.v - z;
            if (std::abs(r) <= 1e-12 * std::max(1.0, std::abs(z))) {
                converged = true;
                break;
            }
            if (it == 100) {
                break;
            }
            const Complex den = fp.d - 1.0;
            if (std::abs(den) < 1e-14) {
                throw DegenerateDerivative("Newton denominator (f^p)'(z) - 1 vanishes");
            }
            z -= r / den;
            if (!detail::finite(z) || z == Complex(0.0, 0.0)) {
                break;
            }
        }
    } catch (const DegenerateDerivative&) {
        throw;
    } catch (const Error&) {
        converged = false;
    }
    if (!converged) {
        throw NoConvergence("Newton on f^p(z) - z did not converge in 100 steps");
    }
    int p = period;
    for (int d = 1; d < period; ++d) {
        if (period % d != 0) {
            continue;
        }
        if (std::abs(iterate(m, z, d) - z) <= 1e-9 * std::max(1.0, std::abs(z))) {
            p = d;
            break;
        }
    }
    Cycle out;
    out.points.reserve(static_cast<std::size_t>(p));
    Complex w = z;
    for (int i = 0; i < p; ++i) {
        out.points.push_back(w);
        w = eval_map(m, w);
    }
    out.multiplier = cycle_multiplier(m, z, p);
    return out;
}

} // namespace cstar
