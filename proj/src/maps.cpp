#include "cstar/maps.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cstar/errors.hpp"
#include "cstar/sampling.hpp"

namespace cstar {

MapDescriptor::MapDescriptor(std::string name, Expr expr, std::optional<CanonicalForm> canonical,
                             ParamTable params)
    : name_(std::move(name)),
      expr_(std::move(expr)),
      canonical_(std::move(canonical)),
      params_(std::move(params)),
      program_(expr_) {
    if (canonical_) {
        exponent_program_ = Program(canonical_->exponent);
    }
}

MapDescriptor MapDescriptor::from_text(std::string name, std::string_view expr,
                                       std::optional<std::pair<int, std::string>> canonical,
                                       ParamTable params) {
    Expr e = Expr::parse(expr, params);
    std::optional<CanonicalForm> c;
    if (canonical) {
        c = CanonicalForm{canonical->first, Expr::parse(canonical->second, params)};
    }
    return {std::move(name), std::move(e), std::move(c), std::move(params)};
}

Complex eval_map(const MapDescriptor& m, Complex z) {
    if (z == Complex(0.0, 0.0)) {
        throw DomainError("map evaluated at z = 0");
    }
    return m.program().eval(z);
}

Complex eval_derivative(const MapDescriptor& m, Complex z) {
    if (z == Complex(0.0, 0.0)) {
        throw DomainError("derivative evaluated at z = 0");
    }
    return m.program().eval_dual(z).d;
}

Complex eval_canonical(const MapDescriptor& m, Complex z) {
    if (!m.canonical()) {
        throw NoCanonicalForm("map '" + m.name() + "' has no canonical form");
    }
    if (z == Complex(0.0, 0.0)) {
        throw DomainError("map evaluated at z = 0");
    }
    const Complex g = m.exponent_program().eval(z);
    const int n = m.canonical()->index;
    const Complex zn = n >= 0 ? std::pow(z, n) : 1.0 / std::pow(z, -n);
    const Complex v = zn * std::exp(g);
    if (!detail::finite(v)) {
        throw OverflowError("canonical form overflows at sample point");
    }
    return v;
}

XComplex eval_map_ext(const MapDescriptor& m, const XComplex& z) {
    if (z.is_zero()) {
        throw DomainError("map evaluated at z = 0");
    }
    return m.program().eval_ext(z);
}

namespace {

struct ProductReader {
    int index = 0;
    std::vector<Expr> terms;

    static Expr rebuild(const ExprNode& n) {
        switch (n.op) {
        case OpCode::Var: return Expr::variable();
        case OpCode::Const: return Expr::constant(n.value);
        case OpCode::Param: return Expr::param(n.name, n.value);
        default: {
            std::vector<Expr> args;
            for (const auto& a : n.args) {
                args.push_back(rebuild(*a));
            }
            return Expr::apply(n.op, std::move(args), n.power);
        }
        }
    }

    void push(Expr t, int sign) {
        terms.push_back(sign > 0 ? std::move(t) : Expr::apply(OpCode::Neg, {std::move(t)}));
    }

    bool read(const ExprNode& n, int sign) {
        switch (n.op) {
        case OpCode::Var: index += sign; return true;
        case OpCode::Const:
            if (n.value == Complex(0.0, 0.0)) {
                return false;
            }
            if (n.value != Complex(1.0, 0.0)) {
                push(Expr::apply(OpCode::Log, {Expr::constant(n.value)}), sign);
            }
            return true;
        case OpCode::Param:
            if (n.value == Complex(0.0, 0.0)) {
                return false;
            }
            push(Expr::apply(OpCode::Log, {Expr::param(n.name, n.value)}), sign);
            return true;
        case OpCode::Exp: push(rebuild(*n.args[0]), sign); return true;
        case OpCode::Neg:
            push(Expr::constant({0.0, std::numbers::pi}), sign);
            return read(*n.args[0], sign);
        case OpCode::Mul:
            for (const auto& a : n.args) {
                if (!read(*a, sign)) {
                    return false;
                }
            }
            return true;
        case OpCode::Div:
            if (!read(*n.args[0], sign)) {
                return false;
            }
            for (std::size_t i = 1; i < n.args.size(); ++i) {
                if (!read(*n.args[i], -sign)) {
                    return false;
                }
            }
            return true;
        case OpCode::Pow: {
            const ExprNode& base = *n.args[0];
            if (base.op == OpCode::Var) {
                index += sign * n.power;
                return true;
            }
            if (base.op == OpCode::Exp) {
                push(Expr::apply(OpCode::Mul, {Expr::constant({static_cast<double>(n.power), 0.0}),
                                               rebuild(*base.args[0])}),
                     sign);
                return true;
            }
            return false;
        }
        default: return false;
        }
    }
};

} // namespace

std::optional<CanonicalForm> derive_canonical(const Expr& expr) {
    ProductReader reader;
    if (!reader.read(expr.root(), 1)) {
        return std::nullopt;
    }
    return CanonicalForm{reader.index, Expr::sum(std::move(reader.terms))};
}

CanonicalForm canonical_form(const MapDescriptor& m) {
    std::optional<CanonicalForm> form = m.canonical();
    if (!form) {
        form = derive_canonical(m.expr());
    }
    if (!form) {
        throw NoCanonicalForm("map '" + m.name() + "' has no declared or derivable canonical form");
    }
    const MapDescriptor probe(m.name(), m.expr(), form, m.params());
    int checked = 0;
    for (const Complex z : sample_annulus(0.5, 2.0, 100, 0x5eedULL)) {
        Complex direct;
        Complex via;
        try {
            direct = eval_map(probe, z);
            via = eval_canonical(probe, z);
        } catch (const OverflowError&) {
            continue;
        }
        ++checked;
        const double scale = std::abs(direct);
        if (!(std::abs(direct - via) <= 1e-10 * scale)) {
            std::ostringstream os;
            os.precision(17);
            os << "canonical form of '" << m.name() << "' disagrees with the expression at z = "
               << z << ": " << direct << " vs " << via;
            throw VerificationFailed(os.str());
        }
    }
    if (checked == 0) {
        throw VerificationFailed("canonical form of '" + m.name() + "' could not be sampled");
    }
    return *form;
}

namespace {

struct RegistryEntry {
    std::string_view name;
    std::string_view expr;
    int index;
    std::string_view exponent;
    std::array<std::pair<std::string_view, Complex>, 2> defaults;
    std::size_t n_defaults;
};

const std::array<RegistryEntry, 6>& registry() {
    static const std::array<RegistryEntry, 6> entries{{
        {"ex4.1", "(* lambda z (exp (/ (exp (- z)) z)))", 1,
         "(+ (log lambda) (/ (exp (- z)) z))", {{{"lambda", {10.0, 0.0}}, {}}}, 1},
        {"ex4.2", "(* 2 z (exp (+ (^ z 2) (exp (- (^ z -4))))))", 1,
         "(+ (log 2) (^ z 2) (exp (- (^ z -4))))", {}, 0},
        {"ex4.2-axis", "(* 2 z (exp (+ (- (^ z 2)) (exp (- (^ z -4))))))", 1,
         "(+ (log 2) (- (^ z 2)) (exp (- (^ z -4))))", {}, 0},
        {"ex4.3", "(exp (* 0.3 (+ z (^ z -1))))", 0, "(* 0.3 (+ z (^ z -1)))", {}, 0},
        {"ex4.4", "(* z (exp (* i alpha)) (exp (/ (* beta (- z (^ z -1))) 2)))", 1,
         "(+ (* i alpha) (/ (* beta (- z (^ z -1))) 2))",
         {{{"alpha", {3.1, 0.0}}, {"beta", {0.8, 0.0}}}}, 2},
        {"ex4.5", "(exp (* 0.5 (+ z (^ z -1))))", 0, "(* 0.5 (+ z (^ z -1)))", {}, 0},
    }};
    return entries;
}

} // namespace

std::vector<std::string> registry_names() {
    std::vector<std::string> out;
    for (const auto& e : registry()) {
        out.emplace_back(e.name);
    }
    return out;
}

MapDescriptor registry_map(std::string_view name, const ParamTable& overrides) {
    for (const auto& e : registry()) {
        if (e.name != name) {
            continue;
        }
        ParamTable params;
        for (std::size_t i = 0; i < e.n_defaults; ++i) {
            params.emplace(std::string(e.defaults[i].first), e.defaults[i].second);
        }
        for (const auto& [k, v] : overrides) {
            auto it = params.find(k);
            if (it == params.end()) {
                throw UnknownParameter("map '" + std::string(name) + "' has no parameter '" + k + "'");
            }
            it->second = v;
        }
        return MapDescriptor::from_text(std::string(e.name), e.expr,
                                        std::make_pair(e.index, std::string(e.exponent)),
                                        std::move(params));
    }
    throw UnknownMap("unknown registry map '" + std::string(name) + "'");
}

nlohmann::json map_to_json(const MapDescriptor& m) {
    nlohmann::json j;
    j["name"] = m.name();
    j["expr"] = m.expr().to_sexpr();
    if (m.canonical()) {
        j["canonical"] = {{"n", m.canonical()->index}, {"G", m.canonical()->exponent.to_sexpr()}};
    } else {
        j["canonical"] = nullptr;
    }
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : m.params()) {
        params[k] = {v.real(), v.imag()};
    }
    j["params"] = params;
    return j;
}

MapDescriptor map_from_json(const nlohmann::json& j) {
    try {
        ParamTable params;
        if (j.contains("params") && !j.at("params").is_null()) {
            for (const auto& [k, v] : j.at("params").items()) {
                if (v.is_number()) {
                    params.emplace(k, Complex(v.get<double>(), 0.0));
                } else {
                    params.emplace(k, Complex(v.at(0).get<double>(), v.at(1).get<double>()));
                }
            }
        }
        std::optional<std::pair<int, std::string>> canonical;
        if (j.contains("canonical") && !j.at("canonical").is_null()) {
            canonical = std::make_pair(j.at("canonical").at("n").get<int>(),
                                       j.at("canonical").at("G").get<std::string>());
        }
        return MapDescriptor::from_text(j.at("name").get<std::string>(),
                                        j.at("expr").get<std::string>(), canonical,
                                        std::move(params));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed map descriptor: ") + e.what());
    }
}

MapDescriptor load_map_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UnknownMap("cannot open map descriptor '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid JSON in '" + path + "': " + e.what());
    }
    return map_from_json(j);
}

std::uint64_t descriptor_hash(const MapDescriptor& m) {
    const std::string text = map_to_json(m).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

MapDescriptor resolve_map(std::string_view name_or_path, const ParamTable& overrides) {
    for (const auto& e : registry()) {
        if (e.name == name_or_path) {
            return registry_map(name_or_path, overrides);
        }
    }
    MapDescriptor loaded = load_map_file(std::string(name_or_path));
    if (overrides.empty()) {
        return loaded;
    }
    // Re-parse with overridden parameter values.
    nlohmann::json j = map_to_json(loaded);
    for (const auto& [k, v] : overrides) {
        if (!j["params"].contains(k)) {
            throw UnknownParameter("map '" + loaded.name() + "' has no parameter '" + k + "'");
        }
        j["params"][k] = {v.real(), v.imag()};
    }
    return map_from_json(j);
}

} // namespace cstar
