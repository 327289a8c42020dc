#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cstar/expr.hpp"

namespace cstar {

/// f(z) = z^index * exp(exponent(z)) with the exponent holomorphic on C*.
struct CanonicalForm {
    int index = 0;
    Expr exponent;
};

/// A transcendental self-map of the punctured plane.
///
/// Immutable once built; the compiled programs are shared read-only, so a
/// descriptor can be evaluated concurrently from any number of threads.
class MapDescriptor {
public:
    MapDescriptor(std::string name, Expr expr, std::optional<CanonicalForm> canonical,
                  ParamTable params);

    /// Parses `expr` and, if given, the canonical exponent against `params`.
    static MapDescriptor from_text(std::string name, std::string_view expr,
                                   std::optional<std::pair<int, std::string>> canonical,
                                   ParamTable params);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const Expr& expr() const noexcept { return expr_; }
    [[nodiscard]] const std::optional<CanonicalForm>& canonical() const noexcept { return canonical_; }
    [[nodiscard]] const ParamTable& params() const noexcept { return params_; }

    [[nodiscard]] const Program& program() const noexcept { return program_; }
    /// Compiled canonical exponent; empty program when no canonical form.
    [[nodiscard]] const Program& exponent_program() const noexcept { return exponent_program_; }

private:
    std::string name_;
    Expr expr_;
    std::optional<CanonicalForm> canonical_;
    ParamTable params_;
    Program program_;
    Program exponent_program_;
};

Complex eval_map(const MapDescriptor& m, Complex z);
Complex eval_derivative(const MapDescriptor& m, Complex z);

/// z^n exp(G(z)) through the canonical form.
Complex eval_canonical(const MapDescriptor& m, Complex z);

/// Extended-range evaluation of the defining expression.
XComplex eval_map_ext(const MapDescriptor& m, const XComplex& z);

/// Reads a product of powers of z, constants and exponentials off the
/// expression tree. Returns nullopt for any other shape.
std::optional<CanonicalForm> derive_canonical(const Expr& expr);

/// Declared (or derived) canonical form, checked on 100 sample points of
/// the annulus 0.5 <= |z| <= 2 at relative error 1e-10.
CanonicalForm canonical_form(const MapDescriptor& m);

// Registry of the worked examples.
std::vector<std::string> registry_names();
MapDescriptor registry_map(std::string_view name, const ParamTable& overrides = {});

nlohmann::json map_to_json(const MapDescriptor& m);
MapDescriptor map_from_json(const nlohmann::json& j);
MapDescriptor load_map_file(const std::string& path);
std::uint64_t descriptor_hash(const MapDescriptor& m);

/// Registry name or path to a JSON descriptor.
MapDescriptor resolve_map(std::string_view name_or_path, const ParamTable& overrides = {});

} // namespace cstar
