#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cstar/dual.hpp"
#include "cstar/xcomplex.hpp"

namespace cstar {

using ParamTable = std::map<std::string, Complex, std::less<>>;

enum class OpCode : std::uint8_t {
    Var,
    Const,
    Param,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Pow,
    Exp,
    Log,
    Sinh,
    Cosh,
    Sin,
    Cos,
};

struct ExprNode {
    OpCode op = OpCode::Const;
    Complex value{0.0, 0.0}; // Const, Param
    std::string name;        // Param
    int power = 0;           // Pow
    std::vector<std::shared_ptr<const ExprNode>> args;
};

/// Immutable expression tree in one complex variable `z`.
///
/// Text form is an s-expression: `(* lambda z (exp (/ (exp (- z)) z)))`.
/// Atoms are real literals, imaginary literals (`2.5i`, `i`), `pi`, the
/// variable `z`, and parameter names resolved against a ParamTable at parse
/// time. Operators: `+ - * /` (n-ary where sensible), `(^ e k)` with integer
/// k, and the unary functions exp, log, sinh, cosh, sin, cos.
class Expr {
public:
    Expr();

    static Expr parse(std::string_view text, const ParamTable& params = {});
    static Expr variable();
    static Expr constant(Complex c);
    static Expr param(std::string name, Complex value);
    static Expr apply(OpCode op, std::vector<Expr> args, int power = 0);
    static Expr sum(std::vector<Expr> terms);

    [[nodiscard]] const ExprNode& root() const noexcept { return *root_; }
    [[nodiscard]] std::string to_sexpr() const;

private:
    explicit Expr(std::shared_ptr<const ExprNode> node) : root_(std::move(node)) {}
    std::shared_ptr<const ExprNode> root_;
};

std::string format_number(double x);

/// Postfix bytecode compiled from an Expr. Evaluation never allocates.
class Program {
public:
    static constexpr int kMaxDepth = 48;

    Program() = default;
    explicit Program(const Expr& e);

    /// Double-precision evaluation; false if any intermediate is non-finite.
    bool eval_fast(Complex z, Complex& out) const noexcept;

    /// Double-precision evaluation; throws OverflowError naming the subterm.
    [[nodiscard]] Complex eval(Complex z) const;

    /// Value and exact derivative with respect to z.
    [[nodiscard]] Dual eval_dual(Complex z) const;

    /// Extended-range evaluation; throws BeyondRangeError past exp(1e308).
    [[nodiscard]] XComplex eval_ext(const XComplex& z) const;

    [[nodiscard]] bool empty() const noexcept { return code_.empty(); }

    struct Instr {
        OpCode op;
        int power;
        Complex value;
    };

private:
    std::vector<Instr> code_;
    std::vector<std::string> subterms_;
};

} // namespace cstar
