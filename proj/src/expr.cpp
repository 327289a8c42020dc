#include "cstar/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <numbers>
#include <system_error>

#include "cstar/errors.hpp"

namespace cstar {

namespace {

std::shared_ptr<const ExprNode> make_leaf(OpCode op, Complex value, std::string name = {}) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->value = value;
    n->name = std::move(name);
    return n;
}

class Parser {
public:
    Parser(std::string_view text, const ParamTable& params) : text_(text), params_(params) {}

    std::shared_ptr<const ExprNode> parse_all() {
        auto node = parse_node();
        skip_ws();
        if (pos_ != text_.size()) {
            fail("trailing input");
        }
        return node;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("expression parse error at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
            ++pos_;
        }
    }

    std::string_view atom() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
               std::isspace(static_cast<unsigned char>(text_[pos_])) == 0) {
            ++pos_;
        }
        if (start == pos_) {
            fail("expected atom");
        }
        return text_.substr(start, pos_ - start);
    }

    static bool parse_real(std::string_view s, double& out) {
        if (s.empty()) {
            return false;
        }
        const char* first = s.data();
        const char* last = s.data() + s.size();
        if (*first == '+') {
            ++first;
        }
        auto [ptr, ec] = std::from_chars(first, last, out);
        return ec == std::errc() && ptr == last;
    }

    std::shared_ptr<const ExprNode> leaf(std::string_view a) {
        double x = 0.0;
        if (parse_real(a, x)) {
            return make_leaf(OpCode::Const, {x, 0.0});
        }
        if (a == "z") {
            return make_leaf(OpCode::Var, {});
        }
        if (a == "pi") {
            return make_leaf(OpCode::Const, {std::numbers::pi, 0.0});
        }
        if (a == "i") {
            return make_leaf(OpCode::Const, {0.0, 1.0});
        }
        if (a.back() == 'i' && parse_real(a.substr(0, a.size() - 1), x)) {
            return make_leaf(OpCode::Const, {0.0, x});
        }
        if (auto it = params_.find(a); it != params_.end()) {
            return make_leaf(OpCode::Param, it->second, std::string(a));
        }
        fail("unknown symbol '" + std::string(a) + "'");
    }

    std::shared_ptr<const ExprNode> parse_node() {
        skip_ws();
        if (pos_ >= text_.size()) {
            fail("unexpected end of input");
        }
        if (text_[pos_] == ')') {
            fail("unexpected ')'");
        }
        if (text_[pos_] != '(') {
            return leaf(atom());
        }
        ++pos_;
        const std::string head(atom());
        std::vector<std::shared_ptr<const ExprNode>> args;
        int power = 0;
        for (;;) {
            skip_ws();
            if (pos_ >= text_.size()) {
                fail("missing ')'");
            }
            if (text_[pos_] == ')') {
                ++pos_;
                break;
            }
            if (head == "^" && args.size() == 1) {
                const std::string_view p = atom();
                auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), power);
                if (ec != std::errc() || ptr != p.data() + p.size()) {
                    fail("exponent of ^ must be an integer literal");
                }
                args.push_back(nullptr);
                continue;
            }
            args.push_back(parse_node());
        }
        return build(head, std::move(args), power);
    }

    std::shared_ptr<const ExprNode> build(const std::string& head,
                                          std::vector<std::shared_ptr<const ExprNode>> args,
                                          int power) {
        auto n = std::make_shared<ExprNode>();
        auto need = [&](std::size_t lo, std::size_t hi) {
            if (args.size() < lo || args.size() > hi) {
                fail("wrong number of arguments to '" + head + "'");
            }
        };
        if (head == "+") {
            need(1, 64);
            if (args.size() == 1) {
                return args.front();
            }
            n->op = OpCode::Add;
        } else if (head == "*") {
            need(1, 64);
            if (args.size() == 1) {
                return args.front();
            }
            n->op = OpCode::Mul;
        } else if (head == "-") {
            need(1, 64);
            n->op = args.size() == 1 ? OpCode::Neg : OpCode::Sub;
        } else if (head == "/") {
            need(2, 64);
            n->op = OpCode::Div;
        } else if (head == "^") {
            need(2, 2);
            n->op = OpCode::Pow;
            n->power = power;
            args.pop_back();
        } else {
            static const std::array<std::pair<std::string_view, OpCode>, 6> unary{{
                {"exp", OpCode::Exp},
                {"log", OpCode::Log},
                {"sinh", OpCode::Sinh},
                {"cosh", OpCode::Cosh},
                {"sin", OpCode::Sin},
                {"cos", OpCode::Cos},
            }};
            bool found = false;
            for (const auto& [name, op] : unary) {
                if (head == name) {
                    n->op = op;
                    found = true;
                }
            }
            if (!found) {
                fail("unknown operator '" + head + "'");
            }
            need(1, 1);
        }
        n->args = std::move(args);
        return n;
    }

    std::string_view text_;
    const ParamTable& params_;
    std::size_t pos_ = 0;
};

std::string format_complex(Complex c) {
    if (c.imag() == 0.0) {
        return format_number(c.real());
    }
    const std::string im = (c.imag() == 1.0 ? std::string() : format_number(c.imag())) + "i";
    if (c.real() == 0.0) {
        return im;
    }
    return "(+ " + format_number(c.real()) + " " + im + ")";
}

std::string_view op_name(OpCode op) {
    switch (op) {
    case OpCode::Add: return "+";
    case OpCode::Sub: return "-";
    case OpCode::Mul: return "*";
    case OpCode::Div: return "/";
    case OpCode::Neg: return "-";
    case OpCode::Pow: return "^";
    case OpCode::Exp: return "exp";
    case OpCode::Log: return "log";
    case OpCode::Sinh: return "sinh";
    case OpCode::Cosh: return "cosh";
    case OpCode::Sin: return "sin";
    case OpCode::Cos: return "cos";
    default: return "?";
    }
}

void print(const ExprNode& n, std::string& out) {
    switch (n.op) {
    case OpCode::Var: out += "z"; return;
    case OpCode::Const: out += format_complex(n.value); return;
    case OpCode::Param: out += n.name; return;
    default: break;
    }
    out += "(";
    out += op_name(n.op);
    for (const auto& a : n.args) {
        out += " ";
        print(*a, out);
    }
    if (n.op == OpCode::Pow) {
        out += " " + std::to_string(n.power);
    }
    out += ")";
}

void compile(const ExprNode& n, std::vector<Program::Instr>& code, std::vector<std::string>& subterms,
             int depth, int& max_depth) {
    const auto emit = [&](OpCode op, int power = 0, Complex value = {}) {
        code.push_back({op, power, value});
        std::string s;
        print(n, s);
        subterms.push_back(std::move(s));
    };
    switch (n.op) {
    case OpCode::Var:
    case OpCode::Const:
    case OpCode::Param:
        max_depth = std::max(max_depth, depth + 1);
        emit(n.op == OpCode::Var ? OpCode::Var : OpCode::Const, 0, n.value);
        return;
    case OpCode::Add:
    case OpCode::Sub:
    case OpCode::Mul:
    case OpCode::Div:
        compile(*n.args[0], code, subterms, depth, max_depth);
        for (std::size_t i = 1; i < n.args.size(); ++i) {
            compile(*n.args[i], code, subterms, depth + 1, max_depth);
            emit(n.op);
        }
        return;
    default:
        compile(*n.args[0], code, subterms, depth, max_depth);
        emit(n.op, n.power);
        return;
    }
}

// Arithmetic policies for the interpreter loop.
struct FastOps {
    using T = Complex;
    static T var(Complex z) { return z; }
    static T constant(Complex c) { return c; }
    static T add(T a, T b) { return a + b; }
    static T sub(T a, T b) { return a - b; }
    static T mul(T a, T b) { return detail::cmul(a, b); }
    static T div(T a, T b) { return detail::cdiv(a, b); }
    static T neg(T a) { return -a; }
    static T ipow(T a, int n) {
        if (n < 0) {
            return detail::cdiv(Complex(1.0, 0.0), ipow(a, -n));
        }
        Complex r(1.0, 0.0);
        Complex b = a;
        while (n > 0) {
            if ((n & 1) != 0) {
                r = detail::cmul(r, b);
            }
            n >>= 1;
            if (n > 0) {
                b = detail::cmul(b, b);
            }
        }
        return r;
    }
    static T exp(T a) {
        const double e = std::exp(a.real());
        return {e * std::cos(a.imag()), e * std::sin(a.imag())};
    }
    static T log(T a) { return std::log(a); }
    static T sinh(T a) { return std::sinh(a); }
    static T cosh(T a) { return std::cosh(a); }
    static T sin(T a) { return std::sin(a); }
    static T cos(T a) { return std::cos(a); }
    static bool ok(const T& a) { return detail::finite(a); }
};

struct DualOps {
    using T = Dual;
    static T var(Complex z) { return Dual::variable(z); }
    static T constant(Complex c) { return Dual::constant(c); }
    static T add(const T& a, const T& b) { return a + b; }
    static T sub(const T& a, const T& b) { return a - b; }
    static T mul(const T& a, const T& b) { return a * b; }
    static T div(const T& a, const T& b) { return a / b; }
    static T neg(const T& a) { return -a; }
    static T ipow(const T& a, int n) { return cstar::ipow(a, n); }
    static T exp(const T& a) { return cstar::exp(a); }
    static T log(const T& a) { return cstar::log(a); }
    static T sinh(const T& a) { return cstar::sinh(a); }
    static T cosh(const T& a) { return cstar::cosh(a); }
    static T sin(const T& a) { return cstar::sin(a); }
    static T cos(const T& a) { return cstar::cos(a); }
    static bool ok(const T& a) { return detail::finite(a.v) && detail::finite(a.d); }
};

struct ExtOps {
    using T = XComplex;
    static T var(const XComplex& z) { return z; }
    static T constant(Complex c) { return XComplex(c); }
    static T add(const T& a, const T& b) { return a + b; }
    static T sub(const T& a, const T& b) { return a - b; }
    static T mul(const T& a, const T& b) { return a * b; }
    static T div(const T& a, const T& b) { return a / b; }
    static T neg(const T& a) { return -a; }
    static T ipow(const T& a, int n) { return xipow(a, n); }
    static T exp(const T& a) { return xexp(a); }
    static T log(const T& a) { return xlog(a); }
    static T sinh(const T& a) { return xsinh(a); }
    static T cosh(const T& a) { return xcosh(a); }
    static T sin(const T& a) { return xsin(a); }
    static T cos(const T& a) { return xcos(a); }
    static bool ok(const T&) { return true; }
};

// Returns the index of the first failing instruction, or npos on success.
template <class Ops, class In>
std::size_t run(const std::vector<Program::Instr>& code, const In& z, typename Ops::T& out) {
    using T = typename Ops::T;
    std::array<T, Program::kMaxDepth> st;
    int sp = 0;
    for (std::size_t pc = 0; pc < code.size(); ++pc) {
        const auto& in = code[pc];
        switch (in.op) {
        case OpCode::Var: st[sp++] = Ops::var(z); break;
        case OpCode::Const:
        case OpCode::Param: st[sp++] = Ops::constant(in.value); break;
        case OpCode::Add: --sp; st[sp - 1] = Ops::add(st[sp - 1], st[sp]); break;
        case OpCode::Sub: --sp; st[sp - 1] = Ops::sub(st[sp - 1], st[sp]); break;
        case OpCode::Mul: --sp; st[sp - 1] = Ops::mul(st[sp - 1], st[sp]); break;
        case OpCode::Div: --sp; st[sp - 1] = Ops::div(st[sp - 1], st[sp]); break;
        case OpCode::Neg: st[sp - 1] = Ops::neg(st[sp - 1]); break;
        case OpCode::Pow: st[sp - 1] = Ops::ipow(st[sp - 1], in.power); break;
        case OpCode::Exp: st[sp - 1] = Ops::exp(st[sp - 1]); break;
        case OpCode::Log: st[sp - 1] = Ops::log(st[sp - 1]); break;
        case OpCode::Sinh: st[sp - 1] = Ops::sinh(st[sp - 1]); break;
        case OpCode::Cosh: st[sp - 1] = Ops::cosh(st[sp - 1]); break;
        case OpCode::Sin: st[sp - 1] = Ops::sin(st[sp - 1]); break;
        case OpCode::Cos: st[sp - 1] = Ops::cos(st[sp - 1]); break;
        }
        if (!Ops::ok(st[sp - 1])) {
            return pc;
        }
    }
    out = st[0];
    return static_cast<std::size_t>(-1);
}

} // namespace

std::string format_number(double x) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return {buf.data(), ptr};
}

Expr::Expr() : root_(make_leaf(OpCode::Const, {0.0, 0.0})) {}

Expr Expr::parse(std::string_view text, const ParamTable& params) {
    return Expr(Parser(text, params).parse_all());
}

Expr Expr::variable() { return Expr(make_leaf(OpCode::Var, {})); }

Expr Expr::constant(Complex c) { return Expr(make_leaf(OpCode::Const, c)); }

Expr Expr::param(std::string name, Complex value) {
    return Expr(make_leaf(OpCode::Param, value, std::move(name)));
}

Expr Expr::apply(OpCode op, std::vector<Expr> args, int power) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->power = power;
    for (auto& a : args) {
        n->args.push_back(a.root_);
    }
    return Expr(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
    if (terms.empty()) {
        return constant({0.0, 0.0});
    }
    if (terms.size() == 1) {
        return terms.front();
    }
    return apply(OpCode::Add, std::move(terms));
}

std::string Expr::to_sexpr() const {
    std::string out;
    print(*root_, out);
    return out;
}

Program::Program(const Expr& e) {
    int max_depth = 0;
    compile(e.root(), code_, subterms_, 0, max_depth);
    if (max_depth > kMaxDepth) {
        throw ParseError("expression nests too deeply to compile");
    }
}

bool Program::eval_fast(Complex z, Complex& out) const noexcept {
    return run<FastOps>(code_, z, out) == static_cast<std::size_t>(-1);
}

Complex Program::eval(Complex z) const {
    Complex out;
    const std::size_t bad = run<FastOps>(code_, z, out);
    if (bad != static_cast<std::size_t>(-1)) {
        throw OverflowError("non-finite value in subterm " + subterms_[bad]);
    }
    return out;
}

Dual Program::eval_dual(Complex z) const {
    Dual out;
    const std::size_t bad = run<DualOps>(code_, z, out);
    if (bad != static_cast<std::size_t>(-1)) {
        throw OverflowError("non-finite value or derivative in subterm " + subterms_[bad]);
    }
    return out;
}

XComplex Program::eval_ext(const XComplex& z) const {
    XComplex out;
    run<ExtOps>(code_, z, out);
    return out;
}

} // namespace cstar
