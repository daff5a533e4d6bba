#include "flowlab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "flowlab/error.hpp"

namespace flowlab::expr {

struct Expr::Node {
    Kind kind;
    double value = 0.0;
    Var var = Var::U;
    int exponent = 0;
    std::vector<Expr> children;
    int depth = 1;
};

struct ExprFactory {
    static Expr make(Kind k, std::vector<Expr> children, double value = 0.0, Var var = Var::U,
                     int exponent = 0) {
        auto n = std::make_shared<Expr::Node>();
        n->kind = k;
        n->value = value;
        n->var = var;
        n->exponent = exponent;
        int d = 0;
        for (const auto& c : children) d = std::max(d, c.depth());
        n->depth = children.empty() ? 1 : d + 1;
        n->children = std::move(children);
        return Expr(std::move(n));
    }
};

Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
Var Expr::var() const { return node_->var; }
int Expr::exponent() const { return node_->exponent; }
int Expr::child_count() const { return static_cast<int>(node_->children.size()); }
const Expr& Expr::child(int i) const { return node_->children[static_cast<std::size_t>(i)]; }
int Expr::depth() const { return node_->depth; }

namespace {

Expr make_node(Kind k, std::vector<Expr> children, double value = 0.0, Var var = Var::U,
               int exponent = 0) {
    return ExprFactory::make(k, std::move(children), value, var, exponent);
}

bool is_const(const Expr& e, double v) { return e.kind() == Kind::Constant && e.value() == v; }

double int_pow(double base, int e) {
    if (e < 0) return 1.0 / int_pow(base, -e);
    double r = 1.0, b = base;
    for (int k = e; k > 0; k >>= 1) {
        if (k & 1) r *= b;
        b *= b;
    }
    return r;
}

} // namespace

Expr Expr::constant(double c) {
    if (!std::isfinite(c)) throw std::invalid_argument("expression constant must be finite");
    return make_node(Kind::Constant, {}, c);
}

Expr Expr::variable(Var v) { return make_node(Kind::Var, {}, 0.0, v); }

bool structurally_equal(const Expr& a, const Expr& b) {
    if (&a == &b) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Kind::Constant: return a.value() == b.value();
        case Kind::Var: return a.var() == b.var();
        case Kind::Pow:
            return a.exponent() == b.exponent() && structurally_equal(a.child(0), b.child(0));
        case Kind::Add:
        case Kind::Mul: {
            const Expr &a0 = a.child(0), &a1 = a.child(1), &b0 = b.child(0), &b1 = b.child(1);
            return (structurally_equal(a0, b0) && structurally_equal(a1, b1)) ||
                   (structurally_equal(a0, b1) && structurally_equal(a1, b0));
        }
        default:
            for (int i = 0; i < a.child_count(); ++i)
                if (!structurally_equal(a.child(i), b.child(i))) return false;
            return true;
    }
}

Expr make_unary(Kind k, Expr a) {
    if (k == Kind::Neg) {
        if (a.kind() == Kind::Constant) return Expr::constant(-a.value());
        if (a.kind() == Kind::Neg) return a.child(0);
        return make_node(Kind::Neg, {std::move(a)});
    }
    if (a.kind() == Kind::Constant) {
        const double x = a.value();
        double r = 0.0;
        bool ok = true;
        switch (k) {
            case Kind::Sin: r = std::sin(x); break;
            case Kind::Cos: r = std::cos(x); break;
            case Kind::Exp: r = std::exp(x); ok = std::isfinite(r); break;
            case Kind::Ln: ok = x > 0.0; r = ok ? std::log(x) : 0.0; break;
            case Kind::Sqrt: ok = x >= 0.0; r = ok ? std::sqrt(x) : 0.0; break;
            default: ok = false; break;
        }
        if (ok) return Expr::constant(r);
    }
    return make_node(k, {std::move(a)});
}

Expr make_binary(Kind k, Expr a, Expr b) {
    const bool ac = a.kind() == Kind::Constant;
    const bool bc = b.kind() == Kind::Constant;
    switch (k) {
        case Kind::Add:
            if (ac && bc) return Expr::constant(a.value() + b.value());
            if (is_const(a, 0.0)) return b;
            if (is_const(b, 0.0)) return a;
            if (a.kind() == Kind::Neg && structurally_equal(a.child(0), b)) return Expr::constant(0.0);
            if (b.kind() == Kind::Neg && structurally_equal(b.child(0), a)) return Expr::constant(0.0);
            break;
        case Kind::Sub:
            if (ac && bc) return Expr::constant(a.value() - b.value());
            if (is_const(b, 0.0)) return a;
            if (is_const(a, 0.0)) return make_unary(Kind::Neg, std::move(b));
            if (structurally_equal(a, b)) return Expr::constant(0.0);
            break;
        case Kind::Mul:
            if (ac && bc) return Expr::constant(a.value() * b.value());
            if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::constant(0.0);
            if (is_const(a, 1.0)) return b;
            if (is_const(b, 1.0)) return a;
            if (a.kind() == Kind::Neg)
                return make_unary(Kind::Neg, make_binary(Kind::Mul, a.child(0), std::move(b)));
            if (b.kind() == Kind::Neg)
                return make_unary(Kind::Neg, make_binary(Kind::Mul, std::move(a), b.child(0)));
            break;
        case Kind::Div:
            if (ac && bc && b.value() != 0.0) {
                const double r = a.value() / b.value();
                if (std::isfinite(r)) return Expr::constant(r);
            }
            if (is_const(b, 1.0)) return a;
            break;
        default:
            throw std::invalid_argument("make_binary expects Add/Sub/Mul/Div");
    }
    return make_node(k, {std::move(a), std::move(b)});
}

Expr make_pow(Expr base, int exponent) {
    if (exponent == 0) return Expr::constant(1.0);
    if (exponent == 1) return base;
    if (base.kind() == Kind::Constant) {
        const double r = int_pow(base.value(), exponent);
        if (std::isfinite(r)) return Expr::constant(r);
    }
    return make_node(Kind::Pow, {std::move(base)}, 0.0, Var::U, exponent);
}

namespace {

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

constexpr int kMaxDepth = 64;
constexpr int kMaxExponent = 16;

struct Parser {
    std::string_view text;
    std::size_t pos = 0;
    int nesting = 0;

    [[noreturn]] void fail(const std::string& what, std::size_t at) const {
        throw Error("syntax-error", what + " at byte " + std::to_string(at));
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    struct NestGuard {
        Parser& p;
        explicit NestGuard(Parser& parser) : p(parser) {
            if (++p.nesting > kMaxDepth) p.fail("expression too deep", p.pos);
        }
        ~NestGuard() { --p.nesting; }
    };

    Expr parse_expr() {
        NestGuard guard(*this);
        Expr lhs = parse_term();
        for (;;) {
            if (eat('+')) {
                lhs = make_binary(Kind::Add, std::move(lhs), parse_term());
            } else if (eat('-')) {
                lhs = make_binary(Kind::Sub, std::move(lhs), parse_term());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_term() {
        NestGuard guard(*this);
        Expr lhs = parse_unary();
        for (;;) {
            if (eat('*')) {
                lhs = make_binary(Kind::Mul, std::move(lhs), parse_unary());
            } else if (eat('/')) {
                lhs = make_binary(Kind::Div, std::move(lhs), parse_unary());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_unary() {
        NestGuard guard(*this);
        if (eat('-')) return make_unary(Kind::Neg, parse_unary());
        return parse_power();
    }

    Expr parse_power() {
        NestGuard guard(*this);
        Expr base = parse_atom();
        std::vector<long long> exps;
        while (eat('^')) exps.push_back(parse_exponent());
        if (exps.empty()) return base;
        // Integer exponents fold right-associatively: u^2^3 is u^(2^3).
        long long total = exps.back();
        for (int i = static_cast<int>(exps.size()) - 2; i >= 0; --i) {
            const long long b = exps[static_cast<std::size_t>(i)];
            if (total < 0) fail("negative exponent tower", pos);
            long long r = 1;
            for (long long k = 0; k < total; ++k) {
                r *= b;
                if (std::abs(r) > kMaxExponent) fail("integer exponent out of range (|e| <= 16)", pos);
            }
            total = r;
        }
        if (std::abs(total) > kMaxExponent) fail("integer exponent out of range (|e| <= 16)", pos);
        return make_pow(std::move(base), static_cast<int>(total));
    }

    long long parse_exponent() {
        skip_ws();
        const std::size_t start = pos;
        bool negative = false;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
            negative = text[pos] == '-';
            ++pos;
        }
        std::size_t digits = pos;
        while (digits < text.size() && std::isdigit(static_cast<unsigned char>(text[digits]))) ++digits;
        if (digits == pos) fail("expected integer exponent", start);
        long long value = 0;
        for (std::size_t i = pos; i < digits; ++i) {
            value = value * 10 + (text[i] - '0');
            if (value > 1000) fail("integer exponent out of range (|e| <= 16)", start);
        }
        pos = digits;
        if (std::abs(value) > kMaxExponent) fail("integer exponent out of range (|e| <= 16)", start);
        return negative ? -value : value;
    }

    Expr parse_atom() {
        NestGuard guard(*this);
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input", pos);
        const char c = text[pos];
        if (c == '(') {
            ++pos;
            Expr inner = parse_expr();
            if (!eat(')')) fail("expected ')'", pos);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail("unexpected character", pos);
    }

    Expr parse_number() {
        const std::size_t start = pos;
        std::size_t end = pos;
        while (end < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[end])) || text[end] == '.'))
            ++end;
        if (end < text.size() && (text[end] == 'e' || text[end] == 'E')) {
            std::size_t e = end + 1;
            if (e < text.size() && (text[e] == '+' || text[e] == '-')) ++e;
            std::size_t d = e;
            while (d < text.size() && std::isdigit(static_cast<unsigned char>(text[d]))) ++d;
            if (d > e) end = d;
        }
        double value = 0.0;
        const auto res = std::from_chars(text.data() + start, text.data() + end, value);
        if (res.ec != std::errc() || res.ptr != text.data() + end || !std::isfinite(value))
            fail("malformed number", start);
        pos = end;
        return Expr::constant(value);
    }

    Expr parse_identifier() {
        const std::size_t start = pos;
        std::size_t end = pos;
        while (end < text.size() && (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_'))
            ++end;
        const std::string_view name = text.substr(start, end - start);
        pos = end;
        if (name == "u") return Expr::variable(Var::U);
        if (name == "v") return Expr::variable(Var::V);
        Kind k;
        if (name == "sin") k = Kind::Sin;
        else if (name == "cos") k = Kind::Cos;
        else if (name == "exp") k = Kind::Exp;
        else if (name == "ln") k = Kind::Ln;
        else if (name == "sqrt") k = Kind::Sqrt;
        else
            throw Error("unknown-identifier",
                        "unknown identifier '" + std::string(name) + "' at byte " + std::to_string(start));
        if (!eat('(')) fail("expected '(' after function name", pos);
        Expr arg = parse_expr();
        if (!eat(')')) fail("expected ')'", pos);
        return make_unary(k, std::move(arg));
    }
};

int precedence(Kind k) {
    switch (k) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        default: return 5;
    }
}

void render_to(const Expr& e, std::string& out);

void render_child(const Expr& child, int min_prec, std::string& out) {
    if (precedence(child.kind()) < min_prec) {
        out += '(';
        render_to(child, out);
        out += ')';
    } else {
        render_to(child, out);
    }
}

void render_to(const Expr& e, std::string& out) {
    switch (e.kind()) {
        case Kind::Constant: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", e.value());
            out += buf;
            return;
        }
        case Kind::Var:
            out += (e.var() == Var::U) ? 'u' : 'v';
            return;
        case Kind::Neg:
            out += '-';
            render_child(e.child(0), 3, out);
            return;
        case Kind::Add:
        case Kind::Sub: {
            render_child(e.child(0), 1, out);
            out += (e.kind() == Kind::Add) ? '+' : '-';
            render_child(e.child(1), 2, out);
            return;
        }
        case Kind::Mul:
        case Kind::Div: {
            render_child(e.child(0), 2, out);
            out += (e.kind() == Kind::Mul) ? '*' : '/';
            render_child(e.child(1), 3, out);
            return;
        }
        case Kind::Pow: {
            render_child(e.child(0), 5, out);
            out += '^';
            out += std::to_string(e.exponent());
            return;
        }
        case Kind::Sin: out += "sin("; break;
        case Kind::Cos: out += "cos("; break;
        case Kind::Exp: out += "exp("; break;
        case Kind::Ln: out += "ln("; break;
        case Kind::Sqrt: out += "sqrt("; break;
    }
    render_to(e.child(0), out);
    out += ')';
}

[[noreturn]] void domain_fail(const std::string& what) { throw Error("domain-error", what); }

double eval_node(const Expr& e, Vec2 uv) {
    double r = 0.0;
    switch (e.kind()) {
        case Kind::Constant: return e.value();
        case Kind::Var: return (e.var() == Var::U) ? uv[0] : uv[1];
        case Kind::Neg: return -eval_node(e.child(0), uv);
        case Kind::Add: r = eval_node(e.child(0), uv) + eval_node(e.child(1), uv); break;
        case Kind::Sub: r = eval_node(e.child(0), uv) - eval_node(e.child(1), uv); break;
        case Kind::Mul: r = eval_node(e.child(0), uv) * eval_node(e.child(1), uv); break;
        case Kind::Div: {
            const double den = eval_node(e.child(1), uv);
            if (den == 0.0) domain_fail("division by zero");
            r = eval_node(e.child(0), uv) / den;
            break;
        }
        case Kind::Pow: {
            const double base = eval_node(e.child(0), uv);
            if (base == 0.0 && e.exponent() < 0) domain_fail("zero raised to negative power");
            r = int_pow(base, e.exponent());
            break;
        }
        case Kind::Sin: r = std::sin(eval_node(e.child(0), uv)); break;
        case Kind::Cos: r = std::cos(eval_node(e.child(0), uv)); break;
        case Kind::Exp: r = std::exp(eval_node(e.child(0), uv)); break;
        case Kind::Ln: {
            const double x = eval_node(e.child(0), uv);
            if (x <= 0.0) domain_fail("ln of non-positive argument");
            r = std::log(x);
            break;
        }
        case Kind::Sqrt: {
            const double x = eval_node(e.child(0), uv);
            if (x < 0.0) domain_fail("sqrt of negative argument");
            r = std::sqrt(x);
            break;
        }
    }
    if (!std::isfinite(r)) domain_fail("non-finite intermediate value");
    return r;
}

} // namespace

Expr parse(std::string_view text) {
    if (text.size() > 4096) throw Error("syntax-error", "input longer than 4096 bytes");
    Parser p{text};
    Expr e = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input", p.pos);
    if (e.depth() > kMaxDepth) p.fail("expression too deep", text.size());
    return e;
}

std::string render(const Expr& e) {
    std::string out;
    render_to(e, out);
    return out;
}

double eval(const Expr& e, Vec2 uv) { return eval_node(e, uv); }

Expr diff(const Expr& e, Var v) {
    switch (e.kind()) {
        case Kind::Constant: return Expr::constant(0.0);
        case Kind::Var: return Expr::constant(e.var() == v ? 1.0 : 0.0);
        case Kind::Neg: return -diff(e.child(0), v);
        case Kind::Add: return diff(e.child(0), v) + diff(e.child(1), v);
        case Kind::Sub: return diff(e.child(0), v) - diff(e.child(1), v);
        case Kind::Mul:
            return diff(e.child(0), v) * e.child(1) + e.child(0) * diff(e.child(1), v);
        case Kind::Div: {
            const Expr &num = e.child(0), &den = e.child(1);
            return (diff(num, v) * den - num * diff(den, v)) / make_pow(den, 2);
        }
        case Kind::Pow: {
            const Expr& base = e.child(0);
            return Expr::constant(e.exponent()) * make_pow(base, e.exponent() - 1) * diff(base, v);
        }
        case Kind::Sin: return make_unary(Kind::Cos, e.child(0)) * diff(e.child(0), v);
        case Kind::Cos: return -(make_unary(Kind::Sin, e.child(0)) * diff(e.child(0), v));
        case Kind::Exp: return e * diff(e.child(0), v);
        case Kind::Ln: return diff(e.child(0), v) / e.child(0);
        case Kind::Sqrt: return diff(e.child(0), v) / (Expr::constant(2.0) * e);
    }
    throw std::logic_error("unreachable");
}

Vec2 eval_field(const Field2& f, Vec2 uv) { return {eval(f.x, uv), eval(f.y, uv)}; }

Expr apply_field(const Field2& f, const Expr& g) {
    return diff(g, Var::U) * f.x + diff(g, Var::V) * f.y;
}

Field2 lie_bracket(const Field2& f, const Field2& g) {
    return {apply_field(f, g.x) - apply_field(g, f.x), apply_field(f, g.y) - apply_field(g, f.y)};
}

Expr divergence(const Field2& f) { return diff(f.x, Var::U) + diff(f.y, Var::V); }

OneForm2 omega_of(const Field2& f) { return {-f.y, f.x}; }

Expr apply_one_form(const OneForm2& w, const Field2& f) { return w.a * f.x + w.b * f.y; }

double integrating_factor_residual(const Field2& f, const Expr& mu, std::span<const Vec2> pts) {
    const Expr residual = apply_field(f, mu) + divergence(f) * mu;
    double worst = 0.0;
    for (const Vec2& pt : pts) worst = std::max(worst, std::abs(eval(residual, pt)));
    return worst;
}

namespace {

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNode[5] = {-0.906179845938664, -0.538469310105683, 0.0,
                               0.538469310105683, 0.906179845938664};
constexpr double kGlWeight[5] = {0.236926885056189, 0.478628670499366, 0.568888888888889,
                                 0.478628670499366, 0.236926885056189};

template <typename F>
double gl5(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) sum += kGlWeight[i] * f(mid + half * kGlNode[i]);
    return half * sum;
}

template <typename F>
double adaptive_gl(const F& f, double a, double b, double whole, double tol, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gl5(f, a, mid);
    const double right = gl5(f, mid, b);
    const double refined = left + right;
    if (std::abs(refined - whole) <= tol || depth >= 24) return refined;
    return adaptive_gl(f, a, mid, left, tol / 2.0, depth + 1) +
           adaptive_gl(f, mid, b, right, tol / 2.0, depth + 1);
}

} // namespace

double integrate_one_form(const OneForm2& w, const Polyline& path, double tol) {
    if (path.size() < 2) throw std::invalid_argument("path needs at least two vertices");
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const Vec2 p0 = path[i];
        const Vec2 d = path[i + 1] - p0;
        auto integrand = [&](double s) {
            const Vec2 at = p0 + s * d;
            return eval(w.a, at) * d[0] + eval(w.b, at) * d[1];
        };
        total += adaptive_gl(integrand, 0.0, 1.0, gl5(integrand, 0.0, 1.0), tol, 0);
    }
    return total;
}

double invariant_via_symmetry(const Field2& f, const Field2& p, const Polyline& path, double tol) {
    if (path.size() < 2) throw std::invalid_argument("path needs at least two vertices");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

    const Field2 bracket = lie_bracket(p, f);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        for (double s : {0.0, 0.5, 1.0}) {
            const Vec2 at = path[i] + s * (path[i + 1] - path[i]);
            const Vec2 bv = eval_field(bracket, at);
            const Vec2 fv = eval_field(f, at);
            const double scale = norm(bv) * norm(fv) + 1.0;
            if (std::abs(cross(bv, fv)) > 1e-6 * scale)
                throw Error("not-a-symmetry",
                            "[P,F] is not parallel to F near segment " + std::to_string(i));
        }
    }

    const OneForm2 w = omega_of(f);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const Vec2 p0 = path[i];
        const Vec2 d = path[i + 1] - p0;
        auto integrand = [&, i](double s) {
            const Vec2 at = p0 + s * d;
            const double a = eval(w.a, at);
            const double b = eval(w.b, at);
            const Vec2 pv = eval_field(p, at);
            const double denom = a * pv[0] + b * pv[1];
            const double scale = std::hypot(a, b) * norm(pv) + 1e-300;
            if (std::abs(denom) < tol * scale)
                throw Error("omega-P-vanishes", "omega(P) vanishes near segment " +
                                                    std::to_string(i) + ", s=" + std::to_string(s));
            return (a * d[0] + b * d[1]) / denom;
        };
        total += adaptive_gl(integrand, 0.0, 1.0, gl5(integrand, 0.0, 1.0), tol, 0);
    }
    return total;
}

Vec2 rk4_flow(const Field2& f, Vec2 u0, double t, int steps) {
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    const double h = t / steps;
    Vec2 u = u0;
    for (int k = 0; k < steps; ++k) {
        try {
            const Vec2 k1 = eval_field(f, u);
            const Vec2 k2 = eval_field(f, u + (h / 2.0) * k1);
            const Vec2 k3 = eval_field(f, u + (h / 2.0) * k2);
            const Vec2 k4 = eval_field(f, u + h * k3);
            u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } catch (const Error& e) {
            throw Error("domain-error",
                        std::string(e.what()) + " (rk4 step " + std::to_string(k) + ")");
        }
        if (!std::isfinite(u[0]) || !std::isfinite(u[1]))
            throw Error("domain-error", "trajectory diverged (rk4 step " + std::to_string(k) + ")");
    }
    return u;
}

Field2 preset(std::string_view name) {
    if (name == "demo:limit-cycle")
        return {parse("u - v - u*(u^2+v^2)"), parse("u + v - v*(u^2+v^2)")};
    throw Error("unknown-preset", "unknown field preset '" + std::string(name) + "'");
}

} // namespace flowlab::expr
