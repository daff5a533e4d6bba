#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowlab/vec.hpp"

namespace flowlab::expr {

enum class Kind { Constant, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Ln, Sqrt };
enum class Var { U, V };

/// Immutable expression tree over the two plane coordinates. Construction goes
/// through the factory functions below, which fold constants and apply the
/// 0/1 identities (and nothing fancier); evaluation is where domain questions
/// are settled.
class Expr {
public:
    Expr() = default;

    static Expr constant(double c);
    static Expr variable(Var v);

    Kind kind() const;
    double value() const;    // Constant nodes
    Var var() const;         // Var nodes
    int exponent() const;    // Pow nodes
    int child_count() const;
    const Expr& child(int i) const;
    int depth() const;
    bool valid() const { return node_ != nullptr; }

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;

    friend struct ExprFactory;
};

Expr make_unary(Kind k, Expr a);
Expr make_binary(Kind k, Expr a, Expr b);
Expr make_pow(Expr base, int exponent);

inline Expr operator+(Expr a, Expr b) { return make_binary(Kind::Add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return make_binary(Kind::Sub, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return make_binary(Kind::Mul, std::move(a), std::move(b)); }
inline Expr operator/(Expr a, Expr b) { return make_binary(Kind::Div, std::move(a), std::move(b)); }
inline Expr operator-(Expr a) { return make_unary(Kind::Neg, std::move(a)); }

// Vec2/Vec3 are std::array aliases, so their operators do not come in through
// argument-dependent lookup; re-open the enclosing overload set.
using flowlab::operator+;
using flowlab::operator-;
using flowlab::operator*;

/// Structural equality; Add and Mul compare their operands unordered.
bool structurally_equal(const Expr& a, const Expr& b);

/// Parse with precedence ^ (right assoc, integer exponents |e| <= 16) over
/// unary minus over * / over + -. Functions are sin, cos, exp, ln, sqrt;
/// variables are u and v. Throws Error("syntax-error") with a byte offset or
/// Error("unknown-identifier"). Nesting is limited to depth 64.
Expr parse(std::string_view text);

/// Rendering that reparses to a structurally equal tree.
std::string render(const Expr& e);

/// Evaluate at (u, v). Throws Error("domain-error") for ln/sqrt/division
/// domain violations or non-finite intermediates.
double eval(const Expr& e, Vec2 uv);

/// Exact symbolic partial derivative (with the constructors' folding).
Expr diff(const Expr& e, Var v);

/// Planar field X = x d/du + y d/dv.
struct Field2 {
    Expr x;
    Expr y;
};

/// One-form a du + b dv.
struct OneForm2 {
    Expr a;
    Expr b;
};

Vec2 eval_field(const Field2& f, Vec2 uv);

/// X(f) = f_u x + f_v y.
Expr apply_field(const Field2& f, const Expr& g);

/// [F, G] componentwise: (F(Gx) - G(Fx), F(Gy) - G(Fy)).
Field2 lie_bracket(const Field2& f, const Field2& g);

/// div X = x_u + y_v.
Expr divergence(const Field2& f);

/// The annihilating one-form (-y) du + x dv.
OneForm2 omega_of(const Field2& f);

/// w(F) = a x + b y; built so that omega_of(F) applied to F folds to 0.
Expr apply_one_form(const OneForm2& w, const Field2& f);

/// max over pts of |X(mu) + div X * mu|; Error("domain-error") if mu or the
/// field is undefined at a sample.
double integrating_factor_residual(const Field2& f, const Expr& mu, std::span<const Vec2> pts);

using Polyline = std::vector<Vec2>;

/// Line integral of a one-form along a polyline with adaptive 5-point
/// Gauss-Legendre quadrature, per-segment tolerance tol, deterministic
/// left-to-right accumulation.
double integrate_one_form(const OneForm2& w, const Polyline& path, double tol);

/// I = integral of omega/omega(P) along the path. P must be an infinitesimal
/// symmetry of F (cross determinant of [P,F] against F below 1e-6 of scale at
/// samples, else Error("not-a-symmetry")); omega(P) must stay away from zero
/// along the path (else Error("omega-P-vanishes") naming the parameter).
double invariant_via_symmetry(const Field2& f, const Field2& p, const Polyline& path, double tol);

/// Classic fixed-step fourth-order Runge-Kutta flow of F from u0 over time t.
/// Error("domain-error") carries the failing step index.
Vec2 rk4_flow(const Field2& f, Vec2 u0, double t, int steps);

/// Named demo fields; currently "demo:limit-cycle", the cubic field with the
/// unit circle as attractor. Throws Error("unknown-preset") otherwise.
Field2 preset(std::string_view name);

} // namespace flowlab::expr
