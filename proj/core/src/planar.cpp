#include "flowlab/planar.hpp"

#include <cmath>
#include <stdexcept>

#include "flowlab/error.hpp"

namespace flowlab::planar {

namespace {

constexpr double kRegionTol = 1e-10; // relative region tolerance for det and delta
constexpr double kEntryTol = 1e-12;  // relative tolerance for single entries

void require_2x2(const LinearField2& f) {
    if (f.c.size() != 2) throw std::invalid_argument("planar fields use 2x2 matrices");
}

void require_homogeneous(const LinearField2& f) {
    if (f.b && ((*f.b)[0] != 0.0 || (*f.b)[1] != 0.0))
        throw std::invalid_argument("operation expects the homogeneous part (b absent or zero)");
}

bool is_scalar_matrix(const SquareMatrix& c, double entry_scale) {
    return std::abs(c(0, 1)) <= entry_scale && std::abs(c(1, 0)) <= entry_scale &&
           std::abs(c(0, 0) - c(1, 1)) <= entry_scale;
}

} // namespace

std::string_view to_string(FlowKind kind) {
    switch (kind) {
        case FlowKind::StableFocus: return "StableFocus";
        case FlowKind::UnstableFocus: return "UnstableFocus";
        case FlowKind::Center: return "Center";
        case FlowKind::Saddle: return "Saddle";
        case FlowKind::StableHyperbolicNode: return "StableHyperbolicNode";
        case FlowKind::UnstableHyperbolicNode: return "UnstableHyperbolicNode";
        case FlowKind::StableParabolicNode: return "StableParabolicNode";
        case FlowKind::UnstableParabolicNode: return "UnstableParabolicNode";
        case FlowKind::StarNode: return "StarNode";
        case FlowKind::DegenerateLine: return "DegenerateLine";
        case FlowKind::Zero: return "Zero";
    }
    return "?";
}

FlowClass classify(const LinearField2& f) {
    require_2x2(f);
    require_homogeneous(f);
    const SquareMatrix& c = f.c;

    FlowClass out{};
    out.tr = c.trace();
    out.det = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
    out.delta = (out.tr * out.tr - 4.0 * out.det) / 4.0;

    if (c.is_zero()) {
        out.kind = FlowKind::Zero;
        return out;
    }

    const ComplexPair eig = eig2(c);
    out.lambda1 = eig.lambda1;
    out.lambda2 = eig.lambda2;

    const double fro = c.norm_fro();
    const double scale2 = fro * fro;
    const double alpha = out.tr / 2.0;
    const bool alpha_zero = std::abs(out.tr) <= kEntryTol * fro;

    if (std::abs(out.det) <= kRegionTol * scale2) {
        out.kind = FlowKind::DegenerateLine;
        out.invariant_row = nullspace_left(c);
        out.rate = alpha_zero ? 0.0 : out.tr;
        return out;
    }
    if (std::abs(out.delta) <= kRegionTol * scale2) {
        if (is_scalar_matrix(c, kEntryTol * fro)) {
            out.kind = FlowKind::StarNode;
        } else {
            out.kind = (alpha < 0.0) ? FlowKind::StableParabolicNode : FlowKind::UnstableParabolicNode;
        }
        return out;
    }
    if (out.delta < 0.0) {
        if (alpha_zero)
            out.kind = FlowKind::Center;
        else
            out.kind = (alpha < 0.0) ? FlowKind::StableFocus : FlowKind::UnstableFocus;
        return out;
    }
    if (out.det < 0.0) {
        out.kind = FlowKind::Saddle;
        return out;
    }
    out.kind = (alpha < 0.0) ? FlowKind::StableHyperbolicNode : FlowKind::UnstableHyperbolicNode;
    return out;
}

std::optional<Vec2> singular_point(const LinearField2& f) {
    require_2x2(f);
    const SquareMatrix& c = f.c;
    const Vec2 b = f.b.value_or(Vec2{0.0, 0.0});
    const double det = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
    if (std::abs(det) <= kEntryTol * c.norm_fro() * c.norm_fro()) return std::nullopt;
    // C U* = -b by Cramer.
    return Vec2{(-b[0] * c(1, 1) + b[1] * c(0, 1)) / det,
                (-b[1] * c(0, 0) + b[0] * c(1, 0)) / det};
}

Vec2 flow_point(const LinearField2& f, Vec2 u0, double t) {
    require_2x2(f);
    const SquareMatrix& c = f.c;
    const Vec2 b = f.b.value_or(Vec2{0.0, 0.0});
    const bool has_b = b[0] != 0.0 || b[1] != 0.0;

    if (!has_b) return exp2_closed(c, t).apply(u0);
    if (c.is_zero()) return u0 + t * b;

    if (auto fixed = singular_point(f)) {
        return *fixed + exp2_closed(c, t).apply(u0 - *fixed);
    }

    // Rank one: C = g r with r the dominant row. The driving linear function
    // s = r.U obeys s' = tau s + beta with tau = tr C and beta = r.b, and
    // U(t) = U0 + g * integral(s) + b t.
    const Vec2 row0{c(0, 0), c(0, 1)};
    const Vec2 row1{c(1, 0), c(1, 1)};
    const Vec2 r = (norm(row0) >= norm(row1)) ? row0 : row1;
    const double rr = dot(r, r);
    const Vec2 g{(c(0, 0) * r[0] + c(0, 1) * r[1]) / rr, (c(1, 0) * r[0] + c(1, 1) * r[1]) / rr};

    const double tau = c.trace();
    const double beta = dot(r, b);
    const double s0 = dot(r, u0);
    double integral = 0.0;
    if (std::abs(tau) > kEntryTol * c.norm_fro()) {
        const double shifted = s0 + beta / tau;
        integral = shifted * std::expm1(tau * t) / tau - (beta / tau) * t;
    } else {
        integral = s0 * t + beta * t * t / 2.0;
    }
    return u0 + integral * g + t * b;
}

Vec2 drag_linear_function(Vec2 a_row, const LinearField2& f, double t) {
    require_2x2(f);
    require_homogeneous(f);
    const SquareMatrix e = exp2_closed(f.c, t);
    return {a_row[0] * e(0, 0) + a_row[1] * e(1, 0), a_row[0] * e(0, 1) + a_row[1] * e(1, 1)};
}

SquareMatrix coframe_drag_matrix(const LinearField2& f, double t) {
    require_2x2(f);
    return exp2_closed(f.c, t);
}

SquareMatrix frame_drag_matrix(const LinearField2& f, double t) {
    require_2x2(f);
    return exp2_closed(f.c, -t);
}

namespace {

// Closed-form antiderivative of 1/(c3 + (c4-c1) p - c2 p^2) together with the
// real roots of the denominator (for ray/branch checks).
struct Quadrature {
    double eval(double p) const {
        switch (regime) {
            case TwoRealRoots: return std::log(std::abs((p - r1) / (p - r2))) / (a * (r1 - r2));
            case DoubleRoot: return -1.0 / (a * (p - r1));
            case ComplexRoots: return 2.0 / srt * std::atan((2.0 * a * p + bq) / srt);
            case Linear: return std::log(std::abs(bq * p + cq)) / bq;
            case Constant: return p / cq;
        }
        return 0.0;
    }

    enum Regime { TwoRealRoots, DoubleRoot, ComplexRoots, Linear, Constant } regime;
    double a = 0.0, bq = 0.0, cq = 0.0;
    double r1 = 0.0, r2 = 0.0; // real roots when present
    double srt = 0.0;          // sqrt(-disc) in the complex regime
    int root_count = 0;
};

Quadrature build_quadrature(const SquareMatrix& c) {
    Quadrature q{};
    const double fro = c.norm_fro();
    q.a = -c(0, 1);
    q.bq = c(1, 1) - c(0, 0);
    q.cq = c(1, 0);
    if (std::abs(q.a) > kEntryTol * fro) {
        const double disc = q.bq * q.bq + 4.0 * c(0, 1) * c(1, 0); // = 4 Delta
        if (std::abs(disc) <= kRegionTol * fro * fro) {
            q.regime = Quadrature::DoubleRoot;
            q.r1 = q.r2 = -q.bq / (2.0 * q.a);
            q.root_count = 1;
        } else if (disc > 0.0) {
            q.regime = Quadrature::TwoRealRoots;
            const double root = std::sqrt(disc);
            q.r1 = (-q.bq + root) / (2.0 * q.a);
            q.r2 = (-q.bq - root) / (2.0 * q.a);
            q.root_count = 2;
        } else {
            q.regime = Quadrature::ComplexRoots;
            q.srt = std::sqrt(-disc);
        }
    } else if (std::abs(q.bq) > kEntryTol * fro) {
        q.regime = Quadrature::Linear;
        q.r1 = -q.cq / q.bq;
        q.root_count = 1;
    } else {
        q.regime = Quadrature::Constant; // cq != 0 here; scalar matrices are handled earlier
    }
    return q;
}

bool root_blocks(double root, double p) {
    const double lo = std::min(0.0, p);
    const double hi = std::max(0.0, p);
    return root > lo && root < hi;
}

} // namespace

double invariant_linear(const LinearField2& f, Vec2 u) {
    require_2x2(f);
    require_homogeneous(f);
    if (u[0] == 0.0) throw Error("origin", "invariant evaluated at u = 0");
    const SquareMatrix& c = f.c;
    if (c.is_zero()) return 0.0;

    const double fro = c.norm_fro();
    if (is_scalar_matrix(c, kEntryTol * fro)) {
        // Radial field: p itself is invariant; ln|p| is the limit of the
        // trace-weighted quadrature term.
        if (u[1] == 0.0) throw Error("on-singular-ray", "scalar-field invariant undefined at v = 0");
        return std::log(std::abs(u[1] / u[0]));
    }

    const double p = u[1] / u[0];
    const double w = c(1, 0) * u[0] * u[0] + (c(1, 1) - c(0, 0)) * u[0] * u[1] -
                     c(0, 1) * u[1] * u[1];
    if (w == 0.0) throw Error("on-singular-ray", "evaluation point lies on an eigenray (W = 0)");

    const Quadrature q = build_quadrature(c);
    const double tr = c.trace();
    const double raw = 0.5 * std::log(std::abs(w)) - (tr / 2.0) * q.eval(p);

    // Canonical constant: I(1, 0) = 0, reachable only when the reference ray
    // is regular and no denominator root separates p from 0.
    const bool reference_regular = std::abs(c(1, 0)) > kEntryTol * fro;
    if (!reference_regular) return raw;
    for (int k = 0; k < q.root_count; ++k) {
        const double root = (k == 0) ? q.r1 : q.r2;
        if (root_blocks(root, p))
            throw Error("on-singular-ray",
                        "quadrature denominator vanishes between the reference ray and p");
    }
    const double ref = 0.5 * std::log(std::abs(c(1, 0))) - (tr / 2.0) * q.eval(0.0);
    return raw - ref;
}

double second_order_residual(const LinearField2& f, Vec2 u0, double t, double h) {
    require_2x2(f);
    require_homogeneous(f);
    if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
    const Vec2 um = flow_point(f, u0, t - h);
    const Vec2 u = flow_point(f, u0, t);
    const Vec2 up = flow_point(f, u0, t + h);
    const double tr = f.c.trace();
    const double det = f.c(0, 0) * f.c(1, 1) - f.c(0, 1) * f.c(1, 0);
    const Vec2 second = (1.0 / (h * h)) * (up - 2.0 * u + um);
    const Vec2 first = (1.0 / (2.0 * h)) * (up - um);
    const Vec2 res = second - tr * first + det * u;
    return norm(res);
}

expr::Field2 to_expr_field(const LinearField2& f) {
    require_2x2(f);
    require_homogeneous(f);
    using expr::Expr;
    const Expr u = Expr::variable(expr::Var::U);
    const Expr v = Expr::variable(expr::Var::V);
    return {Expr::constant(f.c(0, 0)) * u + Expr::constant(f.c(0, 1)) * v,
            Expr::constant(f.c(1, 0)) * u + Expr::constant(f.c(1, 1)) * v};
}

} // namespace flowlab::planar
