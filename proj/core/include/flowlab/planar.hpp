#pragma once

#include <complex>
#include <optional>
#include <string_view>

#include "flowlab/expr.hpp"
#include "flowlab/matrix.hpp"
#include "flowlab/vec.hpp"

namespace flowlab::planar {

/// Linear (or, with b set, affine) vector field U' = CU + b on the plane.
struct LinearField2 {
    SquareMatrix c;
    std::optional<Vec2> b;
};

enum class FlowKind {
    StableFocus,
    UnstableFocus,
    Center,
    Saddle,
    StableHyperbolicNode,
    UnstableHyperbolicNode,
    StableParabolicNode,
    UnstableParabolicNode,
    StarNode,
    DegenerateLine,
    Zero,
};

std::string_view to_string(FlowKind kind);

/// Classification outcome with the quantities it was decided on. For
/// DegenerateLine, invariant_row holds the unit left null row (a, b) of C and
/// rate the trace (the exponential rate of the sliding along the lines).
struct FlowClass {
    FlowKind kind;
    double tr = 0.0;
    double det = 0.0;
    double delta = 0.0; // (tr^2 - 4 det)/4
    std::complex<double> lambda1;
    std::complex<double> lambda2;
    std::optional<Vec2> invariant_row;
    double rate = 0.0;
};

/// Region test against the (tr, det) parabola delta = 0 with scale-invariant
/// tolerances (1e-10 * ||C||_F^2 for det and delta). Total: every finite C
/// gets a kind. Requires the homogeneous part (b absent or zero).
FlowClass classify(const LinearField2& f);

/// Flow map of the field through time t. Homogeneous fields use the closed
/// 2x2 exponential. Affine fields: invertible C shifts the singular point;
/// rank-one C reduces to a scalar linear ODE for the driving linear function;
/// C = 0 moves uniformly along straight lines.
Vec2 flow_point(const LinearField2& f, Vec2 u0, double t);

/// Singular point U* with CU* + b = 0 when C is invertible.
std::optional<Vec2> singular_point(const LinearField2& f);

/// A linear function A U is dragged to A e^{Ct} U; returns the dragged row.
Vec2 drag_linear_function(Vec2 a_row, const LinearField2& f, double t);

/// Coframe components are dragged by e^{tC}, frame components by e^{-tC}.
SquareMatrix coframe_drag_matrix(const LinearField2& f, double t);
SquareMatrix frame_drag_matrix(const LinearField2& f, double t);

/// First integral of a homogeneous linear field from the homothety symmetry:
/// I = (1/2) ln|W| - (tr C / 2) * Q(p) with W the Wronskian
/// c3 u^2 + (c4-c1) uv - c2 v^2, p = v/u, and Q the closed-form quadrature of
/// dp over the same quadratic c3 + (c4-c1) p - c2 p^2 (three regimes by the
/// sign of its discriminant, which equals (tr C)^2 - 4 det C). The constant is
/// fixed by I(1, 0) = 0 whenever the reference ray is regular, otherwise the
/// raw antiderivative is returned (invariant up to an additive constant).
/// Scalar matrices C = aI get the limiting invariant ln|v/u|.
/// Throws Error("origin") at u = 0 and Error("on-singular-ray") when the
/// evaluation ray is separated from the reference by a root of the quadrature
/// denominator (or sits on one).
double invariant_linear(const LinearField2& f, Vec2 u);

/// Central finite-difference residual of U'' - tr C U' + det C U at (u0, t);
/// O(h^2) for the exact flow.
double second_order_residual(const LinearField2& f, Vec2 u0, double t, double h);

/// Expression rendering of the homogeneous field, for symbolic cross-checks.
expr::Field2 to_expr_field(const LinearField2& f);

} // namespace flowlab::planar
