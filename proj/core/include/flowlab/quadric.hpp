#pragma once

#include <array>
#include <string_view>
#include <utility>

#include "flowlab/matrix.hpp"
#include "flowlab/vec.hpp"

namespace flowlab::quadric {

/// Symmetric invertible coefficient matrix A of the quadric (1/2) U^T A U,
/// kept together with its inverse. Construction symmetrizes tiny asymmetries
/// (within 1e-12 of scale) and rejects anything worse, as well as singular A.
class QuadricGroup {
public:
    explicit QuadricGroup(SquareMatrix a);

    /// "sphere" (A = I) or "lorentz" (A = diag(-2, -2, 2), the coefficient
    /// matrix of -(u^2 + v^2 - w^2)).
    static QuadricGroup preset(std::string_view name);

    const SquareMatrix& a() const { return a_; }
    const SquareMatrix& a_inverse() const { return abar_; }

private:
    SquareMatrix a_;
    SquareMatrix abar_;
};

/// Constant coefficients of P = p1 X1 + p2 X2 + p3 X3; p must be nonzero.
struct AxisField {
    explicit AxisField(Vec3 coefficients);
    Vec3 p;
};

enum class FlowType { Elliptic, Hyperbolic, Parabolic };

std::string_view to_string(FlowType t);

struct FlowType3 {
    FlowType type;
    double epsilon;
};

/// Gradient of f = (1/2) U^T A U, i.e. A U.
Vec3 grad_f(const QuadricGroup& g, Vec3 u);

/// The three fundamental fields at U: X1 = (0, f3, -f2), X2 = (-f3, 0, f1),
/// X3 = (f2, -f1, 0) with f = A U. They satisfy f1 X1 + f2 X2 + f3 X3 = 0.
std::array<Vec3, 3> fundamental_fields(const QuadricGroup& g, Vec3 u);

/// The fields are linear in U; these are their matrices (Xk(U) = M_k U).
std::array<SquareMatrix, 3> fundamental_field_matrices(const QuadricGroup& g);

/// Residual of the commutator table at U: compares the numerically computed
/// bracket [X_i, X_j] (central differences with step h) against the
/// structure-constant combination rows of A ([X1,X2] = sum_k a_{3k} X_k and
/// cyclic). i, j in 1..3.
double commutator_check(const QuadricGroup& g, int i, int j, Vec3 u, double h);

/// Bordered 4x4 determinant of (A, p) deciding the orbit type.
double epsilon(const QuadricGroup& g, const AxisField& p);

/// Sign classification of epsilon with tolerance 1e-10 ||A||^3 ||p||^2.
FlowType3 classify_axis(const QuadricGroup& g, const AxisField& p);

/// B = A * skew(p), traceless, singular, with B^3 = epsilon B.
SquareMatrix b_matrix(const QuadricGroup& g, const AxisField& p);

/// Branch functions of the dragging law: phi1 = sin(l t)/l, sinh(l t)/l or t;
/// phi2 = (1 - cos(l t))/l^2, (cosh(l t) - 1)/l^2 or t^2/2, by the sign of
/// eps (l = sqrt(|eps|)), evaluated cancellation-free near eps = 0.
double drag_phi1(double eps, double t);
double drag_phi2(double eps, double t);

/// S_t = S + S' phi1 + S'' phi2, the solution of S''' = eps S'.
template <typename T>
T drag_solution(const T& s, const T& sp, const T& spp, double eps, double t) {
    return s + drag_phi1(eps, t) * sp + drag_phi2(eps, t) * spp;
}

/// e^{Bt} = I + B phi1 + B^2 phi2, valid because B^3 = eps B. Throws
/// Error("b-cubed-mismatch") when ||B^3 - eps B|| exceeds 1e-6 ||B||^3.
SquareMatrix exp_b(const SquareMatrix& b, double eps, double t);

/// The two invariants of P at U: f = (1/2) U^T A U and g = p . U.
std::pair<double, double> p_invariants(const QuadricGroup& g, const AxisField& p, Vec3 u);

/// Point transported along the flow of P for time t (the motion induced by
/// e^{Bt} on points, which is its transpose action).
Vec3 orbit_point(const QuadricGroup& g, const AxisField& p, Vec3 u0, double t);

} // namespace flowlab::quadric
