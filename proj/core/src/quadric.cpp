#include "flowlab/quadric.hpp"

#include <cmath>
#include <stdexcept>

#include "flowlab/error.hpp"

namespace flowlab::quadric {

namespace {

SquareMatrix skew(Vec3 p) {
    SquareMatrix m(3);
    m(0, 1) = -p[2];
    m(0, 2) = p[1];
    m(1, 0) = p[2];
    m(1, 2) = -p[0];
    m(2, 0) = -p[1];
    m(2, 1) = p[0];
    return m;
}

} // namespace

QuadricGroup::QuadricGroup(SquareMatrix a) : a_(std::move(a)), abar_(3) {
    if (a_.size() != 3) throw std::invalid_argument("quadric coefficient matrix must be 3x3");
    const double scale = a_.norm_fro();
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            if (std::abs(a_(i, j) - a_(j, i)) > 1e-12 * scale)
                throw Error("not-symmetric", "quadric coefficient matrix is not symmetric");
            const double mean = (a_(i, j) + a_(j, i)) / 2.0;
            a_(i, j) = a_(j, i) = mean;
        }
    abar_ = inverse3(a_); // throws Error("singular-matrix") if degenerate
}

QuadricGroup QuadricGroup::preset(std::string_view name) {
    if (name == "sphere") return QuadricGroup(SquareMatrix::identity(3));
    if (name == "lorentz")
        return QuadricGroup(SquareMatrix{{-2.0, 0.0, 0.0}, {0.0, -2.0, 0.0}, {0.0, 0.0, 2.0}});
    throw Error("unknown-preset", "unknown quadric preset '" + std::string(name) + "'");
}

AxisField::AxisField(Vec3 coefficients) : p(coefficients) {
    if (p[0] == 0.0 && p[1] == 0.0 && p[2] == 0.0)
        throw std::invalid_argument("axis coefficients must be nonzero");
}

std::string_view to_string(FlowType t) {
    switch (t) {
        case FlowType::Elliptic: return "Elliptic";
        case FlowType::Hyperbolic: return "Hyperbolic";
        case FlowType::Parabolic: return "Parabolic";
    }
    return "?";
}

Vec3 grad_f(const QuadricGroup& g, Vec3 u) { return g.a().apply(u); }

std::array<Vec3, 3> fundamental_fields(const QuadricGroup& g, Vec3 u) {
    const Vec3 f = grad_f(g, u);
    return {Vec3{0.0, f[2], -f[1]}, Vec3{-f[2], 0.0, f[0]}, Vec3{f[1], -f[0], 0.0}};
}

std::array<SquareMatrix, 3> fundamental_field_matrices(const QuadricGroup& g) {
    const SquareMatrix& a = g.a();
    std::array<SquareMatrix, 3> m{SquareMatrix(3), SquareMatrix(3), SquareMatrix(3)};
    for (int j = 0; j < 3; ++j) {
        // X1 = (0, f3, -f2), rows of A give the f components.
        m[0](1, j) = a(2, j);
        m[0](2, j) = -a(1, j);
        m[1](0, j) = -a(2, j);
        m[1](2, j) = a(0, j);
        m[2](0, j) = a(1, j);
        m[2](1, j) = -a(0, j);
    }
    return m;
}

double commutator_check(const QuadricGroup& g, int i, int j, Vec3 u, double h) {
    if (i < 1 || i > 3 || j < 1 || j > 3) throw std::invalid_argument("field indices are 1..3");
    if (!(h > 0.0)) throw std::invalid_argument("h must be positive");

    auto field = [&g](int k, Vec3 at) { return fundamental_fields(g, at)[static_cast<std::size_t>(k)]; };
    auto jacobian = [&](int k, Vec3 at) {
        SquareMatrix jac(3);
        for (int col = 0; col < 3; ++col) {
            Vec3 ap = at, am = at;
            ap[static_cast<std::size_t>(col)] += h;
            am[static_cast<std::size_t>(col)] -= h;
            const Vec3 fp = field(k, ap);
            const Vec3 fm = field(k, am);
            for (int row = 0; row < 3; ++row)
                jac(row, col) = (fp[static_cast<std::size_t>(row)] - fm[static_cast<std::size_t>(row)]) / (2.0 * h);
        }
        return jac;
    };

    const int a = i - 1, b = j - 1;
    const Vec3 xi = field(a, u);
    const Vec3 xj = field(b, u);
    const Vec3 bracket = jacobian(b, u).apply(xi) - jacobian(a, u).apply(xj);

    // [X1,X2] = sum_k a_{3k} X_k and cyclic; swapped arguments flip the sign.
    Vec3 expected{0.0, 0.0, 0.0};
    if (i != j) {
        const int row = 6 - i - j;
        const double sign = (j == i % 3 + 1) ? 1.0 : -1.0;
        const auto fields = fundamental_fields(g, u);
        for (int k = 0; k < 3; ++k)
            expected = expected + (sign * g.a()(row - 1, k)) * fields[static_cast<std::size_t>(k)];
    }
    return norm(bracket - expected);
}

double epsilon(const QuadricGroup& g, const AxisField& p) {
    SquareMatrix m(4);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m(i, j) = g.a()(i, j);
        m(i, 3) = p.p[static_cast<std::size_t>(i)];
        m(3, i) = p.p[static_cast<std::size_t>(i)];
    }
    return determinant(m);
}

FlowType3 classify_axis(const QuadricGroup& g, const AxisField& p) {
    const double eps = epsilon(g, p);
    const double na = g.a().norm_fro();
    const double np = norm(p.p);
    const double tol = 1e-10 * na * na * na * np * np;
    if (std::abs(eps) <= tol) return {FlowType::Parabolic, eps};
    return {eps < 0.0 ? FlowType::Elliptic : FlowType::Hyperbolic, eps};
}

SquareMatrix b_matrix(const QuadricGroup& g, const AxisField& p) { return g.a() * skew(p.p); }

double drag_phi1(double eps, double t) {
    const double x = eps * t * t;
    if (std::abs(x) < 1e-10) return t * (1.0 + x / 6.0 + x * x / 120.0);
    const double l = std::sqrt(std::abs(eps));
    return (eps > 0.0) ? std::sinh(l * t) / l : std::sin(l * t) / l;
}

double drag_phi2(double eps, double t) {
    const double x = eps * t * t;
    if (std::abs(x) < 1e-10) return t * t / 2.0 * (1.0 + x / 12.0 + x * x / 360.0);
    const double l = std::sqrt(std::abs(eps));
    if (eps > 0.0) {
        const double s = std::sinh(l * t / 2.0);
        return 2.0 * s * s / (eps); // cosh(lt) - 1 without cancellation
    }
    const double s = std::sin(l * t / 2.0);
    return 2.0 * s * s / (-eps); // 1 - cos(lt) without cancellation
}

SquareMatrix exp_b(const SquareMatrix& b, double eps, double t) {
    if (b.size() != 3) throw std::invalid_argument("exp_b expects a 3x3 matrix");
    if (b.is_zero()) return SquareMatrix::identity(3);
    const SquareMatrix b2 = b * b;
    const SquareMatrix b3 = b2 * b;
    const double nb = b.norm_inf();
    if ((b3 - eps * b).norm_inf() > 1e-6 * nb * nb * nb)
        throw Error("b-cubed-mismatch", "B^3 != eps B within tolerance");
    return SquareMatrix::identity(3) + drag_phi1(eps, t) * b + drag_phi2(eps, t) * b2;
}

std::pair<double, double> p_invariants(const QuadricGroup& g, const AxisField& p, Vec3 u) {
    const double f = 0.5 * dot(u, g.a().apply(u));
    const double gg = dot(p.p, u);
    return {f, gg};
}

Vec3 orbit_point(const QuadricGroup& g, const AxisField& p, Vec3 u0, double t) {
    const SquareMatrix b = b_matrix(g, p);
    const double eps = classify_axis(g, p).epsilon;
    return exp_b(b, eps, t).transposed().apply(u0);
}

} // namespace flowlab::quadric
