#include <doctest.h>

#include <cmath>

#include "flowlab/error.hpp"
#include "flowlab/quadric.hpp"
#include "support.hpp"

using namespace flowlab;
using namespace flowlab::quadric;
using testsupport::Rng;

namespace {

AxisField scaled_axis(const QuadricGroup& g, Vec3 p) {
    // Keep |epsilon| small enough that hyperbolic orbits stay representable
    // over long time spans.
    AxisField axis(p);
    const double eps = epsilon(g, axis);
    const double s = std::min(1.0, 0.5 / std::sqrt(std::abs(eps) + 1e-12));
    return AxisField{{p[0] * s, p[1] * s, p[2] * s}};
}

} // namespace

TEST_CASE("QuadricGroup construction and presets") {
    CHECK_THROWS_AS(QuadricGroup(SquareMatrix{{1, 2, 0}, {0, 1, 0}, {0, 0, 1}}), Error);
    CHECK_THROWS_AS(QuadricGroup(SquareMatrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 0}}), Error);
    CHECK_THROWS_AS(QuadricGroup::preset("torus"), Error);

    const QuadricGroup sphere = QuadricGroup::preset("sphere");
    CHECK((sphere.a() - SquareMatrix::identity(3)).norm_inf() == 0.0);

    const QuadricGroup lorentz = QuadricGroup::preset("lorentz");
    CHECK(lorentz.a()(0, 0) == -2.0);
    CHECK(lorentz.a()(2, 2) == 2.0);

    Rng rng(51);
    for (int trial = 0; trial < 50; ++trial) {
        const QuadricGroup g(testsupport::random_invertible_symmetric3(rng));
        CHECK((g.a() * g.a_inverse() - SquareMatrix::identity(3)).norm_inf() <= 1e-10);
    }
}

TEST_CASE("grad_f") {
    const QuadricGroup sphere = QuadricGroup::preset("sphere");
    const Vec3 v = grad_f(sphere, {1.0, 2.0, 3.0});
    CHECK(v[0] == 1.0);
    CHECK(v[2] == 3.0);

    const QuadricGroup lorentz = QuadricGroup::preset("lorentz");
    const Vec3 w = grad_f(lorentz, {1.0, 0.0, 1.0});
    CHECK(w[0] == -2.0);
    CHECK(w[1] == 0.0);
    CHECK(w[2] == 2.0);

    const Vec3 zero = grad_f(lorentz, {0.0, 0.0, 0.0});
    CHECK(norm(zero) == 0.0);
}

TEST_CASE("fundamental fields: pinned values, dependence, rank") {
    const QuadricGroup sphere = QuadricGroup::preset("sphere");
    const auto at_pole = fundamental_fields(sphere, {0.0, 0.0, 1.0});
    CHECK(at_pole[0] == Vec3{0.0, 1.0, 0.0});
    CHECK(at_pole[1] == Vec3{-1.0, 0.0, 0.0});
    CHECK(at_pole[2] == Vec3{0.0, 0.0, 0.0});

    Rng rng(52);
    for (int trial = 0; trial < 1000; ++trial) {
        const QuadricGroup g(testsupport::random_invertible_symmetric3(rng));
        const Vec3 u{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const Vec3 f = grad_f(g, u);
        const auto x = fundamental_fields(g, u);
        const Vec3 combo = f[0] * x[0] + f[1] * x[1] + f[2] * x[2];
        CHECK(norm(combo) <= 1e-12 * (1.0 + norm(f) * norm(f)));
    }

    // At the classical preset the fields reduce to the rotation operators.
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 u{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const auto x = fundamental_fields(sphere, u);
        CHECK(x[0] == Vec3{0.0, u[2], -u[1]});
        CHECK(x[1] == Vec3{-u[2], 0.0, u[0]});
        CHECK(x[2] == Vec3{u[1], -u[0], 0.0});
    }

    // Rank of the field matrix is exactly 2 away from the origin: the third
    // singular value vanishes relative to the top ones. The two leading
    // singular values come from the normal matrix; the smallest is recovered
    // from the determinant (the normal-matrix route squares its defect away).
    for (int trial = 0; trial < 50; ++trial) {
        const QuadricGroup g(testsupport::random_invertible_symmetric3(rng));
        Vec3 u{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        if (norm(u) < 0.1) u[0] += 1.0;
        const Vec3 f = grad_f(g, u);
        SquareMatrix m{{0.0, -f[2], f[1]}, {f[2], 0.0, -f[0]}, {-f[1], f[0], 0.0}};
        const auto sv2 = eig3(m.transposed() * m); // singular values squared
        const double s0 = std::sqrt(std::abs(sv2[0].real()));
        const double s1 = std::sqrt(std::abs(sv2[1].real()));
        CHECK(s0 == doctest::Approx(norm(f)).epsilon(1e-6));
        CHECK(s1 == doctest::Approx(norm(f)).epsilon(1e-6));
        const double s2 = std::abs(determinant(m)) / (s0 * s1);
        CHECK(s2 <= 1e-10 * s0);
    }
}

TEST_CASE("commutator table from the structure rows") {
    const QuadricGroup sphere = QuadricGroup::preset("sphere");
    CHECK(commutator_check(sphere, 1, 2, {1.0, 2.0, 3.0}, 1e-4) <= 1e-9);
    CHECK(commutator_check(sphere, 1, 1, {1.0, 2.0, 3.0}, 1e-4) == 0.0);

    Rng rng(53);
    const QuadricGroup lorentz = QuadricGroup::preset("lorentz");
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 u{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const int i = rng.integer(1, 3);
        const int j = rng.integer(1, 3);
        const double scale = 4.0 * (norm(u) + 1.0);
        CHECK(commutator_check(lorentz, i, j, u, 1e-4) <= 1e-9 * scale);
    }
    for (int trial = 0; trial < 100; ++trial) {
        const QuadricGroup g(testsupport::random_invertible_symmetric3(rng));
        const Vec3 u{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const double scale = g.a().norm_fro() * g.a().norm_fro() * (norm(u) + 1.0);
        CHECK(commutator_check(g, rng.integer(1, 3), rng.integer(1, 3), u, 1e-4) <=
              1e-9 * scale);
    }
}

TEST_CASE("exact matrix brackets match the structure rows") {
    Rng rng(54);
    for (int trial = 0; trial < 100; ++trial) {
        const QuadricGroup g(testsupport::random_invertible_symmetric3(rng));
        const auto m = fundamental_field_matrices(g);
        // Field values come from the matrices.
        const Vec3 u{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const auto fields = fundamental_fields(g, u);
        for (int k = 0; k < 3; ++k) CHECK(norm(m[k].apply(u) - fields[k]) <= 1e-14);
        // [X_i, X_j] as matrices: M_j M_i - M_i M_j, against the A rows.
        const int pairs[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}; // (i, j, row)
        for (const auto& pr : pairs) {
            const SquareMatrix bracket = m[pr[1]] * m[pr[0]] - m[pr[0]] * m[pr[1]];
            SquareMatrix expected(3);
            for (int k = 0; k < 3; ++k) expected += g.a()(pr[2], k) * m[k];
            CHECK((bracket - expected).norm_inf() <= 1e-12 * (1.0 + expected.norm_inf()));
        }
    }
}

TEST_CASE("epsilon: pinned values and the sphere identity") {
    const QuadricGroup sphere = QuadricGroup::preset("sphere");
    CHECK(epsilon(sphere, AxisField{{0.0, 0.0, 1.0}}) == doctest::Approx(-1.0));

    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        if (norm(p) < 0.1) continue;
        CHECK(epsilon(sphere, AxisField{p}) == doctest::Approx(-dot(p, p)).epsilon(1e-12));
        CHECK(classify_axis(sphere, AxisField{p}).type == FlowType::Elliptic);
    }

    const QuadricGroup lorentz = QuadricGroup::preset("lorentz");
    CHECK(epsilon(lorentz, AxisField{{0.0, 0.0, 1.0}}) == doctest::Approx(-4.0));
    CHECK(classify_axis(lorentz, AxisField{{0.0, 0.0, 1.0}}).type == FlowType::Elliptic);
    CHECK(epsilon(lorentz, AxisField{{1.0, 0.0, 0.0}}) == doctest::Approx(4.0));
    CHECK(classify_axis(lorentz, AxisField{{1.0, 0.0, 0.0}}).type == FlowType::Hyperbolic);
    CHECK(classify_axis(lorentz, AxisField{{1.0, 0.0, 1.0}}).type == FlowType::Parabolic);

    CHECK_THROWS_AS(AxisField({0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("b_matrix: pinned value and the cubic identity") {
    const QuadricGroup sphere = QuadricGroup::preset("sphere");
    const SquareMatrix b = b_matrix(sphere, AxisField{{0.0, 0.0, 1.0}});
    CHECK(b(0, 1) == -1.0);
    CHECK(b(1, 0) == 1.0);
    CHECK(b(2, 2) == 0.0);

    Rng rng(56);
    for (int trial = 0; trial < 100; ++trial) {
        const QuadricGroup g(testsupport::random_invertible_symmetric3(rng));
        const Vec3 p{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        if (norm(p) < 0.1) continue;
        const AxisField axis{p};
        const SquareMatrix bb = b_matrix(g, axis);
        CHECK(std::abs(bb.trace()) <= 1e-12 * (1.0 + bb.norm_inf()));
        CHECK(std::abs(determinant(bb)) <= 1e-12 * std::pow(bb.norm_fro() + 1.0, 3));
        const double eps = epsilon(g, axis);
        const SquareMatrix b3 = bb * bb * bb;
        const double nb = bb.norm_inf();
        CHECK((b3 - eps * bb).norm_inf() <= 1e-8 * (nb * nb * nb + 1e-30));
    }
}

TEST_CASE("drag_solution: branches, continuity, and the third-order law") {
    CHECK(drag_solution(2.5, 0.0, 0.0, -3.0, 7.0) == 2.5);
    CHECK(drag_solution(0.0, 1.0, 0.0, -1.0, M_PI / 2.0) == doctest::Approx(1.0));

    for (double eps : {-1e-12, 1e-12}) {
        const double with_eps = drag_solution(0.7, -0.4, 1.1, eps, 1.0);
        const double parabolic = drag_solution(0.7, -0.4, 1.1, 0.0, 1.0);
        CHECK(std::abs(with_eps - parabolic) <= 1e-10);
    }

    Rng rng(57);
    for (double eps : {-2.0, -0.3, 0.0, 0.4, 1.7}) {
        const double s = rng.uniform(-1, 1), sp = rng.uniform(-1, 1), spp = rng.uniform(-1, 1);
        for (double t : {0.3, 1.1, 2.4}) {
            const double h = 1e-2;
            auto at = [&](double tt) { return drag_solution(s, sp, spp, eps, tt); };
            const double third = (at(t + 2 * h) - 2 * at(t + h) + 2 * at(t - h) - at(t - 2 * h)) /
                                 (2 * h * h * h);
            const double first = (at(t + h) - at(t - h)) / (2 * h);
            CHECK(std::abs(third - eps * first) <= 1e-4 * (1.0 + std::abs(eps * first)));
        }
    }
}

TEST_CASE("exp_b: identity, rotation block, series agreement") {
    CHECK((exp_b(SquareMatrix(3), 0.0, 2.0) - SquareMatrix::identity(3)).norm_inf() == 0.0);

    const QuadricGroup sphere = QuadricGroup::preset("sphere");
    const AxisField waxis{{0.0, 0.0, 1.0}};
    const SquareMatrix b = b_matrix(sphere, waxis);
    const SquareMatrix quarter = exp_b(b, epsilon(sphere, waxis), M_PI / 2.0);
    CHECK(quarter(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(quarter(0, 1) == doctest::Approx(-1.0));
    CHECK(quarter(1, 0) == doctest::Approx(1.0));
    CHECK(quarter(2, 2) == doctest::Approx(1.0));
    CHECK((quarter - exp_series(b, M_PI / 2.0)).norm_inf() <= 1e-12);

    Rng rng(58);
    for (int trial = 0; trial < 100; ++trial) {
        const QuadricGroup g(testsupport::random_invertible_symmetric3(rng));
        const AxisField axis = scaled_axis(
            g, {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.1, 1)});
        const SquareMatrix bb = b_matrix(g, axis);
        const double eps = epsilon(g, axis);
        const double t = rng.uniform(0.0, 10.0);
        CHECK((exp_b(bb, eps, t) - exp_series(bb, t)).norm_inf() <= 1e-8);
    }

    CHECK_THROWS_AS(exp_b(b, 5.0, 1.0), Error);
    try {
        exp_b(b, 5.0, 1.0);
    } catch (const Error& e) {
        CHECK(e.code() == "b-cubed-mismatch");
    }
}

TEST_CASE("cyclic permutation around the 1:1:1 axis") {
    const QuadricGroup sphere = QuadricGroup::preset("sphere");
    const double c = 1.0 / std::sqrt(3.0);
    const AxisField axis{{c, c, c}};
    const SquareMatrix b = b_matrix(sphere, axis);
    const SquareMatrix third = exp_b(b, epsilon(sphere, axis), 2.0 * M_PI / 3.0);
    const SquareMatrix cycle{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
    CHECK((third - cycle).norm_inf() <= 1e-9);
    const SquareMatrix two_thirds = exp_b(b, epsilon(sphere, axis), 4.0 * M_PI / 3.0);
    CHECK((two_thirds - cycle * cycle).norm_inf() <= 1e-9);
}

TEST_CASE("p_invariants and orbit conservation") {
    const QuadricGroup sphere = QuadricGroup::preset("sphere");
    const AxisField waxis{{0.0, 0.0, 1.0}};
    const auto [f, g] = p_invariants(sphere, waxis, {1.0, 0.0, 0.0});
    CHECK(f == doctest::Approx(0.5));
    CHECK(g == doctest::Approx(0.0));
    const auto [f0, g0] = p_invariants(sphere, waxis, {0.0, 0.0, 0.0});
    CHECK(f0 == 0.0);
    CHECK(g0 == 0.0);

    Rng rng(59);
    const QuadricGroup lorentz = QuadricGroup::preset("lorentz");
    for (int trial = 0; trial < 50; ++trial) {
        const Vec3 u{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const AxisField axis{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.1, 1)}};
        // Directional derivative of both invariants along P at u.
        const SquareMatrix b = b_matrix(lorentz, axis);
        const Vec3 pvec = b.transposed().apply(u);
        const Vec3 grad = grad_f(lorentz, u);
        CHECK(std::abs(dot(grad, pvec)) <= 1e-10 * (1.0 + norm(grad) * norm(pvec)));
        CHECK(std::abs(dot(axis.p, pvec)) <= 1e-10 * (1.0 + norm(pvec)));
    }

    for (int trial = 0; trial < 100; ++trial) {
        const QuadricGroup g3(testsupport::random_invertible_symmetric3(rng));
        const AxisField axis = scaled_axis(
            g3, {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.1, 1)});
        const Vec3 u0{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const auto [fa, ga] = p_invariants(g3, axis, u0);
        for (double t : {0.5, 2.5, 6.0, 10.0}) {
            const Vec3 ut = orbit_point(g3, axis, u0, t);
            const auto [fb, gb] = p_invariants(g3, axis, ut);
            CHECK(std::abs(fb - fa) <= 1e-8 * (1.0 + std::abs(fa)));
            CHECK(std::abs(gb - ga) <= 1e-8 * (1.0 + std::abs(ga)));
        }
    }
}
