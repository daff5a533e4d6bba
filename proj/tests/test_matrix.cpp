#include <doctest.h>

#include <cmath>
#include <complex>

#include "flowlab/error.hpp"
#include "flowlab/matrix.hpp"
#include "support.hpp"

using namespace flowlab;
using testsupport::Rng;
using testsupport::random_matrix2;

namespace {
const SquareMatrix kRotation{{0.0, -1.0}, {1.0, 0.0}};
}

TEST_CASE("eig2 on pinned matrices") {
    const ComplexPair zero = eig2(SquareMatrix{{0.0, 0.0}, {0.0, 0.0}});
    CHECK(zero.lambda1 == std::complex<double>(0.0, 0.0));
    CHECK(zero.lambda2 == std::complex<double>(0.0, 0.0));

    const ComplexPair rot = eig2(kRotation);
    CHECK(rot.lambda1.real() == doctest::Approx(0.0));
    CHECK(rot.lambda1.imag() == doctest::Approx(1.0));
    CHECK(rot.lambda2.imag() == doctest::Approx(-1.0));

    const ComplexPair diag = eig2(SquareMatrix{{1.0, 0.0}, {0.0, -1.0}});
    CHECK(diag.lambda1.real() == doctest::Approx(1.0));
    CHECK(diag.lambda2.real() == doctest::Approx(-1.0));
    CHECK(diag.lambda1.imag() == 0.0);
}

TEST_CASE("eig2 satisfies the trace/determinant identities and ordering") {
    Rng rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const SquareMatrix c = random_matrix2(rng);
        const auto [l1, l2] = eig2(c);
        const double tr = c.trace();
        const double det = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
        const double scale = c.norm_fro() + 1.0;
        CHECK(std::abs(l1 + l2 - tr) <= 1e-10 * scale);
        CHECK(std::abs(l1 * l2 - det) <= 1e-10 * scale * scale);
        const bool ordered = l1.real() > l2.real() ||
                             (l1.real() == l2.real() && l1.imag() >= l2.imag());
        CHECK(ordered);
    }
}

TEST_CASE("exp2_closed on pinned matrices") {
    const SquareMatrix id = exp2_closed(SquareMatrix{{0.0, 0.0}, {0.0, 0.0}}, 0.7);
    CHECK(id(0, 0) == doctest::Approx(1.0));
    CHECK(id(0, 1) == doctest::Approx(0.0));

    const SquareMatrix half_turn = exp2_closed(kRotation, M_PI);
    CHECK(half_turn(0, 0) == doctest::Approx(-1.0));
    CHECK(half_turn(1, 1) == doctest::Approx(-1.0));
    CHECK(std::abs(half_turn(0, 1)) < 1e-12);

    const SquareMatrix d = exp2_closed(SquareMatrix{{0.3, 0.0}, {0.0, -1.2}}, 2.0);
    CHECK(d(0, 0) == doctest::Approx(std::exp(0.6)));
    CHECK(d(1, 1) == doctest::Approx(std::exp(-2.4)));
    CHECK(d(0, 1) == 0.0);
}

TEST_CASE("exp2_closed matches the series oracle") {
    Rng rng(12);
    for (int trial = 0; trial < 500; ++trial) {
        const SquareMatrix c = random_matrix2(rng);
        const double t = rng.uniform(-1.0, 1.0);
        const SquareMatrix diff = exp2_closed(c, t) - exp_series(c, t);
        CHECK(diff.norm_inf() <= 1e-10);
    }
}

TEST_CASE("Liouville identity and the one-parameter group law") {
    Rng rng(13);
    for (int trial = 0; trial < 1000; ++trial) {
        const SquareMatrix c = random_matrix2(rng);
        const double t = rng.uniform(-2.0, 2.0);
        const SquareMatrix e = exp2_closed(c, t);
        const double det = e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0);
        CHECK(std::abs(det - std::exp(t * c.trace())) <= 1e-9);
    }
    for (int trial = 0; trial < 200; ++trial) {
        const SquareMatrix c = random_matrix2(rng);
        const double s = rng.uniform(-1.5, 1.5);
        const double t = rng.uniform(-1.5, 1.5);
        const SquareMatrix lhs = exp2_closed(c, s) * exp2_closed(c, t);
        const SquareMatrix rhs = exp2_closed(c, s + t);
        CHECK((lhs - rhs).norm_inf() <= 1e-9);
    }
}

TEST_CASE("exponential branches agree across the parabola") {
    Rng rng(14);
    for (int trial = 0; trial < 200; ++trial) {
        const double d = rng.uniform(-1.0, 1.0) * 1e-12;
        const double t = rng.uniform(-2.0, 2.0);
        double c0, s0, c1, s1, c2, s2;
        detail::exp2_phis(d, t, c0, s0, 0);
        detail::exp2_phis(d, t, c1, s1, 1);
        detail::exp2_phis(d, t, c2, s2, 2);
        CHECK(std::abs(c1 - c0) <= 1e-8);
        CHECK(std::abs(s1 - s0) <= 1e-8);
        CHECK(std::abs(c2 - c0) <= 1e-8);
        CHECK(std::abs(s2 - s0) <= 1e-8);
    }
}

TEST_CASE("exp_series on pinned matrices") {
    const SquareMatrix z(2);
    CHECK((exp_series(z, 1.0) - SquareMatrix::identity(2)).norm_inf() == 0.0);

    const SquareMatrix e3 = exp_series(SquareMatrix::identity(3), 1.0);
    for (int i = 0; i < 3; ++i) CHECK(e3(i, i) == doctest::Approx(std::exp(1.0)));

    const SquareMatrix quarter = exp_series(kRotation, M_PI / 2.0);
    CHECK(quarter(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(quarter(0, 1) == doctest::Approx(-1.0));
    CHECK(quarter(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("exp_series reports overflow") {
    const SquareMatrix big{{1000.0, 0.0}, {0.0, 1000.0}};
    CHECK_THROWS_WITH_AS(exp_series(big, 1.0), doctest::Contains("1e300"), Error);
    try {
        exp_series(big, 1.0);
    } catch (const Error& e) {
        CHECK(e.code() == "exp-overflow");
    }
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(exp_series(SquareMatrix(65), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(exp2_closed(SquareMatrix(2), std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(exp2_closed(SquareMatrix(3), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SquareMatrix(2, {1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS((SquareMatrix{{1.0, 2.0}, {3.0}}), std::invalid_argument);
    CHECK_THROWS_AS((SquareMatrix{{1.0, std::nan("")}, {0.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("nullspace_left on pinned and random singular matrices") {
    const auto row1 = nullspace_left(SquareMatrix{{1.0, 0.0}, {0.0, 0.0}});
    REQUIRE(row1.has_value());
    CHECK((*row1)[0] == doctest::Approx(0.0));
    CHECK((*row1)[1] == doctest::Approx(1.0));

    const auto row2 = nullspace_left(SquareMatrix{{1.0, 1.0}, {1.0, 1.0}});
    REQUIRE(row2.has_value());
    CHECK((*row2)[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK((*row2)[1] == doctest::Approx(-1.0 / std::sqrt(2.0)));

    CHECK_FALSE(nullspace_left(SquareMatrix::identity(2)).has_value());
    CHECK_THROWS_AS(nullspace_left(SquareMatrix(2)), Error);

    Rng rng(15);
    for (int trial = 0; trial < 200; ++trial) {
        // Exact rank one: outer product of integer vectors.
        const double g0 = rng.integer(-3, 3), g1 = rng.integer(-3, 3);
        const double r0 = rng.integer(-3, 3), r1 = rng.integer(-3, 3);
        const SquareMatrix c{{g0 * r0, g0 * r1}, {g1 * r0, g1 * r1}};
        if (c.is_zero()) continue;
        const auto row = nullspace_left(c);
        REQUIRE(row.has_value());
        const Vec2 v = *row;
        CHECK(std::abs(v[0] * c(0, 0) + v[1] * c(1, 0)) <= 1e-12 * (1.0 + c.norm_fro()));
        CHECK(std::abs(v[0] * c(0, 1) + v[1] * c(1, 1)) <= 1e-12 * (1.0 + c.norm_fro()));
        CHECK(norm(v) == doctest::Approx(1.0));
        CHECK(((v[0] != 0.0) ? v[0] : v[1]) > 0.0);
    }
}

TEST_CASE("eig3 pinned and random") {
    const auto diag = eig3(SquareMatrix{{3, 0, 0}, {0, 2, 0}, {0, 0, 1}});
    CHECK(diag[0].real() == doctest::Approx(3.0));
    CHECK(diag[1].real() == doctest::Approx(2.0));
    CHECK(diag[2].real() == doctest::Approx(1.0));

    const auto mix = eig3(SquareMatrix{{0, -1, 0}, {1, 0, 0}, {0, 0, 1}});
    CHECK(mix[0].real() == doctest::Approx(1.0));
    CHECK(mix[1].imag() == doctest::Approx(1.0));
    CHECK(mix[2].imag() == doctest::Approx(-1.0));

    Rng rng(16);
    for (int trial = 0; trial < 300; ++trial) {
        SquareMatrix m(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = rng.uniform(-2.0, 2.0);
        const double tr = m.trace();
        const double m2 = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) +
                          (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) +
                          (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1));
        const double det = determinant(m);
        for (const auto& l : eig3(m)) {
            const std::complex<double> res = l * l * l - tr * l * l + m2 * l - det;
            CHECK(std::abs(res) <= 1e-8 * (1.0 + std::abs(l * l * l)));
        }
        const SquareMatrix sym = testsupport::random_symmetric3(rng);
        for (const auto& l : eig3(sym)) CHECK(std::abs(l.imag()) <= 1e-8);
    }
}

TEST_CASE("determinant and inverse3") {
    const SquareMatrix singular4{{1, 2, 3, 4}, {5, 6, 7, 8}, {9, 10, 11, 12}, {13, 14, 15, 16}};
    CHECK(determinant(singular4) == doctest::Approx(0.0));

    SquareMatrix bordered(4);
    for (int i = 0; i < 3; ++i) bordered(i, i) = 1.0;
    bordered(0, 3) = bordered(3, 0) = 1.0;
    bordered(1, 3) = bordered(3, 1) = 2.0;
    bordered(2, 3) = bordered(3, 2) = 3.0;
    CHECK(determinant(bordered) == doctest::Approx(-14.0)); // -(1+4+9)

    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const SquareMatrix a = testsupport::random_invertible_symmetric3(rng);
        const SquareMatrix prod = a * inverse3(a);
        CHECK((prod - SquareMatrix::identity(3)).norm_inf() <= 1e-10);
    }
    CHECK_THROWS_AS(inverse3(SquareMatrix(3)), Error);
}
