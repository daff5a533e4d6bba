#pragma once

#include <array>
#include <complex>
#include <initializer_list>
#include <optional>
#include <vector>

#include "flowlab/vec.hpp"

namespace flowlab {

/// Dense real n-by-n matrix, row major. Sizes stay small (n <= 64): this is a
/// kernel for 2x2/3x3 flow computations and the induced generators built on
/// top of them, not a general linear-algebra package.
class SquareMatrix {
public:
    SquareMatrix() : n_(0) {}
    explicit SquareMatrix(int n);
    SquareMatrix(int n, std::vector<double> entries);
    SquareMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static SquareMatrix identity(int n);

    int size() const { return n_; }
    double& operator()(int i, int j) { return e_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return e_[static_cast<std::size_t>(i) * n_ + j]; }
    const std::vector<double>& entries() const { return e_; }

    SquareMatrix transposed() const;
    double trace() const;
    double norm_inf() const;   // max row sum of |entries|
    double norm_fro() const;
    double max_abs() const;
    bool is_zero() const;

    SquareMatrix& operator+=(const SquareMatrix& rhs);
    SquareMatrix& operator-=(const SquareMatrix& rhs);
    SquareMatrix& operator*=(double s);

    friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
    friend SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b) { return a -= b; }
    friend SquareMatrix operator*(SquareMatrix a, double s) { return a *= s; }
    friend SquareMatrix operator*(double s, SquareMatrix a) { return a *= s; }
    friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b);

    std::vector<double> apply(const std::vector<double>& x) const;
    Vec2 apply(Vec2 x) const;
    Vec3 apply(Vec3 x) const;

private:
    int n_;
    std::vector<double> e_;
};

/// Eigenvalue pair of a 2x2 matrix, sorted by (real part, imaginary part)
/// descending; a conjugate pair is stored with the +imaginary member first.
struct ComplexPair {
    std::complex<double> lambda1;
    std::complex<double> lambda2;
};

/// Roots of lambda^2 - tr(C) lambda + det(C), computed with the
/// cancellation-avoiding quadratic formula.
ComplexPair eig2(const SquareMatrix& c);

/// Eigenvalues of a 3x3 matrix via Cardano, with the trigonometric branch for
/// three real roots. Sorted by (real part, imaginary part) descending.
std::array<std::complex<double>, 3> eig3(const SquareMatrix& c);

/// e^{tC} for 2x2 C in closed form: with a = tr(C)/2, N = C - aI and
/// D = a^2 - det(C) (so that N^2 = D I), the result is
/// e^{at} (phi_c(D, t) I + phi_s(D, t) N) where the phi pair is
/// cosh/sinh-like, cos/sin-like, or polynomial depending on sign(D).
SquareMatrix exp2_closed(const SquareMatrix& c, double t);

/// e^{tC} for any n <= 64 by scaling and squaring of a truncated Taylor
/// series. The argument is halved until its inf-norm is <= 1/2, a 24-term
/// Horner evaluation leaves a remainder below 1e-27, and the squarings bring
/// the residual comfortably under 1e-12 for ||tC||_inf <= 4. Accumulation is
/// in long double. Throws Error("exp-overflow") if an intermediate entry
/// exceeds 1e300.
SquareMatrix exp_series(const SquareMatrix& c, double t);

/// Left null row of a singular 2x2 matrix: (a,b) with (a,b)C = 0, unit length,
/// first nonzero entry positive. Returns nullopt when |det C| exceeds
/// 1e-12 ||C||_F^2; throws Error("zero-matrix") for C = 0.
std::optional<Vec2> nullspace_left(const SquareMatrix& c);

/// Determinant: closed forms for n <= 3, cofactor expansion for n = 4,
/// partially pivoted elimination beyond.
double determinant(const SquareMatrix& c);

/// Inverse of a 3x3 matrix via the adjugate. Throws Error("singular-matrix")
/// when |det| <= 1e-12 ||A||_F^3.
SquareMatrix inverse3(const SquareMatrix& a);

namespace detail {

/// Scalar pair (phi_c, phi_s) with e^{tN} = phi_c I + phi_s N for N^2 = D I.
/// branch: -1 auto, 0 polynomial series, 1 hyperbolic with |D|, 2 trigonometric
/// with |D| (the forced branches exist so continuity across D = 0 is testable).
void exp2_phis(double d, double t, double& phi_c, double& phi_s, int branch = -1);

} // namespace detail

} // namespace flowlab
