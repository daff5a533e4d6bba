#include "flowlab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flowlab/error.hpp"

namespace flowlab {

namespace {

void check_finite(const std::vector<double>& e) {
    for (double x : e) {
        if (!std::isfinite(x)) throw std::invalid_argument("matrix entry not finite");
    }
}

} // namespace

SquareMatrix::SquareMatrix(int n) : n_(n), e_(static_cast<std::size_t>(n) * n, 0.0) {
    if (n < 1) throw std::invalid_argument("matrix dimension must be >= 1");
}

SquareMatrix::SquareMatrix(int n, std::vector<double> entries) : n_(n), e_(std::move(entries)) {
    if (n < 1) throw std::invalid_argument("matrix dimension must be >= 1");
    if (e_.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("entry count does not match dimension");
    check_finite(e_);
}

SquareMatrix::SquareMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    n_ = static_cast<int>(rows.size());
    if (n_ < 1) throw std::invalid_argument("matrix dimension must be >= 1");
    e_.reserve(static_cast<std::size_t>(n_) * n_);
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != n_)
            throw std::invalid_argument("ragged initializer for square matrix");
        e_.insert(e_.end(), row.begin(), row.end());
    }
    check_finite(e_);
}

SquareMatrix SquareMatrix::identity(int n) {
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

SquareMatrix SquareMatrix::transposed() const {
    SquareMatrix m(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

double SquareMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double SquareMatrix::norm_inf() const {
    double best = 0.0;
    for (int i = 0; i < n_; ++i) {
        double row = 0.0;
        for (int j = 0; j < n_; ++j) row += std::abs((*this)(i, j));
        best = std::max(best, row);
    }
    return best;
}

double SquareMatrix::norm_fro() const {
    double s = 0.0;
    for (double x : e_) s += x * x;
    return std::sqrt(s);
}

double SquareMatrix::max_abs() const {
    double best = 0.0;
    for (double x : e_) best = std::max(best, std::abs(x));
    return best;
}

bool SquareMatrix::is_zero() const {
    return std::all_of(e_.begin(), e_.end(), [](double x) { return x == 0.0; });
}

SquareMatrix& SquareMatrix::operator+=(const SquareMatrix& rhs) {
    if (rhs.n_ != n_) throw std::invalid_argument("dimension mismatch");
    for (std::size_t k = 0; k < e_.size(); ++k) e_[k] += rhs.e_[k];
    return *this;
}

SquareMatrix& SquareMatrix::operator-=(const SquareMatrix& rhs) {
    if (rhs.n_ != n_) throw std::invalid_argument("dimension mismatch");
    for (std::size_t k = 0; k < e_.size(); ++k) e_[k] -= rhs.e_[k];
    return *this;
}

SquareMatrix& SquareMatrix::operator*=(double s) {
    for (double& x : e_) x *= s;
    return *this;
}

SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("dimension mismatch");
    const int n = a.n_;
    SquareMatrix c(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

std::vector<double> SquareMatrix::apply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("dimension mismatch");
    std::vector<double> y(x.size(), 0.0);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
}

Vec2 SquareMatrix::apply(Vec2 x) const {
    if (n_ != 2) throw std::invalid_argument("expected 2x2 matrix");
    return {(*this)(0, 0) * x[0] + (*this)(0, 1) * x[1],
            (*this)(1, 0) * x[0] + (*this)(1, 1) * x[1]};
}

Vec3 SquareMatrix::apply(Vec3 x) const {
    if (n_ != 3) throw std::invalid_argument("expected 3x3 matrix");
    Vec3 y{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
}

namespace {

bool complex_before(std::complex<double> a, std::complex<double> b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
}

} // namespace

ComplexPair eig2(const SquareMatrix& c) {
    if (c.size() != 2) throw std::invalid_argument("eig2 expects a 2x2 matrix");
    const double tr = c.trace();
    const double det = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
    const double disc = tr * tr - 4.0 * det;
    std::complex<double> l1, l2;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        // Pick the larger-magnitude root first to avoid cancellation, then
        // recover the other from the product.
        double big = (tr >= 0.0) ? (tr + root) / 2.0 : (tr - root) / 2.0;
        if (big == 0.0) {
            l1 = root / 2.0;
            l2 = -root / 2.0;
        } else {
            l1 = big;
            l2 = det / big;
        }
    } else {
        const double beta = std::sqrt(-disc) / 2.0;
        l1 = {tr / 2.0, beta};
        l2 = {tr / 2.0, -beta};
    }
    if (!complex_before(l1, l2)) std::swap(l1, l2);
    return {l1, l2};
}

std::array<std::complex<double>, 3> eig3(const SquareMatrix& m) {
    if (m.size() != 3) throw std::invalid_argument("eig3 expects a 3x3 matrix");
    // Characteristic polynomial: l^3 - tr l^2 + m2 l - det.
    const double tr = m.trace();
    const double m2 = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) +
                      (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) +
                      (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1));
    const double det = determinant(m);

    // Depressed cubic x^3 + p x + q with l = x + tr/3.
    const double shift = tr / 3.0;
    const double p = m2 - tr * tr / 3.0;
    const double q = -det + m2 * shift - 2.0 * shift * shift * shift;

    std::array<std::complex<double>, 3> out;
    const double scale = std::max({std::abs(p), std::abs(q), 1e-300});
    if (std::abs(p) < 1e-14 * scale && std::abs(q) < 1e-14 * scale) {
        out = {shift, shift, shift};
    } else {
        const double disc = -4.0 * p * p * p - 27.0 * q * q;
        if (disc >= 0.0) {
            // Three real roots: trigonometric form (p < 0 here).
            const double r = 2.0 * std::sqrt(-p / 3.0);
            double arg = 3.0 * q / (p * r);
            arg = std::clamp(arg, -1.0, 1.0);
            const double theta = std::acos(arg);
            for (int k = 0; k < 3; ++k)
                out[k] = shift + r * std::cos((theta - 2.0 * M_PI * k) / 3.0);
        } else {
            // One real root plus a conjugate pair.
            const double s = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
            const double u = std::cbrt(-q / 2.0 + ((q <= 0.0) ? s : -s));
            // For q > 0 the choice above keeps |u| away from cancellation;
            // recover the partner factor from u v = -p/3.
            const double v = (u != 0.0) ? -p / (3.0 * u) : 0.0;
            const double real_root = u + v;
            const double re = -real_root / 2.0;
            const double im = std::sqrt(3.0) / 2.0 * std::abs(u - v);
            out[0] = shift + real_root;
            out[1] = {shift + re, im};
            out[2] = {shift + re, -im};
        }
    }
    std::sort(out.begin(), out.end(), complex_before);
    return out;
}

namespace detail {

void exp2_phis(double d, double t, double& phi_c, double& phi_s, int branch) {
    const double x = d * t * t;
    if (branch == 0 || (branch == -1 && std::abs(x) < 1e-8)) {
        // Truncated series of cosh(sqrt(D) t) and sinh(sqrt(D) t)/sqrt(D);
        // the omitted term is O(x^3) < 1e-24 on the auto path.
        phi_c = 1.0 + x / 2.0 + x * x / 24.0;
        phi_s = t * (1.0 + x / 6.0 + x * x / 120.0);
        return;
    }
    if (branch == 1 || (branch == -1 && d > 0.0)) {
        const double b = std::sqrt(std::abs(d));
        phi_c = std::cosh(b * t);
        phi_s = std::sinh(b * t) / b;
        return;
    }
    const double b = std::sqrt(std::abs(d));
    phi_c = std::cos(b * t);
    phi_s = std::sin(b * t) / b;
}

} // namespace detail

SquareMatrix exp2_closed(const SquareMatrix& c, double t) {
    if (c.size() != 2) throw std::invalid_argument("exp2_closed expects a 2x2 matrix");
    if (!std::isfinite(t)) throw std::invalid_argument("exp2_closed expects finite t");
    const double alpha = c.trace() / 2.0;
    const double det = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
    const double d = alpha * alpha - det; // (tr^2 - 4 det)/4
    double phi_c = 0.0, phi_s = 0.0;
    detail::exp2_phis(d, t, phi_c, phi_s);
    const double ea = std::exp(alpha * t);
    SquareMatrix out(2);
    out(0, 0) = ea * (phi_c + phi_s * (c(0, 0) - alpha));
    out(0, 1) = ea * phi_s * c(0, 1);
    out(1, 0) = ea * phi_s * c(1, 0);
    out(1, 1) = ea * (phi_c + phi_s * (c(1, 1) - alpha));
    return out;
}

SquareMatrix exp_series(const SquareMatrix& c, double t) {
    const int n = c.size();
    if (n > 64) throw std::invalid_argument("exp_series supports n <= 64");
    if (!std::isfinite(t)) throw std::invalid_argument("exp_series expects finite t");

    const std::size_t nn = static_cast<std::size_t>(n) * n;
    std::vector<long double> a(nn);
    for (std::size_t k = 0; k < nn; ++k) a[k] = static_cast<long double>(c.entries()[k]) * t;

    long double norm = 0.0L;
    for (int i = 0; i < n; ++i) {
        long double row = 0.0L;
        for (int j = 0; j < n; ++j) row += std::abs(a[static_cast<std::size_t>(i) * n + j]);
        norm = std::max(norm, row);
    }
    if (!std::isfinite(static_cast<double>(norm)) || norm > 1e300)
        throw Error("exp-overflow", "matrix exponential argument overflows");

    int squarings = 0;
    while (norm > 0.5L && squarings < 64) {
        norm /= 2.0L;
        ++squarings;
    }
    const long double scale = std::pow(0.5L, squarings);
    for (auto& x : a) x *= scale;

    auto mat_mul = [n, nn](const std::vector<long double>& x, const std::vector<long double>& y) {
        std::vector<long double> z(nn, 0.0L);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const long double xik = x[static_cast<std::size_t>(i) * n + k];
                if (xik == 0.0L) continue;
                for (int j = 0; j < n; ++j)
                    z[static_cast<std::size_t>(i) * n + j] += xik * y[static_cast<std::size_t>(k) * n + j];
            }
        return z;
    };
    auto check_overflow = [nn](const std::vector<long double>& x) {
        for (std::size_t k = 0; k < nn; ++k)
            if (!std::isfinite(static_cast<double>(x[k])) || std::abs(x[k]) > 1e300L)
                throw Error("exp-overflow", "matrix exponential intermediate exceeds 1e300");
    };

    // Horner evaluation of I + A(I + A/2 (I + A/3 (...))) with 24 terms.
    constexpr int kTerms = 24;
    std::vector<long double> acc(nn, 0.0L);
    for (int i = 0; i < n; ++i) acc[static_cast<std::size_t>(i) * n + i] = 1.0L;
    for (int k = kTerms; k >= 1; --k) {
        std::vector<long double> prod = mat_mul(a, acc);
        for (auto& x : prod) x /= static_cast<long double>(k);
        acc = std::move(prod);
        for (int i = 0; i < n; ++i) acc[static_cast<std::size_t>(i) * n + i] += 1.0L;
    }

    check_overflow(acc);
    for (int s = 0; s < squarings; ++s) {
        acc = mat_mul(acc, acc);
        check_overflow(acc);
    }

    std::vector<double> out(nn);
    for (std::size_t k = 0; k < nn; ++k) out[k] = static_cast<double>(acc[k]);
    return SquareMatrix(n, std::move(out));
}

std::optional<Vec2> nullspace_left(const SquareMatrix& c) {
    if (c.size() != 2) throw std::invalid_argument("nullspace_left expects a 2x2 matrix");
    if (c.is_zero()) throw Error("zero-matrix", "left null space of the zero matrix is the whole plane");
    const double det = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
    const double fro2 = c.norm_fro() * c.norm_fro();
    if (std::abs(det) > 1e-12 * fro2) return std::nullopt;
    // (a,b) must be orthogonal to both columns; with det = 0 the columns are
    // parallel, so orthogonality to the larger one suffices.
    const Vec2 col0{c(0, 0), c(1, 0)};
    const Vec2 col1{c(0, 1), c(1, 1)};
    const Vec2 col = (norm(col0) >= norm(col1)) ? col0 : col1;
    Vec2 row{-col[1], col[0]};
    const double len = norm(row);
    row = {row[0] / len, row[1] / len};
    const double lead = (row[0] != 0.0) ? row[0] : row[1];
    if (lead < 0.0) row = {-row[0], -row[1]};
    return row;
}

double determinant(const SquareMatrix& m) {
    const int n = m.size();
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (n == 3) {
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }
    if (n == 4) {
        // Cofactor expansion along the first row.
        double det = 0.0;
        for (int j = 0; j < 4; ++j) {
            SquareMatrix minor(3);
            for (int r = 1; r < 4; ++r) {
                int cc = 0;
                for (int col = 0; col < 4; ++col) {
                    if (col == j) continue;
                    minor(r - 1, cc++) = m(r, col);
                }
            }
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            det += sign * m(0, j) * determinant(minor);
        }
        return det;
    }
    // Partially pivoted elimination for larger sizes.
    SquareMatrix a = m;
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
            det = -det;
        }
        det *= a(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return det;
}

SquareMatrix inverse3(const SquareMatrix& a) {
    if (a.size() != 3) throw std::invalid_argument("inverse3 expects a 3x3 matrix");
    const double det = determinant(a);
    const double fro = a.norm_fro();
    if (std::abs(det) <= 1e-12 * fro * fro * fro)
        throw Error("singular-matrix", "3x3 matrix is singular within tolerance");
    SquareMatrix inv(3);
    inv(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) / det;
    inv(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) / det;
    inv(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) / det;
    inv(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) / det;
    inv(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) / det;
    inv(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) / det;
    inv(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) / det;
    inv(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) / det;
    inv(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / det;
    return inv;
}

} // namespace flowlab
