#pragma once

// Shared test utilities: a portable RNG (so frozen expectations are stable
// across standard libraries), finite-difference oracles, random generators,
// and an independent dense implementation of the tensor transformation law
// used as the oracle for the induced representations.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "flowlab/matrix.hpp"
#include "flowlab/tensor_rep.hpp"
#include "flowlab/vec.hpp"

namespace testsupport {

using flowlab::SquareMatrix;
using flowlab::Vec2;
using flowlab::Vec3;
using flowlab::operator+;
using flowlab::operator-;
using flowlab::operator*;

struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) { // inclusive
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

inline SquareMatrix random_matrix2(Rng& rng, double lo = -2.0, double hi = 2.0) {
    return SquareMatrix{{rng.uniform(lo, hi), rng.uniform(lo, hi)},
                        {rng.uniform(lo, hi), rng.uniform(lo, hi)}};
}

inline SquareMatrix random_symmetric3(Rng& rng, double lo = -1.0, double hi = 1.0) {
    SquareMatrix a(3);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) a(i, j) = a(j, i) = rng.uniform(lo, hi);
    return a;
}

/// Random symmetric 3x3 bounded away from singularity.
inline SquareMatrix random_invertible_symmetric3(Rng& rng) {
    for (;;) {
        SquareMatrix a = random_symmetric3(rng);
        if (std::abs(flowlab::determinant(a)) > 0.05) return a;
    }
}

/// Cosine-normalized residual of the directional derivative of a scalar
/// function along a field direction: |grad I . X| / (|grad I| |X|).
inline double invariant_residual(const std::function<double(Vec2)>& func, Vec2 at, Vec2 field_dir,
                                 double h = 1e-6) {
    const double gu = (func({at[0] + h, at[1]}) - func({at[0] - h, at[1]})) / (2.0 * h);
    const double gv = (func({at[0], at[1] + h}) - func({at[0], at[1] - h})) / (2.0 * h);
    const double num = std::abs(gu * field_dir[0] + gv * field_dir[1]);
    const double den = std::hypot(gu, gv) * flowlab::norm(field_dir) + 1e-300;
    return num / den;
}

/// Fixed-step RK4 for U' = C U + b, the independent oracle for closed-form
/// planar flows.
inline Vec2 rk4_affine(const SquareMatrix& c, Vec2 b, Vec2 u0, double t, int steps) {
    const double h = t / steps;
    auto f = [&](Vec2 u) { return c.apply(u) + b; };
    Vec2 u = u0;
    for (int k = 0; k < steps; ++k) {
        const Vec2 k1 = f(u);
        const Vec2 k2 = f(u + (h / 2.0) * k1);
        const Vec2 k3 = f(u + (h / 2.0) * k2);
        const Vec2 k4 = f(u + h * k3);
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return u;
}

// ---------------------------------------------------------------------------
// Dense tensor-transformation oracle (independent of the rep module).
// Components are indexed lexicographically, contravariant slots first.
// ---------------------------------------------------------------------------

/// Applies the (p,q) transformation with matrix a (and its inverse) to a full
/// component vector: every contravariant slot contracts with a, every
/// covariant slot with a^{-1}, transformed_index = row, original = summed.
inline std::vector<double> tensor_transform(const SquareMatrix& a, int p, int q,
                                            const std::vector<double>& s) {
    const int slots = p + q;
    const int dim = 1 << slots;
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double inv[2][2] = {{a(1, 1) / det, -a(0, 1) / det}, {-a(1, 0) / det, a(0, 0) / det}};
    std::vector<double> out(static_cast<std::size_t>(dim), 0.0);
    for (int to = 0; to < dim; ++to) {
        for (int from = 0; from < dim; ++from) {
            double coeff = 1.0;
            for (int slot = 0; slot < slots; ++slot) {
                const int i = (to >> (slots - 1 - slot)) & 1;
                const int k = (from >> (slots - 1 - slot)) & 1;
                coeff *= (slot < p) ? a(i, k) : inv[k][i];
            }
            out[static_cast<std::size_t>(to)] += coeff * s[static_cast<std::size_t>(from)];
        }
    }
    return out;
}

/// Right/left eigenvector pairs of a 2x2 matrix with distinct eigenvalues.
struct Eigen2 {
    std::complex<double> lambda[2];
    std::complex<double> right[2][2]; // right[i][k]: component i of eigenvector k
    std::complex<double> left[2][2];  // left[k][i]: component i of left eigenvector k
    bool ok = false;
};

inline Eigen2 eigen2(const SquareMatrix& c, double min_gap = 1e-3) {
    Eigen2 e;
    const flowlab::ComplexPair pair = flowlab::eig2(c);
    e.lambda[0] = pair.lambda1;
    e.lambda[1] = pair.lambda2;
    const double scale = c.norm_fro() + 1.0;
    if (std::abs(pair.lambda1 - pair.lambda2) < min_gap * scale) return e;
    for (int k = 0; k < 2; ++k) {
        const std::complex<double> l = e.lambda[k];
        const std::complex<double> cand1[2] = {c(0, 1), l - c(0, 0)};
        const std::complex<double> cand2[2] = {l - c(1, 1), c(1, 0)};
        const double n1 = std::abs(cand1[0]) + std::abs(cand1[1]);
        const double n2 = std::abs(cand2[0]) + std::abs(cand2[1]);
        e.right[0][k] = (n1 >= n2) ? cand1[0] : cand2[0];
        e.right[1][k] = (n1 >= n2) ? cand1[1] : cand2[1];
    }
    const std::complex<double> det = e.right[0][0] * e.right[1][1] - e.right[0][1] * e.right[1][0];
    if (std::abs(det) < 1e-12 * scale * scale) return e;
    e.left[0][0] = e.right[1][1] / det;
    e.left[0][1] = -e.right[0][1] / det;
    e.left[1][0] = -e.right[1][0] / det;
    e.left[1][1] = e.right[0][0] / det;
    e.ok = true;
    return e;
}

/// Checks the generator's spectrum against the formula multiset through
/// eigenvector certificates: for every index tuple the Kronecker product of
/// the 2x2 eigenvectors (right for contravariant slots, left for covariant,
/// symmetrized over the covariant block for reduced specs) must satisfy
/// Cbar w = nu w with the predicted nu. Returns the worst scaled residual
/// over tuples, combining the eigen-equation defect and the Rayleigh gap.
inline double spectrum_certificate_residual(const SquareMatrix& c2,
                                            const flowlab::rep::TensorSpec& spec,
                                            const Eigen2& e) {
    using flowlab::rep::Mode;
    flowlab::rep::InducedGenerator gen = flowlab::rep::induced_generator(c2, spec);
    if (spec.symmetric) gen = flowlab::rep::symmetric_reduce(gen);
    const int slots = spec.p + spec.q;
    const int full = spec.full_dim();
    const int dim = gen.cbar.size();

    auto sorted_cov = [&](int pos) {
        for (int b = spec.p; b + 1 < slots; ++b) {
            const int x = (pos >> (slots - 1 - b)) & 1;
            const int y = (pos >> (slots - 2 - b)) & 1;
            if (x > y) return false;
        }
        return true;
    };

    double worst = 0.0;
    for (int tuple = 0; tuple < full; ++tuple) {
        if (spec.symmetric && !sorted_cov(tuple)) continue;
        std::vector<int> idx(static_cast<std::size_t>(slots));
        for (int s = 0; s < slots; ++s) idx[static_cast<std::size_t>(s)] = (tuple >> (slots - 1 - s)) & 1;

        std::complex<double> expected = 0.0;
        for (int s = 0; s < spec.p; ++s) expected += e.lambda[idx[static_cast<std::size_t>(s)]];
        for (int s = spec.p; s < slots; ++s) expected -= e.lambda[idx[static_cast<std::size_t>(s)]];
        if (spec.mode == Mode::InvariantTensor) expected = -expected;

        // Covariant-slot permutations for the symmetrized eigenvector.
        std::vector<std::vector<int>> perms;
        {
            std::vector<int> perm(idx.begin() + spec.p, idx.end());
            std::sort(perm.begin(), perm.end());
            if (spec.symmetric) {
                do { perms.push_back(perm); } while (std::next_permutation(perm.begin(), perm.end()));
            } else {
                perms.push_back(std::vector<int>(idx.begin() + spec.p, idx.end()));
            }
        }
        std::vector<std::complex<double>> w_full(static_cast<std::size_t>(full), 0.0);
        for (const auto& pp : perms) {
            for (int pos = 0; pos < full; ++pos) {
                std::complex<double> prod = 1.0;
                for (int s = 0; s < spec.p; ++s)
                    prod *= e.right[(pos >> (slots - 1 - s)) & 1][idx[static_cast<std::size_t>(s)]];
                for (int s = spec.p; s < slots; ++s)
                    prod *= e.left[pp[static_cast<std::size_t>(s - spec.p)]][(pos >> (slots - 1 - s)) & 1];
                w_full[static_cast<std::size_t>(pos)] += prod;
            }
        }

        std::vector<std::complex<double>> vec;
        if (spec.symmetric) {
            for (int pos = 0; pos < full; ++pos)
                if (sorted_cov(pos)) vec.push_back(w_full[static_cast<std::size_t>(pos)]);
        } else {
            vec = std::move(w_full);
        }

        std::vector<std::complex<double>> image(static_cast<std::size_t>(dim), 0.0);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                image[static_cast<std::size_t>(i)] += gen.cbar(i, j) * vec[static_cast<std::size_t>(j)];
        std::complex<double> num = 0.0;
        double den = 0.0;
        for (int i = 0; i < dim; ++i) {
            num += std::conj(vec[static_cast<std::size_t>(i)]) * image[static_cast<std::size_t>(i)];
            den += std::norm(vec[static_cast<std::size_t>(i)]);
        }
        const std::complex<double> rayleigh = num / den;
        double defect = 0.0;
        for (int i = 0; i < dim; ++i)
            defect = std::max(defect, std::abs(image[static_cast<std::size_t>(i)] -
                                               expected * vec[static_cast<std::size_t>(i)]));
        const double scale = (1.0 + std::abs(expected)) * std::sqrt(den);
        worst = std::max(worst, defect / scale);
        worst = std::max(worst, std::abs(rayleigh - expected) / (1.0 + std::abs(expected)));
    }
    return worst;
}

} // namespace testsupport
