#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "flowlab/matrix.hpp"

namespace flowlab::rep {

/// DragComponents is the derivative at t = 0 of the tensor transformation law
/// with A = e^{Ct}: every contravariant slot contributes a C insertion, every
/// covariant slot a -C^T insertion. InvariantTensor is its entrywise negation
/// (the dual situation where the components are held fixed and the tensor is
/// carried by the flow).
enum class Mode { DragComponents, InvariantTensor };

struct TensorSpec {
    int p = 0;             // contravariant valence
    int q = 0;             // covariant valence
    bool symmetric = false; // symmetrize the covariant block; (0,2), (0,3), (1,2) only
    Mode mode = Mode::DragComponents;

    int full_dim() const { return 1 << (p + q); }
    int reduced_dim() const;
    int dim() const { return symmetric ? reduced_dim() : full_dim(); }

    /// Throws Error("spec-too-large") for p+q > 12, Error("invalid-spec") for
    /// p+q < 1, negative valences, or a symmetric flag outside the supported
    /// cases.
    void validate() const;
};

/// Generator matrix on tensor components, with the component order
/// documented by labels: multi-indices lexicographic, contravariant slots
/// first; reduced generators enumerate the sorted covariant tuples.
struct InducedGenerator {
    TensorSpec spec;
    SquareMatrix cbar;
    bool reduced = false;
    std::vector<std::string> labels;
};

/// Slot-insertion construction (exact, no numeric differentiation).
InducedGenerator induced_generator(const SquareMatrix& c, const TensorSpec& spec);

/// Restriction of the full generator to the symmetric-component subspace,
/// on the independent components in lexicographic order. Throws
/// Error("not-symmetric-spec") unless the spec carries the symmetric flag.
InducedGenerator symmetric_reduce(const InducedGenerator& gen);

/// The eigenvalue multiset of the induced generator: sums
/// lambda_{i1}+...+lambda_{ip} - lambda_{j1}-...-lambda_{jq} over index
/// tuples for DragComponents, sign-flipped for InvariantTensor; symmetric
/// specs enumerate sorted covariant tuples. Sorted by (re, im) descending.
std::vector<std::complex<double>> eigen_multiset(std::complex<double> lambda1,
                                                 std::complex<double> lambda2,
                                                 const TensorSpec& spec);

/// Applies e^{Cbar t} to a component vector (length spec.dim(), else
/// Error("length-mismatch")).
std::vector<double> drag_components(const SquareMatrix& c, const TensorSpec& spec,
                                    std::span<const double> s, double t);

/// Monic minimal polynomial (over the distinct multiset values) and
/// characteristic polynomial (over the full multiset), coefficients in
/// decreasing degree starting with the leading 1.
struct OdePolynomials {
    std::vector<std::complex<double>> minimal;
    std::vector<std::complex<double>> characteristic;
};

OdePolynomials ode_coefficients(const TensorSpec& spec, std::complex<double> lambda1,
                                std::complex<double> lambda2);

/// All duality-signed eigenvalue sums for every valence pair with
/// 1 <= p + q <= max_pq (max 6). For a conjugate input pair a +- i b every
/// (p, q) batch sits on the vertical line re = (q - p) a.
struct LatticePoint {
    int p;
    int q;
    std::complex<double> value;
};

std::vector<LatticePoint> lattice_points(std::complex<double> lambda1,
                                         std::complex<double> lambda2, int max_pq);

} // namespace flowlab::rep
