#include "flowlab/tensor_rep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flowlab/error.hpp"

namespace flowlab::rep {

namespace {

bool complex_before(std::complex<double> a, std::complex<double> b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
}

// Multi-index helpers: slot 0..p-1 contravariant, slot p..p+q-1 covariant,
// slot 0 most significant (lexicographic, contravariant block first).
int slot_value(int position, int slot, int slots) { return (position >> (slots - 1 - slot)) & 1; }

int with_slot(int position, int slot, int slots, int value) {
    const int bit = 1 << (slots - 1 - slot);
    return (position & ~bit) | (value ? bit : 0);
}

std::string label_for(const TensorSpec& spec, const std::vector<int>& tuple) {
    std::string upper, lower;
    for (int a = 0; a < spec.p; ++a) upper += static_cast<char>('1' + tuple[static_cast<std::size_t>(a)]);
    for (int b = 0; b < spec.q; ++b)
        lower += static_cast<char>('1' + tuple[static_cast<std::size_t>(spec.p + b)]);
    std::string out = "s";
    if (!upper.empty()) out += "^" + upper;
    if (!lower.empty()) out += "_" + lower;
    return out;
}

std::vector<int> decode(int position, int slots) {
    std::vector<int> tuple(static_cast<std::size_t>(slots));
    for (int s = 0; s < slots; ++s) tuple[static_cast<std::size_t>(s)] = slot_value(position, s, slots);
    return tuple;
}

// Reduced enumeration: full contravariant block x sorted covariant tuples.
std::vector<std::vector<int>> reduced_tuples(const TensorSpec& spec) {
    std::vector<std::vector<int>> covariant;
    for (int t = 0; t < (1 << spec.q); ++t) {
        std::vector<int> tuple;
        for (int b = 0; b < spec.q; ++b) tuple.push_back((t >> (spec.q - 1 - b)) & 1);
        if (std::is_sorted(tuple.begin(), tuple.end())) covariant.push_back(tuple);
    }
    std::vector<std::vector<int>> out;
    for (int c = 0; c < (1 << spec.p); ++c) {
        std::vector<int> head;
        for (int a = 0; a < spec.p; ++a) head.push_back((c >> (spec.p - 1 - a)) & 1);
        for (const auto& tail : covariant) {
            std::vector<int> tuple = head;
            tuple.insert(tuple.end(), tail.begin(), tail.end());
            out.push_back(tuple);
        }
    }
    return out;
}

int encode(const std::vector<int>& tuple) {
    int pos = 0;
    for (int v : tuple) pos = (pos << 1) | v;
    return pos;
}

} // namespace

int TensorSpec::reduced_dim() const {
    if (p == 0 && q == 2) return 3;
    if (p == 0 && q == 3) return 4;
    if (p == 1 && q == 2) return 6;
    return full_dim();
}

void TensorSpec::validate() const {
    if (p < 0 || q < 0 || p + q < 1) throw Error("invalid-spec", "tensor valence must satisfy p+q >= 1");
    if (p + q > 12) throw Error("spec-too-large", "tensor valence limited to p+q <= 12");
    if (symmetric) {
        const bool ok = (p == 0 && q == 2) || (p == 0 && q == 3) || (p == 1 && q == 2);
        if (!ok)
            throw Error("invalid-spec", "symmetric components supported for (0,2), (0,3), (1,2) only");
    }
}

InducedGenerator induced_generator(const SquareMatrix& c, const TensorSpec& spec) {
    if (c.size() != 2) throw std::invalid_argument("induced_generator expects a 2x2 matrix");
    spec.validate();
    const int slots = spec.p + spec.q;
    const int n = spec.full_dim();
    SquareMatrix cbar(n);
    for (int r = 0; r < n; ++r) {
        for (int s = 0; s < slots; ++s) {
            const int rv = slot_value(r, s, slots);
            for (int b = 0; b < 2; ++b) {
                const int col = with_slot(r, s, slots, b);
                if (s < spec.p)
                    cbar(r, col) += c(rv, b);
                else
                    cbar(r, col) -= c(b, rv);
            }
        }
    }
    if (spec.mode == Mode::InvariantTensor) cbar *= -1.0;

    InducedGenerator out{spec, std::move(cbar), false, {}};
    out.labels.reserve(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) out.labels.push_back(label_for(spec, decode(r, slots)));
    return out;
}

InducedGenerator symmetric_reduce(const InducedGenerator& gen) {
    if (!gen.spec.symmetric)
        throw Error("not-symmetric-spec", "symmetric_reduce needs a symmetric tensor spec");
    if (gen.reduced) return gen;

    const TensorSpec& spec = gen.spec;
    const auto tuples = reduced_tuples(spec);
    const int m = static_cast<int>(tuples.size());
    const int n = spec.full_dim();
    const int slots = spec.p + spec.q;

    // Embedding: the full component at any permutation of a sorted covariant
    // tuple carries the same reduced component.
    std::vector<int> representative(static_cast<std::size_t>(n));
    for (int pos = 0; pos < n; ++pos) {
        std::vector<int> tuple = decode(pos, slots);
        std::sort(tuple.begin() + spec.p, tuple.end());
        representative[static_cast<std::size_t>(pos)] = encode(tuple);
    }
    std::vector<int> reduced_index_of(static_cast<std::size_t>(n), -1);
    for (int k = 0; k < m; ++k)
        reduced_index_of[static_cast<std::size_t>(encode(tuples[static_cast<std::size_t>(k)]))] = k;

    SquareMatrix r(m);
    for (int k = 0; k < m; ++k) {
        const int row_full = encode(tuples[static_cast<std::size_t>(k)]);
        for (int col_full = 0; col_full < n; ++col_full) {
            const double w = gen.cbar(row_full, col_full);
            if (w == 0.0) continue;
            r(k, reduced_index_of[static_cast<std::size_t>(representative[static_cast<std::size_t>(col_full)])]) += w;
        }
    }

    InducedGenerator out{spec, std::move(r), true, {}};
    out.labels.reserve(static_cast<std::size_t>(m));
    for (const auto& tuple : tuples) out.labels.push_back(label_for(spec, tuple));
    return out;
}

std::vector<std::complex<double>> eigen_multiset(std::complex<double> lambda1,
                                                 std::complex<double> lambda2,
                                                 const TensorSpec& spec) {
    spec.validate();
    const std::complex<double> lambda[2] = {lambda1, lambda2};
    std::vector<std::vector<int>> tuples;
    if (spec.symmetric) {
        tuples = reduced_tuples(spec);
    } else {
        const int slots = spec.p + spec.q;
        for (int pos = 0; pos < spec.full_dim(); ++pos) tuples.push_back(decode(pos, slots));
    }
    std::vector<std::complex<double>> out;
    out.reserve(tuples.size());
    for (const auto& tuple : tuples) {
        std::complex<double> sum = 0.0;
        for (int a = 0; a < spec.p; ++a) sum += lambda[tuple[static_cast<std::size_t>(a)]];
        for (int b = 0; b < spec.q; ++b) sum -= lambda[tuple[static_cast<std::size_t>(spec.p + b)]];
        out.push_back(spec.mode == Mode::InvariantTensor ? -sum : sum);
    }
    std::sort(out.begin(), out.end(), complex_before);
    return out;
}

std::vector<double> drag_components(const SquareMatrix& c, const TensorSpec& spec,
                                    std::span<const double> s, double t) {
    spec.validate();
    if (static_cast<int>(s.size()) != spec.dim())
        throw Error("length-mismatch", "component vector length does not match the spec dimension");
    InducedGenerator gen = induced_generator(c, spec);
    if (spec.symmetric) gen = symmetric_reduce(gen);
    const SquareMatrix flow = exp_series(gen.cbar, t);
    return flow.apply(std::vector<double>(s.begin(), s.end()));
}

namespace {

std::vector<std::complex<double>> poly_from_roots(const std::vector<std::complex<double>>& roots) {
    std::vector<std::complex<double>> coeff{1.0};
    for (const auto& r : roots) {
        coeff.push_back(0.0);
        for (std::size_t k = coeff.size() - 1; k >= 1; --k) coeff[k] -= r * coeff[k - 1];
    }
    return coeff;
}

} // namespace

OdePolynomials ode_coefficients(const TensorSpec& spec, std::complex<double> lambda1,
                                std::complex<double> lambda2) {
    const auto multiset = eigen_multiset(lambda1, lambda2, spec);
    double scale = 1.0;
    for (const auto& v : multiset) scale = std::max(scale, std::abs(v));
    std::vector<std::complex<double>> distinct;
    for (const auto& v : multiset) {
        bool seen = false;
        for (const auto& d : distinct)
            if (std::abs(v - d) <= 1e-9 * scale) {
                seen = true;
                break;
            }
        if (!seen) distinct.push_back(v);
    }
    return {poly_from_roots(distinct), poly_from_roots(multiset)};
}

std::vector<LatticePoint> lattice_points(std::complex<double> lambda1,
                                         std::complex<double> lambda2, int max_pq) {
    if (max_pq < 1 || max_pq > 6) throw std::invalid_argument("max_pq must be in 1..6");
    std::vector<LatticePoint> out;
    const bool conjugate_pair = std::abs(lambda2 - std::conj(lambda1)) <=
                                1e-12 * (1.0 + std::abs(lambda1));
    for (int pp = 0; pp <= max_pq; ++pp) {
        for (int qq = 0; pp + qq <= max_pq; ++qq) {
            if (pp + qq < 1) continue;
            TensorSpec spec{pp, qq, false, Mode::InvariantTensor};
            for (const auto& value : eigen_multiset(lambda1, lambda2, spec)) {
                if (conjugate_pair) {
                    const double expected = (qq - pp) * lambda1.real();
                    if (std::abs(value.real() - expected) > 1e-9 * (1.0 + std::abs(expected)))
                        throw std::logic_error("lattice point off the vertical line");
                }
                out.push_back({pp, qq, value});
            }
        }
    }
    return out;
}

} // namespace flowlab::rep
