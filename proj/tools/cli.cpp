#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flowlab/error.hpp"
#include "flowlab/expr.hpp"
#include "flowlab/json_writer.hpp"
#include "flowlab/matrix.hpp"
#include "flowlab/planar.hpp"
#include "flowlab/quadric.hpp"
#include "flowlab/svg.hpp"
#include "flowlab/tensor_rep.hpp"
#include "flowlab/vec.hpp"

namespace flowlab::cli {

namespace {

using io::Json;

/// Thrown for malformed input; mapped to exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// splitmix64: portable, fully specified generator for start-point lattices.
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
};

template <std::size_t N>
std::array<double, N> parse_reals(const std::string& text, const char* what) {
    std::array<double, N> out{};
    std::stringstream ss(text);
    std::string item;
    std::size_t k = 0;
    while (std::getline(ss, item, ',')) {
        if (k >= N) throw InputError(std::string(what) + ": expected " + std::to_string(N) + " values");
        try {
            std::size_t used = 0;
            out[k] = std::stod(item, &used);
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError(std::string(what) + ": malformed number '" + item + "'");
        }
        ++k;
    }
    if (k != N) throw InputError(std::string(what) + ": expected " + std::to_string(N) + " values");
    return out;
}

Json complex_json(std::complex<double> z) {
    Json arr = Json::array();
    arr.push(Json::number(z.real()));
    arr.push(Json::number(z.imag()));
    return arr;
}

Json vec_json(const std::vector<double>& v) {
    Json arr = Json::array();
    for (double x : v) arr.push(Json::number(x));
    return arr;
}

Json matrix_json(const SquareMatrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.size(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.size(); ++j) row.push(Json::number(m(i, j)));
        rows.push(row);
    }
    return rows;
}

void emit_report(const Json& report, const RunConfig& cfg, std::ostream& fallback) {
    const std::string text = report.dump() + "\n";
    if (cfg.out) {
        std::ofstream file(*cfg.out, std::ios::binary);
        if (!file) throw InputError("cannot open output file " + *cfg.out);
        file << text;
    } else {
        fallback << text;
    }
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

int run_classify(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.matrix) throw InputError("classify needs --matrix c1,c2,c3,c4");
    const auto& m = *cfg.matrix;
    const planar::LinearField2 field{SquareMatrix{{m[0], m[1]}, {m[2], m[3]}}, std::nullopt};
    const planar::FlowClass fc = planar::classify(field);

    Json report = Json::object();
    report.set("kind", Json::string(std::string(planar::to_string(fc.kind))));
    report.set("trC", Json::number(fc.tr));
    report.set("detC", Json::number(fc.det));
    report.set("delta", Json::number(fc.delta));
    report.set("lambda1", complex_json(fc.lambda1));
    report.set("lambda2", complex_json(fc.lambda2));
    if (fc.invariant_row) {
        Json deg = Json::object();
        Json row = Json::array();
        row.push(Json::number((*fc.invariant_row)[0]));
        row.push(Json::number((*fc.invariant_row)[1]));
        deg.set("row", std::move(row));
        deg.set("rate", Json::number(fc.rate));
        report.set("degenerate_invariant", std::move(deg));
    }
    emit_report(report, cfg, out);
    return 0;
}

// ---------------------------------------------------------------------------
// portrait
// ---------------------------------------------------------------------------

struct Stepper {
    std::function<Vec2(Vec2)> forward;
    std::function<Vec2(Vec2)> backward;
    std::function<Vec2(Vec2)> velocity;
};

int run_portrait(const RunConfig& cfg) {
    const bool has_matrix = cfg.matrix.has_value();
    const bool has_field = cfg.field.has_value();
    if (has_matrix == has_field)
        throw InputError("portrait needs exactly one of --matrix or --field");
    if (!cfg.out) throw InputError("portrait needs --out <file.svg>");
    const auto& r = cfg.region;
    if (!(r[0] < r[1]) || !(r[2] < r[3])) throw InputError("bad region: need xmin<xmax and ymin<ymax");
    if (cfg.trajectories < 0 || cfg.trajectories > 4096)
        throw InputError("trajectory count out of range");
    if (cfg.steps < 1 || cfg.steps > 2'000'000) throw InputError("steps out of range");
    if (!(cfg.tmax > 0.0)) throw InputError("tmax must be positive");

    const double h = cfg.tmax / cfg.steps;
    Stepper step;
    std::optional<planar::FlowClass> linear_class;

    if (has_matrix) {
        const auto& m = *cfg.matrix;
        const SquareMatrix c{{m[0], m[1]}, {m[2], m[3]}};
        linear_class = planar::classify({c, std::nullopt});
        const SquareMatrix ef = exp2_closed(c, h);
        const SquareMatrix eb = exp2_closed(c, -h);
        step.forward = [ef](Vec2 u) { return ef.apply(u); };
        step.backward = [eb](Vec2 u) { return eb.apply(u); };
        step.velocity = [c](Vec2 u) { return c.apply(u); };
    } else {
        expr::Field2 f = [&] {
            const std::string& text = *cfg.field;
            if (text.rfind("demo:", 0) == 0) {
                try {
                    return expr::preset(text);
                } catch (const Error& e) {
                    throw InputError(e.what());
                }
            }
            const auto semi = text.find(';');
            if (semi == std::string::npos)
                throw InputError("field must be given as \"xexpr ; yexpr\"");
            try {
                return expr::Field2{expr::parse(text.substr(0, semi)),
                                    expr::parse(text.substr(semi + 1))};
            } catch (const Error& e) {
                throw InputError(std::string("field: ") + e.what());
            }
        }();
        step.forward = [f, h](Vec2 u) { return expr::rk4_flow(f, u, h, 1); };
        step.backward = [f, h](Vec2 u) { return expr::rk4_flow(f, u, -h, 1); };
        step.velocity = [f](Vec2 u) { return expr::eval_field(f, u); };
    }

    // Jittered grid of start points, a pure function of seed and region.
    Rng rng(cfg.seed);
    std::vector<Vec2> starts;
    const int n = cfg.trajectories;
    const int g = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(std::max(n, 1))))));
    for (int k = 0; k < n; ++k) {
        const int i = k % g;
        const int j = k / g;
        const double jx = 0.6 * (rng.uniform() - 0.5);
        const double jy = 0.6 * (rng.uniform() - 0.5);
        starts.push_back({r[0] + (i + 0.5 + jx) * (r[1] - r[0]) / g,
                          r[2] + (j + 0.5 + jy) * (r[3] - r[2]) / g});
    }

    const double mx = 0.5 * (r[1] - r[0]);
    const double my = 0.5 * (r[3] - r[2]);
    auto inside = [&](Vec2 u) {
        return u[0] >= r[0] - mx && u[0] <= r[1] + mx && u[1] >= r[2] - my && u[1] <= r[3] + my;
    };

    io::SvgDocument doc(r[0], r[1], r[2], r[3]);
    const double marker_radius = std::max(r[1] - r[0], r[3] - r[2]) / 128.0;
    std::vector<std::array<double, 3>> finals; // (time, u, v) per trajectory

    for (const Vec2 start : starts) {
        const Vec2 vel = step.velocity(start);
        if (norm(vel) <= 1e-9 * (1.0 + norm(start))) {
            doc.add_circle(start, marker_radius, "marker");
            finals.push_back({0.0, start[0], start[1]});
            continue;
        }
        std::vector<Vec2> fwd{start};
        double reached = 0.0;
        for (int k = 0; k < cfg.steps; ++k) {
            const Vec2 next = step.forward(fwd.back());
            fwd.push_back(next);
            reached += h;
            if (!inside(next)) break;
        }
        std::vector<Vec2> bwd;
        Vec2 u = start;
        for (int k = 0; k < cfg.steps; ++k) {
            u = step.backward(u);
            bwd.push_back(u);
            if (!inside(u)) break;
        }
        std::vector<Vec2> polyline(bwd.rbegin(), bwd.rend());
        polyline.insert(polyline.end(), fwd.begin(), fwd.end());
        doc.add_path(io::decimate(polyline, 2000), "trajectory");
        finals.push_back({reached, fwd.back()[0], fwd.back()[1]});
    }

    if (linear_class && linear_class->kind == planar::FlowKind::Saddle) {
        // Separatrices: the eigenlines of C drawn across the region.
        const auto& m = *cfg.matrix;
        const double span = std::hypot(r[1] - r[0], r[3] - r[2]);
        for (const std::complex<double> lambda : {linear_class->lambda1, linear_class->lambda2}) {
            const double l = lambda.real();
            Vec2 dir{m[1], l - m[0]};
            const Vec2 alt{l - m[3], m[2]};
            if (norm(alt) > norm(dir)) dir = alt;
            const double len = norm(dir);
            dir = {dir[0] / len, dir[1] / len};
            doc.add_path({{-span * dir[0], -span * dir[1]}, {span * dir[0], span * dir[1]}},
                         "separatrix");
        }
    }

    const std::string svg = doc.str();
    {
        std::ofstream file(*cfg.out, std::ios::binary);
        if (!file) throw InputError("cannot open output file " + *cfg.out);
        file << svg;
    }
    if (cfg.csv) {
        std::string text = "t,u,v\n";
        for (const auto& row : finals)
            text += io::format_g6(row[0]) + "," + io::format_g6(row[1]) + "," +
                    io::format_g6(row[2]) + "\n";
        std::ofstream file(*cfg.csv, std::ios::binary);
        if (!file) throw InputError("cannot open csv file " + *cfg.csv);
        file << text;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// quadric
// ---------------------------------------------------------------------------

int run_quadric(const RunConfig& cfg, std::ostream& out) {
    const bool has_preset = cfg.preset.has_value();
    const bool has_a = cfg.a.has_value();
    if (has_preset == has_a) throw InputError("quadric needs exactly one of --preset or --A");
    if (!cfg.p) throw InputError("quadric needs --p p1,p2,p3");
    if (cfg.samples < 1 || cfg.samples > 100000) throw InputError("samples out of range");

    quadric::QuadricGroup group = [&] {
        try {
            if (has_preset) return quadric::QuadricGroup::preset(*cfg.preset);
            const auto& a = *cfg.a;
            return quadric::QuadricGroup(SquareMatrix{
                {a[0], a[1], a[2]}, {a[3], a[4], a[5]}, {a[6], a[7], a[8]}});
        } catch (const Error& e) {
            throw InputError(e.what());
        }
    }();
    const quadric::AxisField axis = [&] {
        try {
            return quadric::AxisField({(*cfg.p)[0], (*cfg.p)[1], (*cfg.p)[2]});
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
    }();

    const quadric::FlowType3 type = quadric::classify_axis(group, axis);
    const SquareMatrix b = quadric::b_matrix(group, axis);
    const SquareMatrix b3 = b * b * b;
    const double nb = b.norm_inf();
    const double residual = (b3 - type.epsilon * b).norm_inf() / std::max(nb * nb * nb, 1e-300);

    const Vec3 u0{cfg.u0[0], cfg.u0[1], cfg.u0[2]};
    const auto [f0, g0] = quadric::p_invariants(group, axis, u0);
    double fdrift = 0.0, gdrift = 0.0;
    Json orbit = Json::array();
    std::string orbit_csv = "t,u,v,w\n";
    for (int k = 0; k <= cfg.samples; ++k) {
        const double tk = cfg.t * k / cfg.samples;
        const Vec3 uk = quadric::orbit_point(group, axis, u0, tk);
        const auto [fk, gk] = quadric::p_invariants(group, axis, uk);
        fdrift = std::max(fdrift, std::abs(fk - f0));
        gdrift = std::max(gdrift, std::abs(gk - g0));
        Json rowj = Json::array();
        rowj.push(Json::number(tk));
        rowj.push(Json::number(uk[0]));
        rowj.push(Json::number(uk[1]));
        rowj.push(Json::number(uk[2]));
        orbit.push(std::move(rowj));
        orbit_csv += io::format_g6(tk) + "," + io::format_g6(uk[0]) + "," +
                     io::format_g6(uk[1]) + "," + io::format_g6(uk[2]) + "\n";
    }

    if (cfg.format == "csv") {
        if (cfg.out) {
            std::ofstream file(*cfg.out, std::ios::binary);
            if (!file) throw InputError("cannot open output file " + *cfg.out);
            file << orbit_csv;
        } else {
            out << orbit_csv;
        }
        return 0;
    }

    // Cyclic-permutation detection on the final transport matrix; the
    // tolerance absorbs the precision of a command-line t.
    const SquareMatrix transport = quadric::exp_b(b, type.epsilon, cfg.t);
    const SquareMatrix cycle1{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
    const SquareMatrix cycle2{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}};
    const bool permutation = (transport - cycle1).max_abs() <= 1e-3 ||
                             (transport - cycle2).max_abs() <= 1e-3;

    Json report = Json::object();
    if (has_preset) report.set("preset", Json::string(*cfg.preset));
    report.set("A", matrix_json(group.a()));
    report.set("p", vec_json({axis.p[0], axis.p[1], axis.p[2]}));
    report.set("u0", vec_json({u0[0], u0[1], u0[2]}));
    report.set("t", Json::number(cfg.t));
    report.set("epsilon", Json::number(type.epsilon));
    report.set("flow_type", Json::string(std::string(quadric::to_string(type.type))));
    report.set("B", matrix_json(b));
    report.set("B3_minus_epsB_residual", Json::number(residual));
    Json drift = Json::object();
    drift.set("f", Json::number(fdrift));
    drift.set("g", Json::number(gdrift));
    report.set("invariant_drift", std::move(drift));
    report.set("permutation_check", Json::boolean(permutation));
    report.set("sample_orbit", std::move(orbit));
    emit_report(report, cfg, out);
    return 0;
}

// ---------------------------------------------------------------------------
// tensor-rep
// ---------------------------------------------------------------------------

struct Eigensystem {
    bool diagonalizable = false;
    std::complex<double> lambda[2];
    std::complex<double> v[2][2]; // right eigenvectors, columns
    std::complex<double> w[2][2]; // left eigenvector rows (V^{-1})
};

Eigensystem eigensystem2(const SquareMatrix& c) {
    Eigensystem es;
    const ComplexPair pair = eig2(c);
    es.lambda[0] = pair.lambda1;
    es.lambda[1] = pair.lambda2;
    const double scale = c.norm_fro() + 1.0;
    const bool scalar = std::abs(c(0, 1)) <= 1e-12 * scale && std::abs(c(1, 0)) <= 1e-12 * scale &&
                        std::abs(c(0, 0) - c(1, 1)) <= 1e-12 * scale;
    if (scalar) {
        es.diagonalizable = true;
        es.v[0][0] = 1.0; es.v[1][0] = 0.0;
        es.v[0][1] = 0.0; es.v[1][1] = 1.0;
        es.w[0][0] = 1.0; es.w[0][1] = 0.0;
        es.w[1][0] = 0.0; es.w[1][1] = 1.0;
        return es;
    }
    if (std::abs(pair.lambda1 - pair.lambda2) <= 1e-8 * scale) {
        es.diagonalizable = false;
        return es;
    }
    for (int k = 0; k < 2; ++k) {
        const std::complex<double> l = es.lambda[k];
        // (C - l I) v = 0: use the larger of the two null-vector candidates.
        const std::complex<double> cand1[2] = {c(0, 1), l - c(0, 0)};
        const std::complex<double> cand2[2] = {l - c(1, 1), c(1, 0)};
        const double n1 = std::abs(cand1[0]) + std::abs(cand1[1]);
        const double n2 = std::abs(cand2[0]) + std::abs(cand2[1]);
        es.v[0][k] = (n1 >= n2) ? cand1[0] : cand2[0];
        es.v[1][k] = (n1 >= n2) ? cand1[1] : cand2[1];
    }
    const std::complex<double> det = es.v[0][0] * es.v[1][1] - es.v[0][1] * es.v[1][0];
    if (std::abs(det) <= 1e-14 * scale * scale) {
        es.diagonalizable = false;
        return es;
    }
    es.w[0][0] = es.v[1][1] / det;
    es.w[0][1] = -es.v[0][1] / det;
    es.w[1][0] = -es.v[1][0] / det;
    es.w[1][1] = es.v[0][0] / det;
    es.diagonalizable = true;
    return es;
}

int run_tensor_rep(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.matrix) throw InputError("tensor-rep needs --matrix c1,c2,c3,c4");
    if (!cfg.type) throw InputError("tensor-rep needs --type p,q");
    rep::TensorSpec spec;
    spec.p = (*cfg.type)[0];
    spec.q = (*cfg.type)[1];
    spec.symmetric = cfg.symmetric;
    if (cfg.mode == "drag") spec.mode = rep::Mode::DragComponents;
    else if (cfg.mode == "invariant") spec.mode = rep::Mode::InvariantTensor;
    else throw InputError("mode must be drag or invariant");
    try {
        spec.validate();
    } catch (const Error& e) {
        throw InputError(e.what());
    }

    const auto& m = *cfg.matrix;
    const SquareMatrix c{{m[0], m[1]}, {m[2], m[3]}};
    rep::InducedGenerator gen = rep::induced_generator(c, spec);
    if (spec.symmetric) gen = rep::symmetric_reduce(gen);

    const Eigensystem es = eigensystem2(c);
    const auto formula = rep::eigen_multiset(es.lambda[0], es.lambda[1], spec);

    // Eigenvalue certificates: Rayleigh quotients of the known tensor-product
    // eigenvectors of the generator, capped for very large valences.
    std::vector<std::complex<double>> computed;
    Json match = Json::null();
    if (es.diagonalizable) {
        const int slots = spec.p + spec.q;
        const int dim = gen.cbar.size();
        const int full = spec.full_dim();
        const long long cap = 512;
        bool all_ok = true;
        long long done = 0;
        for (int tuple = 0; tuple < full && done < cap; ++tuple) {
            // Decode slot values; skip non-sorted covariant tuples when reduced.
            std::vector<int> idx(static_cast<std::size_t>(slots));
            for (int s = 0; s < slots; ++s) idx[static_cast<std::size_t>(s)] = (tuple >> (slots - 1 - s)) & 1;
            if (spec.symmetric) {
                bool sorted = true;
                for (int b = spec.p; b + 1 < slots; ++b)
                    if (idx[static_cast<std::size_t>(b)] > idx[static_cast<std::size_t>(b + 1)]) sorted = false;
                if (!sorted) continue;
            }
            // Expected value for this tuple.
            std::complex<double> expected = 0.0;
            for (int s = 0; s < spec.p; ++s) expected += es.lambda[idx[static_cast<std::size_t>(s)]];
            for (int s = spec.p; s < slots; ++s) expected -= es.lambda[idx[static_cast<std::size_t>(s)]];
            if (spec.mode == rep::Mode::InvariantTensor) expected = -expected;

            // Kronecker eigenvector over the full index space, symmetrized
            // over the covariant block, then restricted if reduced.
            std::vector<std::complex<double>> w_full(static_cast<std::size_t>(full));
            for (int pos = 0; pos < full; ++pos) {
                std::complex<double> prod = 1.0;
                for (int s = 0; s < slots; ++s) {
                    const int comp = (pos >> (slots - 1 - s)) & 1;
                    const int which = idx[static_cast<std::size_t>(s)];
                    prod *= (s < spec.p) ? es.v[comp][which] : es.w[which][comp];
                }
                w_full[static_cast<std::size_t>(pos)] += prod;
            }
            if (spec.symmetric) {
                // Symmetrize the covariant block by summing slot permutations:
                // cheap here because q <= 3 in the supported cases.
                std::vector<std::complex<double>> sym(static_cast<std::size_t>(full), 0.0);
                std::vector<int> perm(idx.begin() + spec.p, idx.end());
                std::sort(perm.begin(), perm.end());
                std::vector<std::vector<int>> perms;
                do { perms.push_back(perm); } while (std::next_permutation(perm.begin(), perm.end()));
                for (const auto& pp : perms) {
                    for (int pos = 0; pos < full; ++pos) {
                        std::complex<double> prod = 1.0;
                        for (int s = 0; s < spec.p; ++s)
                            prod *= es.v[(pos >> (slots - 1 - s)) & 1][idx[static_cast<std::size_t>(s)]];
                        for (int s = spec.p; s < slots; ++s)
                            prod *= es.w[pp[static_cast<std::size_t>(s - spec.p)]][(pos >> (slots - 1 - s)) & 1];
                        sym[static_cast<std::size_t>(pos)] += prod;
                    }
                }
                w_full = std::move(sym);
            }

            std::vector<std::complex<double>> vec(static_cast<std::size_t>(dim));
            if (spec.symmetric) {
                // Reduced coordinates: representative (sorted) positions.
                int k = 0;
                for (int pos = 0; pos < full; ++pos) {
                    bool sorted = true;
                    for (int b = spec.p; b + 1 < slots; ++b) {
                        const int x = (pos >> (slots - 1 - b)) & 1;
                        const int y = (pos >> (slots - 2 - b)) & 1;
                        if (x > y) sorted = false;
                    }
                    if (sorted) vec[static_cast<std::size_t>(k++)] = w_full[static_cast<std::size_t>(pos)];
                }
            } else {
                vec = w_full;
            }

            // Rayleigh quotient and residual against the generator.
            std::complex<double> num = 0.0;
            double den = 0.0;
            std::vector<std::complex<double>> image(static_cast<std::size_t>(dim), 0.0);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    image[static_cast<std::size_t>(i)] += gen.cbar(i, j) * vec[static_cast<std::size_t>(j)];
            for (int i = 0; i < dim; ++i) {
                num += std::conj(vec[static_cast<std::size_t>(i)]) * image[static_cast<std::size_t>(i)];
                den += std::norm(vec[static_cast<std::size_t>(i)]);
            }
            const std::complex<double> rayleigh = num / den;
            computed.push_back(rayleigh);
            double resid = 0.0;
            for (int i = 0; i < dim; ++i)
                resid = std::max(resid, std::abs(image[static_cast<std::size_t>(i)] -
                                                 rayleigh * vec[static_cast<std::size_t>(i)]));
            const double scale = 1.0 + std::abs(expected);
            if (std::abs(rayleigh - expected) > 1e-7 * scale || resid > 1e-7 * scale * std::sqrt(den))
                all_ok = false;
            ++done;
        }
        std::sort(computed.begin(), computed.end(), [](auto a, auto b) {
            if (a.real() != b.real()) return a.real() > b.real();
            return a.imag() > b.imag();
        });
        match = Json::boolean(all_ok);
    }

    const rep::OdePolynomials ode = rep::ode_coefficients(spec, es.lambda[0], es.lambda[1]);

    Json report = Json::object();
    Json typej = Json::array();
    typej.push(Json::integer(spec.p));
    typej.push(Json::integer(spec.q));
    report.set("type", std::move(typej));
    report.set("symmetric", Json::boolean(spec.symmetric));
    report.set("mode", Json::string(cfg.mode));
    report.set("dim", Json::integer(gen.cbar.size()));
    if (gen.cbar.size() <= 64) report.set("Cbar", matrix_json(gen.cbar));
    else report.set("Cbar", Json::null());
    Json labels = Json::array();
    for (const auto& l : gen.labels) labels.push(Json::string(l));
    report.set("index_order", std::move(labels));
    report.set("diagonalizable", Json::boolean(es.diagonalizable));
    Json formulaj = Json::array();
    for (const auto& z : formula) formulaj.push(complex_json(z));
    report.set("eigenvalues_formula", std::move(formulaj));
    Json computedj = Json::array();
    for (const auto& z : computed) computedj.push(complex_json(z));
    report.set("eigenvalues_computed", std::move(computedj));
    report.set("match", std::move(match));
    Json odej = Json::object();
    Json minimal = Json::array();
    for (const auto& z : ode.minimal) minimal.push(complex_json(z));
    Json characteristic = Json::array();
    for (const auto& z : ode.characteristic) characteristic.push(complex_json(z));
    odej.set("minimal", std::move(minimal));
    odej.set("characteristic", std::move(characteristic));
    report.set("ode_coefficients", std::move(odej));
    emit_report(report, cfg, out);
    return 0;
}

// ---------------------------------------------------------------------------
// argv / config handling
// ---------------------------------------------------------------------------

RunConfig config_from_json(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw InputError("cannot open config file " + path);
    nlohmann::json j;
    try {
        file >> j;
    } catch (const std::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    RunConfig cfg;
    try {
        cfg.command = j.at("command").get<std::string>();
        if (j.contains("matrix")) {
            auto v = j["matrix"].get<std::vector<double>>();
            if (v.size() != 4) throw InputError("config: matrix needs 4 entries");
            cfg.matrix = std::array<double, 4>{v[0], v[1], v[2], v[3]};
        }
        if (j.contains("field")) cfg.field = j["field"].get<std::string>();
        if (j.contains("preset")) cfg.preset = j["preset"].get<std::string>();
        if (j.contains("A")) {
            auto v = j["A"].get<std::vector<double>>();
            if (v.size() != 9) throw InputError("config: A needs 9 entries");
            std::array<double, 9> a{};
            std::copy(v.begin(), v.end(), a.begin());
            cfg.a = a;
        }
        if (j.contains("p")) {
            auto v = j["p"].get<std::vector<double>>();
            if (v.size() != 3) throw InputError("config: p needs 3 entries");
            cfg.p = std::array<double, 3>{v[0], v[1], v[2]};
        }
        if (j.contains("u0")) {
            auto v = j["u0"].get<std::vector<double>>();
            if (v.size() != 3) throw InputError("config: u0 needs 3 entries");
            cfg.u0 = {v[0], v[1], v[2]};
        }
        if (j.contains("type")) {
            auto v = j["type"].get<std::vector<int>>();
            if (v.size() != 2) throw InputError("config: type needs 2 entries");
            cfg.type = std::array<int, 2>{v[0], v[1]};
        }
        if (j.contains("symmetric")) cfg.symmetric = j["symmetric"].get<bool>();
        if (j.contains("mode")) cfg.mode = j["mode"].get<std::string>();
        if (j.contains("region")) {
            auto v = j["region"].get<std::vector<double>>();
            if (v.size() != 4) throw InputError("config: region needs 4 entries");
            cfg.region = {v[0], v[1], v[2], v[3]};
        }
        if (j.contains("trajectories")) cfg.trajectories = j["trajectories"].get<int>();
        if (j.contains("tmax")) cfg.tmax = j["tmax"].get<double>();
        if (j.contains("steps")) cfg.steps = j["steps"].get<int>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("csv")) cfg.csv = j["csv"].get<std::string>();
        if (j.contains("out")) cfg.out = j["out"].get<std::string>();
        if (j.contains("format")) cfg.format = j["format"].get<std::string>();
        if (j.contains("t")) cfg.t = j["t"].get<double>();
        if (j.contains("samples")) cfg.samples = j["samples"].get<int>();
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    return cfg;
}

void apply_env_seed(RunConfig& cfg) {
    if (const char* s = std::getenv("FLOWLAB_SEED")) {
        try {
            cfg.seed = std::stoull(s);
        } catch (const std::exception&) {
            throw InputError("FLOWLAB_SEED must be an unsigned integer");
        }
    }
}

void validate_format(const RunConfig& cfg) {
    if (cfg.format.empty()) return;
    if (cfg.command == "portrait" && cfg.format == "svg") return;
    if (cfg.command == "quadric" && (cfg.format == "json" || cfg.format == "csv")) return;
    if (cfg.command != "portrait" && cfg.format == "json") return;
    throw InputError("format '" + cfg.format + "' not supported for " + cfg.command);
}

} // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        validate_format(cfg);
        if (cfg.command == "classify") return run_classify(cfg, out);
        if (cfg.command == "portrait") return run_portrait(cfg);
        if (cfg.command == "quadric") return run_quadric(cfg, out);
        if (cfg.command == "tensor-rep") return run_tensor_rep(cfg, out);
        err << "flowlab: unknown command '" << cfg.command << "'\n";
        return 2;
    } catch (const InputError& e) {
        err << "flowlab: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "flowlab: " << e.code() << ": " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "flowlab: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "flowlab: " << e.what() << "\n";
        return 3;
    }
}

int main_with_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    // --config replaces the whole command line (same schema as the flags).
    for (int i = 1; i < argc; ++i) {
        if (std::string_view(argv[i]) == "--config") {
            if (i + 1 >= argc) {
                err << "flowlab: --config needs a file path\n";
                return 2;
            }
            try {
                RunConfig cfg = config_from_json(argv[i + 1]);
                apply_env_seed(cfg);
                return run(cfg, out, err);
            } catch (const InputError& e) {
                err << "flowlab: " << e.what() << "\n";
                return 2;
            }
        }
    }

    CLI::App app{"flows, classifications and first integrals of linear plane fields, "
                 "quadric rotation groups, and induced tensor representations"};
    app.require_subcommand(1);
    RunConfig cfg;

    std::string matrix_text, field_text, preset_text, a_text, p_text, u0_text, type_text,
        region_text, csv_text, out_text;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", out_text, "output file (reports default to stdout)");
        sub->add_option("--format", cfg.format, "output format (svg for portrait, json otherwise)");
    };

    CLI::App* classify = app.add_subcommand("classify", "classify a linear plane field");
    classify->add_option("--matrix", matrix_text, "c1,c2,c3,c4 row major")->required();
    add_common(classify);

    CLI::App* portrait = app.add_subcommand("portrait", "emit an SVG phase portrait");
    portrait->add_option("--matrix", matrix_text, "c1,c2,c3,c4 row major");
    portrait->add_option("--field", field_text, "\"xexpr ; yexpr\" or demo:limit-cycle");
    portrait->add_option("--region", region_text, "xmin,xmax,ymin,ymax (default -2,2,-2,2)");
    portrait->add_option("--trajectories", cfg.trajectories, "number of start points (default 8)");
    portrait->add_option("--tmax", cfg.tmax, "integration time per direction (default 6)");
    portrait->add_option("--steps", cfg.steps, "steps per direction (default 400)");
    portrait->add_option("--seed", cfg.seed, "start lattice seed (default 0)");
    portrait->add_option("--csv", csv_text, "write a t,u,v sidecar with each trajectory's final state");
    add_common(portrait);

    CLI::App* quadric_cmd = app.add_subcommand("quadric", "analyze a generalized rotation group");
    quadric_cmd->add_option("--preset", preset_text, "sphere | lorentz");
    quadric_cmd->add_option("--A", a_text, "nine reals, row major symmetric");
    quadric_cmd->add_option("--p", p_text, "axis coefficients p1,p2,p3");
    quadric_cmd->add_option("--u0", u0_text, "orbit start point (default 1,0,0)");
    quadric_cmd->add_option("--t", cfg.t, "total orbit time (default 6.2832)");
    quadric_cmd->add_option("--samples", cfg.samples, "orbit samples (default 16)");
    add_common(quadric_cmd);

    CLI::App* tensor = app.add_subcommand("tensor-rep", "induced generator on tensor components");
    tensor->add_option("--matrix", matrix_text, "c1,c2,c3,c4 row major")->required();
    tensor->add_option("--type", type_text, "valence p,q")->required();
    tensor->add_flag("--symmetric", cfg.symmetric, "symmetrize the covariant block");
    tensor->add_option("--mode", cfg.mode, "drag | invariant (default drag)");
    add_common(tensor);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "flowlab: " << e.what() << "\n";
        return 2;
    }

    try {
        if (classify->parsed()) cfg.command = "classify";
        if (portrait->parsed()) cfg.command = "portrait";
        if (quadric_cmd->parsed()) cfg.command = "quadric";
        if (tensor->parsed()) cfg.command = "tensor-rep";

        if (!matrix_text.empty()) cfg.matrix = parse_reals<4>(matrix_text, "--matrix");
        if (!field_text.empty()) cfg.field = field_text;
        if (!preset_text.empty()) cfg.preset = preset_text;
        if (!a_text.empty()) cfg.a = parse_reals<9>(a_text, "--A");
        if (!p_text.empty()) cfg.p = parse_reals<3>(p_text, "--p");
        if (!u0_text.empty()) cfg.u0 = parse_reals<3>(u0_text, "--u0");
        if (!region_text.empty()) cfg.region = parse_reals<4>(region_text, "--region");
        if (!type_text.empty()) {
            const auto pq = parse_reals<2>(type_text, "--type");
            if (pq[0] != std::floor(pq[0]) || pq[1] != std::floor(pq[1]))
                throw InputError("--type: valences must be integers");
            cfg.type = std::array<int, 2>{static_cast<int>(pq[0]), static_cast<int>(pq[1])};
        }
        if (!csv_text.empty()) cfg.csv = csv_text;
        if (!out_text.empty()) cfg.out = out_text;
        apply_env_seed(cfg);
    } catch (const InputError& e) {
        err << "flowlab: " << e.what() << "\n";
        return 2;
    }

    return run(cfg, out, err);
}

} // namespace flowlab::cli
