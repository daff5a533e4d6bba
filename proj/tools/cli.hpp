#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace flowlab::cli {

/// One run of the tool: a subcommand plus its inputs. Exactly one input
/// source per run (matrix or field; preset or explicit coefficients). Every
/// output is a deterministic function of this struct.
struct RunConfig {
    std::string command; // classify | portrait | quadric | tensor-rep

    std::optional<std::array<double, 4>> matrix; // c1,c2,c3,c4 row major
    std::optional<std::string> field;            // "xexpr ; yexpr" or demo:name

    std::optional<std::string> preset;          // quadric preset name
    std::optional<std::array<double, 9>> a;     // quadric coefficients row major
    std::optional<std::array<double, 3>> p;     // axis coefficients
    std::array<double, 3> u0{1.0, 0.0, 0.0};    // orbit start point
    double t = 6.2832;                          // total orbit time
    int samples = 16;                           // orbit samples

    std::optional<std::array<int, 2>> type; // tensor valence p,q
    bool symmetric = false;
    std::string mode = "drag"; // drag | invariant

    std::array<double, 4> region{-2.0, 2.0, -2.0, 2.0}; // xmin,xmax,ymin,ymax
    int trajectories = 8;
    double tmax = 6.0;
    int steps = 400;
    std::uint64_t seed = 0;
    std::optional<std::string> csv; // portrait sidecar path

    std::optional<std::string> out; // output file; reports default to stdout
    std::string format;             // svg|csv|json; defaults per subcommand
};

/// Exit codes: 0 success, 2 input error, 3 runtime/domain error.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// argv parsing (CLI11 subcommands, or --config <json> with the same keys);
/// applies the FLOWLAB_SEED override. Prints usage problems to err itself.
int main_with_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace flowlab::cli
