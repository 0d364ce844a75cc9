#pragma once

// The typek command line: subcommands check, fixed-points, attractor, orbit
// and retrotone over a builtin or file-defined map.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "typek/kernels.hpp"
#include "typek/map_model.hpp"

namespace typek::app {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kCheckFailed = 2,
    kEvaluation = 3,
    kMapLoad = 4,
    kDegenerate = 5,
    kResolution = 6,
};

struct RunConfig {
    std::string builtin;  // empty when map_file is set
    std::string map_file;
    Params params;
    std::size_t grid = 0;  // 0: module default
    double tol = 1e-12;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::size_t max_steps = 100000;
    Backend backend = Backend::openmp;
};

/// Map named by the config; builtin example1 defaults to a = 1, b = 0.05.
KolmogorovMap load_map(const RunConfig& cfg);

/// Run the command line (arguments without the program name). Summaries go
/// to `out`, diagnostics to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace typek::app
