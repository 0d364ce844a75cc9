#include "typek/app.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <map>
#include <ostream>
#include <random>

#include <CLI11.hpp>

#include "typek/attractor.hpp"
#include "typek/errors.hpp"
#include "typek/fixed_points.hpp"
#include "typek/hypothesis.hpp"
#include "typek/io.hpp"
#include "typek/orbit.hpp"

namespace typek::app {

namespace {

struct UsageError : Error {
    using Error::Error;
};

double parse_real(const std::string& s, const std::string& what) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) throw UsageError("invalid number '" + s + "' in " + what);
    return v;
}

Params parse_params(const std::vector<std::string>& items) {
    Params out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("expected NAME=REAL, got '" + item + "'");
        out[item.substr(0, eq)] = parse_real(item.substr(eq + 1), "-p " + item);
    }
    return out;
}

Vec parse_point(const std::string& s) {
    std::vector<double> xs;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = std::min(s.find(',', pos), s.size());
        xs.push_back(parse_real(s.substr(pos, comma - pos), "--x0 " + s));
        pos = comma + 1;
    }
    return Vec(xs);
}

std::string path_in(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

void print_warnings(const KolmogorovMap& map, std::ostream& err) {
    for (const auto& w : map.warnings()) err << "warning: " << w << '\n';
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
    const KolmogorovMap map = load_map(cfg);
    GateOptions opts;
    opts.grid_res = cfg.grid;
    opts.tol = cfg.tol;
    opts.backend = cfg.backend;
    const HypothesisReport rep = run_hypothesis_gate(map, opts);
    io::write_file_atomic(path_in(cfg, "report.json"), io::dump(io::to_json(rep)));

    auto line = [&](const char* name, bool pass) { out << name << ": " << (pass ? "pass" : "FAIL") << '\n'; };
    line("A1 sign structure", rep.a1.pass);
    line("A2 repelling origin", rep.a2.pass);
    line("forward invariance", rep.invariance.pass);
    line("dissipativity (E3)", rep.dissipative.pass);
    out << "rho(M) max " << io::fmt_real(rep.rho.max_rho) << '\n';
    line("rho(M) < 1", rep.rho.pass);
    if (rep.criterion12) line("planar criterion", rep.criterion12->pass);
    if (rep.norm_bound) out << "norm bound " << io::fmt_real(*rep.norm_bound) << '\n';
    out << (rep.all_pass() ? "all hypotheses pass" : "hypothesis check failed") << '\n';
    return rep.all_pass() ? kOk : kCheckFailed;
}

int cmd_fixed_points(const RunConfig& cfg, std::ostream& out) {
    const KolmogorovMap map = load_map(cfg);
    const auto fps = cfg.grid ? find_all_fixed_points(map, cfg.grid) : find_all_fixed_points(map);
    io::write_file_atomic(path_in(cfg, "fixed_points.csv"), io::fixed_points_csv(fps));
    io::write_file_atomic(path_in(cfg, "fixed_points.json"), io::dump(io::fixed_points_json(map, fps)));
    for (const auto& f : fps)
        out << to_string(f.kind) << ' ' << f.location.str() << ' ' << to_string(f.stability) << '\n';
    return kOk;
}

int cmd_attractor(const RunConfig& cfg, std::ostream& out) {
    const KolmogorovMap map = load_map(cfg);
    AttractorOptions opts;
    if (cfg.grid) opts.fixed_point_samples = cfg.grid;
    opts.seed = cfg.seed;
    const AttractorDecomposition d = assemble_decomposition(map, opts);
    const std::string json = io::dump(io::to_json(map, d));
    const std::string svg = io::attractor_svg(map, d);
    io::write_file_atomic(path_in(cfg, "fixed_points.csv"), io::fixed_points_csv(d.fixed_points));
    io::write_file_atomic(path_in(cfg, "fixed_points.json"), io::dump(io::fixed_points_json(map, d.fixed_points)));
    io::write_file_atomic(path_in(cfg, "attractor.json"), json);
    io::write_file_atomic(path_in(cfg, "attractor.svg"), svg);

    out << "sigma_H: " << d.sigma_h.points.size() << " points, terminal " << d.sigma_h.terminal.str() << '\n';
    out << "sigma_V: " << d.sigma_v.points.size() << " points, terminal " << d.sigma_v.terminal.str() << '\n';
    if (d.sigma0_is_point())
        out << "sigma_0: single point " << d.p0.location.str() << '\n';
    else
        out << "sigma_0: " << d.sigma_0.points.size() << " points from " << d.p0.location.str() << " to "
            << d.p1.location.str() << '\n';
    bool flags = true;
    for (const auto& f : d.monotone_flags) flags = flags && f.holds;
    for (const auto& f : d.unordered_flags) flags = flags && f.holds;
    out << "order flags: " << (flags ? "all hold" : "some fail") << '\n';
    return kOk;
}

int cmd_orbit(const RunConfig& cfg, const std::vector<std::string>& x0s, std::size_t n_random, bool backward,
              std::ostream& out) {
    const KolmogorovMap map = load_map(cfg);
    std::vector<Vec> starts;
    for (const auto& s : x0s) {
        Vec x = parse_point(s);
        if (x.size() != map.dim()) throw UsageError("--x0 " + s + " has the wrong dimension");
        starts.push_back(std::move(x));
    }
    if (starts.empty() && n_random == 0) n_random = 100;
    std::mt19937_64 rng(cfg.seed);
    for (std::size_t i = 0; i < n_random; ++i) {
        std::vector<double> x(map.dim());
        for (std::size_t j = 0; j < map.dim(); ++j) {
            std::uniform_real_distribution<double> u(0.0, map.r()[j]);
            double v = 0.0;
            while (v == 0.0) v = u(rng);
            x[j] = v;
        }
        starts.emplace_back(std::move(x));
    }

    std::vector<OrbitTrace> traces;
    if (backward) {
        traces.resize(starts.size());
        parallel_for(
            starts.size(), [&](std::size_t i) { traces[i] = iterate_backward(map, starts[i], cfg.max_steps, cfg.tol); },
            cfg.backend);
    } else {
        OrbitOptions opts;
        opts.max_steps = cfg.max_steps;
        opts.conv_tol = cfg.tol;
        traces = iterate_batch(map, starts, opts, cfg.backend);
    }

    io::Json list = io::Json::array();
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        io::write_file_atomic(path_in(cfg, "orbit_" + std::to_string(i) + ".csv"), io::orbit_csv(traces[i]));
        io::Json s = io::orbit_summary(traces[i]);
        s["index"] = i;
        list.push_back(std::move(s));
        ++counts[to_string(traces[i].verdict)];
    }
    io::write_file_atomic(path_in(cfg, "orbits.json"),
                          io::dump(io::Json{{"map", io::map_info(map)}, {"seed", cfg.seed}, {"orbits", list}}));
    out << traces.size() << (backward ? " backward" : "") << " orbits:";
    for (const auto& [k, n] : counts) out << ' ' << k << '=' << n;
    out << '\n';
    return kOk;
}

int cmd_retrotone(const RunConfig& cfg, std::size_t pairs, bool strong, std::ostream& out) {
    const KolmogorovMap map = load_map(cfg);
    const RetrotoneResult r = sample_retrotone(map, pairs, cfg.seed, !strong, cfg.backend);
    io::write_file_atomic(path_in(cfg, "retrotone.json"), io::dump(io::to_json(r, !strong, cfg.seed)));
    out << (strong ? "strong" : "weak") << " retrotone: " << to_string(r.status) << " (" << r.filtered << " of "
        << r.pairs << " pairs ordered)\n";
    if (r.counterexample)
        out << "counterexample x=" << r.counterexample->x.str() << " y=" << r.counterexample->y.str() << ": "
            << r.counterexample->clause << '\n';
    return r.status == RetrotoneStatus::fail ? kCheckFailed : kOk;
}

}  // namespace

KolmogorovMap load_map(const RunConfig& cfg) {
    if (!cfg.map_file.empty()) return load_map_file(cfg.map_file, cfg.params);
    if (cfg.builtin != "example1") throw Error("unknown builtin map '" + cfg.builtin + "'");
    double a = 1.0, b = 0.05;
    for (const auto& [k, v] : cfg.params) {
        if (k == "a")
            a = v;
        else if (k == "b")
            b = v;
        else
            throw Error("example1 has no parameter '" + k + "'");
    }
    return builtin_example1(a, b);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App cli{"Analysis of planar and n-dimensional type-K competitive Kolmogorov maps", "typek"};
    cli.require_subcommand(1);
    cli.fallthrough();
    cli.set_config("--config", "", "TOML/INI file with option defaults");

    RunConfig cfg;
    std::vector<std::string> param_items;
    std::string backend = "openmp";
    auto* src = cli.add_option_group("map source");
    src->add_option("--builtin", cfg.builtin, "Builtin map (example1)");
    src->add_option("--map", cfg.map_file, "Map definition file");
    src->require_option(1);
    cli.add_option("-p,--param", param_items, "Parameter NAME=REAL (repeatable)");
    cli.add_option("--grid", cfg.grid, "Grid resolution per axis / nullcline samples");
    cli.add_option("--tol", cfg.tol, "Tolerance");
    cli.add_option("--seed", cfg.seed, "Random seed");
    cli.add_option("--out", cfg.out_dir, "Output directory");
    cli.add_option("--max-steps", cfg.max_steps, "Orbit step budget");
    cli.add_option("--backend", backend, "serial or openmp")->check(CLI::IsMember({"serial", "openmp"}));

    auto* check = cli.add_subcommand("check", "Verify the standing hypotheses; writes report.json");
    auto* fixed = cli.add_subcommand("fixed-points", "Fixed-point catalog; writes fixed_points.csv/.json");
    auto* attr = cli.add_subcommand("attractor", "Global attractor decomposition; writes attractor.json/.svg");
    auto* orbit = cli.add_subcommand("orbit", "Forward (or backward) orbits; writes orbit_<idx>.csv, orbits.json");
    auto* retro = cli.add_subcommand("retrotone", "Sampled retrotonicity test; writes retrotone.json");

    std::vector<std::string> x0s;
    std::size_t n_random = 0;
    bool backward = false;
    orbit->add_option("--x0", x0s, "Start point 'x1,x2,...' (repeatable)");
    orbit->add_option("--random", n_random, "Number of seeded random interior starts");
    orbit->add_flag("--backward", backward, "Iterate the inverse map");

    std::size_t pairs = 100000;
    bool strong = false;
    retro->add_option("--pairs", pairs, "Sampled pairs");
    retro->add_flag("--strong", strong, "Strong definition (default: weak)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        cli.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return cli.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    try {
        cfg.params = parse_params(param_items);
        cfg.backend = backend == "serial" ? Backend::serial : Backend::openmp;
        if (!(cfg.tol > 0.0)) throw UsageError("--tol must be positive");
        if (cfg.grid != 0 && cfg.grid < 3) throw UsageError("--grid must be at least 3");
        if (pairs == 0) throw UsageError("--pairs must be positive");
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    // Map loading first so that its failures get their own exit code.
    try {
        print_warnings(load_map(cfg), err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kMapLoad;
    }

    try {
        if (*check) return cmd_check(cfg, out);
        if (*fixed) return cmd_fixed_points(cfg, out);
        if (*attr) return cmd_attractor(cfg, out);
        if (*orbit) return cmd_orbit(cfg, x0s, n_random, backward, out);
        if (*retro) return cmd_retrotone(cfg, pairs, strong, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const UnsupportedDimension& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DegenerateConfiguration& e) {
        err << "degenerate configuration: " << e.what() << '\n';
        return kDegenerate;
    } catch (const ResolutionInsufficient& e) {
        err << "resolution insufficient: " << e.what() << '\n';
        return kResolution;
    } catch (const HypothesisViolation& e) {
        err << "hypothesis violation: " << e.what() << '\n';
        return kCheckFailed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kEvaluation;
    }
    return kUsage;
}

}  // namespace typek::app
