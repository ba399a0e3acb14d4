// flockdyn command-line tool: solve, verify and simulate flock profiles.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flockdyn/convolution.hpp"
#include "flockdyn/error.hpp"
#include "flockdyn/io.hpp"
#include "flockdyn/parallel.hpp"
#include "flockdyn/potentials.hpp"
#include "flockdyn/simulate.hpp"
#include "flockdyn/solver.hpp"
#include "flockdyn/specfun.hpp"

#ifndef FLOCKDYN_VERSION
#define FLOCKDYN_VERSION "0.0.0"
#endif

namespace {

using namespace flockdyn;
using json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kRegime = 2, kNumerical = 3, kIo = 4, kBadArgs = 5 };

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::NoRoot:
    case ErrorCode::RegimeViolation:
    case ErrorCode::CaseMismatch:
    case ErrorCode::DegenerateDenominator:
        return kRegime;
    case ErrorCode::Io:
        return kIo;
    case ErrorCode::InvalidConfig:
        return kBadArgs;
    default:
        return kNumerical;
    }
}

// Quasi-Morse parameters from flags, optionally seeded by a JSON config.
struct ModelFlags {
    int n = 3;
    double C = 1.255;
    double ell = 0.8;
    double k = 0.2;
    CLI::Option* n_opt = nullptr;
    CLI::Option* C_opt = nullptr;
    CLI::Option* ell_opt = nullptr;
    CLI::Option* k_opt = nullptr;

    void add(CLI::App* app) {
        n_opt = app->add_option("-n,--dim", n, "Dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
        C_opt = app->add_option("-C", C, "Repulsion strength C");
        ell_opt = app->add_option("-l,--ell", ell, "Repulsion length ell");
        k_opt = app->add_option("-k", k, "Kernel decay rate k");
    }

    ModelParams resolve(const json& config) const {
        ModelParams p;
        const json& src = config.contains("potential") ? config["potential"] : config;
        p.n = n_opt->count() ? n : src.value("n", n);
        p.C = C_opt->count() ? C : src.value("C", C);
        p.ell = ell_opt->count() ? ell : src.value("ell", ell);
        p.k = k_opt->count() ? k : src.value("k", k);
        p.validate();
        return p;
    }
};

json params_json(const ModelParams& p) {
    return json{{"n", p.n}, {"C", p.C}, {"ell", p.ell}, {"k", p.k}};
}

json read_json_file(const std::string& path) {
    if (path.empty()) return json::object();
    try {
        return json::parse(io::read_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
    }
}

json metadata(const std::string& command, json config, std::optional<std::uint64_t> seed = std::nullopt) {
    json m{{"tool", "flockdyn"}, {"version", FLOCKDYN_VERSION}, {"command", command}, {"config", std::move(config)}};
    if (seed) m["seed"] = *seed;
    return m;
}

std::string csv_header(const json& meta) {
    return "# flockdyn " + meta["version"].get<std::string>() + " " + meta["command"].get<std::string>() +
           "\n# metadata: " + meta.dump() + "\n";
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        io::write_file(path, text);
    }
}

// ---------------------------------------------------------------------------

struct SolveCmd {
    ModelFlags model;
    std::string config_path;
    std::string output;
    int grid = 201;
    int root_index = 1;
    bool allow_non_biological = false;

    void add(CLI::App& root) {
        CLI::App* app = root.add_subcommand("solve", "Solve for the flock profile and its support radius");
        model.add(app);
        app->add_option("--config", config_path, "JSON file with n, C, ell, k");
        app->add_option("-o,--output", output, "Output prefix: writes PREFIX.json and PREFIX.csv");
        app->add_option("--grid", grid, "Density samples on [0, R*]")->check(CLI::Range(2, 10000000));
        app->add_option("--root-index", root_index, "Which root of det M to use")->check(CLI::PositiveNumber);
        app->add_flag("--allow-non-biological", allow_non_biological, "Permit parameters outside the relevant regime");
        app->callback([this] { run(); });
    }

    void run() const {
        const ModelParams p = model.resolve(read_json_file(config_path));
        SolveOptions opts;
        opts.root_index = root_index;
        opts.allow_non_biological = allow_non_biological;
        const FlockProfile prof = solve_profile(p, opts);
        json cfg = params_json(p);
        cfg["grid"] = grid;
        cfg["root_index"] = root_index;
        const json meta = metadata("solve", cfg);
        json out = json::parse(profile_to_json(prof));
        out["ambiguous_first_root"] = prof.flags.ambiguous_first_root;
        out["non_biological"] = prof.flags.non_biological;
        out["metadata"] = meta;
        if (output.empty()) {
            emit("", out.dump(2));
            return;
        }
        emit(output + ".json", out.dump(2) + "\n");
        const RadialDensity rho = prof.density();
        std::string csv = csv_header(meta) + "r,rho\n";
        for (int i = 0; i < grid; ++i) {
            const double r = i + 1 == grid ? prof.R_star : prof.R_star * i / (grid - 1);
            csv += io::csv_row({r, rho(r)});
        }
        emit(output + ".csv", csv);
    }
};

struct PhaseCmd {
    int n = 3;
    double C_min = 1.0, C_max = 3.0;
    double ell_min = 0.2, ell_max = 1.2;
    int resolution = 101;
    int threads = 0;
    std::string output;

    void add(CLI::App& root) {
        CLI::App* app = root.add_subcommand("phase", "Classify a (C, ell) grid into phase-diagram regions");
        app->add_option("-n,--dim", n, "Dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
        app->add_option("--C-min", C_min)->check(CLI::PositiveNumber);
        app->add_option("--C-max", C_max)->check(CLI::PositiveNumber);
        app->add_option("--ell-min", ell_min)->check(CLI::PositiveNumber);
        app->add_option("--ell-max", ell_max)->check(CLI::PositiveNumber);
        app->add_option("--resolution", resolution, "Grid points per axis")->check(CLI::Range(2, 100000));
        app->add_option("--threads", threads, "Worker threads (0: FLOCKDYN_THREADS or all cores)");
        app->add_option("-o,--output", output, "CSV path ('-' for stdout)");
        app->callback([this] { run(); });
    }

    void run() const {
        if (!(C_max > C_min) || !(ell_max > ell_min)) throw Error(ErrorCode::InvalidConfig, "empty sweep range");
        const std::size_t cells = static_cast<std::size_t>(resolution) * resolution;
        struct Cell {
            double C, ell, A;
            RegimeClass rc;
        };
        std::vector<Cell> grid(cells);
        parallel_for(cells, threads, [&](std::size_t idx) {
            const std::size_t i = idx / resolution;
            const std::size_t j = idx % resolution;
            ModelParams p;
            p.n = n;
            p.C = C_min + (C_max - C_min) * static_cast<double>(i) / (resolution - 1);
            p.ell = ell_min + (ell_max - ell_min) * static_cast<double>(j) / (resolution - 1);
            p.k = 1.0;
            Cell& c = grid[idx];
            c.C = p.C;
            c.ell = p.ell;
            c.rc = classify(p);
            try {
                c.A = aggregate_param(p).A;
            } catch (const Error&) {
                c.A = std::nan("");
            }
        });
        json cfg{{"n", n}, {"C_min", C_min}, {"C_max", C_max}, {"ell_min", ell_min}, {"ell_max", ell_max},
                 {"resolution", resolution}, {"k", 1.0}};
        std::string csv = csv_header(metadata("phase", cfg));
        csv += "C,ell,region,A_sign,A_over_k2,biologically_relevant,h_stable\n";
        for (const Cell& c : grid) {
            csv += io::format_double(c.C) + "," + io::format_double(c.ell) + "," + to_string(c.rc.region) + "," +
                   to_string(c.rc.A_sign) + "," + io::format_double(c.A) + "," +
                   (c.rc.biologically_relevant ? "1" : "0") + "," + (c.rc.h_stable ? "1" : "0") + "\n";
        }
        emit(output, csv);
    }
};

struct VerifyCmd {
    ModelFlags model;
    std::string config_path;
    std::string profile_path;
    std::string output;
    std::string format = "json";
    int grid = 256;
    int threads = 0;

    void add(CLI::App& root) {
        CLI::App* app = root.add_subcommand("verify", "Check W * rho = D on the support");
        model.add(app);
        app->add_option("--config", config_path, "JSON file with n, C, ell, k");
        app->add_option("--profile", profile_path, "Profile JSON written by solve (skips solving)");
        app->add_option("--grid", grid, "Grid points on [0, R*]")->check(CLI::Range(2, 10000000));
        app->add_option("--threads", threads, "Worker threads (0: FLOCKDYN_THREADS or all cores)");
        app->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
        app->add_option("-o,--output", output, "Report path ('-' for stdout)");
        app->callback([this] { run(); });
    }

    void run() const {
        const FlockProfile prof = profile_path.empty() ? solve_profile(model.resolve(read_json_file(config_path)))
                                                       : profile_from_json(io::read_file(profile_path));
        const ConvolutionReport rep = verify_flock(prof, grid, threads, false);
        json cfg = params_json(prof.params);
        cfg["grid"] = grid;
        cfg["R_star"] = prof.R_star;
        const json meta = metadata("verify", cfg);
        if (format == "csv") {
            emit(output, csv_header(meta) + rep.to_csv());
        } else {
            json out = json::parse(rep.to_json());
            out["metadata"] = meta;
            emit(output, out.dump(2) + "\n");
        }
        std::fprintf(stderr, "verify: closed %.3e, quadrature %.3e (scale %.6g): %s\n", rep.sup_dev_closed,
                     rep.sup_dev_quad, rep.scale, rep.passed ? "passed" : "FAILED");
        if (!rep.passed) throw VerificationError(rep);
    }
};

struct RootsCmd {
    ModelFlags model;
    std::string config_path;
    std::string output;
    std::string format = "csv";
    int count = 3;
    bool allow_non_biological = false;

    void add(CLI::App& root) {
        CLI::App* app = root.add_subcommand("roots", "List the first roots of det M with their brackets");
        model.add(app);
        app->add_option("--config", config_path, "JSON file with n, C, ell, k");
        app->add_option("--count", count, "Number of roots")->check(CLI::Range(1, 1000));
        app->add_flag("--allow-non-biological", allow_non_biological);
        app->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
        app->add_option("-o,--output", output, "Output path ('-' for stdout)");
        app->callback([this] { run(); });
    }

    void run() const {
        const ModelParams p = model.resolve(read_json_file(config_path));
        SolveOptions opts;
        opts.allow_non_biological = allow_non_biological;
        const std::vector<RootResult> roots = enumerate_roots(p, count, opts);
        json cfg = params_json(p);
        cfg["count"] = count;
        const json meta = metadata("roots", cfg);
        if (format == "csv") {
            std::string csv = csv_header(meta) + "index,R_star,bracket_lo,bracket_hi\n";
            for (const RootResult& r : roots) {
                csv += std::to_string(r.bracket.index) + "," + io::csv_row({r.R_star, r.bracket.lo, r.bracket.hi});
            }
            emit(output, csv);
        } else {
            json out{{"roots", json::array()}, {"metadata", meta}};
            for (const RootResult& r : roots) {
                out["roots"].push_back(json{{"index", r.bracket.index},
                                            {"R_star", r.R_star},
                                            {"bracket", {r.bracket.lo, r.bracket.hi}},
                                            {"ambiguous", r.ambiguous}});
            }
            emit(output, out.dump(2) + "\n");
        }
    }
};

struct AsymptoticsCmd {
    ModelFlags model;
    std::string sweep;
    std::string output;
    int points = 5;
    double gap_max = 1e-2;
    double gap_min = 1e-6;

    void add(CLI::App& root) {
        CLI::App* app = root.add_subcommand("asymptotics", "Compare leading-order radii with solved radii");
        model.add(app);
        app->add_option("--sweep-ell", sweep, "Sweep ell toward the upper or lower limit")
            ->check(CLI::IsMember({"upper", "lower"}));
        app->add_option("--points", points, "Geometric sweep points")->check(CLI::Range(1, 1000));
        app->add_option("--gap-max", gap_max, "Largest relative distance from the limit")->check(CLI::PositiveNumber);
        app->add_option("--gap-min", gap_min, "Smallest relative distance from the limit")->check(CLI::PositiveNumber);
        app->add_option("-o,--output", output, "CSV path ('-' for stdout)");
        app->callback([this] { run(); });
    }

    static double limit_ell(const ModelParams& p, AsymptoticLimit limit) {
        if (limit == AsymptoticLimit::UpperEll) return std::pow(p.C, -1.0 / p.n);
        return p.n == 3 ? 1.0 / p.C : 0.0;
    }

    void run() const {
        const ModelParams base = model.resolve(json::object());
        json cfg = params_json(base);
        std::vector<std::pair<AsymptoticLimit, double>> rows;
        if (sweep.empty()) {
            rows = {{AsymptoticLimit::UpperEll, base.ell}, {AsymptoticLimit::LowerEll, base.ell}};
        } else {
            if (!(gap_max >= gap_min)) throw Error(ErrorCode::InvalidConfig, "gap range is empty");
            const AsymptoticLimit limit = sweep == "upper" ? AsymptoticLimit::UpperEll : AsymptoticLimit::LowerEll;
            const double edge = limit_ell(base, limit);
            for (int i = 0; i < points; ++i) {
                const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
                const double gap = gap_max * std::pow(gap_min / gap_max, t);
                double ell = 0.0;
                if (limit == AsymptoticLimit::UpperEll) {
                    ell = edge * (1.0 - gap);
                } else {
                    ell = base.n == 3 ? edge * (1.0 + gap) : gap * std::pow(base.C, -1.0 / base.n);
                }
                rows.emplace_back(limit, ell);
            }
            cfg["sweep"] = sweep;
            cfg["points"] = points;
            cfg["gap_max"] = gap_max;
            cfg["gap_min"] = gap_min;
        }
        std::string csv = csv_header(metadata("asymptotics", cfg));
        csv += "limit,ell,R_formula,R_solver,rel_error,limit_mismatch\n";
        for (const auto& [limit, ell] : rows) {
            ModelParams p = base;
            p.ell = ell;
            const AsymptoticEstimate est = asymptotic_radius(p, limit);
            double solved = std::nan("");
            try {
                solved = find_support_radius(p).R_star;
            } catch (const Error&) {
            }
            csv += std::string(to_string(limit)) + "," + io::format_double(ell) + "," +
                   io::format_double(est.R_star) + "," + io::format_double(solved) + "," +
                   io::format_double(std::abs(est.R_star / solved - 1.0)) + "," + (est.limit_mismatch ? "1" : "0") +
                   "\n";
        }
        emit(output, csv);
    }
};

struct SimulateCmd {
    std::string config_path;
    std::string output;
    std::string potential = "quasi_morse";
    std::string model_name = "first";
    int dim = 3;
    double C = 1.255, ell = 0.8, k = 0.2, p = 0.5;
    double C_R = 1.0, C_A = 1.0, ell_R = 0.5, ell_A = 1.0;
    int N = 1000;
    double dt = 0.01;
    long steps = 1000;
    double alpha = 1.0, beta = 1.0;
    std::uint64_t seed = 1;
    double init_radius = 1.0;
    std::string init_file;
    int stride = 100;
    int threads = 0;
    int bins = 0;
    bool no_stop = false;
    CLI::App* app = nullptr;

    void add(CLI::App& root) {
        app = root.add_subcommand("simulate", "Run the particle model");
        app->add_option("--config", config_path, "Simulation config JSON (flags given explicitly override it)");
        app->add_option("--potential", potential)->check(CLI::IsMember({"quasi_morse", "morse", "morse_like"}));
        app->add_option("--model", model_name, "first or second order")->check(CLI::IsMember({"first", "second"}));
        app->add_option("-n,--dim", dim)->check(CLI::IsMember({2, 3}));
        app->add_option("-C", C);
        app->add_option("-l,--ell", ell);
        app->add_option("-k", k);
        app->add_option("--p", p, "Morse-like exponent");
        app->add_option("--C-R", C_R);
        app->add_option("--C-A", C_A);
        app->add_option("--ell-R", ell_R);
        app->add_option("--ell-A", ell_A);
        app->add_option("-N", N, "Particle count")->check(CLI::PositiveNumber);
        app->add_option("--dt", dt)->check(CLI::PositiveNumber);
        app->add_option("--steps", steps)->check(CLI::NonNegativeNumber);
        app->add_option("--alpha", alpha);
        app->add_option("--beta", beta);
        app->add_option("--seed", seed);
        app->add_option("--init-radius", init_radius, "Uniform-ball initial radius")->check(CLI::PositiveNumber);
        app->add_option("--init-file", init_file, "CSV initial state");
        app->add_option("--stride", stride, "Diagnostic interval in steps")->check(CLI::PositiveNumber);
        app->add_option("--threads", threads, "Worker threads (0: FLOCKDYN_THREADS or all cores)");
        app->add_option("--bins", bins, "Also write a radial histogram with this many bins");
        app->add_flag("--no-stop", no_stop, "Run all steps even after convergence");
        app->add_option("-o,--output", output, "Output prefix")->required();
        app->callback([this] { run(); });
    }

    bool given(const char* name) const { return app->get_option(name)->count() > 0; }

    SimConfig resolve() const {
        SimConfig c = config_path.empty() ? SimConfig{} : config_from_json(io::read_file(config_path));
        const bool from_file = !config_path.empty();
        if (!from_file || given("--dim")) c.dimension = dim;
        if (!from_file || given("--potential") || given("-C") || given("--ell") || given("-k") || given("--p") ||
            given("--C-R") || given("--C-A") || given("--ell-R") || given("--ell-A")) {
            if (potential == "quasi_morse") {
                ModelParams mp;
                mp.n = c.dimension;
                mp.C = C;
                mp.ell = ell;
                mp.k = k;
                c.potential = QuasiMorse{mp};
            } else if (potential == "morse") {
                c.potential = Morse{C_R, C_A, ell_R, ell_A};
            } else {
                c.potential = MorseLike{p, C, ell};
            }
        }
        if (!from_file || given("--model")) c.model = model_name == "second" ? Model::SecondOrder : Model::FirstOrder;
        if (!from_file || given("-N")) c.N = N;
        if (!from_file || given("--dt")) c.dt = dt;
        if (!from_file || given("--steps")) c.steps = steps;
        if (!from_file || given("--alpha")) c.alpha = alpha;
        if (!from_file || given("--beta")) c.beta = beta;
        if (!from_file || given("--seed")) c.seed = seed;
        if (!from_file || given("--init-radius")) c.init.radius = init_radius;
        if (!init_file.empty()) {
            c.init.kind = InitKind::FromFile;
            c.init.path = init_file;
        }
        if (!from_file || given("--stride")) c.diagnostic_stride = stride;
        if (!from_file || given("--threads")) c.threads = threads;
        if (no_stop) c.stop_at_convergence = false;
        c.validate();
        return c;
    }

    void run() const {
        const SimConfig c = resolve();
        const RunResult r = flockdyn::run(c);
        const json meta = metadata("simulate", json::parse(config_to_json(c)), c.seed);
        emit(output + "_config.json", json::parse(config_to_json(c)).dump(2) + "\n");
        emit(output + "_state.csv", csv_header(meta) + state_to_csv(r.final_state));
        emit(output + "_diagnostics.jsonl", diagnostics_to_jsonl(r.trajectory));
        if (bins > 0) emit(output + "_hist.csv", csv_header(meta) + radial_histogram(r.final_state, bins).to_csv());
        json summary{{"steps_taken", r.steps_taken},
                     {"time", r.final_state.time},
                     {"converged", r.converged},
                     {"radius", r.final_state.max_radius_about_center()}};
        emit("", summary.dump());
    }
};

struct CompareCmd {
    ModelFlags model;
    std::string state_path;
    std::string profile_path;
    std::string output;
    int bins = 20;

    void add(CLI::App& root) {
        CLI::App* app = root.add_subcommand("compare", "Histogram a particle state and compare with the profile");
        app->add_option("--state", state_path, "State CSV written by simulate")->required();
        model.add(app);
        app->add_option("--profile", profile_path, "Profile JSON written by solve");
        app->add_option("--bins", bins, "Radial bins")->check(CLI::Range(1, 1000000));
        app->add_option("-o,--output", output, "Output prefix: PREFIX_hist.csv and PREFIX_report.json")->required();
        app->callback([this] { run(); });
    }

    void run() const {
        const int n = model.n;
        const std::string text = io::read_file(state_path);
        const bool with_velocities = [&] {
            for (std::size_t pos = 0; pos < text.size();) {
                const std::size_t end = std::min(text.find('\n', pos), text.size());
                const std::string line = text.substr(pos, end - pos);
                pos = end + 1;
                if (line.rfind("x1", 0) == 0) return line.find("v1") != std::string::npos;
            }
            return false;
        }();
        const ParticleState s = state_from_csv(text, n, with_velocities);
        const RadialHistogram h = radial_histogram(s, bins);
        json cfg{{"state", state_path}, {"n", n}, {"bins", bins}};
        json report{{"N", s.N}, {"max_radius", h.max_radius}};
        std::size_t peak = 0;
        for (std::size_t i = 1; i < h.density.size(); ++i) {
            if (h.density[i] > h.density[peak]) peak = i;
        }
        report["peak_bin"] = peak;
        report["peak_radius_fraction"] = 0.5 * (h.bin_edges[peak] + h.bin_edges[peak + 1]) / h.max_radius;
        const bool have_profile = !profile_path.empty() || model.C_opt->count() || model.ell_opt->count() ||
                                  model.k_opt->count();
        if (have_profile) {
            const FlockProfile prof = profile_path.empty() ? solve_profile(model.resolve(json::object()))
                                                           : profile_from_json(io::read_file(profile_path));
            if (prof.params.n != n) throw Error(ErrorCode::InvalidConfig, "profile dimension differs from -n");
            const ProfileComparison cmp = compare_profile(h, prof);
            report["R_star"] = prof.R_star;
            report["l1_error"] = cmp.l1_error;
            report["support_error"] = cmp.support_error;
            cfg["profile"] = params_json(prof.params);
        }
        const json meta = metadata("compare", cfg);
        report["metadata"] = meta;
        emit(output + "_hist.csv", csv_header(meta) + h.to_csv());
        emit(output + "_report.json", report.dump(2) + "\n");
        emit("", report.dump());
    }
};

struct SpecfunTableCmd {
    std::vector<double> orders{0.0, 0.5, 1.0, 1.5};
    double x_min = 1e-3;
    double x_max = 50.0;
    int points = 200;
    std::string output;

    void add(CLI::App& root) {
        CLI::App* app = root.add_subcommand("specfun-table", "Dump Bessel J, I, K on a log grid");
        app->group("");
        app->add_option("--nu", orders, "Orders (integers or half-integers)");
        app->add_option("--x-min", x_min)->check(CLI::PositiveNumber);
        app->add_option("--x-max", x_max)->check(CLI::PositiveNumber);
        app->add_option("--points", points)->check(CLI::Range(2, 10000000));
        app->add_option("-o,--output", output, "CSV path ('-' for stdout)");
        app->callback([this] { run(); });
    }

    void run() const {
        if (!(x_max > x_min)) throw Error(ErrorCode::InvalidConfig, "empty x range");
        json cfg{{"nu", orders}, {"x_min", x_min}, {"x_max", x_max}, {"points", points}};
        std::string csv = csv_header(metadata("specfun-table", cfg)) + "nu,x,J,I,K\n";
        for (double v : orders) {
            const BesselOrder nu = BesselOrder::from_value(v);
            for (int i = 0; i < points; ++i) {
                const double x = x_min * std::pow(x_max / x_min, static_cast<double>(i) / (points - 1));
                csv += io::csv_row({v, x, bessel_j(nu, x), bessel_i(nu, x), bessel_k(nu, x)});
            }
        }
        emit(output, csv);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flockdyn: flock profiles for Quasi-Morse potentials and particle simulations"};
    app.set_version_flag("--version", FLOCKDYN_VERSION);
    app.require_subcommand(1);

    SolveCmd solve;
    PhaseCmd phase;
    VerifyCmd verify;
    RootsCmd roots;
    AsymptoticsCmd asymptotics;
    SimulateCmd simulate;
    CompareCmd compare;
    SpecfunTableCmd table;
    solve.add(app);
    phase.add(app);
    verify.add(app);
    roots.add(app);
    asymptotics.add(app);
    simulate.add(app);
    compare.add(app);
    table.add(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadArgs;
    } catch (const Error& e) {
        std::fprintf(stderr, "flockdyn: %s: %s\n", to_string(e.code()), e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "flockdyn: %s\n", e.what());
        return kNumerical;
    }
    return kOk;
}
