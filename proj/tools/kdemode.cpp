// kdemode command-line driver.

#include "kdemode/error.hpp"
#include "kdemode/gadget.hpp"
#include "kdemode/kde.hpp"
#include "kdemode/kernels.hpp"
#include "kdemode/lowdim.hpp"
#include "kdemode/meanshift.hpp"
#include "kdemode/pipeline.hpp"
#include "kdemode/recovery.hpp"
#include "kdemode/sketch.hpp"
#include "kdemode/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace kdemode;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

ojson mode_json(const ModeResult& r) {
    ojson j;
    j["method"] = std::string(method_name(r.method));
    j["value"] = r.value;
    j["point"] = r.point;
    j["iterations"] = r.iterations;
    j["seed"] = r.seed;
    j["stalled"] = r.stalled;
    if (r.trajectory_values) j["trajectory_values"] = *r.trajectory_values;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

std::vector<double> load_single_point(const std::string& path) {
    Dataset d = load_csv(path);
    if (d.size() != 1) throw ConfigError("'" + path + "' must hold exactly one row");
    auto p = d.point(0);
    return {p.begin(), p.end()};
}

struct SolveArgs {
    std::string data, kernel, method = "meanshift";
    int restarts = 30, iters = 100;
    double tol = 1e-9, eps = 0.1, budget = 1e8;
    std::uint64_t seed = 0;
    bool trajectory = false, affine = false;
};

int run_solve(const SolveArgs& a) {
    KdeInstance inst(load_csv(a.data), parse_kernel(a.kernel));
    ModeResult r;
    if (a.method == "meanshift") {
        MeanShiftOptions o;
        o.max_iters = a.iters;
        o.tol = a.tol;
        o.record_trajectory = a.trajectory;
        r = multi_restart(inst, a.restarts, o, a.seed);
    } else if (a.method == "brute") {
        r = a.affine ? brute_force_mode_reduced(inst, a.eps, a.budget) : brute_force_mode(inst, a.eps, a.budget);
    } else {
        throw ConfigError("unknown method '" + a.method + "'");
    }
    std::cout << mode_json(r).dump(2) << "\n";
    return 0;
}

struct SketchArgs {
    std::string data, out, projected, family = "rademacher";
    double gamma = 0.5, delta = 0.1, cjl = 8.0;
    std::uint64_t seed = 0;
    std::size_t rows = 0;
    int attempts = 10;
};

int run_sketch(const SketchArgs& a) {
    Dataset data = load_csv(a.data);
    SketchOptions o;
    o.gamma = a.gamma;
    o.delta = a.delta;
    o.c_jl = a.cjl;
    o.family = parse_family(a.family);
    o.seed = a.seed;
    o.rows = a.rows;
    o.max_attempts = a.attempts;
    SketchPair pair = sketch_with_retry(data, o);
    {
        std::ofstream out(a.out, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + a.out + "'");
        write_sketch(out, pair.pi);
    }
    if (!a.projected.empty()) {
        std::ofstream out(a.projected);
        if (!out) throw ConfigError("cannot write '" + a.projected + "'");
        write_csv(out, pair.projected);
    }
    ojson j;
    j["w"] = pair.pi.rows();
    j["d"] = pair.pi.cols();
    j["family"] = std::string(family_name(pair.pi.family()));
    j["seed"] = pair.pi.seed();
    j["attempts"] = pair.attempts;
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct RecoverArgs {
    std::string data, kernel, sketch, xtilde, mode = "convex";
    double eps = 0.1;
};

int run_recover(const RecoverArgs& a) {
    KdeInstance inst(load_csv(a.data), parse_kernel(a.kernel));
    std::ifstream in(a.sketch, std::ios::binary);
    if (!in) throw ConfigError("cannot open sketch '" + a.sketch + "'");
    JlMatrix pi = read_sketch(in);
    if (pi.cols() != inst.dim()) {
        throw ConfigError("sketch has " + std::to_string(pi.cols()) + " columns but the data has dimension " +
                          std::to_string(inst.dim()));
    }
    SketchPair pair = project(pi, inst.data());
    std::vector<double> x = load_single_point(a.xtilde);
    ModeResult r;
    RecoveryMethod m = parse_recovery(a.mode);
    if (m == RecoveryMethod::Convex) {
        r = recover_convex(inst, pair, x);
    } else {
        NonconvexRecoveryOptions o;
        o.eps = a.eps;
        r = recover_nonconvex(inst, pair, x, o);
    }
    std::cout << mode_json(r).dump(2) << "\n";
    return 0;
}

struct ExperimentArgs {
    std::string config, data, kernel, dims, method, recovery, out, family;
    std::optional<double> eps, delta, cjl, recovery_eps, budget;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
};

std::vector<std::size_t> parse_dims(const std::string& text) {
    std::vector<std::size_t> dims;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            long long v = std::stoll(item, &pos);
            if (pos != item.size() || v <= 0) throw std::invalid_argument(item);
            dims.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ConfigError("bad sketch dimension '" + item + "'");
        }
    }
    return dims;
}

int run_experiment(const ExperimentArgs& a) {
    ExperimentConfig c = a.config.empty() ? ExperimentConfig{} : load_config(a.config);
    if (!a.data.empty()) c.dataset_path = a.data;
    if (!a.kernel.empty()) c.kernel = a.kernel;
    if (a.eps) c.eps = *a.eps;
    if (a.delta) c.delta = *a.delta;
    if (a.cjl) c.c_jl = *a.cjl;
    if (a.recovery_eps) c.recovery_eps = *a.recovery_eps;
    if (a.budget) c.brute_budget = *a.budget;
    if (a.trials) c.trials = *a.trials;
    if (a.seed) c.seed = *a.seed;
    if (!a.family.empty()) c.family = parse_family(a.family);
    if (!a.recovery.empty()) c.recovery = parse_recovery(a.recovery);
    if (!a.method.empty()) {
        if (a.method == "meanshift") {
            c.method = ModeMethod::MeanShift;
        } else if (a.method == "brute") {
            c.method = ModeMethod::BruteForce;
        } else {
            throw ConfigError("unknown method '" + a.method + "'");
        }
    }
    if (a.dims == "auto") {
        c.auto_dims = true;
        c.dims.clear();
    } else if (!a.dims.empty()) {
        c.auto_dims = false;
        c.dims = parse_dims(a.dims);
    }
    if (!a.out.empty()) c.output_path = a.out;

    ExperimentReport report = run_pipeline(c);
    std::string json = report_to_json(report);
    if (c.output_path.empty()) {
        std::cout << json;
    } else {
        write_text(c.output_path, json);
        std::filesystem::path csv(c.output_path);
        csv.replace_extension(".csv");
        write_text(csv.string(), report_to_csv(report));
        std::cerr << "wrote " << c.output_path << " and " << csv.string() << "\n";
    }
    for (const auto& r : report.records) {
        if (!r.error.empty()) {
            std::cerr << "trial w=" << r.w << " #" << r.trial << " failed: " << r.error << "\n";
        }
    }
    return report.all_succeeded() ? 0 : kExitNumeric;
}

int run_gadget(const std::string& graph_path, std::size_t k, bool verify) {
    std::ifstream in(graph_path);
    if (!in) throw ConfigError("cannot open graph '" + graph_path + "'");
    RegularGraph g = read_edge_list(in);
    GadgetReport r = analyze_gadget(g, k);
    ojson j;
    j["A"] = r.scale_A;
    j["n"] = r.n;
    j["d"] = r.d;
    j["max_covered"] = r.max_covered;
    j["has_clique"] = r.has_clique;
    j["consistent"] = r.consistent;
    std::cout << j.dump(2) << "\n";
    if (verify && !r.consistent) {
        std::cerr << "gadget mode value disagrees with the clique oracle\n";
        return kExitNumeric;
    }
    return 0;
}

int run_kernels_check(std::vector<std::string> specs) {
    if (specs.empty()) {
        specs = {"gaussian", "logistic", "sigmoid", "cauchy", "gengauss:0.5", "gengauss:1", "gengauss:2", "epanechnikov"};
    }
    std::vector<double> grid = log_grid(1e-8, 1e4, 2000);
    std::vector<double> rds_grid(10000);
    for (std::size_t i = 0; i < rds_grid.size(); ++i) rds_grid[i] = 100.0 * static_cast<double>(i) / 9999.0;
    ojson out = ojson::array();
    bool ok = true;
    for (const auto& text : specs) {
        KernelSpec spec = parse_kernel(text);
        ojson j;
        j["kernel"] = to_string(spec);
        if (!spec.differentiable()) {
            j["derivative"] = "not differentiable";
            out.push_back(j);
            continue;
        }
        DerivativeCheck dc = check_derivative(spec, grid);
        j["derivative"] = {{"points", dc.points}, {"failures", dc.failures}, {"worst_ratio", dc.worst_ratio},
                           {"worst_t", dc.worst_t}};
        ok = ok && dc.failures == 0;
        if (auto p = builtin_rds(spec)) {
            bool pass = rds_check(spec, *p, rds_grid);
            j["rds"] = {{"c1", p->c1}, {"d1", p->d1}, {"q1", p->q1}, {"c2", p->c2}, {"d2", p->d2}, {"pass", pass}};
            ok = ok && pass;
        }
        out.push_back(j);
    }
    std::cout << out.dump(2) << "\n";
    return ok ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approximate KDE mode finding with random projections"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Find a mode of a CSV dataset");
    s->add_option("--data", solve.data, "CSV file, one point per row")->required();
    s->add_option("--kernel", solve.kernel, "kind[:alpha]@bandwidth")->required();
    s->add_option("--method", solve.method, "meanshift or brute")->check(CLI::IsMember({"meanshift", "brute"}));
    s->add_option("--restarts", solve.restarts)->check(CLI::PositiveNumber);
    s->add_option("--iters", solve.iters)->check(CLI::PositiveNumber);
    s->add_option("--tol", solve.tol);
    s->add_option("--seed", solve.seed);
    s->add_flag("--record-trajectory", solve.trajectory);
    s->add_option("--eps", solve.eps, "brute force accuracy");
    s->add_option("--budget", solve.budget, "maximum number of grid points");
    s->add_flag("--affine", solve.affine, "brute force inside the affine hull of the data");

    SketchArgs sketch;
    auto* k = app.add_subcommand("sketch", "Draw and verify a one-sided JL sketch");
    k->add_option("--data", sketch.data)->required();
    k->add_option("--out", sketch.out, "binary sketch file")->required();
    k->add_option("--projected", sketch.projected, "write projected points as CSV");
    k->add_option("--gamma", sketch.gamma);
    k->add_option("--delta", sketch.delta);
    k->add_option("--cjl", sketch.cjl);
    k->add_option("--family", sketch.family)->check(CLI::IsMember({"gaussian", "rademacher"}));
    k->add_option("--seed", sketch.seed);
    k->add_option("--rows", sketch.rows, "override the designed number of rows");
    k->add_option("--max-attempts", sketch.attempts)->check(CLI::PositiveNumber);

    RecoverArgs recover;
    auto* r = app.add_subcommand("recover", "Map a low-dimensional mode back to the original space");
    r->add_option("--data", recover.data)->required();
    r->add_option("--kernel", recover.kernel)->required();
    r->add_option("--sketch", recover.sketch)->required();
    r->add_option("--xtilde", recover.xtilde, "CSV file with one projected point")->required();
    r->add_option("--mode", recover.mode)->check(CLI::IsMember({"convex", "nonconvex"}));
    r->add_option("--eps", recover.eps);

    ExperimentArgs exp;
    auto* e = app.add_subcommand("experiment", "Run the sketch, solve and recover protocol");
    e->add_option("--config", exp.config, "JSON config file");
    e->add_option("--data", exp.data);
    e->add_option("--kernel", exp.kernel);
    e->add_option("--eps", exp.eps);
    e->add_option("--delta", exp.delta);
    e->add_option("--cjl", exp.cjl);
    e->add_option("--dims", exp.dims, "comma-separated list or 'auto'");
    e->add_option("--trials", exp.trials);
    e->add_option("--seed", exp.seed);
    e->add_option("--method", exp.method);
    e->add_option("--recovery", exp.recovery);
    e->add_option("--recovery-eps", exp.recovery_eps);
    e->add_option("--family", exp.family);
    e->add_option("--budget", exp.budget, "brute force grid budget");
    e->add_option("--out", exp.out, "JSON report path; a CSV is written next to it");

    std::string graph;
    std::size_t clique_k = 3;
    bool verify = false;
    auto* g = app.add_subcommand("gadget", "Box-kernel clique gadget for a regular graph");
    g->add_option("--graph", graph, "edge list, 'u v' per line")->required();
    g->add_option("--k", clique_k)->required();
    g->add_flag("--verify", verify, "exit with status 3 when mode value and clique oracle disagree");

    std::vector<std::string> kernel_specs;
    auto* kernels = app.add_subcommand("kernels", "Kernel diagnostics");
    kernels->require_subcommand(1);
    auto* check = kernels->add_subcommand("check", "Finite-difference and smoothness checks");
    check->add_option("--kernel", kernel_specs, "kernel specs (default: all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int code = app.exit(err);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*s) return run_solve(solve);
        if (*k) return run_sketch(sketch);
        if (*r) return run_recover(recover);
        if (*e) return run_experiment(exp);
        if (*g) return run_gadget(graph, clique_k, verify);
        if (*check) return run_kernels_check(kernel_specs);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& err) {
        std::cerr << "invalid input: " << err.what() << "\n";
        return kExitConfig;
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
