#include "kdemode/pipeline.hpp"

#include "kdemode/error.hpp"
#include "kdemode/kernels.hpp"
#include "kdemode/lowdim.hpp"
#include "kdemode/parallel.hpp"
#include "kdemode/recovery.hpp"
#include "kdemode/rng.hpp"
#include "kdemode/version.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace kdemode {

using ojson = nlohmann::ordered_json;

namespace {

ModeMethod parse_method(const std::string& text) {
    if (text == "meanshift") return ModeMethod::MeanShift;
    if (text == "brute") return ModeMethod::BruteForce;
    throw ConfigError("unknown method '" + text + "' (expected meanshift or brute)");
}

std::string method_key(ModeMethod m) { return m == ModeMethod::BruteForce ? "brute" : "meanshift"; }

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson config_json(const ExperimentConfig& c) {
    ojson j;
    j["dataset"] = c.dataset_path;
    j["kernel"] = c.kernel;
    j["eps"] = c.eps;
    j["delta"] = c.delta;
    j["c_jl"] = c.c_jl;
    if (c.auto_dims) {
        j["dims"] = "auto";
    } else {
        j["dims"] = c.dims;
    }
    j["trials"] = c.trials;
    j["baseline"] = {{"iters", c.baseline.iters}, {"restarts", c.baseline.restarts}};
    j["sketched"] = {{"iters", c.sketched.iters}, {"restarts", c.sketched.restarts}};
    j["seed"] = c.seed;
    j["method"] = method_key(c.method);
    j["recovery"] = std::string(recovery_name(c.recovery));
    j["recovery_eps"] = c.recovery_eps;
    j["family"] = std::string(family_name(c.family));
    j["jl_gamma"] = c.jl_gamma;
    j["brute_budget"] = c.brute_budget;
    j["identity_sketch"] = c.identity_sketch;
    j["output"] = c.output_path;
    return j;
}

SolverBudget parse_budget(const ojson& j, const std::string& key) {
    if (!j.is_object()) throw ConfigError("'" + key + "' must be an object {iters, restarts}");
    SolverBudget b;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "iters") {
            b.iters = it.value().get<int>();
        } else if (it.key() == "restarts") {
            b.restarts = it.value().get<int>();
        } else {
            throw ConfigError("unknown key '" + key + "." + it.key() + "'");
        }
    }
    return b;
}

Dataset load_dataset(const ExperimentConfig& c) {
    if (c.dataset) return *c.dataset;
    if (c.dataset_path.empty()) throw ConfigError("no dataset given");
    return load_csv(c.dataset_path);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

RecoveryMethod parse_recovery(std::string_view text) {
    if (text == "convex") return RecoveryMethod::Convex;
    if (text == "nonconvex") return RecoveryMethod::NonConvex;
    throw ConfigError("unknown recovery '" + std::string(text) + "' (expected convex or nonconvex)");
}

std::string_view recovery_name(RecoveryMethod method) {
    return method == RecoveryMethod::Convex ? "convex" : "nonconvex";
}

void ExperimentConfig::validate() const {
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    if (!(c_jl > 0.0)) throw ConfigError("c_jl must be positive");
    if (trials <= 0) throw ConfigError("trials must be positive");
    if (baseline.iters <= 0 || baseline.restarts <= 0) throw ConfigError("baseline iters and restarts must be positive");
    if (sketched.iters <= 0 || sketched.restarts <= 0) throw ConfigError("sketched iters and restarts must be positive");
    if (!auto_dims && !identity_sketch && dims.empty()) throw ConfigError("dims must be non-empty or \"auto\"");
    for (std::size_t w : dims) {
        if (w == 0) throw ConfigError("sketch dimensions must be positive");
    }
    if (method != ModeMethod::MeanShift && method != ModeMethod::BruteForce) {
        throw ConfigError("method must be meanshift or brute");
    }
    if (!(recovery_eps > 0.0)) throw ConfigError("recovery_eps must be positive");
    if (!(jl_gamma >= 0.0)) throw ConfigError("jl_gamma must be >= 0");
    if (!(brute_budget > 0.0)) throw ConfigError("brute_budget must be positive");
    parse_kernel(kernel);
}

ExperimentConfig parse_config(std::string_view json_text) {
    ExperimentConfig c;
    ojson j;
    try {
        j = ojson::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string& k = it.key();
            const ojson& v = it.value();
            if (k == "dataset") {
                c.dataset_path = v.get<std::string>();
            } else if (k == "kernel") {
                c.kernel = v.get<std::string>();
            } else if (k == "eps") {
                c.eps = v.get<double>();
            } else if (k == "delta") {
                c.delta = v.get<double>();
            } else if (k == "c_jl") {
                c.c_jl = v.get<double>();
            } else if (k == "dims") {
                if (v.is_string()) {
                    if (v.get<std::string>() != "auto") throw ConfigError("dims must be a list or \"auto\"");
                    c.auto_dims = true;
                } else {
                    for (const auto& w : v) {
                        if (!w.is_number_integer() || w.get<long long>() <= 0) {
                            throw ConfigError("dims entries must be positive integers");
                        }
                        c.dims.push_back(w.get<std::size_t>());
                    }
                }
            } else if (k == "trials") {
                c.trials = v.get<int>();
            } else if (k == "baseline") {
                c.baseline = parse_budget(v, k);
            } else if (k == "sketched") {
                c.sketched = parse_budget(v, k);
            } else if (k == "seed") {
                c.seed = v.get<std::uint64_t>();
            } else if (k == "method") {
                c.method = parse_method(v.get<std::string>());
            } else if (k == "recovery") {
                c.recovery = parse_recovery(v.get<std::string>());
            } else if (k == "recovery_eps") {
                c.recovery_eps = v.get<double>();
            } else if (k == "family") {
                c.family = parse_family(v.get<std::string>());
            } else if (k == "jl_gamma") {
                c.jl_gamma = v.get<double>();
            } else if (k == "brute_budget") {
                c.brute_budget = v.get<double>();
            } else if (k == "identity_sketch") {
                c.identity_sketch = v.get<bool>();
            } else if (k == "output") {
                c.output_path = v.get<std::string>();
            } else {
                throw ConfigError("unknown config key '" + k + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

bool ExperimentReport::all_succeeded() const {
    for (const auto& r : records) {
        if (!r.error.empty()) return false;
    }
    return true;
}

std::vector<std::size_t> auto_dims(const KernelSpec& kernel, std::size_t n, double eps, double delta, double c_jl) {
    double gamma = gamma_for_epsilon(kernel, n, eps);
    std::size_t w = target_dim(n, gamma, delta, c_jl);
    auto frac = [w](std::size_t div) { return (w + div - 1) / div; };
    return {frac(8), frac(4), frac(2), w};
}

ExperimentReport run_pipeline(const ExperimentConfig& config) {
    config.validate();
    ExperimentReport report;
    report.config = config;
    report.version = kVersion;

    KdeInstance full(load_dataset(config), parse_kernel(config.kernel));
    const std::size_t d = full.dim();

    MeanShiftOptions base_opts;
    base_opts.max_iters = config.baseline.iters;
    ModeResult base = multi_restart(full, config.baseline.restarts, base_opts, derive_seed(config.seed, SeedTag::Baseline));
    report.baseline_value = base.value;
    report.baseline_point = base.point;

    std::vector<std::size_t> dims;
    if (config.identity_sketch) {
        dims = {d};
    } else if (config.auto_dims) {
        dims = auto_dims(full.kernel(), full.size(), config.eps, config.delta, config.c_jl);
    } else {
        dims = config.dims;
    }

    const std::size_t trials = static_cast<std::size_t>(config.trials);
    report.records.resize(dims.size() * trials);
    MeanShiftOptions sk_opts;
    sk_opts.max_iters = config.sketched.iters;

    parallel_for(report.records.size(), [&](std::size_t job) {
        TrialRecord& rec = report.records[job];
        rec.w = dims[job / trials];
        rec.trial = static_cast<int>(job % trials);
        rec.seed = derive_seed(config.seed, SeedTag::Sketch, rec.w, static_cast<std::uint64_t>(rec.trial));
        rec.sketched_value = std::numeric_limits<double>::quiet_NaN();
        rec.recovered_value = std::numeric_limits<double>::quiet_NaN();
        auto start = std::chrono::steady_clock::now();
        try {
            JlMatrix pi = config.identity_sketch ? JlMatrix::identity(d)
                                                 : JlMatrix::draw(d, rec.w, config.family, config.jl_gamma, rec.seed);
            SketchPair pair = project(pi, full.data());
            KdeInstance low(pair.projected, full.kernel());
            std::uint64_t solve_seed =
                derive_seed(config.seed, SeedTag::SketchedSolve, rec.w, static_cast<std::uint64_t>(rec.trial));
            ModeResult x_tilde = config.method == ModeMethod::BruteForce
                                     ? brute_force_mode_reduced(low, config.eps, config.brute_budget)
                                     : multi_restart(low, config.sketched.restarts, sk_opts, solve_seed);
            rec.sketched_value = x_tilde.value;
            ModeResult recovered;
            if (config.recovery == RecoveryMethod::Convex) {
                recovered = recover_convex(full, pair, x_tilde.point);
            } else {
                NonconvexRecoveryOptions opts;
                opts.eps = config.recovery_eps;
                recovered = recover_nonconvex(full, pair, x_tilde.point, opts);
            }
            rec.recovered_value = recovered.value;
            rec.recovered_point = std::move(recovered.point);
        } catch (const Error& e) {
            rec.error = e.what();
        }
        rec.wall_seconds = seconds_since(start);
    });

    for (std::size_t i = 0; i < dims.size(); ++i) {
        DimSummary s;
        s.w = dims[i];
        std::vector<double> vals;
        for (std::size_t t = 0; t < trials; ++t) {
            const TrialRecord& r = report.records[i * trials + t];
            if (r.error.empty()) vals.push_back(r.recovered_value);
        }
        s.succeeded = static_cast<int>(vals.size());
        if (!vals.empty()) {
            double sum = 0.0;
            for (double v : vals) sum += v;
            s.mean = sum / static_cast<double>(vals.size());
            if (vals.size() > 1) {
                double ss = 0.0;
                for (double v : vals) ss += (v - s.mean) * (v - s.mean);
                s.std = std::sqrt(ss / static_cast<double>(vals.size() - 1));
            }
        } else {
            s.mean = s.std = std::numeric_limits<double>::quiet_NaN();
        }
        report.summaries.push_back(s);
    }
    return report;
}

std::string report_to_json(const ExperimentReport& report, bool include_timing) {
    ojson j;
    j["version"] = report.version;
    j["config"] = config_json(report.config);
    j["baseline"] = {{"value", report.baseline_value}, {"point", report.baseline_point}};
    ojson summaries = ojson::array();
    for (const auto& s : report.summaries) {
        summaries.push_back({{"w", s.w},
                             {"succeeded", s.succeeded},
                             {"mean", number_or_null(s.mean)},
                             {"std", number_or_null(s.std)}});
    }
    j["summary"] = std::move(summaries);
    ojson records = ojson::array();
    for (const auto& r : report.records) {
        ojson rec;
        rec["w"] = r.w;
        rec["trial"] = r.trial;
        rec["seed"] = r.seed;
        rec["sketched_value"] = number_or_null(r.sketched_value);
        rec["recovered_value"] = number_or_null(r.recovered_value);
        rec["recovered_point"] = r.recovered_point;
        if (include_timing) rec["wall_seconds"] = r.wall_seconds;
        if (!r.error.empty()) rec["error"] = r.error;
        records.push_back(std::move(rec));
    }
    j["records"] = std::move(records);
    return j.dump(2) + "\n";
}

std::string report_to_csv(const ExperimentReport& report, bool include_timing) {
    std::ostringstream out;
    out.precision(17);
    out << "w,trial,seed,sketched_value,recovered_value";
    if (include_timing) out << ",wall_seconds";
    out << ",error\n";
    for (const auto& r : report.records) {
        out << r.w << ',' << r.trial << ',' << r.seed << ',' << r.sketched_value << ',' << r.recovered_value;
        if (include_timing) out << ',' << r.wall_seconds;
        std::string err = r.error;
        for (char& ch : err) {
            if (ch == ',' || ch == '\n') ch = ';';
        }
        out << ',' << err << '\n';
    }
    return out.str();
}

}  // namespace kdemode
