#pragma once

#include "kdemode/kde.hpp"
#include "kdemode/meanshift.hpp"
#include "kdemode/sketch.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kdemode {

enum class RecoveryMethod { Convex, NonConvex };

RecoveryMethod parse_recovery(std::string_view text);
std::string_view recovery_name(RecoveryMethod method);

struct SolverBudget {
    int iters = 0;
    int restarts = 0;
};

struct ExperimentConfig {
    std::string dataset_path;
    std::optional<Dataset> dataset;  // used instead of dataset_path when set
    std::string kernel = "gaussian@1";
    double eps = 0.2;
    double delta = 0.1;
    double c_jl = 8.0;
    std::vector<std::size_t> dims;  // ignored when auto_dims is set
    bool auto_dims = false;
    int trials = 10;
    SolverBudget baseline{100, 60};
    SolverBudget sketched{10, 30};
    std::uint64_t seed = 0;
    ModeMethod method = ModeMethod::MeanShift;  // MeanShift or BruteForce
    RecoveryMethod recovery = RecoveryMethod::Convex;
    double recovery_eps = 0.1;
    JlFamily family = JlFamily::Rademacher;
    /// Distortion target used to scale sketch entries; 0 draws a plain JL matrix.
    double jl_gamma = 0.0;
    double brute_budget = 1e8;
    /// Test hook: use the identity map (w = d) instead of random sketches.
    bool identity_sketch = false;
    std::string output_path;

    /// Throws ConfigError when a count is non-positive or eps / delta leave (0, 1).
    void validate() const;
};

/// Parses a JSON object; unknown keys are rejected.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

struct TrialRecord {
    std::size_t w = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    double sketched_value = 0.0;
    double recovered_value = 0.0;
    std::vector<double> recovered_point;
    double wall_seconds = 0.0;
    std::string error;  // empty on success
};

struct DimSummary {
    std::size_t w = 0;
    int succeeded = 0;
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation; 0 with fewer than two trials
};

struct ExperimentReport {
    ExperimentConfig config;
    double baseline_value = 0.0;
    std::vector<double> baseline_point;
    std::vector<TrialRecord> records;  // ordered by (w, trial)
    std::vector<DimSummary> summaries;
    std::string version;

    bool all_succeeded() const;
};

/// {ceil(w*/8), ceil(w*/4), ceil(w*/2), w*} with w* = target_dim(n, gamma_for_epsilon(kernel, n, eps)).
std::vector<std::size_t> auto_dims(const KernelSpec& kernel, std::size_t n, double eps, double delta, double c_jl);

/// Baseline multi-restart, then per (w, trial): sketch, low-dimensional solve, recovery and
/// evaluation in the original dimension. Per-trial failures are recorded, not thrown.
ExperimentReport run_pipeline(const ExperimentConfig& config);

/// Wall times are omitted unless include_timing is set, so equal configs give equal output.
std::string report_to_json(const ExperimentReport& report, bool include_timing = true);
std::string report_to_csv(const ExperimentReport& report, bool include_timing = true);

}  // namespace kdemode
