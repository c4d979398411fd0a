#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "integrator.hpp"
#include "model.hpp"
#include "slow_analysis.hpp"

namespace canard {

inline constexpr const char* kSchemaVersion = "canard-report/1";

struct RunConfig {
    QuadraticCoefficients coeffs{};
    SimulationWindow window{};
    std::vector<double> epsilons;
    SolverOptions solver{};
    double theta = 0.5;
    double delta = 0.05;
    double eta = 0.0;  // defaulted to min(0.02, delta/k) when absent
    std::optional<double> epsilon;  // scalar for `simulate` when no flag is given
    std::string out_dir = ".";
};

/// Parses and validates a config file. Throws ParseError / ValidationError with
/// the offending field named.
RunConfig load_config(const std::string& path);
RunConfig load_config_text(const std::string& text);

/// Canonical JSON re-serialization of a config (embedded in every report).
std::string config_echo(const RunConfig& config);

struct ClassifyResult {
    CaseLabel label;
    std::string line;  // e.g. "Case1b / DelayedAtTStar / FastPredatorA"
};

/// classify: prints nothing itself; returns the label plus the display line and
/// writes classify.json under out_dir.
ClassifyResult run_classify(const RunConfig& config, const std::string& out_dir);

struct AnalyzeResult {
    CaseLabel label;
    std::optional<double> t_c;
    std::optional<double> t_star;
    std::optional<double> g_min;
    std::optional<double> blowup_time;
    std::string reason;  // set when no switch is predicted
    std::size_t csv_rows = 0;
};

/// analyze: writes g_profile.csv (t,G) and analysis.json.
AnalyzeResult run_analyze(const RunConfig& config, const std::string& out_dir);

/// simulate: writes trajectory.csv (t,x,y,w) and, when a switch is predicted,
/// composite_limit.csv (t,x_lim,y_lim). Returns the trajectory.
Trajectory run_simulate(const RunConfig& config, double epsilon, const std::string& out_dir);

struct SweepFileResult {
    SweepResult sweep;
    std::string csv_path;
};

/// sweep: writes convergence.csv (epsilon,t_sw,predicted,abs_error) and
/// sweep_summary.json.
SweepFileResult run_sweep(const RunConfig& config, const std::string& out_dir);

struct VerifyResult {
    bool all_pass = false;
    AssumptionReport assumptions;
    std::string verdict_path;
};

/// verify: assumption checks, oracle cross-checks (quadrature vs closed form,
/// bisection vs closed-form crossing), sandwich verification per eps for delayed
/// systems; writes verdict.json.
VerifyResult run_verify(const RunConfig& config, const std::string& out_dir);

}  // namespace canard
