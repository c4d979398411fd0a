#pragma once

#include <vector>

#include "model.hpp"
#include "slow_analysis.hpp"

namespace canard {

struct SolverOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 0.0;  // 0: auto, (T - t0)/500
    double min_step = 1e-12;
    bool use_log_fast_variable = true;
};

enum class Termination {
    ReachedT,
    DomainExit,
    StepUnderflow,
};

struct TrajectorySample {
    double t, x, y, w;  // w = eps * ln y
};

struct Trajectory {
    double epsilon = 0.0;
    std::vector<TrajectorySample> samples;
    long steps_accepted = 0;
    long steps_rejected = 0;
    Termination termination = Termination::ReachedT;
    bool log_coordinates = true;
};

/// Adaptive embedded Dormand-Prince 5(4) integration of the full system for a
/// fixed eps in (0, 0.2]. With use_log_fast_variable the fast state is
/// w = eps ln y, exact for this family since g factors as y (D + E y + F x).
Trajectory integrate(const QuadraticCoefficients& coeffs, const SimulationWindow& window,
                     double epsilon, const SolverOptions& opts = {});

enum class DetectionMode {
    RiseToPhi,
    FallToZero,
    NotDetected,
};

struct SwitchObservation {
    double epsilon = 0.0;
    double t_sw = 0.0;
    double threshold_theta = 0.0;
    double predicted = 0.0;
    double abs_error = 0.0;
    DetectionMode detection_mode = DetectionMode::NotDetected;
    bool detected() const { return detection_mode != DetectionMode::NotDetected; }
};

const char* to_string(DetectionMode m);
const char* to_string(Termination t);

/// Locates the observed stability switch on the sampled trajectory. Delayed
/// cases: first sample with y >= theta * phi(x) on the positive phi branch,
/// linearly interpolated. Immediate cases: interpolated crossing of x through
/// psi in the travel direction.
SwitchObservation detect_switch(const Trajectory& traj, const CriticalManifold& manifold,
                                const CaseLabel& label, double theta, double predicted);

struct ConvergenceSummary {
    double slack = 1.5;
    bool trend_ok = false;       // abs_error nonincreasing within the slack per step
    bool all_detected = false;
    double final_abs_error = 0.0;  // at the smallest eps
};

struct SweepResult {
    double predicted = 0.0;
    std::vector<SwitchObservation> observations;
    ConvergenceSummary summary;
};

/// One observation per eps (strictly decreasing list in (0, 0.2]); per-eps
/// detection failures are recorded, not thrown.
SweepResult sweep(const QuadraticCoefficients& coeffs, const SimulationWindow& window,
                  const CaseLabel& label, const std::vector<double>& epsilons,
                  const SolverOptions& opts, double theta);

}  // namespace canard
