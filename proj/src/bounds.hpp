#pragma once

#include <optional>

#include "integrator.hpp"
#include "slow_analysis.hpp"

namespace canard {

/// k = sup |g_yy| = 2|E|, exact for the quadratic family.
double curvature_constant(const QuadraticCoefficients& coeffs);

/// A value kept together with its logarithm; envelope magnitudes routinely sit
/// far below double range.
struct LogValue {
    double log_value;
    double value;  // exp(log_value); may underflow to 0 or overflow to inf
};

/// Upper comparison solution y_init * exp(G(t,0)/eps), evaluated in log space.
LogValue upper_solution(const GFunction& G, double y_init, double epsilon, double t);

/// Lower comparison solution eta * exp((G(t,0) - delta (t - t0))/eps). Throws
/// AdmissibilityViolated unless eta <= delta / k.
LogValue lower_solution(const GFunction& G, double eta, double delta, double epsilon,
                        double k, double t);

/// Root t(delta, eps) > t* of G(t,0) - delta (t - t0); returns t* when delta = 0.
double delayed_exit_root(const GFunction& G, double t_star, double delta, double epsilon,
                         double T, double tol = 1e-13);

struct BoundEnvelope {
    double eta = 0.0;
    double delta = 0.0;
    double epsilon = 0.0;
    double k = 0.0;
    double t_delta_eps = 0.0;
    // validity windows of the two comparisons
    double lower_lo = 0.0, lower_hi = 0.0;  // [t0, t(delta,eps)]
    double upper_lo = 0.0, upper_hi = 0.0;  // [t0 + margin, t* - margin]
};

/// Builds an admissible envelope for a delayed-switch system; margin_fraction of
/// the window length trims the upper comparison at both ends.
BoundEnvelope make_envelope(const GFunction& G, const SimulationWindow& window, double t_star,
                            double eta, double delta, double epsilon,
                            double margin_fraction = 0.05);

struct SandwichReport {
    long lower_checked = 0;
    long lower_violations = 0;
    long upper_checked = 0;
    long upper_violations = 0;
    long skipped = 0;  // samples outside both validity windows
    double worst_lower_margin = 0.0;  // min over samples of ln y - ln lower
    double worst_upper_margin = 0.0;  // min over samples of ln upper + kappa - ln y
    double kappa_hat = 1.0;
};

/// Checks lower <= y on the lower window and y <= upper * e^kappa on the upper
/// window at every trajectory sample, in log space. Violations are report data.
SandwichReport verify_sandwich(const Trajectory& traj, const BoundEnvelope& envelope,
                               const GFunction& G, double y_init, double kappa_hat = 1.0);

}  // namespace canard
