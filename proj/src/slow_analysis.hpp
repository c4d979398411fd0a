#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "model.hpp"

namespace canard {

enum class BranchTag {
    PureExponential,
    LogisticGrowth,
    LogisticDecay,
    FiniteBlowup,
};

/// Closed-form solution of x' = x(r + q x), x(t0) = x_init > 0. Evaluation past
/// the blow-up time throws OutOfDomain; blow-up itself is data, not an error.
struct ReducedSolution {
    double linear_rate = 0.0;     // r
    double quadratic_rate = 0.0;  // q
    double x_init = 0.0;
    double t0 = 0.0;
    BranchTag branch = BranchTag::PureExponential;
    std::optional<double> blowup_time;

    double operator()(double t) const;
    /// Closed-form integral of the solution from t0 to t.
    double integral(double t) const;
    /// min(T, blowup_time); the open end of the usable domain.
    double end_time(double T) const;
};

ReducedSolution reduced_solution(double linear_rate, double quadratic_rate, double x_init,
                                 double t0);

/// Unique time in (t0, min(T, blowup)) at which the solution reaches psi, in
/// closed form. Throws NoCrossing when the solution never gets there.
double crossing_time(const ReducedSolution& reduced, double psi, double T);

/// Bisection cross-check for crossing_time, run on the evaluator only.
double crossing_time_bisection(const ReducedSolution& reduced, double psi, double T,
                               double tol = 1e-12);

/// Entry-exit function G(t,0) = D (t - t0) + F * integral of the reduced solution.
/// Uses the closed-form antiderivative when q != 0, adaptive quadrature otherwise.
double entry_exit_G(const QuadraticCoefficients& coeffs, const ReducedSolution& reduced,
                    double t);
double entry_exit_G_closed(const QuadraticCoefficients& coeffs, const ReducedSolution& reduced,
                           double t);
double entry_exit_G_quadrature(const QuadraticCoefficients& coeffs,
                               const ReducedSolution& reduced, double t,
                               double abs_tol = 1e-12);

/// Root of G after its interior extremum at t_c, by bisection on the monotone
/// branch. Throws NoExitBeforeT when G keeps its sign up to min(T, blowup).
double exit_time(const QuadraticCoefficients& coeffs, const ReducedSolution& reduced,
                 double t_c, double T, double tol = 1e-13);

/// Callable G(t,0) for the bounds module.
struct GFunction {
    QuadraticCoefficients coeffs;
    ReducedSolution reduced;
    double operator()(double t) const { return entry_exit_G(coeffs, reduced, t); }
    double t0() const { return reduced.t0; }
};

/// Sampled entry-exit profile: 1001 uniform grid points plus the crossing and
/// exit times inserted exactly, sorted.
struct EntryExitProfile {
    std::optional<double> t_c;
    std::optional<double> t_star;
    std::optional<double> g_min;  // G at t_c
    std::vector<std::pair<double, double>> samples;
};

EntryExitProfile entry_exit_profile(const QuadraticCoefficients& coeffs,
                                    const ReducedSolution& reduced, double T,
                                    std::optional<double> t_c, std::optional<double> t_star);

/// Piecewise eps -> 0 limit trajectory: branch-following segments concatenated at
/// the switch time (t* for delayed, t_c for immediate).
struct CompositeLimit {
    double switch_time = 0.0;
    SwitchKind kind = SwitchKind::NoSwitch;
    ReducedSolution pre_x;
    ReducedSolution post_x;
    CriticalManifold manifold;
    std::optional<double> t_c;      // crossing time of the pre-switch solution
    std::optional<double> t_star;   // exit time (delayed only)

    double x(double t) const { return t <= switch_time ? pre_x(t) : post_x(t); }
    double y(double t) const;
};

/// Throws NoCrossing / NoExitBeforeT when the window does not realize the case.
CompositeLimit composite_limit(const QuadraticCoefficients& coeffs,
                               const SimulationWindow& window, const CaseLabel& label);

}  // namespace canard
