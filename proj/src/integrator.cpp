#include "integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "numerics.hpp"

namespace canard {

namespace {

// Dormand-Prince 5(4) tableau (FSAL).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b*: error estimator weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct State {
    double x, v;  // v is y (natural) or w = eps ln y (log coordinates)
};

double safe_exp(double a) { return std::exp(std::min(a, 700.0)); }

}  // namespace

const char* to_string(DetectionMode m) {
    switch (m) {
        case DetectionMode::RiseToPhi: return "RiseToPhi";
        case DetectionMode::FallToZero: return "FallToZero";
        case DetectionMode::NotDetected: return "NotDetected";
    }
    return "?";
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::ReachedT: return "ReachedT";
        case Termination::DomainExit: return "DomainExit";
        case Termination::StepUnderflow: return "StepUnderflow";
    }
    return "?";
}

Trajectory integrate(const QuadraticCoefficients& coeffs, const SimulationWindow& window,
                     double epsilon, const SolverOptions& opts) {
    validate(coeffs, window);
    if (!(epsilon > 0.0) || !(epsilon <= 0.2) || !std::isfinite(epsilon))
        fail(errc::invalid_epsilon, "integration requires 0 < epsilon <= 0.2");
    if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0))
        fail(errc::validation_error, "solver options: tolerances must be positive");

    const bool logv = opts.use_log_fast_variable;
    const double span = window.T - window.t0;
    const double hmax = opts.max_step > 0.0 ? opts.max_step : span / 500.0;
    const double hmin = opts.min_step;
    if (!(hmin > 0.0) || hmin > hmax)
        fail(errc::validation_error, "solver options require 0 < min_step <= max_step");

    auto rhs = [&](double /*t*/, const State& s, State& ds) {
        const double y = logv ? safe_exp(s.v / epsilon) : s.v;
        ds.x = s.x * (coeffs.A + coeffs.B * s.x + coeffs.C * y);
        if (logv)
            ds.v = coeffs.D + coeffs.E * y + coeffs.F * s.x;
        else
            ds.v = s.v * (coeffs.D + coeffs.E * s.v + coeffs.F * s.x) / epsilon;
    };

    Trajectory traj;
    traj.epsilon = epsilon;
    traj.log_coordinates = logv;

    double t = window.t0;
    State s{window.x0, logv ? epsilon * std::log(window.y0) : window.y0};
    const double w0 = epsilon * std::log(window.y0);
    traj.samples.push_back({t, window.x0, window.y0, w0});

    State k1, k2, k3, k4, k5, k6, k7;
    rhs(t, s, k1);
    double h = std::min(hmax, span / 1000.0);
    bool rejected = false;

    while (t < window.T) {
        h = std::min(h, window.T - t);
        State stage, snew;

        stage = {s.x + h * a21 * k1.x, s.v + h * a21 * k1.v};
        rhs(t + c2 * h, stage, k2);
        stage = {s.x + h * (a31 * k1.x + a32 * k2.x), s.v + h * (a31 * k1.v + a32 * k2.v)};
        rhs(t + c3 * h, stage, k3);
        stage = {s.x + h * (a41 * k1.x + a42 * k2.x + a43 * k3.x),
                 s.v + h * (a41 * k1.v + a42 * k2.v + a43 * k3.v)};
        rhs(t + c4 * h, stage, k4);
        stage = {s.x + h * (a51 * k1.x + a52 * k2.x + a53 * k3.x + a54 * k4.x),
                 s.v + h * (a51 * k1.v + a52 * k2.v + a53 * k3.v + a54 * k4.v)};
        rhs(t + c5 * h, stage, k5);
        stage = {s.x + h * (a61 * k1.x + a62 * k2.x + a63 * k3.x + a64 * k4.x + a65 * k5.x),
                 s.v + h * (a61 * k1.v + a62 * k2.v + a63 * k3.v + a64 * k4.v + a65 * k5.v)};
        rhs(t + h, stage, k6);
        snew = {s.x + h * (b1 * k1.x + b3 * k3.x + b4 * k4.x + b5 * k5.x + b6 * k6.x),
                s.v + h * (b1 * k1.v + b3 * k3.v + b4 * k4.v + b5 * k5.v + b6 * k6.v)};
        rhs(t + h, snew, k7);

        const double err_x =
            h * (e1 * k1.x + e3 * k3.x + e4 * k4.x + e5 * k5.x + e6 * k6.x + e7 * k7.x);
        const double err_v =
            h * (e1 * k1.v + e3 * k3.v + e4 * k4.v + e5 * k5.v + e6 * k6.v + e7 * k7.v);
        const double sc_x =
            opts.abs_tol + opts.rel_tol * std::max(std::abs(s.x), std::abs(snew.x));
        const double sc_v =
            opts.abs_tol + opts.rel_tol * std::max(std::abs(s.v), std::abs(snew.v));
        double err = std::sqrt(0.5 * ((err_x / sc_x) * (err_x / sc_x) +
                                      (err_v / sc_v) * (err_v / sc_v)));

        // Positivity is structural for y in log coordinates; elsewhere a signloss
        // means the step was too large.
        const bool state_ok =
            std::isfinite(snew.x) && std::isfinite(snew.v) && snew.x > 0.0 &&
            (logv || snew.v > 0.0);
        if (!state_ok) err = std::numeric_limits<double>::infinity();

        if (err <= 1.0) {
            t += h;
            s = snew;
            k1 = k7;  // FSAL
            ++traj.steps_accepted;
            const double y = logv ? safe_exp(s.v / epsilon) : s.v;
            const double w = logv ? s.v : epsilon * std::log(s.v);
            traj.samples.push_back({t, s.x, y, w});
            if (std::abs(s.x) > window.M || std::abs(y) > window.N) {
                traj.termination = Termination::DomainExit;
                return traj;
            }
            double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            fac = std::clamp(fac, 0.2, rejected ? 1.0 : 5.0);
            h = std::min(hmax, h * fac);
            rejected = false;
        } else {
            ++traj.steps_rejected;
            rejected = true;
            const double fac =
                std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.1;
            h *= fac;
            if (h < hmin) {
                traj.termination = Termination::StepUnderflow;
                return traj;
            }
        }
        if (h < hmin) h = hmin;
    }
    traj.termination = Termination::ReachedT;
    return traj;
}

SwitchObservation detect_switch(const Trajectory& traj, const CriticalManifold& manifold,
                                const CaseLabel& label, double theta, double predicted) {
    if (!(theta > 0.0 && theta < 1.0))
        fail(errc::validation_error, "detection threshold theta must lie in (0,1)");
    if (traj.samples.empty()) fail(errc::validation_error, "empty trajectory");

    SwitchObservation obs;
    obs.epsilon = traj.epsilon;
    obs.threshold_theta = theta;
    obs.predicted = predicted;
    obs.t_sw = std::numeric_limits<double>::quiet_NaN();
    obs.abs_error = std::numeric_limits<double>::quiet_NaN();

    const auto& ss = traj.samples;
    if (label.delayed()) {
        // Rise onto the positive phi branch; phi(x) > 0 already places the sample
        // past the trajectory's own psi-crossing.
        bool have_prev = false;
        double t_prev = 0.0, h_prev = 0.0;
        for (const auto& smp : ss) {
            const double phi = manifold.phi(smp.x);
            if (phi > 0.0) {
                const double h = smp.y - theta * phi;
                if (h >= 0.0) {
                    obs.detection_mode = DetectionMode::RiseToPhi;
                    obs.t_sw = (have_prev && h_prev < 0.0)
                                   ? t_prev + (smp.t - t_prev) * (-h_prev) / (h - h_prev)
                                   : smp.t;
                    obs.abs_error = std::abs(obs.t_sw - predicted);
                    return obs;
                }
                have_prev = true;
                t_prev = smp.t;
                h_prev = h;
            } else {
                have_prev = false;
            }
        }
        return obs;
    }
    if (label.immediate()) {
        // Sharp event: the slow variable crosses psi in the travel direction.
        const double dir = ss.front().x < manifold.psi ? 1.0 : -1.0;
        double t_prev = ss.front().t;
        double c_prev = dir * (ss.front().x - manifold.psi);
        for (size_t i = 1; i < ss.size(); ++i) {
            const double c = dir * (ss[i].x - manifold.psi);
            if (c >= 0.0) {
                obs.detection_mode = DetectionMode::FallToZero;
                obs.t_sw = c_prev < 0.0
                               ? t_prev + (ss[i].t - t_prev) * (-c_prev) / (c - c_prev)
                               : ss[i].t;
                obs.abs_error = std::abs(obs.t_sw - predicted);
                return obs;
            }
            t_prev = ss[i].t;
            c_prev = c;
        }
        return obs;
    }
    return obs;
}

SweepResult sweep(const QuadraticCoefficients& coeffs, const SimulationWindow& window,
                  const CaseLabel& label, const std::vector<double>& epsilons,
                  const SolverOptions& opts, double theta) {
    if (epsilons.empty()) fail(errc::validation_error, "sweep requires a nonempty eps list");
    for (size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0) || !(epsilons[i] <= 0.2))
            fail(errc::validation_error, "sweep eps values must lie in (0, 0.2]");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            fail(errc::validation_error, "sweep eps list must be strictly decreasing");
    }

    const CompositeLimit limit = composite_limit(coeffs, window, label);
    const CriticalManifold manifold = critical_manifold(coeffs);

    SweepResult result;
    result.predicted = limit.switch_time;
    result.observations.reserve(epsilons.size());
    for (double eps : epsilons) {
        const Trajectory traj = integrate(coeffs, window, eps, opts);
        result.observations.push_back(
            detect_switch(traj, manifold, label, theta, limit.switch_time));
    }

    auto& summary = result.summary;
    summary.all_detected = true;
    summary.trend_ok = true;
    double prev_err = std::numeric_limits<double>::quiet_NaN();
    for (const auto& obs : result.observations) {
        if (!obs.detected()) {
            summary.all_detected = false;
            summary.trend_ok = false;
            continue;
        }
        if (!std::isnan(prev_err) && obs.abs_error > summary.slack * prev_err)
            summary.trend_ok = false;
        prev_err = obs.abs_error;
        summary.final_abs_error = obs.abs_error;
    }
    return result;
}

}  // namespace canard
