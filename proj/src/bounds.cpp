#include "bounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "numerics.hpp"

namespace canard {

double curvature_constant(const QuadraticCoefficients& coeffs) {
    return 2.0 * std::abs(coeffs.E);
}

LogValue upper_solution(const GFunction& G, double y_init, double epsilon, double t) {
    if (!(y_init > 0.0)) fail(errc::validation_error, "upper solution requires y_init > 0");
    if (!(epsilon > 0.0)) fail(errc::invalid_epsilon, "upper solution requires epsilon > 0");
    const double lv = std::log(y_init) + G(t) / epsilon;
    return {lv, std::exp(lv)};
}

LogValue lower_solution(const GFunction& G, double eta, double delta, double epsilon,
                        double k, double t) {
    if (!(epsilon > 0.0)) fail(errc::invalid_epsilon, "lower solution requires epsilon > 0");
    if (eta < 0.0 || delta < 0.0)
        fail(errc::validation_error, "lower solution requires eta, delta >= 0");
    if (eta * k > delta) {
        std::ostringstream os;
        os << "lower solution requires eta <= delta/k: eta = " << eta << ", delta/k = "
           << delta / k;
        fail(errc::admissibility_violated, os.str());
    }
    if (eta == 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
    const double lv = std::log(eta) + (G(t) - delta * (t - G.t0())) / epsilon;
    return {lv, std::exp(lv)};
}

double delayed_exit_root(const GFunction& G, double t_star, double delta, double /*epsilon*/,
                         double T, double tol) {
    if (delta < 0.0) fail(errc::validation_error, "delta must be nonnegative");
    if (delta == 0.0) return t_star;
    const double t0 = G.t0();
    auto shifted = [&](double t) { return G(t) - delta * (t - t0); };

    double a = t_star;
    double fa = shifted(t_star);  // = -delta (t* - t0) < 0
    if (fa >= 0.0) return t_star;

    const double end = G.reduced.end_time(T);
    const bool truncated = G.reduced.blowup_time && *G.reduced.blowup_time <= T;
    if (!truncated) {
        const double fb = shifted(end);
        if (!(fb > 0.0))
            fail(errc::no_root_before_t, "shifted entry-exit function stays negative up to T");
        return bisect(shifted, a, end, fa, fb, tol);
    }
    double frac = 0.5;
    for (int kIt = 0; kIt < 100; ++kIt, frac *= 0.5) {
        const double probe = end - (end - t_star) * frac;
        if (probe <= a || probe >= end) break;
        const double fp = shifted(probe);
        if (fp > 0.0) return bisect(shifted, a, probe, fa, fp, tol);
        a = probe;
        fa = fp;
    }
    fail(errc::no_root_before_t,
         "shifted entry-exit function stays negative up to the blow-up time");
}

BoundEnvelope make_envelope(const GFunction& G, const SimulationWindow& window, double t_star,
                            double eta, double delta, double epsilon,
                            double margin_fraction) {
    const double k = curvature_constant(G.coeffs);
    if (eta * k > delta) {
        std::ostringstream os;
        os << "envelope admissibility requires eta <= delta/k: eta = " << eta
           << ", delta/k = " << delta / k;
        fail(errc::admissibility_violated, os.str());
    }
    BoundEnvelope env;
    env.eta = eta;
    env.delta = delta;
    env.epsilon = epsilon;
    env.k = k;
    env.t_delta_eps = delayed_exit_root(G, t_star, delta, epsilon, window.T);
    const double margin = margin_fraction * (window.T - window.t0);
    env.lower_lo = window.t0;
    env.lower_hi = env.t_delta_eps;
    env.upper_lo = window.t0 + margin;
    env.upper_hi = t_star - margin;
    return env;
}

SandwichReport verify_sandwich(const Trajectory& traj, const BoundEnvelope& envelope,
                               const GFunction& G, double y_init, double kappa_hat) {
    SandwichReport rep;
    rep.kappa_hat = kappa_hat;
    rep.worst_lower_margin = std::numeric_limits<double>::infinity();
    rep.worst_upper_margin = std::numeric_limits<double>::infinity();

    for (const auto& smp : traj.samples) {
        const double ln_y = smp.w / traj.epsilon;  // exact log of y
        bool used = false;
        if (smp.t >= envelope.lower_lo && smp.t <= envelope.lower_hi) {
            used = true;
            ++rep.lower_checked;
            if (envelope.eta > 0.0) {
                const double ln_lower =
                    std::log(envelope.eta) +
                    (G(smp.t) - envelope.delta * (smp.t - G.t0())) / envelope.epsilon;
                const double margin = ln_y - ln_lower;
                rep.worst_lower_margin = std::min(rep.worst_lower_margin, margin);
                if (margin < 0.0) ++rep.lower_violations;
            }
        }
        if (smp.t >= envelope.upper_lo && smp.t <= envelope.upper_hi) {
            used = true;
            ++rep.upper_checked;
            const double ln_upper =
                std::log(y_init) + G(smp.t) / envelope.epsilon + kappa_hat;
            const double margin = ln_upper - ln_y;
            rep.worst_upper_margin = std::min(rep.worst_upper_margin, margin);
            if (margin < 0.0) ++rep.upper_violations;
        }
        if (!used) ++rep.skipped;
    }
    return rep;
}

}  // namespace canard
