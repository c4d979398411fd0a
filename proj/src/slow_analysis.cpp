#include "slow_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "numerics.hpp"

namespace canard {

namespace {

[[noreturn]] void out_of_domain_at(double t, double blowup) {
    std::ostringstream os;
    os << "reduced solution evaluated at t = " << t << " past its blow-up time " << blowup;
    fail(errc::out_of_domain, os.str());
}

}  // namespace

double ReducedSolution::operator()(double t) const {
    if (blowup_time && t >= *blowup_time) out_of_domain_at(t, *blowup_time);
    const double tau = t - t0;
    const double r = linear_rate, q = quadratic_rate;
    if (r == 0.0) {
        if (q == 0.0) return x_init;
        return x_init / (1.0 - q * x_init * tau);
    }
    if (q == 0.0) return x_init * std::exp(r * tau);
    if (r * tau >= 0.0) return r * x_init / ((r + q * x_init) * std::exp(-r * tau) - q * x_init);
    return r * x_init * std::exp(r * tau) / (r - q * x_init * std::expm1(r * tau));
}

double ReducedSolution::integral(double t) const {
    if (blowup_time && t >= *blowup_time) out_of_domain_at(t, *blowup_time);
    const double tau = t - t0;
    const double r = linear_rate, q = quadratic_rate;
    if (q == 0.0) return r == 0.0 ? x_init * tau : x_init * std::expm1(r * tau) / r;
    if (r == 0.0) return -std::log1p(-q * x_init * tau) / q;
    return (std::log((*this)(t) / x_init) - r * tau) / q;
}

double ReducedSolution::end_time(double T) const {
    return blowup_time ? std::min(T, *blowup_time) : T;
}

ReducedSolution reduced_solution(double linear_rate, double quadratic_rate, double x_init,
                                 double t0) {
    if (!(x_init > 0.0) || !std::isfinite(x_init))
        fail(errc::validation_error, "reduced solution requires x_init > 0");
    ReducedSolution s;
    s.linear_rate = linear_rate;
    s.quadratic_rate = quadratic_rate;
    s.x_init = x_init;
    s.t0 = t0;
    const double r = linear_rate, q = quadratic_rate;
    if (q == 0.0) {
        s.branch = BranchTag::PureExponential;
        return s;
    }
    if (r == 0.0) {
        if (q > 0.0) s.blowup_time = t0 + 1.0 / (q * x_init);
    } else {
        const double u_star = (r + q * x_init) / (q * x_init);
        if (u_star > 0.0) {
            const double tau_b = std::log(u_star) / r;
            if (tau_b > 0.0) s.blowup_time = t0 + tau_b;
        }
    }
    if (s.blowup_time) {
        s.branch = BranchTag::FiniteBlowup;
    } else {
        s.branch = x_init * (r + q * x_init) > 0.0 ? BranchTag::LogisticGrowth
                                                   : BranchTag::LogisticDecay;
    }
    return s;
}

double crossing_time(const ReducedSolution& reduced, double psi, double T) {
    const double r = reduced.linear_rate, q = reduced.quadratic_rate, x0 = reduced.x_init;
    if (!(psi > 0.0)) fail(errc::no_crossing, "crossing line psi must be positive");
    double tau;
    if (r == 0.0 && q == 0.0) fail(errc::no_crossing, "constant reduced solution never crosses");
    if (r == 0.0) {
        tau = (psi - x0) / (q * x0 * psi);
    } else {
        if (r + q * x0 == 0.0)
            fail(errc::no_crossing, "reduced solution sits on an equilibrium");
        const double arg = x0 * (r + q * psi) / (psi * (r + q * x0));
        if (!(arg > 0.0)) fail(errc::no_crossing, "reduced solution never reaches psi");
        tau = -std::log(arg) / r;
    }
    const double t_c = reduced.t0 + tau;
    if (!(tau > 0.0) || !(t_c < reduced.end_time(T))) {
        std::ostringstream os;
        os << "reduced solution does not cross psi = " << psi << " inside (t0, min(T, blow-up))";
        fail(errc::no_crossing, os.str());
    }
    return t_c;
}

double crossing_time_bisection(const ReducedSolution& reduced, double psi, double T,
                               double tol) {
    const double end = reduced.end_time(T);
    const double span = end - reduced.t0;
    const double b_max = reduced.blowup_time ? end - 1e-9 * span : end;
    auto f = [&](double t) { return reduced(t) - psi; };
    const double fa = f(reduced.t0);
    const double fb = f(b_max);
    if (fa == 0.0) return reduced.t0;
    if ((fb > 0.0) == (fa > 0.0))
        fail(errc::no_crossing, "no sign change of x - psi inside the window");
    return bisect(f, reduced.t0, b_max, fa, fb, tol);
}

double entry_exit_G_closed(const QuadraticCoefficients& coeffs, const ReducedSolution& reduced,
                           double t) {
    return coeffs.D * (t - reduced.t0) + coeffs.F * reduced.integral(t);
}

double entry_exit_G_quadrature(const QuadraticCoefficients& coeffs,
                               const ReducedSolution& reduced, double t, double abs_tol) {
    if (reduced.blowup_time && t >= *reduced.blowup_time)
        out_of_domain_at(t, *reduced.blowup_time);
    auto integrand = [&](double s) { return coeffs.D + coeffs.F * reduced(s); };
    return integrate_adaptive(integrand, reduced.t0, t, abs_tol);
}

double entry_exit_G(const QuadraticCoefficients& coeffs, const ReducedSolution& reduced,
                    double t) {
    if (reduced.quadratic_rate != 0.0) return entry_exit_G_closed(coeffs, reduced, t);
    return entry_exit_G_quadrature(coeffs, reduced, t);
}

double exit_time(const QuadraticCoefficients& coeffs, const ReducedSolution& reduced,
                 double t_c, double T, double tol) {
    auto g = [&](double t) { return entry_exit_G(coeffs, reduced, t); };
    double a = t_c;
    double fa = g(t_c);
    if (fa == 0.0) fail(errc::no_exit_before_t, "G already vanishes at the crossing time");

    const bool blows_inside = reduced.blowup_time && *reduced.blowup_time <= T;
    if (!blows_inside) {
        const double fb = g(T);
        if (fb == 0.0 || (fb > 0.0) == (fa > 0.0))
            fail(errc::no_exit_before_t, "G keeps its sign up to T; no interior exit root");
        return bisect(g, a, T, fa, fb, tol);
    }
    // Blow-up truncates the domain: probe geometrically toward it for a sign
    // change. Probes that round onto the blow-up time itself end the search; G
    // then keeps its sign at every representable instant of the domain.
    const double blow = *reduced.blowup_time;
    double frac = 0.5;
    for (int k = 0; k < 100; ++k, frac *= 0.5) {
        const double probe = blow - (blow - t_c) * frac;
        if (probe <= a || probe >= blow) break;
        const double fp = g(probe);
        if (fp != 0.0 && (fp > 0.0) != (fa > 0.0)) return bisect(g, a, probe, fa, fp, tol);
        a = probe;
        fa = fp;
    }
    fail(errc::no_exit_before_t, "G keeps its sign up to the blow-up time");
}

EntryExitProfile entry_exit_profile(const QuadraticCoefficients& coeffs,
                                    const ReducedSolution& reduced, double T,
                                    std::optional<double> t_c, std::optional<double> t_star) {
    EntryExitProfile profile;
    profile.t_c = t_c;
    profile.t_star = t_star;

    double grid_end = T;
    if (reduced.blowup_time && *reduced.blowup_time <= T)
        grid_end = reduced.t0 + (*reduced.blowup_time - reduced.t0) * (1.0 - 1e-6);

    const int n = 1000;
    std::vector<double> ts;
    ts.reserve(n + 3);
    for (int i = 0; i <= n; ++i)
        ts.push_back(reduced.t0 + (grid_end - reduced.t0) * static_cast<double>(i) / n);
    if (t_c) ts.push_back(*t_c);
    if (t_star) ts.push_back(*t_star);
    std::sort(ts.begin(), ts.end());

    profile.samples.reserve(ts.size());
    for (double t : ts) profile.samples.emplace_back(t, entry_exit_G(coeffs, reduced, t));
    if (t_c) profile.g_min = entry_exit_G(coeffs, reduced, *t_c);
    return profile;
}

double CompositeLimit::y(double t) const {
    if (kind == SwitchKind::DelayedAtTStar)
        return t <= switch_time ? 0.0 : manifold.phi(post_x(t));
    return t < switch_time ? manifold.phi(pre_x(t)) : 0.0;
}

CompositeLimit composite_limit(const QuadraticCoefficients& coeffs,
                               const SimulationWindow& window, const CaseLabel& label) {
    validate(coeffs, window);
    if (!label.delayed() && !label.immediate())
        fail(errc::not_applicable, "composite limit requires a delayed or immediate switch");

    CompositeLimit limit;
    limit.kind = label.switch_kind;
    limit.manifold = critical_manifold(coeffs);
    const double psi = coeffs.psi();
    const auto [phi_lin, phi_quad] = phi_constrained_field(coeffs);

    if (label.delayed()) {
        limit.pre_x = reduced_solution(coeffs.A, coeffs.B, window.x0, window.t0);
        const double t_c = crossing_time(limit.pre_x, psi, window.T);
        const double t_star = exit_time(coeffs, limit.pre_x, t_c, window.T);
        limit.post_x = reduced_solution(phi_lin, phi_quad, limit.pre_x(t_star), t_star);
        limit.switch_time = t_star;
        limit.t_c = t_c;
        limit.t_star = t_star;
    } else {
        limit.pre_x = reduced_solution(phi_lin, phi_quad, window.x0, window.t0);
        const double t_c = crossing_time(limit.pre_x, psi, window.T);
        limit.post_x = reduced_solution(coeffs.A, coeffs.B, psi, t_c);
        limit.switch_time = t_c;
        limit.t_c = t_c;
    }
    return limit;
}

}  // namespace canard
