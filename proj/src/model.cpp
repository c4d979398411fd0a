#include "model.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "numerics.hpp"
#include "slow_analysis.hpp"

namespace canard {

namespace {

bool finite_nonzero(double v) { return std::isfinite(v) && v != 0.0; }

/// Margin-checked sign decision: refuses values within the relative margin.
double decided(double value, double scale, double margin, const char* what) {
    if (std::abs(value) <= margin * std::max(1.0, std::abs(scale))) {
        std::ostringstream os;
        os << "classification boundary: " << what << " = " << value
           << " lies inside the decision margin; perturb the inputs";
        fail(errc::degenerate_classification, os.str());
    }
    return value;
}

}  // namespace

void validate(const QuadraticCoefficients& coeffs, const SimulationWindow& window) {
    const struct {
        const char* name;
        double value;
    } fields[] = {{"A", coeffs.A}, {"B", coeffs.B}, {"C", coeffs.C},
                  {"D", coeffs.D}, {"E", coeffs.E}, {"F", coeffs.F}};
    for (const auto& f : fields) {
        if (!finite_nonzero(f.value))
            fail(errc::zero_coefficient,
                 std::string("coefficient ") + f.name + " must be finite and nonzero");
    }
    for (double v : {window.t0, window.T, window.x0, window.y0, window.M, window.N}) {
        if (!std::isfinite(v)) fail(errc::bad_window, "window fields must be finite");
    }
    if (!(window.t0 < window.T)) fail(errc::bad_window, "window requires t0 < T");
    if (!(window.x0 > 0.0 && window.x0 < window.M))
        fail(errc::bad_window, "window requires 0 < x0 < M");
    if (!(window.y0 > 0.0 && window.y0 < window.N))
        fail(errc::bad_window, "window requires 0 < y0 < N");
}

CriticalManifold critical_manifold(const QuadraticCoefficients& coeffs) {
    CriticalManifold m;
    m.psi = coeffs.psi();
    m.phi_slope = -coeffs.F / coeffs.E;
    m.phi_intercept = -coeffs.D / coeffs.E;
    m.D = coeffs.D;
    m.F = coeffs.F;
    return m;
}

const char* to_string(CaseTag t) {
    switch (t) {
        case CaseTag::Case1a: return "Case1a";
        case CaseTag::Case1b: return "Case1b";
        case CaseTag::Case2a: return "Case2a";
        case CaseTag::Case2b: return "Case2b";
        case CaseTag::Case1bDual: return "Case1bDual";
        case CaseTag::Case2bDual: return "Case2bDual";
        case CaseTag::NotInQuadrant: return "NotInQuadrant";
    }
    return "?";
}

const char* to_string(SwitchKind k) {
    switch (k) {
        case SwitchKind::DelayedAtTStar: return "DelayedAtTStar";
        case SwitchKind::ImmediateAtTc: return "ImmediateAtTc";
        case SwitchKind::NoSwitch: return "NoSwitch";
        case SwitchKind::OutOfScope: return "OutOfScope";
    }
    return "?";
}

const char* to_string(CanonicalForm f) {
    switch (f) {
        case CanonicalForm::None: return "None";
        case CanonicalForm::FastPredatorA: return "FastPredatorA";
        case CanonicalForm::FastPredatorB: return "FastPredatorB";
        case CanonicalForm::FastPredatorC: return "FastPredatorC";
        case CanonicalForm::FastPreyA: return "FastPreyA";
        case CanonicalForm::FastPreyB: return "FastPreyB";
        case CanonicalForm::FastPreyC: return "FastPreyC";
    }
    return "?";
}

CaseTag fast_case_tag(double D, double E, double F) {
    if (D < 0.0 && F > 0.0) return E > 0.0 ? CaseTag::Case1a : CaseTag::Case1b;
    if (D > 0.0 && F < 0.0) return E > 0.0 ? CaseTag::Case2a : CaseTag::Case2b;
    return CaseTag::NotInQuadrant;
}

std::pair<double, double> phi_constrained_field(const QuadraticCoefficients& coeffs) {
    return {coeffs.A - coeffs.C * coeffs.D / coeffs.E,
            coeffs.B - coeffs.C * coeffs.F / coeffs.E};
}

CaseLabel classify(const QuadraticCoefficients& coeffs, const SimulationWindow& window,
                   double margin) {
    validate(coeffs, window);
    if (coeffs.D * coeffs.F > 0.0) return {CaseTag::NotInQuadrant, SwitchKind::NoSwitch};

    const CaseTag tag = fast_case_tag(coeffs.D, coeffs.E, coeffs.F);
    if (tag == CaseTag::Case1a || tag == CaseTag::Case2a)
        return {tag, SwitchKind::OutOfScope};

    const double psi = coeffs.psi();
    const double side = decided(window.x0 - psi, psi, margin, "x0 - psi");

    // Each case requires the relevant slow field to keep a fixed sign on the
    // interval between x0 and psi; an affine rate only needs the two endpoint
    // evaluations.
    auto endpoint = [&](double lin, double quad, double x, const char* what) {
        return decided(lin + quad * x, std::abs(lin) + std::abs(quad * x), margin, what);
    };

    if (tag == CaseTag::Case1b) {
        if (side < 0.0) {
            // Direct delayed candidate: reduced solution must grow through psi.
            if (coeffs.C > 0.0) return {tag, SwitchKind::NoSwitch};
            const double at_x0 = endpoint(coeffs.A, coeffs.B, window.x0, "A + B x0");
            const double at_psi = endpoint(coeffs.A, coeffs.B, psi, "A + B psi");
            if (at_x0 > 0.0 && at_psi > 0.0) {
                CanonicalForm form = CanonicalForm::None;
                if (coeffs.A > 0.0 && coeffs.B > 0.0) form = CanonicalForm::FastPredatorA;
                else if (coeffs.A > 0.0 && coeffs.B < 0.0) form = CanonicalForm::FastPredatorB;
                else form = CanonicalForm::FastPredatorC;
                return {tag, SwitchKind::DelayedAtTStar, form};
            }
            return {tag, SwitchKind::NoSwitch};
        }
        // Dual candidate: slow flow on the phi branch must fall through psi.
        const auto [lin, quad] = phi_constrained_field(coeffs);
        const double at_x0 = endpoint(lin, quad, window.x0, "phi-branch rate at x0");
        const double at_psi = endpoint(lin, quad, psi, "phi-branch rate at psi");
        if (at_x0 < 0.0 && at_psi < 0.0)
            return {CaseTag::Case1bDual, SwitchKind::ImmediateAtTc};
        return {tag, SwitchKind::NoSwitch};
    }

    // Case 2b.
    if (side < 0.0) {
        // Direct immediate candidate: phi-branch flow must grow through psi.
        const auto [lin, quad] = phi_constrained_field(coeffs);
        const double at_x0 = endpoint(lin, quad, window.x0, "phi-branch rate at x0");
        const double at_psi = endpoint(lin, quad, psi, "phi-branch rate at psi");
        if (at_x0 > 0.0 && at_psi > 0.0) return {tag, SwitchKind::ImmediateAtTc};
        return {tag, SwitchKind::NoSwitch};
    }
    // Dual delayed candidate: reduced solution must fall through psi, and the
    // transformed system needs C > 0 for its monotonicity assumption.
    if (coeffs.C < 0.0) return {tag, SwitchKind::NoSwitch};
    const double at_x0 = endpoint(coeffs.A, coeffs.B, window.x0, "A + B x0");
    const double at_psi = endpoint(coeffs.A, coeffs.B, psi, "A + B psi");
    if (at_x0 < 0.0 && at_psi < 0.0) {
        CanonicalForm form = CanonicalForm::None;
        if (coeffs.A < 0.0 && coeffs.B < 0.0) form = CanonicalForm::FastPreyA;
        else if (coeffs.A > 0.0 && coeffs.B < 0.0) form = CanonicalForm::FastPreyB;
        else form = CanonicalForm::FastPreyC;
        return {CaseTag::Case2bDual, SwitchKind::DelayedAtTStar, form};
    }
    return {tag, SwitchKind::NoSwitch};
}

bool AssumptionReport::all_pass() const {
    for (const auto& e : entries)
        if (!e.pass) return false;
    return true;
}

const AssumptionEntry* AssumptionReport::find(const std::string& id) const {
    for (const auto& e : entries)
        if (e.id == id) return &e;
    return nullptr;
}

AssumptionReport check_assumptions(const QuadraticCoefficients& coeffs,
                                   const SimulationWindow& window, double margin) {
    validate(coeffs, window);
    AssumptionReport rep;
    auto add = [&rep](const char* id, bool pass, double witness, std::string note) {
        rep.entries.push_back({id, pass, witness, std::move(note)});
    };
    auto strict = [margin](double witness) { return witness > margin; };

    const double psi = coeffs.psi();
    const bool dual_side = psi > 0.0 && window.x0 > psi;

    add("a1", true, 1.0, "polynomial right-hand sides, C^2 on the closed window");
    add("a2", true, 1.0, "fast field factors through y, so g(t,x,0,eps) = 0");

    {
        const double w = dual_side ? coeffs.C : -coeffs.C;
        add("a3", strict(w), w,
            dual_side ? "transformed slow field needs C > 0 (f_y = (z-2psi)C, z < 2psi)"
                      : "slow field nonincreasing in y needs C < 0 (f_y = C x, x > 0)");
    }
    {
        const double w = coeffs.D < 0.0 ? coeffs.F : -coeffs.F;
        add("a4", strict(w), w,
            coeffs.D < 0.0 ? "fast field nondecreasing in x needs F > 0 (g_x = F y)"
                           : "dual orientation needs -F > 0 (g_x = F y, Case 2)");
    }
    {
        const double oriented_slope = (coeffs.D < 0.0 ? 1.0 : -1.0) * (-coeffs.F / coeffs.E);
        const double w = std::min(psi, oriented_slope);
        add("a5", strict(w), w,
            "quasi steady states cross inside the quadrant with case-matched phi slope");
    }
    add("a6", strict(-coeffs.D * coeffs.F), -coeffs.D * coeffs.F,
        "branch stabilities exchange across x = psi (needs D*F < 0)");

    // Pre-switch slow solution: the branch attracting at x0 decides which flow
    // carries the solution toward psi.
    const bool zero_branch_first = coeffs.D + coeffs.F * window.x0 < 0.0;
    double tc_pre = std::numeric_limits<double>::quiet_NaN();
    {
        double lin = coeffs.A, quad = coeffs.B;
        if (!zero_branch_first) std::tie(lin, quad) = phi_constrained_field(coeffs);
        try {
            const ReducedSolution pre = reduced_solution(lin, quad, window.x0, window.t0);
            tc_pre = crossing_time(pre, psi, window.T);
            const double w = std::min(tc_pre - window.t0, window.T - tc_pre);
            std::ostringstream os;
            os << "pre-switch slow solution crosses psi at t_c = " << tc_pre;
            add("a7", strict(w), w, os.str());
        } catch (const error& e) {
            add("a7", false, -1.0, std::string("no admissible crossing: ") + e.what());
        }
    }

    // (a8) concerns the entry-exit function along the reduced solution x-bar.
    try {
        const ReducedSolution xbar = reduced_solution(coeffs.A, coeffs.B, window.x0, window.t0);
        const double tcx = crossing_time(xbar, psi, window.T);
        const double tstar = exit_time(coeffs, xbar, tcx, window.T);
        const double w = std::min(tstar - tcx, window.T - tstar);
        std::ostringstream os;
        os << "entry-exit function vanishes again at t* = " << tstar;
        add("a8", strict(w), w, os.str());
    } catch (const error& e) {
        add("a8", false, -1.0, std::string("no exit root: ") + e.what());
    }

    add("a9", strict(-coeffs.E), -coeffs.E,
        "g - g_y(.,0) y = E y^2 must be <= 0 (needs E < 0)");

    {
        const double crossing_rate = psi * (coeffs.A + coeffs.B * psi);
        const double w = dual_side ? -crossing_rate : crossing_rate;
        add("transversality", strict(w), w,
            dual_side ? "slow flow at (psi,0) must point left: psi(A + B psi) < 0"
                      : "slow flow at (psi,0) must point right: psi(A + B psi) > 0");
    }
    return rep;
}

DualSystem dual_transform(const QuadraticCoefficients& coeffs, const SimulationWindow& window) {
    validate(coeffs, window);
    const double psi = coeffs.psi();
    if (!(psi > 0.0)) fail(errc::not_applicable, "dual transform requires psi = -D/F > 0");

    DualSystem dual;
    dual.D = -coeffs.D;
    dual.E = coeffs.E;
    dual.F = -coeffs.F;
    const double shift = 2.0 * psi;
    dual.slow = SlowField{shift, coeffs.A + coeffs.B * shift, -coeffs.B, coeffs.C};
    dual.window = window;
    dual.window.x0 = shift - window.x0;
    dual.source = coeffs;
    dual.source_window = window;
    return dual;
}

std::pair<QuadraticCoefficients, SimulationWindow> dual_transform(const DualSystem& dual) {
    return {dual.source, dual.source_window};
}

}  // namespace canard
