#pragma once

#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace canard {

/// Signed coefficients of the planar system x' = x(A+Bx+Cy), eps y' = y(D+Ey+Fx).
/// All six must be finite and nonzero; the positive magnitudes a..f are derived,
/// never stored.
struct QuadraticCoefficients {
    double A, B, C, D, E, F;

    /// Crossing line of the two quasi steady states, psi = -D/F.
    double psi() const { return -D / F; }
};

/// Time window, initial data and domain guard for a run.
struct SimulationWindow {
    double t0, T;
    double x0, y0;
    double M, N;
};

/// Throws ZeroCoefficient (naming the field) or BadWindow when an invariant fails.
void validate(const QuadraticCoefficients& coeffs, const SimulationWindow& window);

/// The two quasi steady states y=0 and y=phi(x), their crossing line x=psi and
/// the branch stability rates g_y along each branch.
struct CriticalManifold {
    double psi;
    double phi_slope;      // -F/E
    double phi_intercept;  // -D/E
    double D, F;

    double phi(double x) const { return phi_slope * x + phi_intercept; }
    /// g_y(x,0) = D + F x; negative means the zero branch attracts at x.
    double g_y_on_zero_branch(double x) const { return D + F * x; }
    /// g_y(x,phi(x)) = -(D + F x); negative means the phi branch attracts at x.
    double g_y_on_phi_branch(double x) const { return -(D + F * x); }
    bool zero_branch_attracting(double x) const { return g_y_on_zero_branch(x) < 0.0; }
    bool phi_branch_attracting(double x) const { return g_y_on_phi_branch(x) < 0.0; }
};

CriticalManifold critical_manifold(const QuadraticCoefficients& coeffs);

enum class CaseTag {
    Case1a,
    Case1b,
    Case2a,
    Case2b,
    Case1bDual,
    Case2bDual,
    NotInQuadrant,
};

enum class SwitchKind {
    DelayedAtTStar,
    ImmediateAtTc,
    NoSwitch,
    OutOfScope,
};

enum class CanonicalForm {
    None,
    FastPredatorA,
    FastPredatorB,
    FastPredatorC,
    FastPreyA,
    FastPreyB,
    FastPreyC,
};

struct CaseLabel {
    CaseTag case_tag = CaseTag::NotInQuadrant;
    SwitchKind switch_kind = SwitchKind::NoSwitch;
    CanonicalForm canonical_form = CanonicalForm::None;

    bool delayed() const { return switch_kind == SwitchKind::DelayedAtTStar; }
    bool immediate() const { return switch_kind == SwitchKind::ImmediateAtTc; }
};

const char* to_string(CaseTag t);
const char* to_string(SwitchKind k);
const char* to_string(CanonicalForm f);

/// Sign-pattern case of the fast equation alone (no initial-condition logic).
CaseTag fast_case_tag(double D, double E, double F);

/// Full case classification. Strict inequalities on the decision path are tested
/// with relative margin `margin`; values inside it raise DegenerateClassification.
CaseLabel classify(const QuadraticCoefficients& coeffs, const SimulationWindow& window,
                   double margin = 1e-9);

/// Coefficients of the slow flow constrained to the phi branch,
/// x' = x(lin + quad x) with lin = A - CD/E, quad = B - CF/E.
std::pair<double, double> phi_constrained_field(const QuadraticCoefficients& coeffs);

struct AssumptionEntry {
    std::string id;
    bool pass = false;
    double witness = 0.0;
    std::string note;
};

struct AssumptionReport {
    std::vector<AssumptionEntry> entries;
    bool all_pass() const;
    const AssumptionEntry* find(const std::string& id) const;
};

/// Evaluates (a1)-(a9) and the transversality condition for the given system,
/// orientation-aware for the dual (x0 > psi) cases. Failures are entries, not
/// exceptions.
AssumptionReport check_assumptions(const QuadraticCoefficients& coeffs,
                                   const SimulationWindow& window, double margin = 1e-9);

/// General affine-quadratic slow field x' = (x - root)(lin + quad x + cross y).
/// Factored systems have root = 0; the dual transform produces root = 2 psi.
struct SlowField {
    double root = 0.0;
    double lin = 0.0;
    double quad = 0.0;
    double cross = 0.0;

    double operator()(double x, double y) const {
        return (x - root) * (lin + quad * x + cross * y);
    }
    bool factored() const { return root == 0.0; }
};

/// Result of the duality substitution x = 2 psi - z. The fast equation becomes
/// y(-D + E y - F z); the slow field is non-factored. The source system is kept
/// so that applying the transform twice restores it exactly.
struct DualSystem {
    double D, E, F;  // fast part of the z-system
    SlowField slow;
    SimulationWindow window;  // z0 = 2 psi - x0, everything else unchanged
    QuadraticCoefficients source;
    SimulationWindow source_window;

    double psi() const { return -D / F; }
};

/// Throws NotApplicable when psi <= 0.
DualSystem dual_transform(const QuadraticCoefficients& coeffs, const SimulationWindow& window);

/// Exact inverse: returns the system the dual was built from.
std::pair<QuadraticCoefficients, SimulationWindow> dual_transform(const DualSystem& dual);

}  // namespace canard
