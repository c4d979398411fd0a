#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bounds.hpp"

using namespace canard;

namespace {

const QuadraticCoefficients kP1{1.0, 1.0, -1.0, -1.0, -1.0, 1.0};
const SimulationWindow kP1Window{0.0, 1.0, 0.5, 0.5, 10.0, 10.0};

GFunction p1_G() {
    return {kP1, reduced_solution(kP1.A, kP1.B, kP1Window.x0, kP1Window.t0)};
}

const double kTc = std::log(1.5);
const double kTstar = std::log(2.0);

}  // namespace

TEST_CASE("curvature constant is 2|E|") {
    CHECK(curvature_constant({1, 1, -1, -1, -1.0, 1}) == 2.0);
    CHECK(curvature_constant({1, 1, -1, -1, -0.5, 1}) == 1.0);
    CHECK(curvature_constant({1, 1, -1, -1, -3.0, 1}) == 6.0);
}

TEST_CASE("upper comparison solution") {
    const GFunction G = p1_G();
    SUBCASE("returns y_init where G vanishes") {
        const LogValue at_t0 = upper_solution(G, 0.5, 0.01, 0.0);
        CHECK(at_t0.value == doctest::Approx(0.5).epsilon(1e-10));
        const LogValue at_tstar = upper_solution(G, 0.5, 0.01, kTstar);
        CHECK(at_tstar.value == doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("log value at the crossing time") {
        const LogValue v = upper_solution(G, 0.5, 0.01, kTc);
        const double expected = std::log(0.5) - std::log(1.125) / 0.01;
        CHECK(v.log_value == doctest::Approx(expected).epsilon(1e-10));
        CHECK(v.log_value == doctest::Approx(-12.4714507).epsilon(1e-6));
    }
    SUBCASE("strictly decreasing in 1/eps while G < 0") {
        const double t = 0.3;
        double prev = upper_solution(G, 0.5, 0.1, t).log_value;
        for (double eps : {0.05, 0.02, 0.01}) {
            const double cur = upper_solution(G, 0.5, eps, t).log_value;
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("lower comparison solution") {
    const GFunction G = p1_G();
    const double k = curvature_constant(kP1);
    SUBCASE("returns eta at t0") {
        CHECK(lower_solution(G, 0.02, 0.05, 0.01, k, 0.0).value ==
              doctest::Approx(0.02).epsilon(1e-12));
    }
    SUBCASE("value at the exit time") {
        // G(t*) = 0, so the value is eta e^{-delta t* / eps} = 0.02 / 32.
        const LogValue v = lower_solution(G, 0.02, 0.05, 0.01, k, kTstar);
        CHECK(v.value == doctest::Approx(0.000625).epsilon(1e-12));
    }
    SUBCASE("admissibility eta <= delta/k is enforced") {
        try {
            (void)lower_solution(G, 0.03, 0.05, 0.01, k, 0.5);
            FAIL("expected AdmissibilityViolated");
        } catch (const error& e) {
            CHECK(e.code() == errc::admissibility_violated);
        }
    }
    SUBCASE("degenerate eta = 0 gives the trivial bound") {
        const LogValue v = lower_solution(G, 0.0, 0.05, 0.01, k, 0.5);
        CHECK(v.value == 0.0);
    }
}

TEST_CASE("shifted exit root t(delta, eps)") {
    const GFunction G = p1_G();
    SUBCASE("delta = 0 reduces to the exit time") {
        CHECK(delayed_exit_root(G, kTstar, 0.0, 0.01, 1.0) == kTstar);
    }
    SUBCASE("small drift shifts the root right") {
        const double root = delayed_exit_root(G, kTstar, 0.05, 0.01, 1.0);
        CHECK(root > kTstar);
        CHECK(root < 1.0);
        // the root satisfies its defining equation: the lower solution equals eta
        const LogValue v = lower_solution(G, 0.02, 0.05, 0.01, curvature_constant(kP1), root);
        CHECK(v.value == doctest::Approx(0.02).epsilon(1e-10));
    }
    SUBCASE("no root before a tight T") {
        try {
            (void)delayed_exit_root(G, kTstar, 0.05, 0.01, 0.70);
            FAIL("expected NoRootBeforeT");
        } catch (const error& e) {
            CHECK(e.code() == errc::no_root_before_t);
        }
    }
    SUBCASE("monotone in delta") {
        double prev = kTstar;
        for (double delta : {0.01, 0.03, 0.05, 0.08}) {
            const double root = delayed_exit_root(G, kTstar, delta, 0.01, 1.0);
            CHECK(root > prev);
            prev = root;
        }
    }
}

TEST_CASE("envelope construction and the sandwich check") {
    const GFunction G = p1_G();
    SUBCASE("admissibility is enforced at construction") {
        CHECK_THROWS_AS(
            (void)make_envelope(G, kP1Window, kTstar, 0.05, 0.05, 0.02), error);
    }
    SUBCASE("t(delta,eps) exceeds t* and envelopes sandwich the trajectory") {
        const BoundEnvelope env = make_envelope(G, kP1Window, kTstar, 0.02, 0.05, 0.02);
        CHECK(env.k == 2.0);
        CHECK(env.t_delta_eps > kTstar);
        const Trajectory traj = integrate(kP1, kP1Window, 0.02);
        const SandwichReport rep = verify_sandwich(traj, env, G, kP1Window.y0);
        CHECK(rep.lower_violations == 0);
        CHECK(rep.upper_violations == 0);
        CHECK(rep.lower_checked > 0);
        CHECK(rep.upper_checked > 0);
        CHECK(rep.skipped > 0);  // samples past t(delta,eps) fall outside both windows
        CHECK(rep.worst_lower_margin > 0.0);
        CHECK(rep.worst_upper_margin > 0.0);
    }
    SUBCASE("degenerate eta = 0 lower bound never fires") {
        const BoundEnvelope env = make_envelope(G, kP1Window, kTstar, 0.0, 0.05, 0.02);
        const Trajectory traj = integrate(kP1, kP1Window, 0.02);
        const SandwichReport rep = verify_sandwich(traj, env, G, kP1Window.y0);
        CHECK(rep.lower_violations == 0);
    }
}
