#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "model.hpp"

using namespace canard;

namespace {

const QuadraticCoefficients kP1{1.0, 1.0, -1.0, -1.0, -1.0, 1.0};
const SimulationWindow kP1Window{0.0, 1.0, 0.5, 0.5, 10.0, 10.0};
const QuadraticCoefficients kP2{1.0, -1.0, -1.0, 1.0, -1.0, -2.0};
const SimulationWindow kP2Window{0.0, 5.0, 0.2, 0.5, 10.0, 10.0};

errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const error& e) {
        return e.code();
    }
    return errc::internal_error;
}

}  // namespace

TEST_CASE("validate accepts the reference system and names offending fields") {
    CHECK_NOTHROW(validate(kP1, kP1Window));

    QuadraticCoefficients zero = kP1;
    zero.A = 0.0;
    try {
        validate(zero, kP1Window);
        FAIL("expected ZeroCoefficient");
    } catch (const error& e) {
        CHECK(e.code() == errc::zero_coefficient);
        CHECK(std::string(e.what()).find("A") != std::string::npos);
    }

    SimulationWindow bad = kP1Window;
    bad.x0 = -0.1;
    CHECK(code_of([&] { validate(kP1, bad); }) == errc::bad_window);
    bad = kP1Window;
    bad.T = bad.t0;
    CHECK(code_of([&] { validate(kP1, bad); }) == errc::bad_window);
}

TEST_CASE("critical manifold geometry") {
    SUBCASE("Case 1b reference") {
        const CriticalManifold m = critical_manifold(kP1);
        CHECK(m.psi == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(m.phi_slope == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(m.phi_intercept == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(m.zero_branch_attracting(0.5));
        CHECK_FALSE(m.zero_branch_attracting(1.5));
        CHECK(m.phi_branch_attracting(1.5));
    }
    SUBCASE("Case 2b orientation") {
        const CriticalManifold m = critical_manifold({1.0, 1.0, 1.0, 1.0, -1.0, -2.0});
        CHECK(m.psi == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(m.phi(0.0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(m.phi_slope == doctest::Approx(-2.0).epsilon(1e-14));
        CHECK(m.phi_branch_attracting(0.25));
        CHECK_FALSE(m.phi_branch_attracting(0.75));
    }
    SUBCASE("psi outside the quadrant") {
        const CriticalManifold m = critical_manifold({1.0, 1.0, 1.0, 1.0, 1.0, 1.0});
        CHECK(m.psi == doctest::Approx(-1.0).epsilon(1e-14));
    }
}

TEST_CASE("classification of the named systems") {
    const CaseLabel p1 = classify(kP1, kP1Window);
    CHECK(p1.case_tag == CaseTag::Case1b);
    CHECK(p1.switch_kind == SwitchKind::DelayedAtTStar);
    CHECK(p1.canonical_form == CanonicalForm::FastPredatorA);

    const CaseLabel p2 = classify(kP2, kP2Window);
    CHECK(p2.case_tag == CaseTag::Case2b);
    CHECK(p2.switch_kind == SwitchKind::ImmediateAtTc);
    CHECK(p2.canonical_form == CanonicalForm::None);

    const CaseLabel ones =
        classify({1.0, 1.0, 1.0, 1.0, 1.0, 1.0}, {0.0, 1.0, 0.5, 0.5, 10.0, 10.0});
    CHECK(ones.case_tag == CaseTag::NotInQuadrant);
    CHECK(ones.switch_kind == SwitchKind::NoSwitch);
}

TEST_CASE("classification of the six canonical systems") {
    struct Row {
        QuadraticCoefficients c;
        double x0, T;
        CaseTag tag;
        CanonicalForm form;
    };
    const Row rows[] = {
        {{1.0, 1.0, -1.0, -1.0, -1.0, 1.0}, 0.5, 1.0, CaseTag::Case1b,
         CanonicalForm::FastPredatorA},
        {{1.0, -0.5, -1.0, -1.0, -1.0, 1.0}, 0.5, 3.0, CaseTag::Case1b,
         CanonicalForm::FastPredatorB},
        {{-1.0, 2.0, -1.0, -1.0, -1.0, 1.0}, 0.7, 1.1, CaseTag::Case1b,
         CanonicalForm::FastPredatorC},
        {{-1.0, -1.0, 1.0, 1.0, -1.0, -1.0}, 1.5, 1.0, CaseTag::Case2bDual,
         CanonicalForm::FastPreyA},
        {{0.5, -1.0, 1.0, 1.0, -1.0, -1.0}, 1.5, 2.5, CaseTag::Case2bDual,
         CanonicalForm::FastPreyB},
        {{-2.0, 1.0, 1.0, 1.0, -1.0, -1.0}, 1.5, 2.0, CaseTag::Case2bDual,
         CanonicalForm::FastPreyC},
    };
    for (const auto& row : rows) {
        const CaseLabel label =
            classify(row.c, {0.0, row.T, row.x0, 0.5, 10.0, 10.0});
        CAPTURE(to_string(row.form));
        CHECK(label.case_tag == row.tag);
        CHECK(label.switch_kind == SwitchKind::DelayedAtTStar);
        CHECK(label.canonical_form == row.form);
    }
}

TEST_CASE("out-of-scope and rejected classifications") {
    // E > 0 flips Case 1b/2b into the unstudied 1a/2a variants.
    const CaseLabel c1a =
        classify({1.0, 1.0, -1.0, -1.0, 1.0, 1.0}, {0.0, 1.0, 0.5, 0.5, 10.0, 10.0});
    CHECK(c1a.case_tag == CaseTag::Case1a);
    CHECK(c1a.switch_kind == SwitchKind::OutOfScope);
    const CaseLabel c2a =
        classify({1.0, -1.0, -1.0, 1.0, 1.0, -2.0}, {0.0, 5.0, 0.2, 0.5, 10.0, 10.0});
    CHECK(c2a.case_tag == CaseTag::Case2a);
    CHECK(c2a.switch_kind == SwitchKind::OutOfScope);

    // Violating -A < B d/f removes the immediate label.
    QuadraticCoefficients p2flip = kP2;
    p2flip.A = -1.0;
    const CaseLabel no_imm = classify(p2flip, kP2Window);
    CHECK(no_imm.switch_kind == SwitchKind::NoSwitch);

    // Violating C < 0 removes the delayed label.
    QuadraticCoefficients p1flip = kP1;
    p1flip.C = 1.0;
    const CaseLabel no_del = classify(p1flip, kP1Window);
    CHECK(no_del.switch_kind == SwitchKind::NoSwitch);
}

TEST_CASE("boundary parameter sets are refused") {
    SimulationWindow on_psi = kP1Window;
    on_psi.x0 = 1.0;  // exactly the crossing line
    CHECK(code_of([&] { classify(kP1, on_psi); }) == errc::degenerate_classification);

    // a/b equal to d/f makes the slow rate vanish at psi.
    const QuadraticCoefficients tie{1.0, -1.0, -1.0, -1.0, -1.0, 1.0};
    CHECK(code_of([&] { classify(tie, kP1Window); }) == errc::degenerate_classification);
}

TEST_CASE("assumption report for the reference systems") {
    const AssumptionReport rep = check_assumptions(kP1, kP1Window);
    CHECK(rep.all_pass());
    const AssumptionEntry* trans = rep.find("transversality");
    REQUIRE(trans != nullptr);
    CHECK(trans->witness == doctest::Approx(2.0).epsilon(1e-12));

    QuadraticCoefficients flipped = kP1;
    flipped.C = 1.0;
    const AssumptionReport repC = check_assumptions(flipped, kP1Window);
    const AssumptionEntry* a3 = repC.find("a3");
    REQUIRE(a3 != nullptr);
    CHECK_FALSE(a3->pass);
    CHECK(a3->witness < 0.0);

    flipped = kP1;
    flipped.E = 1.0;
    const AssumptionReport repE = check_assumptions(flipped, kP1Window);
    const AssumptionEntry* a9 = repE.find("a9");
    REQUIRE(a9 != nullptr);
    CHECK_FALSE(a9->pass);
    CHECK(a9->witness == doctest::Approx(-1.0).epsilon(1e-12));

    const AssumptionReport repP2 = check_assumptions(kP2, kP2Window);
    CHECK(repP2.all_pass());
}

TEST_CASE("duality substitution") {
    SUBCASE("fast part and initial condition of the displayed example") {
        // eps y' = y(1 - y - x), psi = 1, x0 = 1.5 -> y(-1 - y + z), z0 = 0.5
        const QuadraticCoefficients c{-1.0, -1.0, 1.0, 1.0, -1.0, -1.0};
        const SimulationWindow w{0.0, 1.0, 1.5, 0.5, 10.0, 10.0};
        const DualSystem dual = dual_transform(c, w);
        CHECK(dual.D == -1.0);
        CHECK(dual.E == -1.0);
        CHECK(dual.F == 1.0);
        CHECK(dual.window.x0 == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(fast_case_tag(dual.D, dual.E, dual.F) == CaseTag::Case1b);
        CHECK_FALSE(dual.slow.factored());
    }
    SUBCASE("Case 1b maps onto a Case 2b fast equation") {
        const QuadraticCoefficients c{1.0, 1.0, -1.0, -1.0, -1.0, 1.0};
        const SimulationWindow w{0.0, 1.0, 1.5, 0.5, 10.0, 10.0};
        const DualSystem dual = dual_transform(c, w);
        CHECK(dual.D == 1.0);
        CHECK(dual.E == -1.0);
        CHECK(dual.F == -1.0);
        CHECK(fast_case_tag(dual.D, dual.E, dual.F) == CaseTag::Case2b);
    }
    SUBCASE("not applicable outside the quadrant") {
        CHECK(code_of([&] {
                  dual_transform({1.0, 1.0, 1.0, 1.0, 1.0, 1.0},
                                 {0.0, 1.0, 0.5, 0.5, 10.0, 10.0});
              }) == errc::not_applicable);
    }
}

TEST_CASE("duality is an exact involution and matches the substitution algebraically") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    std::uniform_real_distribution<double> pos(0.1, 3.0);
    int tested = 0;
    while (tested < 500) {
        QuadraticCoefficients c{coef(rng), coef(rng), coef(rng),
                                pos(rng), coef(rng), -pos(rng)};
        if (c.A == 0.0 || c.B == 0.0 || c.C == 0.0 || c.E == 0.0) continue;
        SimulationWindow w{0.0, 1.0, pos(rng), pos(rng), 10.0, 10.0};
        const DualSystem dual = dual_transform(c, w);
        const auto [back, back_w] = dual_transform(dual);
        CHECK(back.A == c.A);
        CHECK(back.B == c.B);
        CHECK(back.C == c.C);
        CHECK(back.D == c.D);
        CHECK(back.E == c.E);
        CHECK(back.F == c.F);
        CHECK(back_w.x0 == w.x0);

        // z' = -x'(2psi - z): the transformed slow field is the pushforward.
        const double z = pos(rng), y = pos(rng);
        const double x = 2.0 * c.psi() - z;
        const double fx = x * (c.A + c.B * x + c.C * y);
        const double fz = dual.slow(z, y);
        CHECK(fz == doctest::Approx(-fx).epsilon(1e-11));

        // The dual fast equation at z equals the source fast rate at x.
        const double gy_src = c.D + c.E * y + c.F * x;
        const double gy_dual = dual.D + dual.E * y + dual.F * z;
        CHECK(gy_dual == doctest::Approx(gy_src).epsilon(1e-11));
        ++tested;
    }
}

TEST_CASE("phi vanishes on the crossing line to machine precision") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> mag(0.1, 5.0);
    std::bernoulli_distribution sign(0.5);
    for (int i = 0; i < 1000; ++i) {
        const double d = mag(rng), f = mag(rng), e = mag(rng);
        const bool case1 = sign(rng);
        QuadraticCoefficients c{1.0, 1.0, -1.0,
                                case1 ? -d : d, sign(rng) ? -e : e, case1 ? f : -f};
        const CriticalManifold m = critical_manifold(c);
        CHECK(std::abs(m.phi(m.psi)) <= 1e-12 * std::max(1.0, std::abs(m.phi_intercept)));
    }
}

TEST_CASE("quadratic family identity g - g_y(.,0) y = E y^2") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> mag(0.05, 5.0);
    std::uniform_real_distribution<double> xy(0.0, 10.0);
    for (int i = 0; i < 10000; ++i) {
        const double D = mag(rng), F = -mag(rng), E = -mag(rng);
        const double x = xy(rng), y = xy(rng);
        const double g = y * (D + E * y + F * x);
        const double linearized = (D + F * x) * y;
        const double residual = g - linearized;
        const double expected = E * y * y;
        CHECK(std::abs(residual - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
        CHECK(residual <= 1e-12 * std::max(1.0, std::abs(expected)));  // E < 0
    }
}

TEST_CASE("branch stabilities are opposite on both sides of psi") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> mag(0.1, 4.0);
    std::uniform_real_distribution<double> frac(0.01, 0.99);
    for (int trial = 0; trial < 20; ++trial) {
        const bool case1 = trial % 2 == 0;
        const QuadraticCoefficients c{1.0, 1.0, -1.0, case1 ? -mag(rng) : mag(rng),
                                      -mag(rng), case1 ? mag(rng) : -mag(rng)};
        const CriticalManifold m = critical_manifold(c);
        REQUIRE(m.psi > 0.0);
        for (int i = 0; i < 50; ++i) {
            const double below = m.psi * frac(rng);
            const double above = m.psi * (1.0 + frac(rng));
            for (double x : {below, above}) {
                const double gz = m.g_y_on_zero_branch(x);
                const double gphi = c.D + 2.0 * c.E * m.phi(x) + c.F * x;
                CHECK(gz * gphi < 0.0);
                CHECK(gphi == doctest::Approx(m.g_y_on_phi_branch(x)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("classification is deterministic and pairs delayed with a canonical form") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> pos(0.05, 3.0);
    int classified = 0;
    for (int i = 0; i < 5000 && classified < 2000; ++i) {
        const QuadraticCoefficients c{coef(rng), coef(rng), coef(rng),
                                      coef(rng), coef(rng), coef(rng)};
        const SimulationWindow w{0.0, 2.0, pos(rng), pos(rng), 10.0, 10.0};
        if (c.A == 0.0 || c.B == 0.0 || c.C == 0.0 || c.D == 0.0 || c.E == 0.0 || c.F == 0.0)
            continue;
        try {
            const CaseLabel first = classify(c, w);
            const CaseLabel second = classify(c, w);
            CHECK(first.case_tag == second.case_tag);
            CHECK(first.switch_kind == second.switch_kind);
            CHECK(first.canonical_form == second.canonical_form);
            CHECK(first.delayed() == (first.canonical_form != CanonicalForm::None));
            if (first.case_tag == CaseTag::Case1a || first.case_tag == CaseTag::Case2a)
                CHECK(first.switch_kind == SwitchKind::OutOfScope);
            ++classified;
        } catch (const error& e) {
            CHECK(e.code() == errc::degenerate_classification);
        }
    }
    CHECK(classified >= 2000);
}
