#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "harness.hpp"

using namespace canard;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("canard_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string config_path(const char* name) {
    return std::string(CANARD_CONFIG_DIR) + "/" + name;
}

const char* kMinimal = R"({
  "coefficients": {"A": 1, "B": 1, "C": -1, "D": -1, "E": -1, "F": 1},
  "window": {"t0": 0, "T": 1, "x0": 0.5, "y0": 0.5, "M": 10, "N": 10},
  "epsilons": [0.05]
})";

}  // namespace

TEST_CASE("config loading applies defaults and validates fields") {
    SUBCASE("minimal config gets the documented defaults") {
        const RunConfig c = load_config_text(kMinimal);
        CHECK(c.theta == 0.5);
        CHECK(c.delta == 0.05);
        CHECK(c.eta == 0.02);  // min(0.02, delta/k) with k = 2
        CHECK(c.solver.rel_tol == 1e-8);
        CHECK(c.solver.use_log_fast_variable);
        CHECK_FALSE(c.epsilon.has_value());
    }
    SUBCASE("non-decreasing eps ladder is rejected by name") {
        std::string text = kMinimal;
        text.replace(text.find("[0.05]"), 6, "[0.01, 0.05]");
        try {
            (void)load_config_text(text);
            FAIL("expected ValidationError");
        } catch (const error& e) {
            CHECK(e.code() == errc::validation_error);
            CHECK(std::string(e.what()).find("epsilons") != std::string::npos);
        }
    }
    SUBCASE("zero coefficient is rejected by name") {
        std::string text = kMinimal;
        text.replace(text.find("\"A\": 1"), 6, "\"A\": 0");
        try {
            (void)load_config_text(text);
            FAIL("expected ValidationError");
        } catch (const error& e) {
            CHECK(e.code() == errc::validation_error);
            CHECK(std::string(e.what()).find("A") != std::string::npos);
        }
    }
    SUBCASE("malformed JSON raises ParseError") {
        try {
            (void)load_config_text("{ not json");
            FAIL("expected ParseError");
        } catch (const error& e) {
            CHECK(e.code() == errc::parse_error);
        }
    }
}

TEST_CASE("analyze writes the profile and the analytic anchors") {
    const RunConfig config = load_config(config_path("fast_predator_a.json"));
    const std::string dir = temp_dir("analyze_p1");
    const AnalyzeResult r = run_analyze(config, dir);
    REQUIRE(r.t_c.has_value());
    REQUIRE(r.t_star.has_value());
    CHECK(*r.t_c == doctest::Approx(std::log(1.5)).epsilon(1e-8));
    CHECK(*r.t_star == doctest::Approx(std::log(2.0)).epsilon(1e-8));
    REQUIRE(r.g_min.has_value());
    CHECK(*r.g_min == doctest::Approx(-std::log(1.125)).epsilon(1e-8));
    REQUIRE(r.blowup_time.has_value());
    CHECK(*r.blowup_time == doctest::Approx(std::log(3.0)).epsilon(1e-10));
    CHECK(r.csv_rows == 1003);

    const std::string csv = slurp(dir + "/g_profile.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1004);  // header + 1003 rows

    const json j = json::parse(slurp(dir + "/analysis.json"));
    CHECK(j.at("schema_version") == kSchemaVersion);
    CHECK(j.at("config").at("coefficients").at("A") == 1.0);
    CHECK(j.at("t_star").get<double>() == doctest::Approx(std::log(2.0)).epsilon(1e-8));
}

TEST_CASE("analyze on the immediate system omits t_star") {
    const RunConfig config = load_config(config_path("case2b_immediate.json"));
    const std::string dir = temp_dir("analyze_p2");
    const AnalyzeResult r = run_analyze(config, dir);
    REQUIRE(r.t_c.has_value());
    CHECK(*r.t_c == doctest::Approx(3.0).epsilon(1e-10));
    CHECK_FALSE(r.t_star.has_value());
    const json j = json::parse(slurp(dir + "/analysis.json"));
    CHECK(j.at("t_c").get<double>() == doctest::Approx(3.0).epsilon(1e-10));
    CHECK_FALSE(j.contains("t_star"));
}

TEST_CASE("analyze on a no-switch system reports nulls and a reason") {
    std::string text = kMinimal;
    // all-positive coefficients: the manifolds never cross inside the quadrant
    text.replace(text.find("\"C\": -1"), 7, "\"C\": 1");
    text.replace(text.find("\"D\": -1"), 7, "\"D\": 1");
    text.replace(text.find("\"E\": -1"), 7, "\"E\": 1");
    const RunConfig config = load_config_text(text);
    const std::string dir = temp_dir("analyze_noswitch");
    const AnalyzeResult r = run_analyze(config, dir);
    CHECK_FALSE(r.t_c.has_value());
    CHECK_FALSE(r.reason.empty());
    const json j = json::parse(slurp(dir + "/analysis.json"));
    CHECK(j.at("t_c").is_null());
    CHECK(j.contains("reason"));
}

TEST_CASE("simulate writes overlay-ready trajectory and composite files") {
    const RunConfig config = load_config(config_path("fast_predator_a.json"));
    const std::string dir = temp_dir("simulate_p1");
    const Trajectory traj = run_simulate(config, 0.05, dir);
    CHECK(traj.termination == Termination::ReachedT);
    const std::string tcsv = slurp(dir + "/trajectory.csv");
    CHECK(tcsv.rfind("t,x,y,w\n", 0) == 0);
    const std::string ccsv = slurp(dir + "/composite_limit.csv");
    CHECK(ccsv.rfind("t,x_lim,y_lim\n", 0) == 0);
    CHECK(std::count(ccsv.begin(), ccsv.end(), '\n') == 1003);  // header + 1002 rows
}

TEST_CASE("simulated orbits show the expected switch shapes") {
    SUBCASE("delayed: y dips deep between t_c and t*, then rises to phi") {
        const RunConfig config = load_config(config_path("fast_predator_a.json"));
        const Trajectory traj = run_simulate(config, 0.05, temp_dir("shape_p1"));
        const double t_c = std::log(1.5), t_star = std::log(2.0);
        double dip = 1e9;
        for (const auto& s : traj.samples)
            if (s.t > t_c && s.t < t_star) dip = std::min(dip, s.y);
        CHECK(dip < 0.1 * config.window.y0);
        const auto& last = traj.samples.back();
        CHECK(last.y > 1.0);  // near phi(x(T)) = x - 1 with x ~ 3
        CHECK(std::abs(last.y - (last.x - 1.0)) < 0.2);
    }
    SUBCASE("immediate: y tracks phi, then decays after x crosses psi") {
        const RunConfig config = load_config(config_path("case2b_immediate.json"));
        const Trajectory traj = run_simulate(config, 0.05, temp_dir("shape_p2"));
        const CaseLabel label = classify(config.coeffs, config.window);
        const CompositeLimit limit = composite_limit(config.coeffs, config.window, label);
        for (const auto& s : traj.samples) {
            if (s.t > 1.0 && s.t < 2.5) CHECK(std::abs(s.y - limit.y(s.t)) < 0.1);
            if (s.t > 4.0) CHECK(s.y < 0.05);
        }
    }
}

TEST_CASE("sweep output is byte-deterministic") {
    RunConfig config = load_config(config_path("fast_predator_a.json"));
    config.epsilons = {0.1, 0.05};  // keep the unit test quick
    const std::string dir1 = temp_dir("sweep_a");
    const std::string dir2 = temp_dir("sweep_b");
    (void)run_sweep(config, dir1);
    (void)run_sweep(config, dir2);
    CHECK(slurp(dir1 + "/convergence.csv") == slurp(dir2 + "/convergence.csv"));
    CHECK(slurp(dir1 + "/sweep_summary.json") == slurp(dir2 + "/sweep_summary.json"));
    const std::string csv = slurp(dir1 + "/convergence.csv");
    CHECK(csv.rfind("epsilon,t_sw,predicted,abs_error\n", 0) == 0);
}

TEST_CASE("verify verdicts") {
    SUBCASE("reference delayed system passes everything") {
        RunConfig config = load_config(config_path("fast_predator_a.json"));
        config.epsilons = {0.05, 0.02};
        const std::string dir = temp_dir("verify_p1");
        const VerifyResult r = run_verify(config, dir);
        CHECK(r.all_pass);
        CHECK(r.assumptions.all_pass());
        const json j = json::parse(slurp(dir + "/verdict.json"));
        CHECK(j.at("all_pass") == true);
        CHECK(j.at("oracle_quadrature_vs_closed").at("pass") == true);
        CHECK(j.at("sandwich").size() == 2);
    }
    SUBCASE("flipping E breaks (a9)") {
        RunConfig config = load_config(config_path("fast_predator_a.json"));
        config.coeffs.E = 1.0;
        config.epsilons = {0.05};
        const VerifyResult r = run_verify(config, temp_dir("verify_e"));
        CHECK_FALSE(r.all_pass);
        const AssumptionEntry* a9 = r.assumptions.find("a9");
        REQUIRE(a9 != nullptr);
        CHECK_FALSE(a9->pass);
    }
    SUBCASE("window ending before t* breaks (a8)") {
        RunConfig config = load_config(config_path("fast_predator_a.json"));
        config.window.T = 0.6;
        config.epsilons = {0.05};
        const VerifyResult r = run_verify(config, temp_dir("verify_t"));
        CHECK_FALSE(r.all_pass);
        const AssumptionEntry* a8 = r.assumptions.find("a8");
        REQUIRE(a8 != nullptr);
        CHECK_FALSE(a8->pass);
    }
}
