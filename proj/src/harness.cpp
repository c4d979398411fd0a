#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "numerics.hpp"

namespace canard {

using json = nlohmann::ordered_json;

namespace {

double require_number(const json& j, const std::string& field) {
    if (!j.contains(field))
        fail(errc::validation_error, "config: missing field \"" + field + "\"");
    const auto& v = j.at(field);
    if (!v.is_number())
        fail(errc::validation_error, "config: field \"" + field + "\" must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        fail(errc::validation_error, "config: field \"" + field + "\" must be finite");
    return d;
}

double optional_number(const json& j, const std::string& field, double fallback) {
    return j.contains(field) ? require_number(j, field) : fallback;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::internal_error, "cannot open " + path + " for writing");
    out << content;
}

std::string output_path(const std::string& out_dir, const char* name) {
    std::filesystem::create_directories(out_dir);
    return (std::filesystem::path(out_dir) / name).string();
}

json config_json(const RunConfig& c) {
    json j;
    j["coefficients"] = {{"A", c.coeffs.A}, {"B", c.coeffs.B}, {"C", c.coeffs.C},
                         {"D", c.coeffs.D}, {"E", c.coeffs.E}, {"F", c.coeffs.F}};
    j["window"] = {{"t0", c.window.t0}, {"T", c.window.T}, {"x0", c.window.x0},
                   {"y0", c.window.y0}, {"M", c.window.M}, {"N", c.window.N}};
    j["epsilons"] = c.epsilons;
    j["solver"] = {{"rel_tol", c.solver.rel_tol},
                   {"abs_tol", c.solver.abs_tol},
                   {"max_step", c.solver.max_step},
                   {"min_step", c.solver.min_step},
                   {"use_log_fast_variable", c.solver.use_log_fast_variable}};
    j["theta"] = c.theta;
    j["delta"] = c.delta;
    j["eta"] = c.eta;
    if (c.epsilon) j["epsilon"] = *c.epsilon;
    return j;
}

json report_header(const RunConfig& config) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = config_json(config);
    return j;
}

/// Reduced solution along the y = 0 branch.
ReducedSolution zero_branch_solution(const RunConfig& c) {
    return reduced_solution(c.coeffs.A, c.coeffs.B, c.window.x0, c.window.t0);
}

}  // namespace

RunConfig load_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::parse_error, std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) fail(errc::parse_error, "config must be a JSON object");

    RunConfig c;
    if (!j.contains("coefficients") || !j.at("coefficients").is_object())
        fail(errc::validation_error, "config: missing object \"coefficients\"");
    if (!j.contains("window") || !j.at("window").is_object())
        fail(errc::validation_error, "config: missing object \"window\"");
    const json& jc = j.at("coefficients");
    const json& jw = j.at("window");
    c.coeffs = {require_number(jc, "A"), require_number(jc, "B"), require_number(jc, "C"),
                require_number(jc, "D"), require_number(jc, "E"), require_number(jc, "F")};
    c.window = {require_number(jw, "t0"), require_number(jw, "T"), require_number(jw, "x0"),
                require_number(jw, "y0"), require_number(jw, "M"), require_number(jw, "N")};
    try {
        validate(c.coeffs, c.window);
    } catch (const error& e) {
        fail(errc::validation_error, std::string("config: ") + e.what());
    }

    if (!j.contains("epsilons") || !j.at("epsilons").is_array() || j.at("epsilons").empty())
        fail(errc::validation_error, "config: \"epsilons\" must be a nonempty array");
    for (const auto& v : j.at("epsilons")) {
        if (!v.is_number()) fail(errc::validation_error, "config: \"epsilons\" entries must be numbers");
        c.epsilons.push_back(v.get<double>());
    }
    for (size_t i = 0; i < c.epsilons.size(); ++i) {
        if (!(c.epsilons[i] > 0.0) || !(c.epsilons[i] <= 0.2))
            fail(errc::validation_error, "config: \"epsilons\" values must lie in (0, 0.2]");
        if (i > 0 && !(c.epsilons[i] < c.epsilons[i - 1]))
            fail(errc::validation_error, "config: \"epsilons\" must be strictly decreasing");
    }

    if (j.contains("solver")) {
        const json& js = j.at("solver");
        c.solver.rel_tol = optional_number(js, "rel_tol", c.solver.rel_tol);
        c.solver.abs_tol = optional_number(js, "abs_tol", c.solver.abs_tol);
        c.solver.max_step = optional_number(js, "max_step", c.solver.max_step);
        c.solver.min_step = optional_number(js, "min_step", c.solver.min_step);
        if (js.contains("use_log_fast_variable")) {
            if (!js.at("use_log_fast_variable").is_boolean())
                fail(errc::validation_error,
                     "config: \"use_log_fast_variable\" must be a boolean");
            c.solver.use_log_fast_variable = js.at("use_log_fast_variable").get<bool>();
        }
        if (!(c.solver.rel_tol > 0.0) || !(c.solver.abs_tol > 0.0))
            fail(errc::validation_error, "config: solver tolerances must be positive");
        if (c.solver.max_step < 0.0 || !(c.solver.min_step > 0.0))
            fail(errc::validation_error, "config: solver steps must be positive");
    }

    c.theta = optional_number(j, "theta", 0.5);
    if (!(c.theta > 0.0 && c.theta < 1.0))
        fail(errc::validation_error, "config: \"theta\" must lie in (0,1)");
    c.delta = optional_number(j, "delta", 0.05);
    if (c.delta < 0.0) fail(errc::validation_error, "config: \"delta\" must be >= 0");
    const double k = curvature_constant(c.coeffs);
    c.eta = optional_number(j, "eta", std::min(0.02, c.delta / k));
    if (c.eta < 0.0) fail(errc::validation_error, "config: \"eta\" must be >= 0");
    if (c.eta * k > c.delta)
        fail(errc::validation_error, "config: \"eta\" must satisfy eta <= delta/k");
    if (j.contains("epsilon")) {
        const double e = require_number(j, "epsilon");
        if (!(e > 0.0) || !(e <= 0.2))
            fail(errc::validation_error, "config: \"epsilon\" must lie in (0, 0.2]");
        c.epsilon = e;
    }
    if (j.contains("out_dir")) {
        if (!j.at("out_dir").is_string())
            fail(errc::validation_error, "config: \"out_dir\" must be a string");
        c.out_dir = j.at("out_dir").get<std::string>();
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::parse_error, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_config_text(buf.str());
}

std::string config_echo(const RunConfig& config) { return config_json(config).dump(); }

ClassifyResult run_classify(const RunConfig& config, const std::string& out_dir) {
    const CaseLabel label = classify(config.coeffs, config.window);
    std::string line = std::string(to_string(label.case_tag)) + " / " +
                       to_string(label.switch_kind);
    if (label.canonical_form != CanonicalForm::None)
        line += std::string(" / ") + to_string(label.canonical_form);

    json j = report_header(config);
    j["case_tag"] = to_string(label.case_tag);
    j["switch_kind"] = to_string(label.switch_kind);
    j["canonical_form"] = to_string(label.canonical_form);
    write_file(output_path(out_dir, "classify.json"), j.dump(2) + "\n");
    return {label, line};
}

AnalyzeResult run_analyze(const RunConfig& config, const std::string& out_dir) {
    const CaseLabel label = classify(config.coeffs, config.window);
    const ReducedSolution xbar = zero_branch_solution(config);

    AnalyzeResult result;
    result.label = label;
    result.blowup_time = xbar.blowup_time;

    std::optional<double> insert_tc, insert_root;
    if (label.delayed()) {
        const double t_c = crossing_time(xbar, config.coeffs.psi(), config.window.T);
        const double t_star = exit_time(config.coeffs, xbar, t_c, config.window.T);
        result.t_c = t_c;
        result.t_star = t_star;
        insert_tc = t_c;
        insert_root = t_star;
    } else if (label.immediate()) {
        const auto [lin, quad] = phi_constrained_field(config.coeffs);
        const ReducedSolution xphi =
            reduced_solution(lin, quad, config.window.x0, config.window.t0);
        result.t_c = crossing_time(xphi, config.coeffs.psi(), config.window.T);
        insert_tc = result.t_c;
        // The entry-exit function along x-bar still has its own root (assumption
        // (a8)); keep it on the grid when it exists.
        try {
            const double tcx = crossing_time(xbar, config.coeffs.psi(), config.window.T);
            insert_root = exit_time(config.coeffs, xbar, tcx, config.window.T);
        } catch (const error&) {
        }
    } else {
        result.reason = std::string("no switch predicted: ") + to_string(label.case_tag) +
                        " / " + to_string(label.switch_kind);
    }

    const EntryExitProfile profile =
        entry_exit_profile(config.coeffs, xbar, config.window.T, insert_tc, insert_root);
    if (label.delayed()) result.g_min = profile.g_min;

    std::string csv = "t,G\n";
    for (const auto& [t, g] : profile.samples)
        csv += format_double(t) + "," + format_double(g) + "\n";
    write_file(output_path(out_dir, "g_profile.csv"), csv);
    result.csv_rows = profile.samples.size();

    json j = report_header(config);
    j["case_tag"] = to_string(label.case_tag);
    j["switch_kind"] = to_string(label.switch_kind);
    j["canonical_form"] = to_string(label.canonical_form);
    j["t_c"] = result.t_c ? json(*result.t_c) : json(nullptr);
    if (label.delayed()) {
        j["t_star"] = *result.t_star;
        j["G_min"] = *result.g_min;
    }
    j["blowup_time"] = result.blowup_time ? json(*result.blowup_time) : json(nullptr);
    if (!result.reason.empty()) j["reason"] = result.reason;
    write_file(output_path(out_dir, "analysis.json"), j.dump(2) + "\n");
    return result;
}

Trajectory run_simulate(const RunConfig& config, double epsilon, const std::string& out_dir) {
    const CaseLabel label = classify(config.coeffs, config.window);
    const Trajectory traj = integrate(config.coeffs, config.window, epsilon, config.solver);

    std::string csv = "t,x,y,w\n";
    for (const auto& s : traj.samples)
        csv += format_double(s.t) + "," + format_double(s.x) + "," + format_double(s.y) +
               "," + format_double(s.w) + "\n";
    write_file(output_path(out_dir, "trajectory.csv"), csv);

    if (label.delayed() || label.immediate()) {
        const CompositeLimit limit = composite_limit(config.coeffs, config.window, label);
        std::vector<double> ts;
        const int n = 1000;
        ts.reserve(n + 2);
        for (int i = 0; i <= n; ++i)
            ts.push_back(config.window.t0 +
                         (config.window.T - config.window.t0) * static_cast<double>(i) / n);
        ts.push_back(limit.switch_time);
        std::sort(ts.begin(), ts.end());
        std::string limit_csv = "t,x_lim,y_lim\n";
        for (double t : ts) {
            // A post-switch flow may blow up inside the window; the limit simply
            // ends there.
            try {
                limit_csv += format_double(t) + "," + format_double(limit.x(t)) + "," +
                             format_double(limit.y(t)) + "\n";
            } catch (const error& e) {
                if (e.code() != errc::out_of_domain) throw;
                break;
            }
        }
        write_file(output_path(out_dir, "composite_limit.csv"), limit_csv);
    }
    return traj;
}

SweepFileResult run_sweep(const RunConfig& config, const std::string& out_dir) {
    const CaseLabel label = classify(config.coeffs, config.window);
    SweepResult result =
        sweep(config.coeffs, config.window, label, config.epsilons, config.solver, config.theta);

    std::string csv = "epsilon,t_sw,predicted,abs_error\n";
    for (const auto& obs : result.observations)
        csv += format_double(obs.epsilon) + "," + format_double(obs.t_sw) + "," +
               format_double(obs.predicted) + "," + format_double(obs.abs_error) + "\n";
    const std::string csv_path = output_path(out_dir, "convergence.csv");
    write_file(csv_path, csv);

    json j = report_header(config);
    j["predicted"] = result.predicted;
    j["slack"] = result.summary.slack;
    j["trend_ok"] = result.summary.trend_ok;
    j["all_detected"] = result.summary.all_detected;
    j["final_abs_error"] = result.summary.final_abs_error;
    json obs_list = json::array();
    for (const auto& obs : result.observations) {
        json o;
        o["epsilon"] = obs.epsilon;
        o["t_sw"] = std::isnan(obs.t_sw) ? json(nullptr) : json(obs.t_sw);
        o["abs_error"] = std::isnan(obs.abs_error) ? json(nullptr) : json(obs.abs_error);
        o["detection_mode"] = to_string(obs.detection_mode);
        obs_list.push_back(std::move(o));
    }
    j["observations"] = std::move(obs_list);
    write_file(output_path(out_dir, "sweep_summary.json"), j.dump(2) + "\n");
    return {std::move(result), csv_path};
}

VerifyResult run_verify(const RunConfig& config, const std::string& out_dir) {
    const CaseLabel label = classify(config.coeffs, config.window);
    VerifyResult result;
    result.assumptions = check_assumptions(config.coeffs, config.window);

    json j = report_header(config);
    j["case_tag"] = to_string(label.case_tag);
    j["switch_kind"] = to_string(label.switch_kind);

    json assum = json::array();
    for (const auto& e : result.assumptions.entries) {
        assum.push_back(
            {{"id", e.id}, {"pass", e.pass}, {"witness", e.witness}, {"note", e.note}});
    }
    j["assumptions"] = std::move(assum);

    bool all_pass = result.assumptions.all_pass();
    const ReducedSolution xbar = zero_branch_solution(config);

    // Oracle cross-check: quadrature against the closed-form antiderivative.
    {
        double grid_end = xbar.end_time(config.window.T);
        if (xbar.blowup_time && *xbar.blowup_time <= config.window.T)
            grid_end = config.window.t0 + (grid_end - config.window.t0) * (1.0 - 1e-6);
        double max_diff = 0.0;
        for (int i = 0; i <= 99; ++i) {
            const double t =
                config.window.t0 + (grid_end - config.window.t0) * static_cast<double>(i) / 99.0;
            const double diff = std::abs(entry_exit_G_closed(config.coeffs, xbar, t) -
                                         entry_exit_G_quadrature(config.coeffs, xbar, t));
            max_diff = std::max(max_diff, diff);
        }
        const bool pass = max_diff < 1e-8;
        all_pass = all_pass && pass;
        j["oracle_quadrature_vs_closed"] = {{"pass", pass}, {"max_abs_diff", max_diff},
                                            {"tolerance", 1e-8}, {"sample_points", 100}};
    }

    // Oracle cross-check: closed-form crossing time against plain bisection.
    {
        json entry;
        try {
            const double closed = crossing_time(xbar, config.coeffs.psi(), config.window.T);
            const double bis =
                crossing_time_bisection(xbar, config.coeffs.psi(), config.window.T);
            const double diff = std::abs(closed - bis);
            const bool pass = diff < 1e-10;
            all_pass = all_pass && pass;
            entry = {{"pass", pass}, {"applicable", true}, {"abs_diff", diff},
                     {"tolerance", 1e-10}};
        } catch (const error& e) {
            entry = {{"pass", true}, {"applicable", false}, {"note", e.what()}};
        }
        j["oracle_crossing_bisection"] = std::move(entry);
    }

    // Exit-root residual and sandwich verification apply to delayed systems.
    if (label.delayed()) {
        try {
            const double t_c = crossing_time(xbar, config.coeffs.psi(), config.window.T);
            const double t_star = exit_time(config.coeffs, xbar, t_c, config.window.T);
            const double residual = std::abs(entry_exit_G(config.coeffs, xbar, t_star));
            const bool res_pass = residual < 1e-10;
            all_pass = all_pass && res_pass;
            j["oracle_exit_root_residual"] = {{"pass", res_pass}, {"abs_residual", residual},
                                              {"tolerance", 1e-10}};

            const GFunction G{config.coeffs, xbar};
            json sandwich = json::array();
            for (double eps : config.epsilons) {
                const BoundEnvelope env = make_envelope(G, config.window, t_star, config.eta,
                                                        config.delta, eps);
                const Trajectory traj =
                    integrate(config.coeffs, config.window, eps, config.solver);
                const SandwichReport rep = verify_sandwich(traj, env, G, config.window.y0);
                const bool pass = rep.lower_violations == 0 && rep.upper_violations == 0;
                all_pass = all_pass && pass;
                sandwich.push_back({{"epsilon", eps},
                                    {"pass", pass},
                                    {"t_delta_eps", env.t_delta_eps},
                                    {"lower_checked", rep.lower_checked},
                                    {"lower_violations", rep.lower_violations},
                                    {"upper_checked", rep.upper_checked},
                                    {"upper_violations", rep.upper_violations},
                                    {"skipped", rep.skipped},
                                    {"worst_lower_margin", rep.worst_lower_margin},
                                    {"worst_upper_margin", rep.worst_upper_margin},
                                    {"kappa_hat", rep.kappa_hat}});
            }
            j["sandwich"] = std::move(sandwich);
        } catch (const error& e) {
            // The window does not realize the predicted switch (or the envelope is
            // inadmissible); the verdict records the failure instead of aborting.
            all_pass = false;
            j["sandwich"] = {{"applicable", true}, {"pass", false}, {"note", e.what()}};
        }
    } else {
        j["sandwich"] = {{"applicable", false},
                         {"note", "envelope comparison applies to delayed switches only"}};
    }

    j["all_pass"] = all_pass;
    result.all_pass = all_pass;
    result.verdict_path = output_path(out_dir, "verdict.json");
    write_file(result.verdict_path, j.dump(2) + "\n");
    return result;
}

}  // namespace canard
