#include "canard.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "harness.hpp"

using namespace canard;

namespace {

thread_local std::string g_last_error;

canard_status status_of(errc c) {
    switch (c) {
        case errc::zero_coefficient: return CANARD_ERR_ZERO_COEFFICIENT;
        case errc::bad_window: return CANARD_ERR_BAD_WINDOW;
        case errc::degenerate_classification: return CANARD_ERR_DEGENERATE_CLASSIFICATION;
        case errc::no_crossing: return CANARD_ERR_NO_CROSSING;
        case errc::no_exit_before_t: return CANARD_ERR_NO_EXIT_BEFORE_T;
        case errc::out_of_domain: return CANARD_ERR_OUT_OF_DOMAIN;
        case errc::invalid_epsilon: return CANARD_ERR_INVALID_EPSILON;
        case errc::not_applicable: return CANARD_ERR_NOT_APPLICABLE;
        case errc::admissibility_violated: return CANARD_ERR_ADMISSIBILITY;
        case errc::no_root_before_t: return CANARD_ERR_NO_ROOT_BEFORE_T;
        case errc::parse_error: return CANARD_ERR_PARSE;
        case errc::validation_error: return CANARD_ERR_VALIDATION;
        case errc::usage_error: return CANARD_ERR_USAGE;
        case errc::internal_error: return CANARD_ERR_INTERNAL;
    }
    return CANARD_ERR_INTERNAL;
}

template <class Fn>
canard_status guarded(Fn&& fn) {
    try {
        fn();
        return CANARD_OK;
    } catch (const error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return CANARD_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CANARD_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct canard_system {
    QuadraticCoefficients coeffs;
    SimulationWindow window;
};

struct canard_analysis {
    QuadraticCoefficients coeffs;
    SimulationWindow window;
    ReducedSolution xbar;
    std::optional<double> t_c;
    std::optional<double> t_star;
    std::optional<CompositeLimit> limit;
};

struct canard_trajectory {
    Trajectory traj;
};

extern "C" {

const char* canard_version(void) { return "1.0.0"; }

const char* canard_status_name(canard_status s) {
    switch (s) {
        case CANARD_OK: return "OK";
        case CANARD_ERR_ZERO_COEFFICIENT: return "ZeroCoefficient";
        case CANARD_ERR_BAD_WINDOW: return "BadWindow";
        case CANARD_ERR_DEGENERATE_CLASSIFICATION: return "DegenerateClassification";
        case CANARD_ERR_NO_CROSSING: return "NoCrossing";
        case CANARD_ERR_NO_EXIT_BEFORE_T: return "NoExitBeforeT";
        case CANARD_ERR_OUT_OF_DOMAIN: return "OutOfDomain";
        case CANARD_ERR_INVALID_EPSILON: return "InvalidEpsilon";
        case CANARD_ERR_NOT_APPLICABLE: return "NotApplicable";
        case CANARD_ERR_ADMISSIBILITY: return "AdmissibilityViolated";
        case CANARD_ERR_NO_ROOT_BEFORE_T: return "NoRootBeforeT";
        case CANARD_ERR_PARSE: return "ParseError";
        case CANARD_ERR_VALIDATION: return "ValidationError";
        case CANARD_ERR_USAGE: return "UsageError";
        case CANARD_ERR_VERIFICATION_FAILED: return "VerificationFailed";
        case CANARD_ERR_INTERNAL: return "InternalError";
    }
    return "UnknownStatus";
}

const char* canard_last_error(void) { return g_last_error.c_str(); }

void canard_string_free(char* s) { std::free(s); }

void canard_solver_options_default(canard_solver_options* opts) {
    if (!opts) return;
    const SolverOptions d;
    opts->rel_tol = d.rel_tol;
    opts->abs_tol = d.abs_tol;
    opts->max_step = d.max_step;
    opts->min_step = d.min_step;
    opts->use_log_fast_variable = d.use_log_fast_variable ? 1 : 0;
}

canard_status canard_system_create(const double coeffs[6], const double window[6],
                                   canard_system** out) {
    if (!coeffs || !window || !out) {
        g_last_error = "null argument";
        return CANARD_ERR_USAGE;
    }
    *out = nullptr;
    return guarded([&] {
        canard_system sys;
        sys.coeffs = {coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4], coeffs[5]};
        sys.window = {window[0], window[1], window[2], window[3], window[4], window[5]};
        validate(sys.coeffs, sys.window);
        *out = new canard_system(sys);
    });
}

void canard_system_free(canard_system* sys) { delete sys; }

canard_status canard_system_classify(const canard_system* sys, int* case_tag,
                                     int* switch_kind, int* canonical_form) {
    if (!sys) {
        g_last_error = "null system";
        return CANARD_ERR_USAGE;
    }
    return guarded([&] {
        const CaseLabel label = classify(sys->coeffs, sys->window);
        if (case_tag) *case_tag = static_cast<int>(label.case_tag);
        if (switch_kind) *switch_kind = static_cast<int>(label.switch_kind);
        if (canonical_form) *canonical_form = static_cast<int>(label.canonical_form);
    });
}

const char* canard_case_tag_name(int case_tag) {
    return to_string(static_cast<CaseTag>(case_tag));
}
const char* canard_switch_kind_name(int switch_kind) {
    return to_string(static_cast<SwitchKind>(switch_kind));
}
const char* canard_canonical_form_name(int canonical_form) {
    return to_string(static_cast<CanonicalForm>(canonical_form));
}

canard_status canard_system_manifold(const canard_system* sys, double* psi, double* phi_slope,
                                     double* phi_intercept) {
    if (!sys) {
        g_last_error = "null system";
        return CANARD_ERR_USAGE;
    }
    return guarded([&] {
        const CriticalManifold m = critical_manifold(sys->coeffs);
        if (psi) *psi = m.psi;
        if (phi_slope) *phi_slope = m.phi_slope;
        if (phi_intercept) *phi_intercept = m.phi_intercept;
    });
}

canard_status canard_system_assumptions(const canard_system* sys, int* all_pass,
                                        char** json_out) {
    if (!sys) {
        g_last_error = "null system";
        return CANARD_ERR_USAGE;
    }
    return guarded([&] {
        const AssumptionReport rep = check_assumptions(sys->coeffs, sys->window);
        if (all_pass) *all_pass = rep.all_pass() ? 1 : 0;
        if (json_out) {
            std::ostringstream os;
            os << "[";
            for (size_t i = 0; i < rep.entries.size(); ++i) {
                const auto& e = rep.entries[i];
                if (i) os << ",";
                os << "{\"id\":\"" << e.id << "\",\"pass\":" << (e.pass ? "true" : "false")
                   << ",\"witness\":" << e.witness << ",\"note\":\"" << e.note << "\"}";
            }
            os << "]";
            *json_out = dup_string(os.str());
            if (!*json_out) fail(errc::internal_error, "out of memory");
        }
    });
}

canard_status canard_system_dual(const canard_system* sys, double fast_out[3],
                                 double slow_out[4], double* z0_out) {
    if (!sys) {
        g_last_error = "null system";
        return CANARD_ERR_USAGE;
    }
    return guarded([&] {
        const DualSystem dual = dual_transform(sys->coeffs, sys->window);
        if (fast_out) {
            fast_out[0] = dual.D;
            fast_out[1] = dual.E;
            fast_out[2] = dual.F;
        }
        if (slow_out) {
            slow_out[0] = dual.slow.root;
            slow_out[1] = dual.slow.lin;
            slow_out[2] = dual.slow.quad;
            slow_out[3] = dual.slow.cross;
        }
        if (z0_out) *z0_out = dual.window.x0;
    });
}

canard_status canard_system_analyze(const canard_system* sys, canard_analysis** out) {
    if (!sys || !out) {
        g_last_error = "null argument";
        return CANARD_ERR_USAGE;
    }
    *out = nullptr;
    return guarded([&] {
        auto an = std::make_unique<canard_analysis>();
        an->coeffs = sys->coeffs;
        an->window = sys->window;
        an->xbar = reduced_solution(sys->coeffs.A, sys->coeffs.B, sys->window.x0, sys->window.t0);
        const CaseLabel label = classify(sys->coeffs, sys->window);
        if (label.delayed() || label.immediate()) {
            an->limit = composite_limit(sys->coeffs, sys->window, label);
            an->t_c = an->limit->t_c;
            an->t_star = an->limit->t_star;
        }
        *out = an.release();
    });
}

void canard_analysis_free(canard_analysis* an) { delete an; }

canard_status canard_analysis_crossing_time(const canard_analysis* an, double* out) {
    if (!an || !out) {
        g_last_error = "null argument";
        return CANARD_ERR_USAGE;
    }
    if (!an->t_c) {
        g_last_error = "no crossing time for this system";
        return CANARD_ERR_NO_CROSSING;
    }
    *out = *an->t_c;
    return CANARD_OK;
}

canard_status canard_analysis_exit_time(const canard_analysis* an, double* out) {
    if (!an || !out) {
        g_last_error = "null argument";
        return CANARD_ERR_USAGE;
    }
    if (!an->t_star) {
        g_last_error = "no exit time for this system";
        return CANARD_ERR_NO_EXIT_BEFORE_T;
    }
    *out = *an->t_star;
    return CANARD_OK;
}

canard_status canard_analysis_blowup_time(const canard_analysis* an, double* out) {
    if (!an || !out) {
        g_last_error = "null argument";
        return CANARD_ERR_USAGE;
    }
    if (!an->xbar.blowup_time) {
        g_last_error = "reduced solution does not blow up";
        return CANARD_ERR_NOT_APPLICABLE;
    }
    *out = *an->xbar.blowup_time;
    return CANARD_OK;
}

canard_status canard_analysis_entry_exit_g(const canard_analysis* an, double t, double* out) {
    if (!an || !out) {
        g_last_error = "null argument";
        return CANARD_ERR_USAGE;
    }
    return guarded([&] { *out = entry_exit_G(an->coeffs, an->xbar, t); });
}

canard_status canard_analysis_composite(const canard_analysis* an, double t, double* x_lim,
                                        double* y_lim) {
    if (!an) {
        g_last_error = "null argument";
        return CANARD_ERR_USAGE;
    }
    if (!an->limit) {
        g_last_error = "no composite limit: the system has no predicted switch";
        return CANARD_ERR_NOT_APPLICABLE;
    }
    return guarded([&] {
        if (x_lim) *x_lim = an->limit->x(t);
        if (y_lim) *y_lim = an->limit->y(t);
    });
}

canard_status canard_system_integrate(const canard_system* sys, double epsilon,
                                      const canard_solver_options* opts,
                                      canard_trajectory** out) {
    if (!sys || !out) {
        g_last_error = "null argument";
        return CANARD_ERR_USAGE;
    }
    *out = nullptr;
    return guarded([&] {
        SolverOptions o;
        if (opts) {
            o.rel_tol = opts->rel_tol;
            o.abs_tol = opts->abs_tol;
            o.max_step = opts->max_step;
            o.min_step = opts->min_step;
            o.use_log_fast_variable = opts->use_log_fast_variable != 0;
        }
        auto traj = std::make_unique<canard_trajectory>();
        traj->traj = integrate(sys->coeffs, sys->window, epsilon, o);
        *out = traj.release();
    });
}

void canard_trajectory_free(canard_trajectory* traj) { delete traj; }

size_t canard_trajectory_size(const canard_trajectory* traj) {
    return traj ? traj->traj.samples.size() : 0;
}

canard_status canard_trajectory_sample(const canard_trajectory* traj, size_t index, double* t,
                                       double* x, double* y, double* w) {
    if (!traj) {
        g_last_error = "null trajectory";
        return CANARD_ERR_USAGE;
    }
    if (index >= traj->traj.samples.size()) {
        g_last_error = "sample index out of range";
        return CANARD_ERR_OUT_OF_DOMAIN;
    }
    const auto& s = traj->traj.samples[index];
    if (t) *t = s.t;
    if (x) *x = s.x;
    if (y) *y = s.y;
    if (w) *w = s.w;
    return CANARD_OK;
}

int canard_trajectory_termination(const canard_trajectory* traj) {
    return traj ? static_cast<int>(traj->traj.termination) : -1;
}

canard_status canard_detect_switch(const canard_system* sys, const canard_trajectory* traj,
                                   double theta, double* t_sw, double* abs_error, int* mode) {
    if (!sys || !traj) {
        g_last_error = "null argument";
        return CANARD_ERR_USAGE;
    }
    return guarded([&] {
        const CaseLabel label = classify(sys->coeffs, sys->window);
        const CompositeLimit limit = composite_limit(sys->coeffs, sys->window, label);
        const SwitchObservation obs = detect_switch(
            traj->traj, critical_manifold(sys->coeffs), label, theta, limit.switch_time);
        if (t_sw) *t_sw = obs.t_sw;
        if (abs_error) *abs_error = obs.abs_error;
        if (mode) *mode = static_cast<int>(obs.detection_mode);
    });
}

canard_status canard_run(const char* command, const char* config_path, const char* out_dir,
                         double epsilon, char** summary_out) {
    if (summary_out) *summary_out = nullptr;
    if (!command || !config_path) {
        g_last_error = "command and config path are required";
        return CANARD_ERR_USAGE;
    }
    std::string summary;
    const canard_status st = guarded([&] {
        const RunConfig config = load_config(config_path);
        const std::string dir = out_dir && *out_dir ? out_dir : config.out_dir;
        const std::string cmd = command;
        if (cmd == "classify") {
            summary = run_classify(config, dir).line;
        } else if (cmd == "analyze") {
            const AnalyzeResult r = run_analyze(config, dir);
            std::ostringstream os;
            if (r.t_c) os << "t_c = " << *r.t_c;
            else os << "no crossing";
            if (r.t_star) os << ", t* = " << *r.t_star;
            if (!r.reason.empty()) os << " (" << r.reason << ")";
            summary = os.str();
        } else if (cmd == "simulate") {
            double eps = epsilon;
            if (std::isnan(eps)) {
                if (!config.epsilon)
                    fail(errc::usage_error,
                         "simulate needs --epsilon or an \"epsilon\" config field");
                eps = *config.epsilon;
            }
            const Trajectory traj = run_simulate(config, eps, dir);
            std::ostringstream os;
            os << "epsilon = " << eps << ", " << traj.samples.size() << " samples, "
               << to_string(traj.termination);
            summary = os.str();
        } else if (cmd == "sweep") {
            const SweepFileResult r = run_sweep(config, dir);
            std::ostringstream os;
            os << "predicted = " << r.sweep.predicted
               << ", final abs_error = " << r.sweep.summary.final_abs_error
               << ", trend_ok = " << (r.sweep.summary.trend_ok ? "true" : "false");
            summary = os.str();
        } else if (cmd == "verify") {
            const VerifyResult r = run_verify(config, dir);
            summary = r.all_pass ? "all checks passed" : "verification failed";
            if (!r.all_pass)
                fail(errc::internal_error, "__verification_failed__");  // mapped below
        } else {
            fail(errc::usage_error, "unknown command: " + cmd);
        }
    });
    if (st == CANARD_ERR_INTERNAL && g_last_error == "__verification_failed__") {
        g_last_error = "verification failed; see verdict.json";
        if (summary_out) *summary_out = dup_string(summary);
        return CANARD_ERR_VERIFICATION_FAILED;
    }
    if (st == CANARD_OK && summary_out) *summary_out = dup_string(summary);
    return st;
}

}  // extern "C"
