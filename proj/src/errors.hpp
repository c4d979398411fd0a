#pragma once

#include <stdexcept>
#include <string>

namespace canard {

enum class errc {
    zero_coefficient,
    bad_window,
    degenerate_classification,
    no_crossing,
    no_exit_before_t,
    out_of_domain,
    invalid_epsilon,
    not_applicable,
    admissibility_violated,
    no_root_before_t,
    parse_error,
    validation_error,
    usage_error,
    internal_error,
};

/// Exception carrying a machine-readable error code next to the message.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::zero_coefficient: return "ZeroCoefficient";
        case errc::bad_window: return "BadWindow";
        case errc::degenerate_classification: return "DegenerateClassification";
        case errc::no_crossing: return "NoCrossing";
        case errc::no_exit_before_t: return "NoExitBeforeT";
        case errc::out_of_domain: return "OutOfDomain";
        case errc::invalid_epsilon: return "InvalidEpsilon";
        case errc::not_applicable: return "NotApplicable";
        case errc::admissibility_violated: return "AdmissibilityViolated";
        case errc::no_root_before_t: return "NoRootBeforeT";
        case errc::parse_error: return "ParseError";
        case errc::validation_error: return "ValidationError";
        case errc::usage_error: return "UsageError";
        case errc::internal_error: return "InternalError";
    }
    return "UnknownError";
}

}  // namespace canard
