#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "errors.hpp"

namespace canard {

/// Bisection on [a,b] with f(a), f(b) of opposite sign; returns the midpoint of
/// the final bracket. Tolerance is absolute in the argument.
template <class Func>
double bisect(Func&& f, double a, double b, double fa, double fb, double tol = 1e-13) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) fail(errc::internal_error, "bisect: root not bracketed");
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1,1]; column 0 node, 1 Gauss weight,
// 2 Kronrod weight.
inline constexpr double gk15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

template <class Func>
double gk15_panel(Func&& f, double a, double b, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double f0 = f(c);
    double g7 = gk15[0][1] * f0;
    double k15 = gk15[0][2] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = h * gk15[i][0];
        const double fi = f(c + dx) + f(c - dx);
        g7 += gk15[i][1] * fi;
        k15 += gk15[i][2] * fi;
    }
    g7 *= h;
    k15 *= h;
    err = std::abs(k15 - g7);
    return k15;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod 7/15 quadrature to an absolute tolerance.
template <class Func>
double integrate_adaptive(Func&& f, double a, double b, double abs_tol = 1e-12) {
    if (a == b) return 0.0;
    struct Panel {
        double a, b;
    };
    std::vector<Panel> stack{{a, b}};
    double sum = 0.0;
    int splits = 0;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        double err = 0.0;
        const double s = detail::gk15_panel(f, p.a, p.b, err);
        const double local_tol = abs_tol * std::max(1e-3, (p.b - p.a) / (b - a));
        if (err <= local_tol || ++splits > 2000) {
            sum += s;
            continue;
        }
        const double m = 0.5 * (p.a + p.b);
        stack.push_back({p.a, m});
        stack.push_back({m, p.b});
    }
    return sum;
}

/// Formats a double with 17 significant digits ('.' decimal, no locale).
std::string format_double(double v);

}  // namespace canard
