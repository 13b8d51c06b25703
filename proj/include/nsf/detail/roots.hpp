#pragma once

#include <cmath>
#include <limits>

namespace nsf::detail {

/// Root of a monotonically increasing f on [lo, hi] with f(lo) <= 0 <= f(hi).
/// Newton steps are accepted only while they stay inside the current bracket;
/// otherwise the step falls back to bisection.
template <class F>
double safeguarded_newton(F&& f, double lo, double hi, double x0, double rel_tol = 4e-16,
                          int max_iter = 200) {
    double x = (x0 > lo && x0 < hi) ? x0 : 0.5 * (lo + hi);
    for (int it = 0; it < max_iter; ++it) {
        auto [fx, dfx] = f(x);
        if (fx == 0.0) return x;
        if (fx < 0.0)
            lo = x;
        else
            hi = x;
        double next = (dfx > 0.0 && std::isfinite(dfx)) ? x - fx / dfx : lo - 1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= rel_tol * std::abs(next) || hi - lo <= rel_tol * std::abs(hi)) {
            return next;
        }
        x = next;
    }
    return x;
}

}  // namespace nsf::detail
