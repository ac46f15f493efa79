#pragma once

#include <cmath>
#include <string>

#include "strip/errors.hpp"

namespace strip {

/// Safeguarded bisection for a sign change of g on [lo, hi].
///
/// Halves the bracket until it cannot be split in floating point, then checks
/// |g| <= residual_tol at the returned point. Throws BracketError when g(lo)
/// and g(hi) share a sign.
template <typename Fn>
double bisect(Fn&& g, double lo, double hi, double residual_tol, const char* what = "bisect")
{
    double glo = g(lo);
    const double ghi = g(hi);
    if (glo == 0.0)
        return lo;
    if (ghi == 0.0)
        return hi;
    if ((glo < 0.0) == (ghi < 0.0))
        throw BracketError(std::string(what) + ": no sign change on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    double root = 0.5 * (lo + hi);
    double groot = 0.0;
    for (int it = 0; it < 200; ++it) {
        root = 0.5 * (lo + hi);
        if (root <= lo || root >= hi)
            break;
        groot = g(root);
        if (groot == 0.0)
            return root;
        if ((groot < 0.0) == (glo < 0.0)) {
            lo = root;
            glo = groot;
        } else {
            hi = root;
        }
    }
    groot = g(root);
    if (!(std::abs(groot) <= residual_tol))
        throw NumericalError(std::string(what) + ": residual " + std::to_string(groot) +
                             " above tolerance at bracket collapse");
    return root;
}

} // namespace strip
