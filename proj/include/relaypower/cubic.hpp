#pragma once

#include <cmath>

#include "relaypower/numeric.hpp"

namespace relaypower {

/// Unique positive root of  A x^3 - a x - c = 0  with A > 0, a >= 0, c >= 0,
/// a + c > 0.  (Descartes: one sign change, so exactly one positive root.)
///
/// The root lies in (0, sqrt(a/A) + cbrt(c/A)]: at the bound both -a x and
/// -c are dominated.  f is convex and strictly increasing there, so Newton
/// started at the upper bound decreases monotonically to the root.  A
/// bisection safeguard keeps every iterate inside the bracket.
inline double cubic_positive_root(double lead, double lin, double cons) {
    require(lead > 0.0, "cubic_positive_root: leading coefficient must be positive");
    require(lin >= 0.0 && cons >= 0.0,
            "cubic_positive_root: lower coefficients must be nonnegative");
    require(lin + cons > 0.0,
            "cubic_positive_root: at least one lower coefficient must be positive");

    const double hi0 = std::sqrt(lin / lead) + std::cbrt(cons / lead);
    double lo = 0.0, hi = hi0, x = hi0;
    const auto f = [&](double t) { return ((lead * t) * t - lin) * t - cons; };

    for (int it = 0; it < 200; ++it) {
        const double fx = f(x);
        const double scale = lead * x * x * x + lin * x + cons;
        if (std::abs(fx) <= 1e-15 * scale) break;
        if (fx > 0.0) hi = x; else lo = x;
        const double dfx = 3.0 * lead * x * x - lin;
        double next = (dfx > 0.0) ? x - fx / dfx : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-16 * x) { x = next; break; }
        x = next;
    }
    return x;
}

}  // namespace relaypower
