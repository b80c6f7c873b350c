#pragma once

#include <functional>

namespace noma {

struct QuadratureSpec {
    double abs_tol = 1e-8;
    double rel_tol = 1e-6;
    int max_depth = 15;      // bisection depth of the adaptive rule on one panel
    int max_panels = 20000;  // panel cap for semi-infinite / oscillatory sweeps

    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int panels = 0;
};

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod on [a, b].
QuadratureResult integrate_interval(const Integrand& f, double a, double b, const QuadratureSpec& quad);

// Integral of a decaying f over (0, inf): panels [0, h], [h, 2h], [2h, 4h], ...
// until a panel contributes less than the tolerance. `first_width` sets h and
// should be near the scale where f starts to vary. Throws QuadratureError
// when the panel cap is hit first.
QuadratureResult integrate_semi_infinite(const Integrand& f, const QuadratureSpec& quad, double first_width = 1.0);

// Integral over (0, inf) of an integrand oscillating with half-period
// `half_period`: equal panels between successive approximate zeros, partial
// sums accelerated with Wynn's epsilon algorithm. `envelope(x)` bounds |f| on
// [x, inf) and is used as the stopping test.
QuadratureResult integrate_oscillatory(const Integrand& f, double half_period, const std::function<double(double)>& envelope,
                                       const QuadratureSpec& quad);

}  // namespace noma
