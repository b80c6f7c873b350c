#include "noma/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "noma/error.hpp"

namespace noma {

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("QuadratureSpec: tolerances must be positive");
    if (max_depth < 1 || max_panels < 1) throw DomainError("QuadratureSpec: budgets must be positive");
}

QuadratureResult integrate_interval(const Integrand& f, double a, double b, const QuadratureSpec& quad) {
    using boost::math::quadrature::gauss_kronrod;
    double error = 0.0;
    double l1 = 0.0;
    const double v = gauss_kronrod<double, 21>::integrate(f, a, b, static_cast<unsigned>(quad.max_depth), quad.rel_tol, &error, &l1);
    return {v, error, 1};
}

QuadratureResult integrate_semi_infinite(const Integrand& f, const QuadratureSpec& quad, double first_width) {
    quad.validate();
    if (!(first_width > 0.0)) throw DomainError("integrate_semi_infinite: first panel width must be positive");
    QuadratureResult total;
    double lo = 0.0;
    double hi = first_width;
    int quiet = 0;
    for (int k = 0; k < quad.max_panels; ++k) {
        const auto panel = integrate_interval(f, lo, hi, quad);
        total.value += panel.value;
        total.error += panel.error;
        ++total.panels;
        const double tol = std::max(quad.abs_tol, quad.rel_tol * std::abs(total.value));
        // Two consecutive quiet panels: a single small panel can be a sign change.
        quiet = std::abs(panel.value) < 0.1 * tol ? quiet + 1 : 0;
        if (k >= 2 && quiet >= 2) {
            total.error += std::abs(panel.value);
            return total;
        }
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) break;
    }
    throw QuadratureError("integrate_semi_infinite: panel cap reached", total.value, total.error);
}

namespace {

// Wynn's epsilon algorithm on a window of partial sums; returns the deepest
// even-column entry.
double wynn_epsilon(const std::deque<double>& sums) {
    const std::size_t n = sums.size();
    if (n < 3) return sums.back();
    std::vector<double> prev(n + 1, 0.0);  // column k - 1
    std::vector<double> cur(sums.begin(), sums.end());
    double best = sums.back();
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<double> next(cur.size() - 1);
        for (std::size_t j = 0; j + 1 < cur.size(); ++j) {
            const double diff = cur[j + 1] - cur[j];
            if (diff == 0.0) return best;
            next[j] = prev[j + 1] + 1.0 / diff;
            if (!std::isfinite(next[j])) return best;
        }
        prev = std::move(cur);
        cur = std::move(next);
        if (k % 2 == 0 && !cur.empty()) best = cur.back();
    }
    return best;
}

}  // namespace

QuadratureResult integrate_oscillatory(const Integrand& f, double half_period, const std::function<double(double)>& envelope,
                                       const QuadratureSpec& quad) {
    quad.validate();
    if (!(half_period > 0.0) || !std::isfinite(half_period))
        throw DomainError("integrate_oscillatory: half period must be positive and finite");
    QuadratureResult total;
    std::deque<double> sums;
    double accelerated = 0.0;
    int stable = 0;
    for (int k = 0; k < quad.max_panels; ++k) {
        const double a = k * half_period;
        const double b = a + half_period;
        const auto panel = integrate_interval(f, a, b, quad);
        total.value += panel.value;
        total.error += panel.error;
        ++total.panels;
        const double tol = std::max(quad.abs_tol, quad.rel_tol * std::abs(total.value));

        const double tail = envelope(b) * half_period;
        if (tail < 0.1 * tol) {
            total.error += tail;
            return total;
        }

        sums.push_back(total.value);
        if (sums.size() > 24) sums.pop_front();
        const double next = wynn_epsilon(sums);
        if (k >= 10) {
            stable = std::abs(next - accelerated) < 0.1 * tol ? stable + 1 : 0;
            if (stable >= 3) {
                total.error += std::abs(next - total.value) * 1e-3 + std::abs(next - accelerated);
                total.value = next;
                return total;
            }
        }
        accelerated = next;
    }
    throw QuadratureError("integrate_oscillatory: panel cap reached", total.value, total.error);
}

}  // namespace noma
