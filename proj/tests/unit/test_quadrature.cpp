#include <cmath>
#include <numbers>

#include "doctest.h"
#include "noma/error.hpp"
#include "noma/quadrature.hpp"

using namespace noma;

TEST_CASE("semi-infinite panels") {
    QuadratureSpec q;
    q.abs_tol = 1e-12;
    q.rel_tol = 1e-12;
    const auto e = integrate_semi_infinite([](double x) { return std::exp(-x); }, q);
    CHECK(std::abs(e.value - 1.0) < 1e-10);
    CHECK(e.error < 1e-8);

    const auto s = integrate_semi_infinite([](double x) { return std::exp(-x) * std::sin(10 * x); }, q, 0.5);
    CHECK(std::abs(s.value - 10.0 / 101.0) < 1e-8);
}

TEST_CASE("oscillatory panels with acceleration") {
    QuadratureSpec q;
    q.abs_tol = 1e-11;
    q.rel_tol = 1e-11;
    auto f = [](double x) { return std::exp(-x) * std::sin(10 * x); };
    auto env = [](double x) { return std::exp(-x); };
    const auto r = integrate_oscillatory(f, std::numbers::pi / 10, env, q);
    CHECK(std::abs(r.value - 10.0 / 101.0) < 1e-8);

    // Slowly decaying: int_0^inf sin(x) / x dx = pi / 2, reached through the
    // accelerated partial sums rather than the envelope.
    auto sinc = [](double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; };
    auto env2 = [](double x) { return 1.0 / std::max(x, 1e-300); };
    QuadratureSpec loose;
    const auto d = integrate_oscillatory(sinc, std::numbers::pi, env2, loose);
    CHECK(d.value == doctest::Approx(std::numbers::pi / 2).epsilon(1e-6));
}

TEST_CASE("quadrature failures are reported") {
    QuadratureSpec q;
    q.max_panels = 20;
    try {
        integrate_semi_infinite([](double x) { return 1.0 / (1.0 + x); }, q);
        FAIL("expected QuadratureError");
    } catch (const QuadratureError& e) {
        CHECK(e.error_estimate() >= 0.0);
        CHECK(e.value() > 0.0);
    }
    QuadratureSpec bad;
    bad.abs_tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    CHECK_THROWS_AS(integrate_semi_infinite([](double) { return 0.0; }, bad), DomainError);
    CHECK_THROWS_AS(integrate_oscillatory([](double) { return 0.0; }, 0.0, [](double) { return 0.0; }, QuadratureSpec{}), DomainError);
}

TEST_CASE("finite interval") {
    const auto r = integrate_interval([](double x) { return x * x; }, 0.0, 3.0, QuadratureSpec{});
    CHECK(r.value == doctest::Approx(9.0).epsilon(1e-12));
}
