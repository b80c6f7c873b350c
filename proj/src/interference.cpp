#include "noma/interference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "noma/error.hpp"

namespace noma {

namespace {

using cplx = std::complex<double>;

// exp(z) - 1 without cancellation for small |z|.
cplx expm1(cplx z) {
    const double c = std::cos(z.imag());
    const double s = std::sin(z.imag());
    const double half = std::sin(0.5 * z.imag());
    return {std::expm1(z.real()) * c - 2.0 * half * half, std::exp(z.real()) * s};
}

// (g + z)^a - g^a for complex z, as g^a expm1(a log1p(z / g)).
cplx tempered_increment(double g, double a, cplx z) {
    const cplx t = z / g;
    const cplx log1p_t{0.5 * std::log1p(2.0 * t.real() + std::norm(t)), std::atan2(t.imag(), 1.0 + t.real())};
    return std::pow(g, a) * expm1(a * log1p_t);
}

double log_laplace_continuous(const StableModel& m, double s) {
    const double inc = std::pow(m.g_I, m.alpha_I) * std::expm1(m.alpha_I * std::log1p(s / m.g_I));
    return m.gamma_I * std::tgamma(-m.alpha_I) * inc;
}

cplx cf_continuous(const StableModel& m, double omega) {
    return std::exp(m.gamma_I * std::tgamma(-m.alpha_I) * tempered_increment(m.g_I, m.alpha_I, cplx{0.0, -omega}));
}

double continuous_mean(const StableModel& m) {
    return -m.gamma_I * std::tgamma(-m.alpha_I) * m.alpha_I * std::pow(m.g_I, m.alpha_I - 1.0);
}

// Frequency where |cf_continuous| has dropped to e^-1: the scale of the
// inversion integrals.
double decay_frequency(const StableModel& m) {
    double w = 1e-3 / continuous_mean(m);
    while (std::abs(cf_continuous(m, w)) > std::exp(-1.0)) w *= 2.0;
    double lo = w / 2.0;
    double hi = w;
    for (int i = 0; i < 20; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::abs(cf_continuous(m, mid)) > std::exp(-1.0) ? lo : hi) = mid;
    }
    return hi;
}

StableModel fit_from_cumulants(double k1, double k2, double alpha_I, double lambda_Z) {
    StableModel m;
    m.alpha_I = alpha_I;
    m.lambda_Z = lambda_Z;
    m.g_I = k1 * (1.0 - alpha_I) / k2;
    m.gamma_I = -k1 / (std::tgamma(-alpha_I) * alpha_I * std::pow(m.g_I, alpha_I - 1.0));
    return m;
}

// Chernoff bounds on the continuous part: Pr(I <= x) and Pr(I > x), each
// optimized in closed form over the exponent. The trivial bound 1 applies on
// the far side of the mean.
std::pair<double, double> chernoff_tails(const StableModel& model, double x) {
    const double a = model.alpha_I;
    const double g = model.g_I;
    const double k = model.gamma_I * std::tgamma(-a);
    const double root = std::pow(-x / (k * a), 1.0 / (a - 1.0));
    double below = 1.0;
    double above = 1.0;
    if (root > g) {
        const double s = root - g;
        below = std::exp(std::min(0.0, s * x + k * (std::pow(root, a) - std::pow(g, a))));
    } else if (root < g) {
        const double s = g - root;
        above = std::exp(std::min(0.0, -s * x + k * (std::pow(root, a) - std::pow(g, a))));
    }
    return {below, above};
}

}  // namespace

double cumulant(const ChannelLaw& law, double lambda_Z, int n) {
    if (!(lambda_Z >= 0.0)) throw DomainError("cumulant: lambda_Z must be >= 0");
    return lambda_Z * law.power_moment(n);
}

StableModel fit_stable(const ChannelLaw& law, double lambda_Z) {
    if (!(lambda_Z >= 0.0) || !std::isfinite(lambda_Z)) throw DomainError("fit_stable: lambda_Z must be finite and >= 0");
    const double alpha_I = 2.0 / law.config().alpha;
    StableModel m;
    if (lambda_Z == 0.0) {
        m.alpha_I = alpha_I;
    } else {
        m = fit_from_cumulants(cumulant(law, lambda_Z, 1), cumulant(law, lambda_Z, 2), alpha_I, lambda_Z);
    }
    m.sigma2 = law.config().noise;
    return m;
}

StableModel fit_stable_with_atom(const ChannelLaw& law, double lambda_Z, double p0) {
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw DomainError("fit_stable_with_atom: p0 must lie in [0, 1]");
    if (p0 >= 1.0 || lambda_Z == 0.0) {
        StableModel m = fit_stable(law, 0.0);
        m.zero_mass = 1.0;
        return m;
    }
    StableModel m = fit_stable(law, lambda_Z / (1.0 - p0));
    m.lambda_Z = lambda_Z;
    m.zero_mass = p0;
    return m;
}

std::complex<double> cf(const StableModel& model, double omega) {
    if (!std::isfinite(omega)) throw DomainError("cf: omega must be finite");
    if (model.degenerate()) return {1.0, 0.0};
    const double p0 = model.zero_mass;
    return p0 + (1.0 - p0) * cf_continuous(model, omega);
}

double laplace_continuous(const StableModel& model, double s) {
    if (!(s >= 0.0)) throw DomainError("laplace: s must be >= 0");
    if (model.degenerate()) return 1.0;
    return std::exp(log_laplace_continuous(model, s));
}

double laplace(const StableModel& model, double s) {
    if (model.degenerate()) {
        if (!(s >= 0.0)) throw DomainError("laplace: s must be >= 0");
        return 1.0;
    }
    const double p0 = model.zero_mass;
    return p0 + (1.0 - p0) * laplace_continuous(model, s);
}

double cdf(const StableModel& model, double x, const QuadratureSpec& quad) {
    if (std::isnan(x)) throw DomainError("cdf: x is NaN");
    if (x < 0.0) return 0.0;
    if (model.degenerate()) return 1.0;
    const double p0 = model.zero_mass;
    if (x == 0.0) return p0;
    if (std::isinf(x)) return 1.0;

    // Gil-Pelaez: F(x) = 1/2 - (1/pi) int_0^inf Im(e^{-i w x} phi(w)) / w dw.
    const double scale = decay_frequency(model);
    const double mean = continuous_mean(model);
    auto integrand = [&](double w) {
        if (w == 0.0) return mean - x;
        return std::imag(std::exp(cplx{0.0, -w * x}) * cf_continuous(model, w)) / w;
    };
    auto envelope = [&](double w) { return std::abs(cf_continuous(model, w)) / w; };
    const double half_period = std::min(std::numbers::pi / x, scale);
    const auto r = integrate_oscillatory(integrand, half_period, envelope, quad);
    const auto [below, above] = chernoff_tails(model, x);
    const double cont = std::clamp(0.5 - r.value / std::numbers::pi, 1.0 - above, below);
    return std::clamp(p0 + (1.0 - p0) * cont, 0.0, 1.0);
}

double pdf(const StableModel& model, double x, const QuadratureSpec& quad) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("pdf: x must be positive and finite");
    if (model.degenerate()) return 0.0;
    const double scale = decay_frequency(model);
    auto integrand = [&](double w) { return std::real(std::exp(cplx{0.0, -w * x}) * cf_continuous(model, w)); };
    auto envelope = [&](double w) { return std::abs(cf_continuous(model, w)); };
    const double half_period = std::min(std::numbers::pi / x, scale);
    const auto r = integrate_oscillatory(integrand, half_period, envelope, quad);
    return std::max(0.0, (1.0 - model.zero_mass) * r.value / std::numbers::pi);
}

double sample_aggregate(const ChannelLaw& law, int n_interferers, Rng& rng) {
    if (n_interferers < 0) throw DomainError("sample_aggregate: negative count");
    double total = 0.0;
    for (int i = 0; i < n_interferers; ++i) total += law.sample_device(rng).power;
    return total;
}

}  // namespace noma
