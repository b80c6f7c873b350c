#include "noma/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/factorials.hpp>

#include "noma/error.hpp"

namespace noma {

ChannelLaw::ChannelLaw(const SystemConfig& config, GConvention convention)
    : config_(config),
      convention_(convention),
      gamma_factor_(std::tgamma(1.0 + 2.0 / config.alpha)),
      area_(config.d_max * config.d_max - config.d_min * config.d_min) {
    if (!(config.d_min > 0.0) || !(config.d_max > config.d_min)) throw DomainError("invalid annulus");
    if (!(config.alpha > 2.0)) throw DomainError("path-loss exponent must exceed 2");
    const double half = config.alpha / 2.0;
    g_scale_ = config.tx_power * std::pow(gamma_factor_, half) / (area_ * (half - 1.0));
}

double ChannelLaw::power_cdf(double p) const {
    if (!(p > 0.0)) return 0.0;
    const double x = p / config_.tx_power;
    const double dmax2 = config_.d_max * config_.d_max;
    const double v = (dmax2 - gamma_factor_ * std::pow(x, -2.0 / config_.alpha)) / area_;
    return std::clamp(v, 0.0, 1.0);
}

double ChannelLaw::power_quantile(double u) const {
    if (!(u >= 0.0) || !(u < 1.0)) throw DomainError("power_quantile: u must lie in [0, 1)");
    const double dmax2 = config_.d_max * config_.d_max;
    return config_.tx_power * std::pow(gamma_factor_ / (dmax2 - u * area_), config_.alpha / 2.0);
}

double ChannelLaw::support_min() const { return power_quantile(0.0); }

double ChannelLaw::support_max() const {
    return config_.tx_power * std::pow(gamma_factor_ / (config_.d_min * config_.d_min), config_.alpha / 2.0);
}

double ChannelLaw::g(double y) const {
    if (!(y >= 0.0 && y <= 1.0)) throw DomainError("g: y must lie in [0, 1]");
    const double dmin2 = config_.d_min * config_.d_min;
    const double e = 1.0 - config_.alpha / 2.0;
    // Upper-tail quantile: F^-1(1 - y) = P_T Gamma^(alpha/2) (d_min^2 + y A)^(-alpha/2).
    auto upper = [&](double t) { return g_scale_ * (std::pow(dmin2, e) - std::pow(dmin2 + t * area_, e)); };
    if (convention_ == GConvention::descending) return upper(y);
    // Ascending ranks: integral of F^-1(t) over [0, y] = G(1) - G(1 - y).
    return upper(1.0) - upper(1.0 - y);
}

double ChannelLaw::ordered_partial_sum(int first, int last, int count) const {
    if (count < 1 || first < 1 || last > count || first > last) throw DomainError("ordered_partial_sum: bad ranks");
    const double n = count;
    return n * (g(last / n) - g((first - 1) / n));
}

double ChannelLaw::layer_power(double v, int count) const {
    if (count < 1) throw DomainError("layer_power: count must be >= 1");
    v = std::clamp(v, 0.0, 1.0);
    const double width = std::min(v, 1.0 / count);
    if (width <= 0.0) return support_max();
    return (g(v) - g(v - width)) / width;
}

double ChannelLaw::power_moment(int n) const {
    if (n < 1) throw DomainError("power_moment: order must be >= 1");
    const double na = n * config_.alpha;
    if (!(na > 2.0)) throw DomainError("power_moment: n * alpha must exceed 2");
    const double path = 2.0 / (na - 2.0) *
                        (std::pow(config_.d_min, 2.0 - na) - std::pow(config_.d_max, 2.0 - na)) / area_;
    return path * fading_moment(n) * std::pow(config_.tx_power, n);
}

double ChannelLaw::fading_moment(int n) {
    return boost::math::factorial<double>(static_cast<unsigned>(n));
}

DeviceSample ChannelLaw::sample_device(Rng& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> fading(1.0);
    const double dmin2 = config_.d_min * config_.d_min;
    const double d2 = dmin2 + area_ * unit(rng);
    const double v = fading(rng);
    const double d = std::min(std::sqrt(d2), config_.d_max);
    return {d, v, v * std::pow(d2, -config_.alpha / 2.0) * config_.tx_power};
}

double g_rayleigh(double y) {
    if (y >= 1.0) return 0.0;
    return (1.0 - y) * std::log1p(-y) - (1.0 - y);
}

double g_rayleigh_descending(double y) {
    if (y <= 0.0) return 0.0;
    return y - y * std::log(y);
}

}  // namespace noma
