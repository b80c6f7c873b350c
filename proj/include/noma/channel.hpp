#pragma once

#include <random>

#include "noma/config.hpp"

namespace noma {

using Rng = std::mt19937_64;

// Which tail of the power law the ordered-statistics integral accumulates.
// `descending` integrates the upper-tail quantile F^-1(1 - y), matching
// P_(1) >= P_(2) >= ...; `ascending` integrates F^-1(y) and is kept as a
// negative control (it pairs the strongest ranks with the weakest powers).
enum class GConvention { descending, ascending };

struct DeviceSample {
    double distance;
    double fading;  // |h|^2
    double power;   // received power, mW
};

// Received-power law of one device placed uniformly in the annulus
// [d_min, d_max] under unit-mean Rayleigh fading, using the closed-form CDF
//
//     F_P(p) = (d_max^2 - Gamma(1 + 2/alpha) (p / P_T)^(-2/alpha)) / (d_max^2 - d_min^2)
//
// clamped to [0, 1]. The closed form averages the annulus CDF of d^-alpha
// over the fading gain without truncating it, so it is an approximation of
// the exact law: it reaches 1 at a finite power and puts no mass below
// support_min(). The exact law is what sample_device() draws from.
class ChannelLaw {
public:
    explicit ChannelLaw(const SystemConfig& config, GConvention convention = GConvention::descending);

    const SystemConfig& config() const { return config_; }
    GConvention convention() const { return convention_; }

    double power_cdf(double p) const;
    // Throws DomainError unless 0 <= u < 1.
    double power_quantile(double u) const;

    // Largest power with clamped CDF 0, and smallest with clamped CDF 1.
    double support_min() const;
    double support_max() const;

    // Antiderivative of the upper-tail quantile with g(0) = 0. Only
    // differences are meaningful; g(b) - g(a) is the mean power mass of the
    // rank fractions (a, b].
    double g(double y) const;

    // Deterministic limit of sum_{i=first}^{last} P_(i) over `count` ordered
    // powers (1-based ranks, descending).
    double ordered_partial_sum(int first, int last, int count) const;

    // Mean power of the layer whose rank fraction ends at v when there are
    // `count` layers: the average of F^-1(1 - y) over (v - 1/count, v].
    double layer_power(double v, int count) const;

    // n-th raw moment of the exact received power |h|^2 d^-alpha P_T.
    double power_moment(int n) const;

    static double fading_moment(int n);

    DeviceSample sample_device(Rng& rng) const;

private:
    SystemConfig config_;
    GConvention convention_;
    double gamma_factor_;  // Gamma(1 + 2/alpha)
    double area_;          // d_max^2 - d_min^2
    double g_scale_;
};

// Closed form printed for the unit-mean exponential law, (1-y) ln(1-y) - (1-y).
// Its derivative is F^-1(y) (ascending ranks), so differences of it do not
// reproduce descending partial sums; see g_rayleigh_descending().
double g_rayleigh(double y);

// Antiderivative of F^-1(1 - y) = -ln y for F(p) = 1 - e^-p, normalized to
// g(0) = 0: y - y ln y.
double g_rayleigh_descending(double y);

}  // namespace noma
