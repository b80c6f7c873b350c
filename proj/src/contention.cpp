#include "noma/contention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/binomial.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "noma/error.hpp"

namespace noma {

PilotOccupancy::PilotOccupancy(int pilots, std::vector<int> pilot_of_device)
    : pilot_of_device_(std::move(pilot_of_device)), load_(static_cast<std::size_t>(pilots), 0) {
    if (pilots < 1) throw DomainError("PilotOccupancy: need at least one pilot");
    for (int p : pilot_of_device_) {
        if (p < 0 || p >= pilots) throw DomainError("PilotOccupancy: pilot index out of range");
        ++load_[p];
    }
    for (int n : load_) {
        if (n == 1) ++singletons_;
        else if (n >= 2) ++collision_pilots_;
    }
}

std::vector<int> PilotOccupancy::singleton_devices() const {
    std::vector<int> out;
    out.reserve(singletons_);
    for (int i = 0; i < device_count(); ++i)
        if (is_singleton_device(i)) out.push_back(i);
    return out;
}

std::vector<int> PilotOccupancy::collided_devices() const {
    std::vector<int> out;
    for (int i = 0; i < device_count(); ++i)
        if (!is_singleton_device(i)) out.push_back(i);
    return out;
}

PilotOccupancy assign_pilots(int devices, int pilots, Rng& rng) {
    if (pilots < 1) throw DomainError("assign_pilots: need at least one pilot");
    if (devices < 0) throw DomainError("assign_pilots: negative device count");
    std::uniform_int_distribution<int> pick(0, pilots - 1);
    std::vector<int> choice(static_cast<std::size_t>(devices));
    for (auto& c : choice) c = pick(rng);
    return PilotOccupancy(pilots, std::move(choice));
}

double singleton_count_pmf(double lambda, int pilots, int singletons) {
    if (pilots < 1) throw DomainError("singleton_count_pmf: need at least one pilot");
    if (singletons < 0 || singletons > pilots) throw DomainError("singleton_count_pmf: L_s outside [0, L]");
    if (!(lambda >= 0.0)) throw DomainError("singleton_count_pmf: negative rate");
    const double mu = lambda / pilots;
    const double p = mu * std::exp(-mu);
    if (p == 0.0) return singletons == 0 ? 1.0 : 0.0;
    return boost::math::pdf(boost::math::binomial_distribution<double>(pilots, p), singletons);
}

namespace {

using boost::multiprecision::cpp_int;

// log of a positive big integer.
double log_of(const cpp_int& v) {
    const unsigned bits = boost::multiprecision::msb(v) + 1;
    if (bits <= 1000) return std::log(v.convert_to<double>());
    const unsigned shift = bits - 64;
    const cpp_int top = v >> shift;
    return std::log(top.convert_to<double>()) + shift * std::log(2.0);
}

// n! * sum_{c=0}^{min(m,n)} (-1)^c C(m,c) (m-c)^(n-c) / (n-c)!, which counts
// the assignments of n labelled devices to m pilots leaving no pilot with a
// load of exactly one. The c = m term is kept: it is nonzero when n = m.
cpp_int no_singleton_assignments(int m, int n) {
    cpp_int total = 0;
    cpp_int binom = 1;    // C(m, c)
    cpp_int falling = 1;  // n! / (n - c)!
    const int top = std::min(m, n);
    for (int c = 0; c <= top; ++c) {
        if (c > 0) {
            binom = binom * (m - c + 1) / c;
            falling *= (n - c + 1);
        }
        const int base = m - c;
        const int exp = n - c;
        cpp_int power;
        if (exp == 0) power = 1;
        else if (base == 0) continue;
        else power = boost::multiprecision::pow(cpp_int(base), static_cast<unsigned>(exp));
        cpp_int term = binom * falling * power;
        if (c % 2 == 0) total += term;
        else total -= term;
    }
    return total;
}

void check_counts(double lambda, int pilots, int singletons) {
    if (pilots < 1) throw DomainError("collision_count_pmf: need at least one pilot");
    if (singletons < 0 || singletons > pilots) throw DomainError("collision_count_pmf: L_s outside [0, L]");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("collision_count_pmf: bad rate");
}

}  // namespace

double collision_count_pmf(double lambda, int pilots, int singletons, int n) {
    check_counts(lambda, pilots, singletons);
    if (n < 0) throw DomainError("collision_count_pmf: negative count");
    const int m = pilots - singletons;
    if (m == 0 || lambda == 0.0) return n == 0 ? 1.0 : 0.0;
    if (n == 1) return 0.0;
    const double mu = lambda / pilots;
    const double a = mu * std::exp(-mu);
    const cpp_int count = no_singleton_assignments(m, n);
    if (count <= 0) return 0.0;
    // Pr(S_n, no load-1 pilot) / Pr(no load-1 pilot), with the Poisson
    // weights e^(-m mu) mu^n / n! factored out of every term.
    const double log_p = -m * mu + n * std::log(mu) - m * std::log1p(-a) - std::lgamma(n + 1.0) + log_of(count);
    return std::exp(log_p);
}

std::vector<double> collision_count_distribution(double lambda, int pilots, int singletons, double tail) {
    check_counts(lambda, pilots, singletons);
    const int m = pilots - singletons;
    std::vector<double> pmf;
    if (m == 0 || lambda == 0.0) return {1.0};
    const double mu = lambda / pilots;
    const double per_pilot_mean = (mu - mu * std::exp(-mu)) / (1.0 - mu * std::exp(-mu));
    const double mean = m * per_pilot_mean;
    double mass = 0.0;
    for (int n = 0;; ++n) {
        const double p = collision_count_pmf(lambda, pilots, singletons, n);
        pmf.push_back(p);
        mass += p;
        if (n > mean && 1.0 - mass < tail) break;
        if (n > 50 + 20 * mean) break;
    }
    return pmf;
}

double expected_colliders(double lambda, int pilots, int singletons) {
    const auto pmf = collision_count_distribution(lambda, pilots, singletons);
    double mean = 0.0;
    for (std::size_t n = 0; n < pmf.size(); ++n) mean += static_cast<double>(n) * pmf[n];
    return mean;
}

double zero_collider_probability(double lambda, int pilots, int singletons) {
    check_counts(lambda, pilots, singletons);
    const int m = pilots - singletons;
    if (m == 0 || lambda == 0.0) return 1.0;
    const double mu = lambda / pilots;
    return std::exp(-m * mu - m * std::log1p(-mu * std::exp(-mu)));
}

int pilots_for_target_collision(double lambda, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("pilots_for_target_collision: beta must lie in (0, 1)");
    if (!(lambda > 0.0)) throw DomainError("pilots_for_target_collision: lambda must be positive");
    const double per_pilot = -std::log1p(-beta);
    const double exact = lambda / per_pilot;
    auto L = static_cast<long long>(std::ceil(exact));
    // ceil() of a ratio that is an integer up to rounding.
    if (L > 1 && -std::expm1(-lambda / (L - 1)) <= beta) --L;
    return static_cast<int>(std::max(1LL, L));
}

}  // namespace noma
