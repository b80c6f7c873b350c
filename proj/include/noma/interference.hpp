#pragma once

#include <complex>

#include "noma/channel.hpp"
#include "noma/quadrature.hpp"

namespace noma {

// Tempered stable law fitted to the aggregate power of colliding devices,
// optionally mixed with an atom at zero for slots without colliders:
//
//     E[e^{-sI}] = p0 + (1 - p0) exp(gamma Gamma(-a) ((g + s)^a - g^a)).
//
// With zero_mass = 0 this is the plain tempered stable model.
struct StableModel {
    double alpha_I = 0.5;  // characteristic exponent a = 2 / path-loss exponent
    double g_I = 1.0;      // tempering
    double gamma_I = 0.0;  // dispersion
    double lambda_Z = 0.0;
    double sigma2 = 0.0;
    double zero_mass = 0.0;  // Pr(I = 0) carried outside the continuous part

    // No interference at all.
    bool degenerate() const { return lambda_Z <= 0.0 || zero_mass >= 1.0; }
};

// n-th cumulant of the interference of a Poisson number (mean lambda_Z) of
// independent devices: lambda_Z E[P^n]. Throws DomainError if n alpha <= 2.
double cumulant(const ChannelLaw& law, double lambda_Z, int n);

// Cumulant matching on the first two cumulants.
StableModel fit_stable(const ChannelLaw& law, double lambda_Z);

// Atom at zero with mass p0 plus a tempered stable part fitted to the
// interference given at least one collider, i.e. at mean lambda_Z / (1 - p0).
StableModel fit_stable_with_atom(const ChannelLaw& law, double lambda_Z, double p0);

// E[e^{i omega I}].
std::complex<double> cf(const StableModel& model, double omega);

// E[e^{-s I}], s >= 0.
double laplace(const StableModel& model, double s);

// Continuous part only, without the atom.
double laplace_continuous(const StableModel& model, double s);

// CDF by Gil-Pelaez inversion of cf(); 0 for x < 0, and p0 at x = 0.
double cdf(const StableModel& model, double x, const QuadratureSpec& quad = {});

// Density of the continuous part scaled by 1 - p0, floored at 0.
double pdf(const StableModel& model, double x, const QuadratureSpec& quad = {});

// Sum of the powers of `n_interferers` independent devices.
double sample_aggregate(const ChannelLaw& law, int n_interferers, Rng& rng);

}  // namespace noma
