#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "noma/channel.hpp"

namespace noma {

// Result of one round of uniform pilot selection. Pilots are 0-based.
class PilotOccupancy {
public:
    PilotOccupancy(int pilots, std::vector<int> pilot_of_device);

    int pilot_count() const { return static_cast<int>(load_.size()); }
    int device_count() const { return static_cast<int>(pilot_of_device_.size()); }

    int pilot_of(int device) const { return pilot_of_device_[device]; }
    int load(int pilot) const { return load_[pilot]; }

    bool is_singleton_device(int device) const { return load_[pilot_of_device_[device]] == 1; }

    int singleton_count() const { return singletons_; }  // L_s
    int collision_pilot_count() const { return collision_pilots_; }
    int idle_pilot_count() const { return pilot_count() - singletons_ - collision_pilots_; }
    int collided_device_count() const { return device_count() - singletons_; }  // Z

    // Device indices, in device order.
    std::vector<int> singleton_devices() const;
    std::vector<int> collided_devices() const;

private:
    std::vector<int> pilot_of_device_;
    std::vector<int> load_;
    int singletons_ = 0;
    int collision_pilots_ = 0;
};

PilotOccupancy assign_pilots(int devices, int pilots, Rng& rng);

// Pr(L_s = singletons): Binomial(L, (lambda/L) e^(-lambda/L)).
double singleton_count_pmf(double lambda, int pilots, int singletons);

// Pr(Z = n | L_s) for Z the number of devices on the L - L_s non-singleton
// pilots. Each of those pilots carries an independent Poisson(lambda/L) load
// conditioned to differ from 1; the mass is the inclusion-exclusion sum over
// pilots forced to a load of exactly one, evaluated in exact integer
// arithmetic because its terms cancel by up to hundreds of decades.
double collision_count_pmf(double lambda, int pilots, int singletons, int n);

// Pr(Z = n | L_s) for n = 0, 1, ... until the accumulated mass reaches
// 1 - tail (and n is past the mean).
std::vector<double> collision_count_distribution(double lambda, int pilots, int singletons, double tail = 1e-12);

// E[Z | L_s] as sum n Pr(Z = n | L_s).
double expected_colliders(double lambda, int pilots, int singletons);

// Pr(Z = 0 | L_s).
double zero_collider_probability(double lambda, int pilots, int singletons);

// Smallest L with 1 - exp(-lambda / L) <= beta.
int pilots_for_target_collision(double lambda, double beta);

}  // namespace noma
