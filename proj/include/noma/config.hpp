#pragma once

#include <cmath>

namespace noma {

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

// Thermal noise power over `bandwidth_hz`, in dBm.
inline double noise_dbm(double density_dbm_hz, double bandwidth_hz, double noise_figure_db) {
    return density_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

// Physical and protocol parameters of one uplink scenario. All powers are
// linear (mW) and all distances in meters; conversions from dB happen before
// a config is built.
struct SystemConfig {
    double d_min = 50.0;        // inner radius of the annulus
    double d_max = 500.0;       // cell radius
    double alpha = 3.5;         // path-loss exponent
    double tx_power = 0.0;      // P_T, mW
    double noise = 0.0;         // sigma^2, mW
    double lambda = 0.0;        // mean packet arrivals per slot
    int pilots = 1;             // L
    int pilot_length = 1;       // q, symbols
    int slot_length = 2000;     // M, symbols
    double payload_bits = 1.0;  // K

    // K / (M - q): rate of the codeword part of the slot.
    double code_rate() const { return payload_bits / (slot_length - pilot_length); }
    // K / M: rate charged with the pilot overhead.
    double effective_rate() const { return payload_bits / slot_length; }

    // Throws ConfigError naming the first violated constraint.
    void validate() const;

    // Sets K so that code_rate() == rate.
    SystemConfig with_code_rate(double rate) const;
    // Sets L and q = L from the per-device collision target beta.
    SystemConfig with_collision_target(double beta) const;
};

// Single-tone uplink defaults: 500 m cell, 50 m reference distance, 15 kHz,
// 23 dBm transmit power, -174 dBm/Hz noise density, 3 dB noise figure,
// path-loss exponent 3.5, M = 2000.
SystemConfig table2_config();

}  // namespace noma
