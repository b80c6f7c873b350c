#include "noma/config.hpp"

#include "noma/contention.hpp"
#include "noma/error.hpp"

namespace noma {

void SystemConfig::validate() const {
    if (!(d_min > 0.0)) throw ConfigError("d_min", "must be positive");
    if (!(d_max > d_min)) throw ConfigError("d_max", "must exceed d_min");
    if (!(alpha > 2.0)) throw ConfigError("alpha", "path-loss exponent must exceed 2");
    if (!(tx_power > 0.0)) throw ConfigError("tx_power", "must be positive");
    if (!(noise > 0.0)) throw ConfigError("noise", "must be positive");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda", "must be finite and >= 0");
    if (pilots < 1) throw ConfigError("pilots", "need at least one pilot");
    if (pilot_length < 1) throw ConfigError("pilot_length", "must be >= 1");
    if (slot_length <= pilot_length) throw ConfigError("slot_length", "slot shorter than pilot");
    if (!(payload_bits >= 1.0)) throw ConfigError("payload_bits", "must be >= 1 bit");
}

SystemConfig SystemConfig::with_code_rate(double rate) const {
    if (!(rate > 0.0)) throw ConfigError("rate", "code rate must be positive");
    SystemConfig c = *this;
    c.payload_bits = rate * (slot_length - pilot_length);
    return c;
}

SystemConfig SystemConfig::with_collision_target(double beta) const {
    SystemConfig c = *this;
    c.pilots = pilots_for_target_collision(lambda, beta);
    c.pilot_length = c.pilots;
    return c;
}

SystemConfig table2_config() {
    SystemConfig c;
    c.d_min = 50.0;
    c.d_max = 500.0;
    c.alpha = 3.5;
    c.tx_power = dbm_to_mw(23.0);
    c.noise = dbm_to_mw(noise_dbm(-174.0, 15e3, 3.0));
    c.lambda = 10.0;
    c.pilots = 95;
    c.pilot_length = 95;
    c.slot_length = 2000;
    c.payload_bits = 1024.0;
    return c;
}

}  // namespace noma
