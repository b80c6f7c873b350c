#pragma once

#include <cstdint>
#include <vector>

#include "noma/channel.hpp"
#include "noma/config.hpp"
#include "noma/contention.hpp"

namespace noma {

struct SlotRealization {
    std::vector<DeviceSample> devices;
    PilotOccupancy occupancy{1, {}};
    std::vector<double> powers;  // singleton powers, descending
    double interference = 0.0;   // total power of colliding devices
    double noise = 0.0;

    int singletons() const { return static_cast<int>(powers.size()); }
};

enum class Decoder { sjd, sic };

struct DecodeOutcome {
    Decoder decoder = Decoder::sjd;
    int decoded = 0;          // l*: the strongest l* layers are decoded
    double fraction = 0.0;    // l* / L_s, 0 without singletons
    std::vector<bool> layer_ok;
    double throughput = 0.0;  // l* R_c, bits per codeword symbol
};

SlotRealization simulate_slot(const SystemConfig& cfg, const ChannelLaw& law, Rng& rng);

// Slot built from given singleton powers (any order), interference and noise.
SlotRealization make_slot(std::vector<double> powers, double interference, double noise);

// Rate log2(1 + P_(j) / (sum_{c>j} P_(c) + I + sigma^2)) of each layer when
// the stronger layers have been removed. The joint constraint over layers
// l-i+1..l telescopes into the sum of these rates.
std::vector<double> layer_rates(const SlotRealization& slot);

DecodeOutcome decode_sjd(const SlotRealization& slot, double rate);
DecodeOutcome decode_sic(const SlotRealization& slot, double rate);

// Maximum equal-rate sum throughput of the slot, bits per codeword symbol.
double throughput_sjd(const SlotRealization& slot);
double throughput_sic(const SlotRealization& slot);

// Interference of one slot conditioned on L_s: each of the L - L_s
// non-singleton pilots carries a Poisson(lambda / L) load conditioned to
// differ from one. Returns (Z, I).
std::pair<int, double> sample_conditional_interference(const SystemConfig& cfg, const ChannelLaw& law, int singletons, Rng& rng);

// Random stream of one slot, independent of how slots are scheduled.
Rng slot_stream(std::uint64_t seed, std::uint64_t slot);

enum class Metric { outage, throughput, decoded };

struct RunOptions {
    int workers = 0;                 // 0: hardware concurrency
    bool per_slot_outage = false;    // mean of per-slot fractions instead of the device ratio
};

struct Estimate {
    double value = 0.0;
    double ci_half_width = 0.0;  // 95 %, normal approximation
    bool defined = true;         // false when no slot had a singleton
    long long slots = 0;
};

// Per-decoder totals over a batch of slots.
struct DecoderTotals {
    double undecoded = 0.0, undecoded_sq = 0.0, cross = 0.0;  // sum u, u^2, u s
    double fraction_sum = 0.0, fraction_sq = 0.0;             // per-slot outage fractions
    double throughput = 0.0, throughput_sq = 0.0;
    double decoded = 0.0, decoded_sq = 0.0;

    void merge(const DecoderTotals& o);
};

struct BatchTotals {
    long long slots = 0;
    long long slots_with_singletons = 0;
    double singletons = 0.0, singletons_sq = 0.0;
    DecoderTotals sjd, sic;

    void merge(const BatchTotals& o);
};

// Simulates `slots` slots and accumulates both decoders. Slots are grouped
// in fixed blocks that are merged in block order, so the totals do not
// depend on the worker count.
BatchTotals simulate_batch(const SystemConfig& cfg, long long slots, std::uint64_t seed, const RunOptions& options = {});

Estimate estimate(const BatchTotals& totals, Decoder decoder, Metric metric, bool per_slot_outage = false);

Estimate run_experiment(const SystemConfig& cfg, Decoder decoder, Metric metric, long long slots, std::uint64_t seed,
                        const RunOptions& options = {});

}  // namespace noma
