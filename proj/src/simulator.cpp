#include "noma/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <thread>
#include <tuple>

#include "noma/error.hpp"
#include "noma/interference.hpp"

namespace noma {

namespace {

constexpr long long kBlock = 1024;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void sort_descending(std::vector<double>& powers) {
    std::vector<std::size_t> idx(powers.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return powers[a] > powers[b]; });
    std::vector<double> out(powers.size());
    for (std::size_t k = 0; k < idx.size(); ++k) out[k] = powers[idx[k]];
    powers = std::move(out);
}

double z95(double variance_of_mean) { return 1.959963984540054 * std::sqrt(std::max(0.0, variance_of_mean)); }

}  // namespace

SlotRealization make_slot(std::vector<double> powers, double interference, double noise) {
    if (!(interference >= 0.0) || !(noise >= 0.0)) throw DomainError("make_slot: interference and noise must be >= 0");
    for (double p : powers)
        if (!(p >= 0.0)) throw DomainError("make_slot: powers must be >= 0");
    SlotRealization s;
    sort_descending(powers);
    s.powers = std::move(powers);
    s.interference = interference;
    s.noise = noise;
    return s;
}

SlotRealization simulate_slot(const SystemConfig& cfg, const ChannelLaw& law, Rng& rng) {
    SlotRealization s;
    s.noise = cfg.noise;
    int n = 0;
    if (cfg.lambda > 0.0) n = std::poisson_distribution<int>(cfg.lambda)(rng);
    s.devices.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s.devices.push_back(law.sample_device(rng));
    s.occupancy = assign_pilots(n, cfg.pilots, rng);
    for (int i = 0; i < n; ++i) {
        if (s.occupancy.is_singleton_device(i)) s.powers.push_back(s.devices[i].power);
        else s.interference += s.devices[i].power;
    }
    sort_descending(s.powers);
    return s;
}

std::vector<double> layer_rates(const SlotRealization& slot) {
    const std::size_t n = slot.powers.size();
    std::vector<double> rates(n);
    double below = slot.interference + slot.noise;  // residual under layer j, built from the weakest up
    for (std::size_t j = n; j-- > 0;) {
        rates[j] = std::log1p(slot.powers[j] / below) / std::numbers::ln2;
        below += slot.powers[j];
    }
    return rates;
}

namespace {

DecodeOutcome outcome(Decoder d, int decoded, int singletons, double rate) {
    DecodeOutcome o;
    o.decoder = d;
    o.decoded = decoded;
    o.fraction = singletons > 0 ? static_cast<double>(decoded) / singletons : 0.0;
    o.layer_ok.assign(static_cast<std::size_t>(singletons), false);
    std::fill_n(o.layer_ok.begin(), decoded, true);
    o.throughput = decoded * rate;
    return o;
}

}  // namespace

DecodeOutcome decode_sjd(const SlotRealization& slot, double rate) {
    if (!(rate > 0.0)) throw DomainError("decode_sjd: rate must be positive");
    const auto r = layer_rates(slot);
    const int n = slot.singletons();
    for (int l = n; l >= 1; --l) {
        // Windows of the i weakest among the l strongest, i = 1..l.
        double sum = 0.0;
        double need = 0.0;
        bool ok = true;
        for (int i = 1; i <= l && ok; ++i) {
            sum += r[l - i];
            need += rate;
            ok = sum >= need;
        }
        if (ok) return outcome(Decoder::sjd, l, n, rate);
    }
    return outcome(Decoder::sjd, 0, n, rate);
}

DecodeOutcome decode_sic(const SlotRealization& slot, double rate) {
    if (!(rate > 0.0)) throw DomainError("decode_sic: rate must be positive");
    const auto r = layer_rates(slot);
    const int n = slot.singletons();
    int l = 0;
    while (l < n && r[l] >= rate) ++l;
    return outcome(Decoder::sic, l, n, rate);
}

double throughput_sjd(const SlotRealization& slot) {
    const auto r = layer_rates(slot);
    const int n = slot.singletons();
    double best = 0.0;
    for (int l = 1; l <= n; ++l) {
        double sum = 0.0;
        double smallest = std::numeric_limits<double>::infinity();
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= l; ++i) {
            sum += r[l - i];
            smallest = std::min(smallest, r[l - i]);
            // A window mean is never below its smallest term; keep rounding from saying otherwise.
            worst = std::min(worst, std::max(sum / i, smallest));
        }
        best = std::max(best, l * worst);
    }
    return best;
}

double throughput_sic(const SlotRealization& slot) {
    const auto r = layer_rates(slot);
    double best = 0.0;
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t l = 1; l <= r.size(); ++l) {
        smallest = std::min(smallest, r[l - 1]);
        best = std::max(best, static_cast<double>(l) * smallest);
    }
    return best;
}

std::pair<int, double> sample_conditional_interference(const SystemConfig& cfg, const ChannelLaw& law, int singletons, Rng& rng) {
    if (singletons < 0 || singletons > cfg.pilots) throw DomainError("sample_conditional_interference: L_s outside [0, L]");
    const double mu = cfg.lambda / cfg.pilots;
    std::poisson_distribution<int> load(mu);
    int z = 0;
    for (int p = singletons; p < cfg.pilots; ++p) {
        int k = 1;
        while (k == 1) k = mu > 0.0 ? load(rng) : 0;
        z += k;
    }
    return {z, sample_aggregate(law, z, rng)};
}

Rng slot_stream(std::uint64_t seed, std::uint64_t slot) { return Rng(splitmix64(splitmix64(seed) ^ slot)); }

void DecoderTotals::merge(const DecoderTotals& o) {
    undecoded += o.undecoded;
    undecoded_sq += o.undecoded_sq;
    cross += o.cross;
    fraction_sum += o.fraction_sum;
    fraction_sq += o.fraction_sq;
    throughput += o.throughput;
    throughput_sq += o.throughput_sq;
    decoded += o.decoded;
    decoded_sq += o.decoded_sq;
}

void BatchTotals::merge(const BatchTotals& o) {
    slots += o.slots;
    slots_with_singletons += o.slots_with_singletons;
    singletons += o.singletons;
    singletons_sq += o.singletons_sq;
    sjd.merge(o.sjd);
    sic.merge(o.sic);
}

namespace {

void accumulate(DecoderTotals& t, const DecodeOutcome& d, double thr, int singletons) {
    const double s = singletons;
    const double u = s - d.decoded;
    t.undecoded += u;
    t.undecoded_sq += u * u;
    t.cross += u * s;
    if (singletons > 0) {
        const double f = u / s;
        t.fraction_sum += f;
        t.fraction_sq += f * f;
    }
    t.throughput += thr;
    t.throughput_sq += thr * thr;
    t.decoded += d.decoded;
    t.decoded_sq += static_cast<double>(d.decoded) * d.decoded;
}

BatchTotals run_block(const SystemConfig& cfg, const ChannelLaw& law, long long first, long long last, std::uint64_t seed) {
    BatchTotals b;
    const double rate = cfg.code_rate();
    for (long long k = first; k < last; ++k) {
        Rng rng = slot_stream(seed, static_cast<std::uint64_t>(k));
        const auto slot = simulate_slot(cfg, law, rng);
        const int ls = slot.singletons();
        ++b.slots;
        if (ls > 0) ++b.slots_with_singletons;
        b.singletons += ls;
        b.singletons_sq += static_cast<double>(ls) * ls;
        accumulate(b.sjd, decode_sjd(slot, rate), throughput_sjd(slot), ls);
        accumulate(b.sic, decode_sic(slot, rate), throughput_sic(slot), ls);
    }
    return b;
}

}  // namespace

BatchTotals simulate_batch(const SystemConfig& cfg, long long slots, std::uint64_t seed, const RunOptions& options) {
    cfg.validate();
    if (slots < 1) throw DomainError("simulate_batch: need at least one slot");
    const ChannelLaw law(cfg);
    const long long blocks = (slots + kBlock - 1) / kBlock;
    std::vector<BatchTotals> parts(static_cast<std::size_t>(blocks));
    unsigned workers = options.workers > 0 ? static_cast<unsigned>(options.workers) : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<long long>(workers, blocks));
    auto work = [&](unsigned w) {
        for (long long b = w; b < blocks; b += workers) parts[b] = run_block(cfg, law, b * kBlock, std::min(slots, (b + 1) * kBlock), seed);
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    BatchTotals total;
    for (const auto& p : parts) total.merge(p);
    return total;
}

Estimate estimate(const BatchTotals& t, Decoder decoder, Metric metric, bool per_slot_outage) {
    const DecoderTotals& d = decoder == Decoder::sjd ? t.sjd : t.sic;
    const double n = static_cast<double>(t.slots);
    Estimate e;
    e.slots = t.slots;
    auto mean_ci = [&](double sum, double sq, double count) {
        const double mean = sum / count;
        const double var = count > 1 ? (sq - count * mean * mean) / (count - 1) : 0.0;
        return std::pair{mean, z95(var / count)};
    };
    switch (metric) {
        case Metric::outage:
            if (t.slots_with_singletons == 0) {
                e.defined = false;
                return e;
            }
            if (per_slot_outage) {
                std::tie(e.value, e.ci_half_width) = mean_ci(d.fraction_sum, d.fraction_sq, static_cast<double>(t.slots_with_singletons));
            } else {
                // Ratio estimator sum u / sum s with a delta-method interval.
                const double ratio = d.undecoded / t.singletons;
                const double resid = d.undecoded_sq - 2.0 * ratio * d.cross + ratio * ratio * t.singletons_sq;
                const double mean_s = t.singletons / n;
                e.value = ratio;
                e.ci_half_width = n > 1 ? z95(resid / (n * (n - 1)) / (mean_s * mean_s)) : 0.0;
            }
            return e;
        case Metric::throughput: std::tie(e.value, e.ci_half_width) = mean_ci(d.throughput, d.throughput_sq, n); return e;
        case Metric::decoded: std::tie(e.value, e.ci_half_width) = mean_ci(d.decoded, d.decoded_sq, n); return e;
    }
    return e;
}

Estimate run_experiment(const SystemConfig& cfg, Decoder decoder, Metric metric, long long slots, std::uint64_t seed,
                        const RunOptions& options) {
    return estimate(simulate_batch(cfg, slots, seed, options), decoder, metric, options.per_slot_outage);
}

}  // namespace noma
