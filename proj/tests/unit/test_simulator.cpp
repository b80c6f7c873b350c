#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "noma/analytic.hpp"
#include "noma/contention.hpp"
#include "noma/error.hpp"
#include "noma/simulator.hpp"
#include "oracles/oracles.hpp"

using namespace noma;

namespace {

SystemConfig scenario(double lambda, double beta, double rate) {
    SystemConfig c = table2_config();
    c.lambda = lambda;
    return c.with_collision_target(beta).with_code_rate(rate);
}

}  // namespace

TEST_CASE("hand-checkable two-layer slot") {
    const auto slot = make_slot({3.0, 3.0}, 0.0, 1.0);
    CHECK(decode_sjd(slot, 1.0).decoded == 2);
    CHECK(decode_sic(slot, 1.0).decoded == 0);
    CHECK(decode_sic(slot, 0.8).decoded == 2);
    CHECK(throughput_sjd(slot) == doctest::Approx(std::log2(7.0)).epsilon(1e-12));
    CHECK(throughput_sic(slot) == doctest::Approx(2.0 * std::log2(1.75)).epsilon(1e-12));

    const auto rates = layer_rates(slot);
    REQUIRE(rates.size() == 2);
    CHECK(rates[0] == doctest::Approx(std::log2(1.75)));
    CHECK(rates[1] == doctest::Approx(2.0));
}

TEST_CASE("single layer at unit SNR") {
    const auto slot = make_slot({1.0}, 0.0, 1.0);
    CHECK(decode_sjd(slot, 1.0).decoded == 1);
    CHECK(decode_sjd(slot, 1.0 + 1e-12).decoded == 0);
    CHECK(decode_sic(slot, 1.0).decoded == 1);
    CHECK(throughput_sjd(slot) == doctest::Approx(1.0));
    CHECK(throughput_sic(slot) == doctest::Approx(1.0));

    const auto empty = make_slot({}, 2.0, 1.0);
    CHECK(decode_sjd(empty, 0.1).decoded == 0);
    CHECK(decode_sjd(empty, 0.1).fraction == 0.0);
    CHECK(throughput_sjd(empty) == 0.0);
    CHECK(throughput_sic(empty) == 0.0);
}

TEST_CASE("outcome flags") {
    const auto slot = make_slot({0.5, 8.0, 2.0, 0.1}, 0.3, 0.05);
    CHECK(slot.powers == std::vector<double>{8.0, 2.0, 0.5, 0.1});
    for (double r : {0.05, 0.3, 0.8, 1.5}) {
        for (const auto& out : {decode_sjd(slot, r), decode_sic(slot, r)}) {
            REQUIRE(out.layer_ok.size() == 4);
            for (int j = 0; j < 4; ++j) CHECK(out.layer_ok[j] == (j < out.decoded));
            CHECK(out.fraction == doctest::Approx(out.decoded / 4.0));
            CHECK((out.throughput == 0.0) == (out.decoded == 0));
            CHECK(out.throughput == doctest::Approx(out.decoded * r));
        }
        CHECK(decode_sic(slot, r).decoder == Decoder::sic);
    }
    CHECK_THROWS_AS(decode_sjd(slot, 0.0), DomainError);
    CHECK_THROWS_AS(make_slot({1.0}, -1.0, 1.0), DomainError);
}

TEST_CASE("simulated slots") {
    SystemConfig idle = scenario(1.0, 0.1, 0.1);
    idle.lambda = 0.0;
    const ChannelLaw law(idle);
    Rng rng(1);
    const auto slot = simulate_slot(idle, law, rng);
    CHECK(slot.singletons() == 0);
    CHECK(slot.interference == 0.0);

    SystemConfig c = table2_config();
    c.lambda = 10.0;
    c.pilots = 20;
    c.pilot_length = 20;
    const ChannelLaw law20(c);
    double sum = 0.0;
    const int slots = 1000000;
    for (int s = 0; s < slots; ++s) {
        Rng r = slot_stream(2, s);
        const auto x = simulate_slot(c, law20, r);
        sum += x.singletons();
        if (s < 1000) {
            CHECK(x.interference >= 0.0);
            for (int j = 1; j < x.singletons(); ++j) CHECK(x.powers[j - 1] >= x.powers[j]);
            CHECK(x.occupancy.singleton_count() == x.singletons());
        }
    }
    CHECK(std::abs(sum / slots - 6.065) <= 0.01);
}

TEST_CASE("colliders given the singleton count follow the collision pmf") {
    SystemConfig c = table2_config();
    c.lambda = 5.0;
    c.pilots = 10;
    c.pilot_length = 10;
    const ChannelLaw law(c);
    std::vector<double> hist;
    double kept = 0.0;
    for (int s = 0; s < 1500000; ++s) {
        Rng r = slot_stream(4, s);
        const auto x = simulate_slot(c, law, r);
        if (x.singletons() != 4) continue;
        const int z = x.occupancy.collided_device_count();
        if (static_cast<int>(hist.size()) <= z) hist.resize(z + 1, 0.0);
        hist[z] += 1.0;
        kept += 1.0;
    }
    for (auto& h : hist) h /= kept;
    CHECK(oracle::total_variation(hist, collision_count_distribution(5.0, 10, 4)) <= 0.01);

    // The conditional sampler on its own.
    std::vector<double> direct;
    Rng rng(5);
    for (int k = 0; k < 300000; ++k) {
        const int z = sample_conditional_interference(c, law, 4, rng).first;
        if (static_cast<int>(direct.size()) <= z) direct.resize(z + 1, 0.0);
        direct[z] += 1.0 / 300000;
    }
    CHECK(oracle::total_variation(direct, collision_count_distribution(5.0, 10, 4)) <= 0.01);
}

TEST_CASE("per-slot dominance and monotonicity in interference") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> count(0, 40);
    for (int trial = 0; trial < 5000; ++trial) {
        std::vector<double> p(count(rng));
        for (auto& x : p) x = std::exp(10.0 * unit(rng) - 5.0);
        const double i = std::exp(8.0 * unit(rng) - 4.0) * (unit(rng) < 0.2 ? 0.0 : 1.0);
        const double rate = std::exp(5.0 * unit(rng) - 4.0);
        const auto slot = make_slot(p, i, 1.0);
        const auto quieter = make_slot(p, 0.5 * i, 1.0);
        const auto a = decode_sjd(slot, rate);
        const auto b = decode_sic(slot, rate);
        CHECK(a.decoded >= b.decoded);
        CHECK(throughput_sjd(slot) >= throughput_sic(slot));
        CHECK(decode_sjd(quieter, rate).decoded >= a.decoded);
        CHECK(decode_sic(quieter, rate).decoded >= b.decoded);
        if (a.decoded == slot.singletons() && a.decoded > 0) CHECK(throughput_sjd(slot) >= a.decoded * rate * (1 - 1e-12));
        if (b.decoded == slot.singletons() && b.decoded > 0) CHECK(throughput_sic(slot) >= b.decoded * rate * (1 - 1e-12));
    }
}

TEST_CASE("estimates and determinism") {
    SystemConfig idle = scenario(1.0, 0.1, 0.1);
    idle.lambda = 0.0;
    const auto undefined = run_experiment(idle, Decoder::sjd, Metric::outage, 1, 1);
    CHECK_FALSE(undefined.defined);

    const auto c = scenario(6.0, 0.1, 0.1);
    RunOptions one;
    one.workers = 1;
    RunOptions four;
    four.workers = 4;
    const auto a = run_experiment(c, Decoder::sjd, Metric::outage, 20000, 9, one);
    const auto b = run_experiment(c, Decoder::sjd, Metric::outage, 20000, 9, four);
    const auto again = run_experiment(c, Decoder::sjd, Metric::outage, 20000, 9, one);
    CHECK(a.value == b.value);
    CHECK(a.ci_half_width == b.ci_half_width);
    CHECK(a.value == again.value);
    CHECK(a.slots == 20000);

    const auto twice = run_experiment(c, Decoder::sjd, Metric::outage, 40000, 10, one);
    CHECK(twice.ci_half_width / a.ci_half_width == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.15));
    CHECK_THROWS_AS(run_experiment(c, Decoder::sjd, Metric::outage, 0, 1), DomainError);
}

TEST_CASE("simulated outage and throughput against the analytic engine") {
    const auto c = scenario(5.0, 0.1, 0.1);
    const auto totals = simulate_batch(c, 100000, 11);
    CHECK(std::abs(estimate(totals, Decoder::sjd, Metric::outage).value - sjd_outage(c).outage) <= 0.05);
    CHECK(std::abs(estimate(totals, Decoder::sic, Metric::outage).value - sic_outage(c).outage) <= 0.05);
    const auto per_slot = estimate(totals, Decoder::sjd, Metric::outage, true);
    CHECK(per_slot.value >= estimate(totals, Decoder::sjd, Metric::outage).value - 0.01);
}
