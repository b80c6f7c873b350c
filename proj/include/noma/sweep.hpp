#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "noma/analytic.hpp"
#include "noma/config.hpp"
#include "noma/simulator.hpp"

namespace noma {

enum class Engine { analytic, sim, both };

Engine parse_engine(const std::string& name);
std::string to_string(Engine e);

// Grid of scenarios over (lambda, beta or L, code rate or payload).
//
// Document layout (INI):
//
//   [geometry]  d_min, d_max, alpha
//   [radio]     tx_power_dbm, noise_density_dbm_hz, bandwidth_hz, noise_figure_db
//   [protocol]  lambda, beta | pilots, slot_length, payload_bits | rate
//   [run]       engine, slots, seed, workers, output
//   [analytic]  interference, marginal, form, aggregation, fraction_grid, g_convention
//   [interference] colliding_pilots, load
//
// List-valued keys take comma-separated values. Unknown keys are rejected.
struct SweepSpec {
    SystemConfig base;
    std::vector<double> lambdas;
    std::vector<double> betas;    // L and q derived per point; empty when `pilots` is given
    std::vector<int> pilots;
    std::vector<double> rates;    // code rates; empty when the payload is fixed
    Engine engine = Engine::both;
    long long slots = 100000;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string output;
    AnalyticOptions analytic{};
    std::vector<int> colliding_pilots{50, 100, 200};
    double load = 2.0;  // lambda / L for the interference table

    // Every grid point, in output order (lambda outermost, rate innermost).
    struct Point {
        SystemConfig cfg;
        double beta;  // NaN when L was given directly
    };
    std::vector<Point> points() const;

    // Throws ConfigError naming the offending key.
    void validate() const;
};

SweepSpec parse_config(const std::string& text);
SweepSpec load_config(const std::string& path);

enum class SweepMetric { outage, throughput };

struct SweepRow {
    double lambda = 0.0;
    double beta = 0.0;
    int pilots = 0;
    int pilot_length = 0;
    double rate = 0.0;
    int slot_length = 0;
    double payload = 0.0;
    Engine engine = Engine::analytic;
    Decoder decoder = Decoder::sjd;
    std::optional<double> outage;
    std::optional<double> throughput;
    std::optional<double> eff_sum_rate;
    std::optional<double> ratio;  // SJD / SIC throughput at the same point and engine
    std::optional<double> outage_ci;
    std::optional<double> throughput_ci;
    double runtime = 0.0;  // seconds
    std::string status = "ok";
};

std::vector<SweepRow> run_sweep(const SweepSpec& spec, SweepMetric metric);

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);

struct ValidationCheck {
    double lambda, beta, rate;
    int pilots;
    std::string decoder;
    std::string metric;  // outage | throughput | dominance
    double analytic, simulated, difference, tolerance;
    bool gated, pass;
};

// Analytic against simulated for every point and decoder, plus the
// SJD-over-SIC dominance of both engines. Outage agreement is absolute
// (0.05), throughput agreement relative (10 %). Every check is gated.
std::vector<ValidationCheck> validate(const SweepSpec& spec, SweepMetric metric);

void write_validation(std::ostream& os, const std::vector<ValidationCheck>& checks);

struct InterferenceRow {
    int colliding_pilots;
    double lambda_Z;
    double x;
    double model_cdf;
    double empirical_cdf;
};

struct InterferenceSummary {
    int colliding_pilots;
    double lambda_Z;
    double ks;  // sup |model - empirical| over the evaluation points
};

// Model CDF against the empirical CDF of I conditioned on L - L_s colliding
// pilots, at `points` empirical quantiles.
std::vector<InterferenceRow> interference_table(const SweepSpec& spec, int points, std::vector<InterferenceSummary>* summary);

void write_interference_csv(std::ostream& os, const std::vector<InterferenceRow>& rows);

}  // namespace noma
