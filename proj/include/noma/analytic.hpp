#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "noma/channel.hpp"
#include "noma/config.hpp"
#include "noma/interference.hpp"
#include "noma/quadrature.hpp"

namespace noma {

enum class InterferenceLaw {
    stable,            // tempered stable fitted at lambda_Z(L_s)
    stable_with_atom,  // atom Pr(Z = 0 | L_s) plus the stable law of I given Z > 0
};

// Power of the marginal (last decoded) SIC layer at decoded fraction v.
enum class MarginalPower {
    upper_quantile,    // F^-1(1 - v)
    lower_quantile,    // F^-1(v), as printed next to the SIC threshold
    layer_average,     // mean of F^-1(1 - y) over the layer ending at v
};

// How the decodable fraction is averaged over v.
enum class OutageForm {
    survival,  // int_0^1 F_I(I*(v)) dv
    density,   // int_0^1 v f_I(I*(v)) dv
};

enum class OutageAggregation {
    per_device,  // undecoded singletons / singletons
    per_slot,    // mean of the per-slot fraction, empty slots counting as 0 decoded
};

// Nodes of the v integral in the outage.
enum class FractionGrid {
    layers,     // v = l / L_s, l = 1..L_s
    continuous, // midpoints of `v_nodes` equal cells on (0, 1]
};

// Smallest window u = i / l in the joint-decoding minimum.
enum class WindowFloor {
    one_layer,      // u >= 1 / (v L_s): at least one whole layer
    one_singleton,  // u >= 1 / L_s
};

struct AnalyticOptions {
    InterferenceLaw interference = InterferenceLaw::stable_with_atom;
    MarginalPower marginal = MarginalPower::layer_average;
    OutageForm form = OutageForm::survival;
    OutageAggregation aggregation = OutageAggregation::per_device;
    FractionGrid fraction_grid = FractionGrid::layers;
    WindowFloor window_floor = WindowFloor::one_layer;
    GConvention convention = GConvention::descending;
    QuadratureSpec quad{};
    int v_nodes = 128;
    int search_grid = 64;          // coarse points per axis of the u / v optimizations
    double refine_tol = 1e-4;      // golden-section tolerance in u and v
    double threshold_cap = 1e12;   // thresholds saturate at threshold_cap * sigma^2
    double mass_tail = 1e-9;       // L_s terms are dropped beyond this much probability
};

// Largest tolerable interference, or nullopt when decoding fails even
// without interference. `saturated` is set when the cap was hit.
struct ThresholdResult {
    std::optional<double> value;
    bool saturated = false;
};

struct OutageTerm {
    int singletons;   // L_s
    double weight;    // normalized weight in the aggregation
    double fraction;  // expected decoded fraction given L_s
};

struct OutageResult {
    double outage = 0.0;
    std::vector<OutageTerm> terms;
    double error = 0.0;  // bound on the error of sum weight * fraction
};

struct ThroughputTerm {
    int singletons;
    double probability;
    double throughput;  // bits per codeword symbol, given L_s
    double v_opt;
    double u_opt;       // 1 for SIC
};

struct ThroughputResult {
    double throughput = 0.0;  // bits per codeword symbol
    double effective = 0.0;   // scaled by (M - q) / M
    std::vector<ThroughputTerm> terms;
};

// min over u in [u_min, 1] of (1 / (u v L_s)) log2(1 + (g(v) - g(v - uv)) / (g(1) - g(v) + (I + sigma^2) / L_s)),
// the joint-decoding rate supported when the strongest fraction v is decoded.
// `u_opt` receives the minimizer.
double sjd_supported_rate(const ChannelLaw& law, int singletons, double v, double interference, const AnalyticOptions& opt = {},
                          double* u_opt = nullptr);

ThresholdResult sjd_threshold(const ChannelLaw& law, int singletons, double v, double rate, const AnalyticOptions& opt = {});

double marginal_power(const ChannelLaw& law, int singletons, double v, MarginalPower kind);

ThresholdResult sic_threshold(const ChannelLaw& law, int singletons, double v, double rate, const AnalyticOptions& opt = {});

// Interference law given L_s, with lambda_Z = E[Z | L_s].
StableModel interference_given(const SystemConfig& cfg, const ChannelLaw& law, int singletons, InterferenceLaw kind);

// E[ln((B + I) / (A + I))] in bits, via int_0^inf L_I(s) / s (e^{-sA} - e^{-sB}) ds.
double expected_log_ratio(const StableModel& model, double a, double b, const QuadratureSpec& quad);

// Expected decoded fraction given L_s.
double sjd_fraction(const SystemConfig& cfg, const ChannelLaw& law, int singletons, const AnalyticOptions& opt = {});
double sic_fraction(const SystemConfig& cfg, const ChannelLaw& law, int singletons, const AnalyticOptions& opt = {});

OutageResult sjd_outage(const SystemConfig& cfg, const AnalyticOptions& opt = {});
OutageResult sic_outage(const SystemConfig& cfg, const AnalyticOptions& opt = {});

// Maximum throughput given L_s.
ThroughputTerm sjd_throughput_given(const SystemConfig& cfg, const ChannelLaw& law, int singletons, const AnalyticOptions& opt = {});
ThroughputTerm sic_throughput_given(const SystemConfig& cfg, const ChannelLaw& law, int singletons, const AnalyticOptions& opt = {});

ThroughputResult sjd_throughput(const SystemConfig& cfg, const AnalyticOptions& opt = {});
ThroughputResult sic_throughput(const SystemConfig& cfg, const AnalyticOptions& opt = {});

// Terms of E_{L_s}[.]: (L_s, Pr(L_s)) in increasing L_s, keeping the most
// likely values until their mass reaches 1 - tail.
std::vector<std::pair<int, double>> singleton_terms(const SystemConfig& cfg, double tail = 1e-9);

// E_{L_s}[evaluator(L_s)] over singleton_terms(); the kept mass is not
// renormalized.
double expect_over_singletons(const SystemConfig& cfg, const std::function<double(int)>& evaluator, double tail = 1e-9);

}  // namespace noma
