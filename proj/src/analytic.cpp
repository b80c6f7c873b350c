#include "noma/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include "noma/contention.hpp"
#include "noma/error.hpp"

namespace noma {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

// Minimizes f on [lo, hi] by a coarse scan followed by golden-section search
// around the best coarse point. Returns (argmin, min).
template <class F>
std::pair<double, double> scan_minimize(F&& f, double lo, double hi, int points, double tol) {
    if (hi <= lo || points < 2) return {hi, f(hi)};
    std::vector<double> xs(static_cast<std::size_t>(points));
    std::vector<double> ys(xs.size());
    for (int k = 0; k < points; ++k) {
        xs[k] = lo + (hi - lo) * k / (points - 1);
        ys[k] = f(xs[k]);
    }
    const auto best = static_cast<int>(std::min_element(ys.begin(), ys.end()) - ys.begin());
    double a = xs[std::max(best - 1, 0)];
    double b = xs[std::min(best + 1, points - 1)];
    double arg = xs[best];
    double val = ys[best];
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    if (fc < val) { arg = c; val = fc; }
    if (fd < val) { arg = d; val = fd; }
    return {arg, val};
}

double window_floor(const AnalyticOptions& opt, int singletons, double v) {
    const double per = opt.window_floor == WindowFloor::one_layer ? v * singletons : singletons;
    return std::min(1.0, 1.0 / per);
}

double rate_threshold_factor(double rate) { return std::expm1(rate * std::numbers::ln2); }

void check_layer_args(int singletons, double v, double rate) {
    if (singletons < 1) throw DomainError("threshold: L_s must be >= 1");
    if (!(v > 0.0 && v <= 1.0)) throw DomainError("threshold: v must lie in (0, 1]");
    if (!(rate > 0.0)) throw DomainError("threshold: rate must be positive");
}

// Residual power of the layers ranked below fraction v plus noise.
double residual(const ChannelLaw& law, int singletons, double v, double extra) {
    return (law.g(1.0) - law.g(v)) * singletons + law.config().noise + extra;
}

class CdfCache {
public:
    CdfCache(const StableModel& m, const QuadratureSpec& q) : model_(m), quad_(q) {}
    double operator()(double x) {
        if (x < 0.0) return 0.0;
        auto it = memo_.find(x);
        if (it != memo_.end()) return it->second;
        const double v = cdf(model_, x, quad_);
        memo_.emplace(x, v);
        return v;
    }

private:
    const StableModel& model_;
    const QuadratureSpec& quad_;
    std::map<double, double> memo_;
};

struct FractionNodes {
    std::vector<double> v;
    double weight;
};

FractionNodes fraction_nodes(int singletons, const AnalyticOptions& opt) {
    FractionNodes nodes;
    if (opt.fraction_grid == FractionGrid::layers) {
        for (int l = 1; l <= singletons; ++l) nodes.v.push_back(static_cast<double>(l) / singletons);
        nodes.weight = 1.0 / singletons;
    } else {
        for (int k = 0; k < opt.v_nodes; ++k) nodes.v.push_back((k + 0.5) / opt.v_nodes);
        nodes.weight = 1.0 / opt.v_nodes;
    }
    return nodes;
}

// Decoded fraction from per-node thresholds (-1 encodes "none"), already
// made monotone by the caller.
double fraction_from_thresholds(const StableModel& model, const FractionNodes& nodes, const std::vector<double>& thr,
                                const AnalyticOptions& opt) {
    double total = 0.0;
    if (opt.form == OutageForm::survival) {
        CdfCache F(model, opt.quad);
        for (double x : thr) total += F(x);
    } else {
        for (std::size_t k = 0; k < thr.size(); ++k) {
            if (thr[k] <= 0.0) continue;
            if (model.degenerate()) continue;
            total += nodes.v[k] * pdf(model, thr[k], opt.quad);
        }
    }
    return std::clamp(total * nodes.weight, 0.0, 1.0);
}

double as_node(const ThresholdResult& t) { return t.value ? *t.value : -1.0; }

OutageResult aggregate_outage(const SystemConfig& cfg, const AnalyticOptions& opt,
                              double (*fraction)(const SystemConfig&, const ChannelLaw&, int, const AnalyticOptions&)) {
    cfg.validate();
    const ChannelLaw law(cfg, opt.convention);
    const auto terms = singleton_terms(cfg, opt.mass_tail);
    OutageResult out;
    double norm = 0.0;
    for (auto [ls, p] : terms) norm += opt.aggregation == OutageAggregation::per_device ? p * ls : p;
    if (norm <= 0.0) {
        out.outage = 0.0;
        return out;
    }
    double decoded = 0.0;
    for (auto [ls, p] : terms) {
        const double w = (opt.aggregation == OutageAggregation::per_device ? p * ls : p) / norm;
        const double f = ls == 0 ? 0.0 : fraction(cfg, law, ls, opt);
        out.terms.push_back({ls, w, f});
        decoded += w * f;
    }
    out.outage = std::clamp(1.0 - decoded, 0.0, 1.0);
    out.error = opt.mass_tail + (opt.fraction_grid == FractionGrid::continuous ? 0.5 / opt.v_nodes : 0.0);
    return out;
}

ThroughputResult aggregate_throughput(const SystemConfig& cfg, const AnalyticOptions& opt,
                                      ThroughputTerm (*given)(const SystemConfig&, const ChannelLaw&, int, const AnalyticOptions&)) {
    cfg.validate();
    const ChannelLaw law(cfg, opt.convention);
    ThroughputResult out;
    for (auto [ls, p] : singleton_terms(cfg, opt.mass_tail)) {
        ThroughputTerm t = ls == 0 ? ThroughputTerm{0, p, 0.0, 0.0, 0.0} : given(cfg, law, ls, opt);
        t.probability = p;
        out.throughput += p * t.throughput;
        out.terms.push_back(t);
    }
    out.effective = out.throughput * (cfg.slot_length - cfg.pilot_length) / cfg.slot_length;
    return out;
}

}  // namespace

double sjd_supported_rate(const ChannelLaw& law, int singletons, double v, double interference, const AnalyticOptions& opt,
                          double* u_opt) {
    const double ls = singletons;
    const double gv = law.g(v);
    const double rest = (law.g(1.0) - gv) + (interference + law.config().noise) / ls;
    auto rate = [&](double u) {
        const double window = gv - law.g(std::max(0.0, v - u * v));
        return std::log2(1.0 + window / rest) / (u * v * ls);
    };
    const double lo = window_floor(opt, singletons, v);
    const auto [arg, val] = scan_minimize(rate, lo, 1.0, opt.search_grid, opt.refine_tol);
    if (u_opt) *u_opt = arg;
    return val;
}

ThresholdResult sjd_threshold(const ChannelLaw& law, int singletons, double v, double rate, const AnalyticOptions& opt) {
    check_layer_args(singletons, v, rate);
    auto feasible = [&](double x) { return sjd_supported_rate(law, singletons, v, x, opt) >= rate; };
    if (!feasible(0.0)) return {};
    const double noise = law.config().noise;
    const double cap = opt.threshold_cap * noise;
    double lo = 0.0;
    double hi = noise;
    while (feasible(hi)) {
        lo = hi;
        if (hi >= cap) return {cap, true};
        hi = std::min(hi * 4.0, cap);
    }
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return {lo, false};
}

double marginal_power(const ChannelLaw& law, int singletons, double v, MarginalPower kind) {
    switch (kind) {
        case MarginalPower::upper_quantile: return law.power_quantile(1.0 - v);
        case MarginalPower::lower_quantile: return law.power_quantile(std::min(v, std::nextafter(1.0, 0.0)));
        case MarginalPower::layer_average: return law.layer_power(v, singletons);
    }
    throw DomainError("marginal_power: unknown kind");
}

ThresholdResult sic_threshold(const ChannelLaw& law, int singletons, double v, double rate, const AnalyticOptions& opt) {
    check_layer_args(singletons, v, rate);
    const double theta = rate_threshold_factor(rate);
    const double q = marginal_power(law, singletons, v, opt.marginal);
    const double value = (q - theta * residual(law, singletons, v, 0.0)) / theta;
    if (value < 0.0 || std::isnan(value)) return {};
    const double cap = opt.threshold_cap * law.config().noise;
    if (value >= cap) return {cap, true};
    return {value, false};
}

StableModel interference_given(const SystemConfig& cfg, const ChannelLaw& law, int singletons, InterferenceLaw kind) {
    const double lz = expected_colliders(cfg.lambda, cfg.pilots, singletons);
    if (kind == InterferenceLaw::stable) return fit_stable(law, lz);
    return fit_stable_with_atom(law, lz, zero_collider_probability(cfg.lambda, cfg.pilots, singletons));
}

double expected_log_ratio(const StableModel& model, double a, double b, const QuadratureSpec& quad) {
    if (!(a > 0.0) || !(b >= a)) throw DomainError("expected_log_ratio: need 0 < a <= b");
    if (b == a) return 0.0;
    const double plain = std::log2(b / a);
    if (model.degenerate()) return plain;
    auto integrand = [&](double s) {
        if (s == 0.0) return b - a;
        const double diff = std::exp(-s * a) * -std::expm1(-s * (b - a));
        return laplace_continuous(model, s) / s * diff;
    };
    const auto r = integrate_semi_infinite(integrand, quad, 1.0 / b);
    const double p0 = model.zero_mass;
    return p0 * plain + (1.0 - p0) * r.value / std::numbers::ln2;
}

double sjd_fraction(const SystemConfig& cfg, const ChannelLaw& law, int singletons, const AnalyticOptions& opt) {
    const StableModel model = interference_given(cfg, law, singletons, opt.interference);
    const auto nodes = fraction_nodes(singletons, opt);
    std::vector<double> thr(nodes.v.size());
    for (std::size_t k = 0; k < thr.size(); ++k) thr[k] = as_node(sjd_threshold(law, singletons, nodes.v[k], cfg.code_rate(), opt));
    // A fraction of at least v is decoded if any larger fraction is.
    for (std::size_t k = thr.size(); k-- > 1;) thr[k - 1] = std::max(thr[k - 1], thr[k]);
    return fraction_from_thresholds(model, nodes, thr, opt);
}

double sic_fraction(const SystemConfig& cfg, const ChannelLaw& law, int singletons, const AnalyticOptions& opt) {
    const StableModel model = interference_given(cfg, law, singletons, opt.interference);
    const auto nodes = fraction_nodes(singletons, opt);
    std::vector<double> thr(nodes.v.size());
    for (std::size_t k = 0; k < thr.size(); ++k) thr[k] = as_node(sic_threshold(law, singletons, nodes.v[k], cfg.code_rate(), opt));
    // Layers are cancelled in order, so every earlier layer must also pass.
    for (std::size_t k = 1; k < thr.size(); ++k) thr[k] = std::min(thr[k], thr[k - 1]);
    return fraction_from_thresholds(model, nodes, thr, opt);
}

OutageResult sjd_outage(const SystemConfig& cfg, const AnalyticOptions& opt) { return aggregate_outage(cfg, opt, &sjd_fraction); }

OutageResult sic_outage(const SystemConfig& cfg, const AnalyticOptions& opt) { return aggregate_outage(cfg, opt, &sic_fraction); }

ThroughputTerm sjd_throughput_given(const SystemConfig& cfg, const ChannelLaw& law, int singletons, const AnalyticOptions& opt) {
    if (singletons < 1) return {singletons, 0.0, 0.0, 0.0, 0.0};
    const StableModel model = interference_given(cfg, law, singletons, opt.interference);
    const double ls = singletons;
    const double lo = std::min(1.0, 1.0 / ls);

    // Worst window of the joint decoding constraint at fraction v.
    auto window_rate = [&](double v, double* u_arg) {
        const double a = residual(law, singletons, v, 0.0);
        auto per_u = [&](double u) {
            const double b = residual(law, singletons, std::max(0.0, v - u * v), 0.0);
            return expected_log_ratio(model, a, b, opt.quad) / u;
        };
        const auto [arg, val] = scan_minimize(per_u, window_floor(opt, singletons, v), 1.0, opt.search_grid, opt.refine_tol);
        if (u_arg) *u_arg = arg;
        return val;
    };
    auto negated = [&](double v) { return -window_rate(v, nullptr); };

    // Coarse scan in v; ties go to the larger v.
    const int n = opt.search_grid;
    double best_v = 1.0;
    double best = -1.0;
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double v = n == 1 ? 1.0 : lo + (1.0 - lo) * k / (n - 1);
        vals[k] = window_rate(v, nullptr);
        if (vals[k] >= best - 1e-9 * std::abs(best)) {
            best = std::max(best, vals[k]);
            best_v = v;
        }
    }
    const double step = n > 1 ? (1.0 - lo) / (n - 1) : 0.0;
    const auto [v_ref, neg_ref] =
        scan_minimize(negated, std::max(lo, best_v - step), std::min(1.0, best_v + step), 3, opt.refine_tol);
    if (-neg_ref > best + 1e-9 * std::abs(best)) {
        best = -neg_ref;
        best_v = v_ref;
    }
    double u_star = 1.0;
    window_rate(best_v, &u_star);
    return {singletons, 0.0, std::max(0.0, best), best_v, u_star};
}

ThroughputTerm sic_throughput_given(const SystemConfig& cfg, const ChannelLaw& law, int singletons, const AnalyticOptions& opt) {
    if (singletons < 1) return {singletons, 0.0, 0.0, 0.0, 1.0};
    const StableModel model = interference_given(cfg, law, singletons, opt.interference);
    const double ls = singletons;
    const double lo = std::min(1.0, 1.0 / ls);
    const int n = std::max(opt.search_grid, 1);
    double running = std::numeric_limits<double>::infinity();
    double best = 0.0;
    double best_v = lo;
    for (int k = 0; k < n; ++k) {
        const double v = n == 1 ? 1.0 : lo + (1.0 - lo) * k / (n - 1);
        const double a = residual(law, singletons, v, 0.0);
        const double q = marginal_power(law, singletons, v, opt.marginal);
        running = std::min(running, expected_log_ratio(model, a, a + q, opt.quad));
        const double value = v * ls * running;
        if (value >= best - 1e-9 * std::abs(best)) {
            best = std::max(best, value);
            best_v = v;
        }
    }
    return {singletons, 0.0, best, best_v, 1.0};
}

ThroughputResult sjd_throughput(const SystemConfig& cfg, const AnalyticOptions& opt) {
    return aggregate_throughput(cfg, opt, &sjd_throughput_given);
}

ThroughputResult sic_throughput(const SystemConfig& cfg, const AnalyticOptions& opt) {
    return aggregate_throughput(cfg, opt, &sic_throughput_given);
}

std::vector<std::pair<int, double>> singleton_terms(const SystemConfig& cfg, double tail) {
    const int L = cfg.pilots;
    std::vector<double> pmf(static_cast<std::size_t>(L) + 1);
    for (int k = 0; k <= L; ++k) pmf[k] = singleton_count_pmf(cfg.lambda, L, k);
    std::vector<int> order(pmf.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return pmf[a] > pmf[b]; });
    std::vector<std::pair<int, double>> out;
    double mass = 0.0;
    for (int k : order) {
        if (mass >= 1.0 - tail) break;
        out.emplace_back(k, pmf[k]);
        mass += pmf[k];
    }
    std::sort(out.begin(), out.end());
    return out;
}

double expect_over_singletons(const SystemConfig& cfg, const std::function<double(int)>& evaluator, double tail) {
    double total = 0.0;
    for (auto [ls, p] : singleton_terms(cfg, tail)) total += p * evaluator(ls);
    return total;
}

}  // namespace noma
