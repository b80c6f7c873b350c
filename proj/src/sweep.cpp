#include "noma/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <locale>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "noma/contention.hpp"
#include "noma/error.hpp"
#include "noma/interference.hpp"

namespace noma {

namespace pt = boost::property_tree;

Engine parse_engine(const std::string& name) {
    if (name == "analytic") return Engine::analytic;
    if (name == "sim") return Engine::sim;
    if (name == "both") return Engine::both;
    throw ConfigError("engine", "expected analytic, sim or both, got '" + name + "'");
}

std::string to_string(Engine e) {
    switch (e) {
        case Engine::analytic: return "analytic";
        case Engine::sim: return "sim";
        case Engine::both: return "both";
    }
    return "?";
}

namespace {

const std::map<std::string, std::set<std::string>> kSchema = {
    {"geometry", {"d_min", "d_max", "alpha"}},
    {"radio", {"tx_power_dbm", "noise_density_dbm_hz", "bandwidth_hz", "noise_figure_db"}},
    {"protocol", {"lambda", "beta", "pilots", "slot_length", "payload_bits", "rate"}},
    {"run", {"engine", "slots", "seed", "workers", "output"}},
    {"analytic", {"interference", "marginal", "form", "aggregation", "fraction_grid", "g_convention"}},
    {"interference", {"colliding_pilots", "load"}},
};

double to_double(const std::string& key, const std::string& text) {
    std::istringstream is(text);
    is.imbue(std::locale::classic());
    double v = 0.0;
    is >> v;
    if (!is || !(is >> std::ws).eof()) throw ConfigError(key, "not a number: '" + text + "'");
    return v;
}

long long to_integer(const std::string& key, const std::string& text) {
    const double v = to_double(key, text);
    if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError(key, "not an integer: '" + text + "'");
    return static_cast<long long>(v);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    boost::split(parts, text, boost::is_any_of(","));
    for (auto& p : parts) boost::trim(p);
    std::erase_if(parts, [](const std::string& p) { return p.empty(); });
    return parts;
}

template <class T, class Conv>
std::vector<T> list_of(const std::string& key, const std::string& text, Conv conv) {
    std::vector<T> out;
    for (const auto& p : split_list(text)) out.push_back(static_cast<T>(conv(key, p)));
    if (out.empty()) throw ConfigError(key, "empty list");
    return out;
}

template <class E>
E pick(const std::string& key, const std::string& value, const std::map<std::string, E>& choices) {
    auto it = choices.find(value);
    if (it != choices.end()) return it->second;
    std::string names;
    for (const auto& [n, e] : choices) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError(key, "expected one of " + names + ", got '" + value + "'");
}

std::string format_number(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(10);
    os << v;
    return os.str();
}

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

const char* decoder_name(Decoder d) { return d == Decoder::sjd ? "sjd" : "sic"; }

double mean_singletons(const SystemConfig& cfg) { return cfg.lambda * std::exp(-cfg.lambda / cfg.pilots); }

// Runs f(i) for i in [0, n) on a small pool; f writes to its own slot.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
    unsigned w = workers > 0 ? static_cast<unsigned>(workers) : std::max(1u, std::thread::hardware_concurrency());
    w = static_cast<unsigned>(std::min<std::size_t>(w, n));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < w; ++k)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
        });
}

}  // namespace

std::vector<SweepSpec::Point> SweepSpec::points() const {
    std::vector<Point> out;
    const std::size_t pilot_axis = betas.empty() ? pilots.size() : betas.size();
    const std::size_t rate_axis = std::max<std::size_t>(rates.size(), 1);
    for (double lambda : lambdas) {
        for (std::size_t b = 0; b < pilot_axis; ++b) {
            for (std::size_t r = 0; r < rate_axis; ++r) {
                SystemConfig cfg = base;
                cfg.lambda = lambda;
                double beta = std::numeric_limits<double>::quiet_NaN();
                if (!betas.empty()) {
                    beta = betas[b];
                    cfg = cfg.with_collision_target(beta);
                } else {
                    cfg.pilots = pilots[b];
                    cfg.pilot_length = pilots[b];
                }
                if (!rates.empty()) cfg = cfg.with_code_rate(rates[r]);
                out.push_back({cfg, beta});
            }
        }
    }
    return out;
}

void SweepSpec::validate() const {
    if (lambdas.empty()) throw ConfigError("lambda", "empty axis");
    if (betas.empty() && pilots.empty()) throw ConfigError("beta", "one of beta or pilots is required");
    if (!betas.empty() && !pilots.empty()) throw ConfigError("pilots", "give either beta or pilots, not both");
    for (double l : lambdas)
        if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("lambda", "must be finite and >= 0");
    for (double b : betas) {
        if (b == 0.0) throw ConfigError("beta", "beta = 0 would need infinitely many pilots");
        if (!(b > 0.0 && b < 1.0)) throw ConfigError("beta", "must lie in (0, 1)");
    }
    if (!betas.empty())
        for (double l : lambdas)
            if (!(l > 0.0)) throw ConfigError("lambda", "must be positive when L is derived from beta");
    for (int p : pilots)
        if (p < 1) throw ConfigError("pilots", "need at least one pilot");
    for (double r : rates)
        if (!(r > 0.0)) throw ConfigError("rate", "code rate must be positive");
    if (engine != Engine::analytic && slots < 1000) throw ConfigError("slots", "simulation needs at least 1000 slots");
    if (slots < 1) throw ConfigError("slots", "must be >= 1");
    if (colliding_pilots.empty()) throw ConfigError("colliding_pilots", "empty list");
    for (int m : colliding_pilots)
        if (m < 1) throw ConfigError("colliding_pilots", "must be >= 1");
    if (!(load > 0.0)) throw ConfigError("load", "must be positive");
    analytic.quad.validate();
    for (const auto& p : points()) p.cfg.validate();
}

SweepSpec parse_config(const std::string& text) {
    pt::ptree tree;
    try {
        std::istringstream is(text);
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("", std::string("parse error: ") + e.message() + " at line " + std::to_string(e.line()));
    }
    for (const auto& [section, body] : tree) {
        auto it = kSchema.find(section);
        if (it == kSchema.end()) {
            if (body.empty()) throw ConfigError(section, "key outside any section");
            throw ConfigError(section, "unknown section");
        }
        for (const auto& [key, value] : body)
            if (!it->second.contains(key)) throw ConfigError(section + "." + key, "unknown key");
    }
    auto get = [&](const std::string& path) { return tree.get_optional<std::string>(pt::ptree::path_type(path, '.')); };

    SweepSpec spec;
    SystemConfig& c = spec.base;
    c = table2_config();
    double tx_dbm = 23.0, density = -174.0, bandwidth = 15e3, nf = 3.0;
    if (auto v = get("geometry.d_min")) c.d_min = to_double("d_min", *v);
    if (auto v = get("geometry.d_max")) c.d_max = to_double("d_max", *v);
    if (auto v = get("geometry.alpha")) c.alpha = to_double("alpha", *v);
    if (auto v = get("radio.tx_power_dbm")) tx_dbm = to_double("tx_power_dbm", *v);
    if (auto v = get("radio.noise_density_dbm_hz")) density = to_double("noise_density_dbm_hz", *v);
    if (auto v = get("radio.bandwidth_hz")) bandwidth = to_double("bandwidth_hz", *v);
    if (auto v = get("radio.noise_figure_db")) nf = to_double("noise_figure_db", *v);
    if (!(bandwidth > 0.0)) throw ConfigError("bandwidth_hz", "must be positive");
    c.tx_power = dbm_to_mw(tx_dbm);
    c.noise = dbm_to_mw(noise_dbm(density, bandwidth, nf));

    spec.lambdas = list_of<double>("lambda", get("protocol.lambda").value_or("10"), to_double);
    if (auto v = get("protocol.pilots")) spec.pilots = list_of<int>("pilots", *v, to_integer);
    if (auto v = get("protocol.beta")) spec.betas = list_of<double>("beta", *v, to_double);
    else if (spec.pilots.empty()) spec.betas = {0.1};
    if (auto v = get("protocol.slot_length")) c.slot_length = static_cast<int>(to_integer("slot_length", *v));
    if (auto v = get("protocol.payload_bits")) c.payload_bits = to_double("payload_bits", *v);
    if (auto v = get("protocol.rate")) spec.rates = list_of<double>("rate", *v, to_double);

    if (auto v = get("run.engine")) spec.engine = parse_engine(*v);
    if (auto v = get("run.slots")) spec.slots = to_integer("slots", *v);
    if (auto v = get("run.seed")) spec.seed = static_cast<std::uint64_t>(to_integer("seed", *v));
    if (auto v = get("run.workers")) spec.workers = static_cast<int>(to_integer("workers", *v));
    if (auto v = get("run.output")) spec.output = *v;

    AnalyticOptions& a = spec.analytic;
    if (auto v = get("analytic.interference"))
        a.interference = pick<InterferenceLaw>("interference", *v,
                                               {{"stable", InterferenceLaw::stable}, {"stable_with_atom", InterferenceLaw::stable_with_atom}});
    if (auto v = get("analytic.marginal"))
        a.marginal = pick<MarginalPower>("marginal", *v,
                                         {{"upper_quantile", MarginalPower::upper_quantile},
                                          {"lower_quantile", MarginalPower::lower_quantile},
                                          {"layer_average", MarginalPower::layer_average}});
    if (auto v = get("analytic.form"))
        a.form = pick<OutageForm>("form", *v, {{"survival", OutageForm::survival}, {"density", OutageForm::density}});
    if (auto v = get("analytic.aggregation"))
        a.aggregation = pick<OutageAggregation>("aggregation", *v,
                                                {{"per_device", OutageAggregation::per_device}, {"per_slot", OutageAggregation::per_slot}});
    if (auto v = get("analytic.fraction_grid"))
        a.fraction_grid = pick<FractionGrid>("fraction_grid", *v, {{"layers", FractionGrid::layers}, {"continuous", FractionGrid::continuous}});
    if (auto v = get("analytic.g_convention"))
        a.convention = pick<GConvention>("g_convention", *v, {{"descending", GConvention::descending}, {"ascending", GConvention::ascending}});

    if (auto v = get("interference.colliding_pilots")) spec.colliding_pilots = list_of<int>("colliding_pilots", *v, to_integer);
    if (auto v = get("interference.load")) spec.load = to_double("load", *v);

    spec.validate();
    return spec;
}

SweepSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

SweepRow blank_row(const SweepSpec::Point& p, Engine engine, Decoder decoder) {
    SweepRow r;
    r.lambda = p.cfg.lambda;
    r.beta = p.beta;
    r.pilots = p.cfg.pilots;
    r.pilot_length = p.cfg.pilot_length;
    r.rate = p.cfg.code_rate();
    r.slot_length = p.cfg.slot_length;
    r.payload = p.cfg.payload_bits;
    r.engine = engine;
    r.decoder = decoder;
    return r;
}

void analytic_rows(const SweepSpec& spec, const SweepSpec::Point& p, SweepMetric metric, std::vector<SweepRow>& out) {
    const SystemConfig& cfg = p.cfg;
    SweepRow sjd = blank_row(p, Engine::analytic, Decoder::sjd);
    SweepRow sic = blank_row(p, Engine::analytic, Decoder::sic);
    auto fill = [&](SweepRow& row, auto&& compute) {
        const auto t0 = Clock::now();
        try {
            compute(row);
        } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
        }
        row.runtime = seconds_since(t0);
    };
    const double per_decoded = cfg.payload_bits / cfg.slot_length;
    if (metric == SweepMetric::outage) {
        auto outage = [&](SweepRow& row, auto fn) {
            row.outage = fn(cfg, spec.analytic).outage;
            row.eff_sum_rate = (1.0 - *row.outage) * mean_singletons(cfg) * per_decoded;
        };
        fill(sjd, [&](SweepRow& row) { outage(row, &sjd_outage); });
        fill(sic, [&](SweepRow& row) { outage(row, &sic_outage); });
    } else {
        auto thr = [&](SweepRow& row, auto fn) {
            const auto r = fn(cfg, spec.analytic);
            row.throughput = r.throughput;
            row.eff_sum_rate = r.effective;
        };
        fill(sjd, [&](SweepRow& row) { thr(row, &sjd_throughput); });
        fill(sic, [&](SweepRow& row) { thr(row, &sic_throughput); });
        if (sjd.throughput && sic.throughput && *sic.throughput > 0.0) sjd.ratio = sic.ratio = *sjd.throughput / *sic.throughput;
    }
    out.push_back(sjd);
    out.push_back(sic);
}

void sim_rows(const SweepSpec& spec, const SweepSpec::Point& p, SweepMetric metric, std::vector<SweepRow>& out) {
    const SystemConfig& cfg = p.cfg;
    SweepRow sjd = blank_row(p, Engine::sim, Decoder::sjd);
    SweepRow sic = blank_row(p, Engine::sim, Decoder::sic);
    const auto t0 = Clock::now();
    try {
        RunOptions ro;
        ro.workers = 1;
        const BatchTotals totals = simulate_batch(cfg, spec.slots, spec.seed, ro);
        const double per_decoded = cfg.payload_bits / cfg.slot_length;
        const double overhead = static_cast<double>(cfg.slot_length - cfg.pilot_length) / cfg.slot_length;
        for (auto* row : {&sjd, &sic}) {
            if (metric == SweepMetric::outage) {
                const Estimate e = estimate(totals, row->decoder, Metric::outage);
                if (e.defined) {
                    row->outage = e.value;
                    row->outage_ci = e.ci_half_width;
                } else {
                    row->status = "undefined: no singletons";
                }
                row->eff_sum_rate = estimate(totals, row->decoder, Metric::decoded).value * per_decoded;
            } else {
                const Estimate e = estimate(totals, row->decoder, Metric::throughput);
                row->throughput = e.value;
                row->throughput_ci = e.ci_half_width;
                row->eff_sum_rate = e.value * overhead;
            }
        }
        if (metric == SweepMetric::throughput && *sic.throughput > 0.0) sjd.ratio = sic.ratio = *sjd.throughput / *sic.throughput;
    } catch (const std::exception& e) {
        sjd.status = sic.status = std::string("error: ") + e.what();
    }
    sjd.runtime = sic.runtime = seconds_since(t0);
    out.push_back(sjd);
    out.push_back(sic);
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, SweepMetric metric) {
    spec.validate();
    const auto points = spec.points();
    std::vector<std::vector<SweepRow>> per_point(points.size());
    parallel_for(points.size(), spec.workers, [&](std::size_t i) {
        if (spec.engine != Engine::sim) analytic_rows(spec, points[i], metric, per_point[i]);
        if (spec.engine != Engine::analytic) sim_rows(spec, points[i], metric, per_point[i]);
    });
    std::vector<SweepRow> rows;
    for (auto& v : per_point) rows.insert(rows.end(), v.begin(), v.end());
    return rows;
}

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "lambda,beta,L,q,R_c,M,K,engine,decoder,outage,throughput,eff_sum_rate,ratio_sjd_sic,outage_ci,throughput_ci,runtime_s,status\n";
    for (const auto& r : rows) {
        os << format_number(r.lambda) << ',' << (std::isnan(r.beta) ? "" : format_number(r.beta)) << ',' << r.pilots << ','
           << r.pilot_length << ',' << format_number(r.rate) << ',' << r.slot_length << ',' << format_number(r.payload) << ','
           << to_string(r.engine) << ',' << decoder_name(r.decoder) << ',' << cell(r.outage) << ',' << cell(r.throughput) << ','
           << cell(r.eff_sum_rate) << ',' << cell(r.ratio) << ',' << cell(r.outage_ci) << ',' << cell(r.throughput_ci) << ','
           << format_number(r.runtime) << ',' << '"' << r.status << '"' << '\n';
    }
}

std::vector<ValidationCheck> validate(const SweepSpec& spec, SweepMetric metric) {
    SweepSpec both = spec;
    both.engine = Engine::both;
    const auto rows = run_sweep(both, metric);
    std::vector<ValidationCheck> checks;
    // Rows come in groups of four per point: analytic sjd, sic, sim sjd, sic.
    for (std::size_t i = 0; i + 3 < rows.size(); i += 4) {
        const SweepRow* a[2] = {&rows[i], &rows[i + 1]};
        const SweepRow* s[2] = {&rows[i + 2], &rows[i + 3]};
        const SweepRow& head = rows[i];
        auto base = [&](std::string decoder, std::string m) {
            ValidationCheck c{};
            c.lambda = head.lambda;
            c.beta = head.beta;
            c.rate = head.rate;
            c.pilots = head.pilots;
            c.decoder = std::move(decoder);
            c.metric = std::move(m);
            c.gated = true;
            return c;
        };
        const auto value = [&](const SweepRow* r) {
            const auto& v = metric == SweepMetric::outage ? r->outage : r->throughput;
            return v.value_or(std::numeric_limits<double>::quiet_NaN());
        };
        const std::string mname = metric == SweepMetric::outage ? "outage" : "throughput";
        for (int d = 0; d < 2; ++d) {
            ValidationCheck c = base(decoder_name(a[d]->decoder), mname);
            c.analytic = value(a[d]);
            c.simulated = value(s[d]);
            if (metric == SweepMetric::outage) {
                c.difference = std::abs(c.analytic - c.simulated);
                c.tolerance = 0.05;
            } else {
                c.difference = std::abs(c.analytic - c.simulated) / std::max(std::abs(c.simulated), 1e-300);
                c.tolerance = 0.10;
            }
            c.pass = c.difference <= c.tolerance;
            checks.push_back(c);
        }
        // SJD never does worse than SIC.
        for (int e = 0; e < 2; ++e) {
            const SweepRow* const* pair = e == 0 ? a : s;
            ValidationCheck c = base(e == 0 ? "analytic" : "sim", "dominance");
            c.analytic = value(pair[0]);
            c.simulated = value(pair[1]);
            c.tolerance = e == 0 ? 1e-3 : 0.0;
            c.difference = metric == SweepMetric::outage ? c.analytic - c.simulated : c.simulated - c.analytic;
            c.pass = c.difference <= c.tolerance;
            checks.push_back(c);
        }
    }
    return checks;
}

void write_validation(std::ostream& os, const std::vector<ValidationCheck>& checks) {
    os << "lambda,beta,L,R_c,decoder,metric,analytic,simulated,difference,tolerance,gated,pass\n";
    for (const auto& c : checks) {
        os << format_number(c.lambda) << ',' << (std::isnan(c.beta) ? "" : format_number(c.beta)) << ',' << c.pilots << ','
           << format_number(c.rate) << ',' << c.decoder << ',' << c.metric << ',' << format_number(c.analytic) << ','
           << format_number(c.simulated) << ',' << format_number(c.difference) << ',' << format_number(c.tolerance) << ','
           << (c.gated ? "yes" : "no") << ',' << (c.pass ? "pass" : "FAIL") << '\n';
    }
}

std::vector<InterferenceRow> interference_table(const SweepSpec& spec, int points, std::vector<InterferenceSummary>* summary) {
    spec.validate();
    if (points < 2) throw ConfigError("points", "need at least two evaluation points");
    std::vector<InterferenceRow> rows;
    for (int m : spec.colliding_pilots) {
        SystemConfig cfg = spec.base;
        cfg.pilots = m;
        cfg.pilot_length = std::min(m, cfg.slot_length - 1);
        cfg.lambda = spec.load * m;
        const ChannelLaw law(cfg);
        const double lz = expected_colliders(cfg.lambda, m, 0);
        const StableModel model = spec.analytic.interference == InterferenceLaw::stable
                                      ? fit_stable(law, lz)
                                      : fit_stable_with_atom(law, lz, zero_collider_probability(cfg.lambda, m, 0));
        std::vector<double> sample(static_cast<std::size_t>(spec.slots));
        for (long long k = 0; k < spec.slots; ++k) {
            Rng rng = slot_stream(spec.seed + static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(k));
            sample[k] = sample_conditional_interference(cfg, law, 0, rng).second;
        }
        std::sort(sample.begin(), sample.end());
        const double n = static_cast<double>(sample.size());
        double ks = 0.0;
        for (int j = 1; j <= points; ++j) {
            const auto idx = static_cast<std::size_t>(std::llround(j * (n - 1) / (points + 1)));
            const double x = sample[idx];
            const double F = cdf(model, x, spec.analytic.quad);
            const double hi = static_cast<double>(std::upper_bound(sample.begin(), sample.end(), x) - sample.begin()) / n;
            const double lo = static_cast<double>(std::lower_bound(sample.begin(), sample.end(), x) - sample.begin()) / n;
            ks = std::max({ks, std::abs(F - hi), std::abs(F - lo)});
            rows.push_back({m, lz, x, F, hi});
        }
        if (summary) summary->push_back({m, lz, ks});
    }
    return rows;
}

void write_interference_csv(std::ostream& os, const std::vector<InterferenceRow>& rows) {
    os << "colliding_pilots,lambda_z,x,model_cdf,empirical_cdf\n";
    for (const auto& r : rows)
        os << r.colliding_pilots << ',' << format_number(r.lambda_Z) << ',' << format_number(r.x) << ','
           << format_number(r.model_cdf) << ',' << format_number(r.empirical_cdf) << '\n';
}

}  // namespace noma
