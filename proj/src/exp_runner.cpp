#include "hgf/exp_runner.hpp"

#include "hgf/bridge_lab.hpp"
#include "hgf/extremal_stats.hpp"
#include "hgf/normal.hpp"
#include "hgf/poisson_tools.hpp"
#include "hgf/tree_sampler.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace hgf
{

using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct KindName
{
    ExperimentKind kind;
    std::string_view name;
};

constexpr KindName kind_names[] = {
    {ExperimentKind::mean_measure, "mean_measure"},
    {ExperimentKind::avoidance, "avoidance"},
    {ExperimentKind::max_law, "max_law"},
    {ExperimentKind::overlap_census, "overlap_census"},
    {ExperimentKind::ballot, "ballot"},
    {ExperimentKind::perturbation, "perturbation"},
    {ExperimentKind::log_correction, "log_correction"},
    {ExperimentKind::chen_stein_budget, "chen_stein_budget"},
};

bool is_bridge_kind(ExperimentKind kind)
{
    return kind == ExperimentKind::ballot || kind == ExperimentKind::perturbation;
}

/// Kinds whose analysis only looks at replicate maxima.
bool is_max_kind(ExperimentKind kind)
{
    return kind == ExperimentKind::max_law || kind == ExperimentKind::log_correction;
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::string fmt_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

std::string_view to_string(ExperimentKind kind)
{
    for (const auto& kn : kind_names) {
        if (kn.kind == kind) return kn.name;
    }
    return "unknown";
}

std::optional<ExperimentKind> parse_kind(std::string_view name)
{
    for (const auto& kn : kind_names) {
        if (kn.name == name) return kn.kind;
    }
    return std::nullopt;
}

const std::vector<ExperimentKind>& all_kinds()
{
    static const std::vector<ExperimentKind> kinds = [] {
        std::vector<ExperimentKind> v;
        for (const auto& kn : kind_names) v.push_back(kn.kind);
        return v;
    }();
    return kinds;
}

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : ValidationError([&] {
          std::string msg = "invalid experiment config:";
          for (const auto& d : diagnostics) msg += "\n  " + d;
          return msg;
      }()),
      diagnostics_(std::move(diagnostics))
{
}

std::uint64_t entry_seed(std::uint64_t master_seed, const LadderPoint& point)
{
    const std::uint64_t geometry =
        (static_cast<std::uint64_t>(point.scales) << 32) | static_cast<std::uint32_t>(point.bits_per_scale);
    return splitmix64(master_seed ^ splitmix64(geometry));
}

// ---------------------------------------------------------------------------
// Config parsing and validation

namespace
{

template <class T>
void read_field(const json& doc, const char* key, T& target, std::vector<std::string>& diag)
{
    if (!doc.contains(key)) return;
    try {
        target = doc.at(key).get<T>();
    } catch (const json::exception& e) {
        diag.push_back(std::string(key) + ": " + e.what());
    }
}

} // namespace

ExperimentConfig config_from_json(const json& doc)
{
    std::vector<std::string> diag;
    if (!doc.is_object()) throw ConfigError({"<root>: config must be a JSON object"});

    static const std::set<std::string> known = {"kind",   "ladder",      "window", "gamma",  "reps", "master_seed",
                                                "threads", "output", "leaf_budget", "n_grid", "eps"};
    for (const auto& item : doc.items()) {
        if (!known.contains(item.key())) diag.push_back(item.key() + ": unknown field");
    }

    ExperimentConfig cfg;
    if (doc.contains("kind")) {
        const auto& k = doc.at("kind");
        if (!k.is_string()) {
            diag.push_back("kind: must be a string");
        } else if (auto parsed = parse_kind(k.get<std::string>())) {
            cfg.kind = *parsed;
        } else {
            diag.push_back("kind: unknown experiment kind '" + k.get<std::string>() + "'");
        }
    } else {
        diag.push_back("kind: required");
    }

    if (doc.contains("ladder")) {
        const auto& l = doc.at("ladder");
        if (!l.is_array()) {
            diag.push_back("ladder: must be an array of [K, m] pairs");
        } else {
            for (std::size_t i = 0; i < l.size(); ++i) {
                const auto& e = l[i];
                if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
                    diag.push_back("ladder[" + std::to_string(i) + "]: must be a pair of integers [K, m]");
                    continue;
                }
                cfg.ladder.push_back({e[0].get<int>(), e[1].get<int>()});
            }
        }
    }

    if (doc.contains("window")) {
        const auto& w = doc.at("window");
        if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !(w[1].is_number() || w[1].is_null())) {
            diag.push_back("window: must be [lower, upper] with upper a number or null (+infinity)");
        } else {
            cfg.window_lower = w[0].get<double>();
            cfg.window_upper = w[1].is_null() ? std::numeric_limits<double>::infinity() : w[1].get<double>();
        }
    }

    if (doc.contains("gamma") && !doc.at("gamma").is_null()) {
        if (!doc.at("gamma").is_number()) {
            diag.push_back("gamma: must be a number or null");
        } else {
            cfg.gamma = doc.at("gamma").get<double>();
        }
    }

    auto read_unsigned = [&](const char* key, auto& target) {
        if (!doc.contains(key)) return;
        const auto& v = doc.at(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            diag.push_back(std::string(key) + ": must be a nonnegative integer");
            return;
        }
        target = v.get<std::remove_reference_t<decltype(target)>>();
    };
    read_unsigned("reps", cfg.reps);
    read_unsigned("master_seed", cfg.master_seed);
    read_unsigned("threads", cfg.threads);
    read_unsigned("leaf_budget", cfg.leaf_budget);
    read_field(doc, "output", cfg.output, diag);
    read_field(doc, "eps", cfg.eps, diag);
    if (doc.contains("n_grid")) {
        const auto& g = doc.at("n_grid");
        if (!g.is_array()) {
            diag.push_back("n_grid: must be an array of integers");
        } else {
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (!g[i].is_number_unsigned()) {
                    diag.push_back("n_grid[" + std::to_string(i) + "]: must be a nonnegative integer");
                    continue;
                }
                cfg.n_grid.push_back(g[i].get<std::size_t>());
            }
        }
    }

    if (!diag.empty()) throw ConfigError(std::move(diag));
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError({"config: cannot open '" + path.string() + "'"});
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("config: JSON parse error: ") + e.what()});
    }
    return config_from_json(doc);
}

void validate(const ExperimentConfig& cfg)
{
    std::vector<std::string> diag;
    const bool bridge = is_bridge_kind(cfg.kind);

    if (cfg.reps < 1) diag.push_back("reps: must be >= 1");
    if (cfg.threads < 1) diag.push_back("threads: must be >= 1");
    if (cfg.output.empty()) diag.push_back("output: must be a nonempty path");

    if (bridge) {
        if (cfg.n_grid.empty()) diag.push_back("n_grid: required for " + std::string(to_string(cfg.kind)));
        for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
            if (cfg.n_grid[i] < 2) diag.push_back("n_grid[" + std::to_string(i) + "]: bridge length must be >= 2");
        }
        if (cfg.kind == ExperimentKind::perturbation && !(cfg.eps != 0.0 && std::abs(cfg.eps) <= 1.0)) {
            diag.push_back("eps: must satisfy 0 < |eps| <= 1");
        }
        if (!cfg.ladder.empty()) diag.push_back("ladder: not used by " + std::string(to_string(cfg.kind)));
    } else {
        if (!cfg.n_grid.empty()) diag.push_back("n_grid: only used by ballot and perturbation");
        if (!(std::isfinite(cfg.window_lower) && cfg.window_lower < cfg.window_upper)) {
            diag.push_back("window: needs a finite lower end and lower < upper");
        } else if (!std::isfinite(cfg.window_upper) && !is_max_kind(cfg.kind)) {
            diag.push_back("window: must be compact for " + std::string(to_string(cfg.kind)));
        }
        if (cfg.kind == ExperimentKind::max_law && cfg.reps < 100) diag.push_back("reps: max_law needs >= 100");

        std::vector<ModelParams> built;
        for (std::size_t i = 0; i < cfg.ladder.size(); ++i) {
            const std::string where = "ladder[" + std::to_string(i) + "]: ";
            try {
                ModelParams p(cfg.ladder[i].scales, cfg.ladder[i].bits_per_scale);
                if (p.size() < 2) {
                    diag.push_back(where + "N = K m must be >= 2");
                    continue;
                }
                if (!is_max_kind(cfg.kind)) {
                    if (p.alpha() >= 1.0) {
                        diag.push_back(where + "alpha = 1 has no admissible gamma; use m >= 2");
                    } else if (cfg.gamma) {
                        const double cap = (1.0 - p.alpha()) / 2.0;
                        if (!(*cfg.gamma > 0.0 && *cfg.gamma < cap)) {
                            diag.push_back("gamma: must lie in (0, " + fmt_double(cap) + ") for ladder[" +
                                           std::to_string(i) + "]");
                        }
                    }
                }
                if ((cfg.kind == ExperimentKind::overlap_census || cfg.kind == ExperimentKind::chen_stein_budget) &&
                    p.scales() < 2) {
                    diag.push_back(where + "needs K >= 2 (no interior overlaps otherwise)");
                }
                built.push_back(p);
            } catch (const ValidationError& e) {
                diag.push_back(where + e.what());
            }
        }
        if (cfg.kind == ExperimentKind::log_correction && diag.empty()) {
            std::set<int> sizes;
            for (const auto& p : built) sizes.insert(p.size());
            if (sizes.size() < 3) diag.push_back("ladder: log_correction needs at least three distinct N");
            for (const auto& p : built) {
                if (std::abs(p.alpha() - built.front().alpha()) > 1e-12) {
                    diag.push_back("ladder: log_correction needs a common alpha across entries");
                    break;
                }
            }
        }
    }
    if (!diag.empty()) throw ConfigError(std::move(diag));

    if (!bridge) {
        for (const auto& point : cfg.ladder) {
            const int n = point.scales * point.bits_per_scale;
            if (n > 62 || (std::uint64_t{1} << n) > cfg.leaf_budget) {
                throw BudgetError("ladder entry (" + std::to_string(point.scales) + ", " +
                                  std::to_string(point.bits_per_scale) + ") has 2^" + std::to_string(n) +
                                  " leaves, above the leaf budget " + std::to_string(cfg.leaf_budget));
            }
        }
    }
}

json config_to_json(const ExperimentConfig& cfg)
{
    json ladder = json::array();
    for (const auto& p : cfg.ladder) ladder.push_back({p.scales, p.bits_per_scale});
    json window = json::array({cfg.window_lower});
    if (std::isfinite(cfg.window_upper)) {
        window.push_back(cfg.window_upper);
    } else {
        window.push_back(nullptr);
    }
    json doc = {
        {"kind", std::string(to_string(cfg.kind))},
        {"ladder", ladder},
        {"window", window},
        {"gamma", cfg.gamma ? json(*cfg.gamma) : json(nullptr)},
        {"reps", cfg.reps},
        {"master_seed", cfg.master_seed},
        {"threads", cfg.threads},
        {"output", cfg.output},
        {"leaf_budget", cfg.leaf_budget},
        {"n_grid", cfg.n_grid},
        {"eps", cfg.eps},
    };
    return doc;
}

std::string config_hash(const ExperimentConfig& cfg)
{
    json doc = config_to_json(cfg);
    doc.erase("threads");
    doc.erase("output");
    const std::string text = doc.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Experiments

namespace
{

StatRow row(std::string name, double estimate, double se = nan, double oracle = nan)
{
    return {std::move(name), estimate, se, oracle};
}

StatRow row(std::string name, const Estimate& e, double oracle = nan)
{
    return {std::move(name), e.value, e.std_error, oracle};
}

struct Batch
{
    ModelParams params;
    std::vector<PointProcessSample> samples;
};

Batch make_batch(const ExperimentConfig& cfg, const LadderPoint& point, ExperimentResult& result)
{
    const ModelParams params(point.scales, point.bits_per_scale);
    const Barrier lowered = is_max_kind(cfg.kind)
                                ? Barrier::upper()
                                : Barrier::lowered(params, cfg.gamma.value_or(default_gamma(params)));
    SamplerOptions options;
    options.leaf_budget = cfg.leaf_budget;
    auto samples = replicate_batch(params, cfg.window(), lowered, cfg.reps, entry_seed(cfg.master_seed, point),
                                   cfg.threads, options);
    for (const auto& s : samples) result.gaussian_draws += s.gaussian_draws;
    result.expected_draws += params.node_count() * cfg.reps;
    return {params, std::move(samples)};
}

EntryResult entry_for(const ModelParams& params)
{
    EntryResult e;
    e.scales = params.scales();
    e.bits_per_scale = params.bits_per_scale();
    e.size = params.size();
    e.alpha = params.alpha();
    return e;
}

/// 2^N (Phi((hi + a_N)/sqrt N) - Phi((lo + a_N)/sqrt N)) via upper tails.
double closed_form_unbarred_mean(const ModelParams& params, const Interval& w)
{
    const double level = centering(params);
    const double sd = std::sqrt(static_cast<double>(params.size()));
    const double scale = std::exp2(static_cast<double>(params.size()));
    return scale * (normal_sf((w.lower + level) / sd) - normal_sf((w.upper + level) / sd));
}

double maxima_mean(const Batch& batch, Estimate* out)
{
    std::vector<double> maxima;
    for (const auto& s : batch.samples) maxima.push_back(s.max_energy);
    const auto e = mean_estimate(maxima);
    if (out) *out = e;
    return e.value;
}

void run_sampler_kind(const ExperimentConfig& cfg, ExperimentResult& result)
{
    const Interval window = cfg.window();
    const double mu = intensity(window);
    std::vector<MaxLevel> levels;
    double common_alpha = nan;

    for (const auto& point : cfg.ladder) {
        const Batch batch = make_batch(cfg, point, result);
        const auto& samples = batch.samples;
        EntryResult entry = entry_for(batch.params);
        auto& st = entry.stats;

        switch (cfg.kind) {
        case ExperimentKind::mean_measure: {
            const auto report = mean_measure_report(samples, window);
            st.push_back(row("exact_unbarred", report.exact_unbarred, nan, closed_form_unbarred_mean(batch.params, window)));
            st.push_back(row("mc_unbarred", report.mc_unbarred, report.exact_unbarred));
            st.push_back(row("mc_barred_E", report.mc_barred_E, report.limit_intensity));
            st.push_back(row("limit_intensity", report.limit_intensity));
            st.push_back(row("exact_over_K_mu", report.exact_unbarred / (batch.params.scales() * report.limit_intensity)));
            break;
        }
        case ExperimentKind::avoidance: {
            const auto mean_e = empirical_mean_measure(samples, PointFilter::barrier_E, window);
            st.push_back(row("avoid_unbarred", avoidance_probability(samples, PointFilter::unbarred, window), std::exp(-mu)));
            st.push_back(row("avoid_E", avoidance_probability(samples, PointFilter::barrier_E, window), std::exp(-mu)));
            st.push_back(row("mc_barred_E", mean_e, mu));
            st.push_back(row("poisson_avoid_from_mc_mean", std::exp(-mean_e.value), std::exp(-mean_e.value) * mean_e.std_error));
            break;
        }
        case ExperimentKind::overlap_census: {
            const auto census = pair_overlap_census(samples, window);
            for (std::size_t q = 0; q < census.counts.size(); ++q) {
                st.push_back(row("pairs_overlap_" + std::to_string(q),
                                 static_cast<double>(census.counts[q]) / static_cast<double>(census.replicates)));
            }
            st.push_back(row("interior_pairs_mean", census.interior_mean));
            break;
        }
        case ExperimentKind::chen_stein_budget: {
            const auto mean_e = empirical_mean_measure(samples, PointFilter::barrier_E, window);
            const auto census = pair_overlap_census(samples, window);
            // The bound sums over ordered pairs; the census counts unordered ones.
            const ChenSteinInput in{static_cast<double>(batch.params.size()), mean_e.value,
                                    2.0 * census.interior_mean.value, 2.0 * census.interior_mean.std_error};
            const double cs = chen_stein_bound(in, batch.params);
            const double cs_se = chen_stein_bound_se(in, batch.params, mean_e.std_error);
            const double tv = tv_poisson(mean_e.value, mu);
            const auto avoid = avoidance_probability(samples, PointFilter::barrier_E, window);
            const double budget = avoidance_gap_budget(mean_e.value, mu, cs);
            st.push_back(row("mc_barred_E", mean_e, mu));
            st.push_back(row("pair_term", in.pair_term, in.pair_term_se));
            st.push_back(row("chen_stein_bound", cs, cs_se));
            st.push_back(row("tv_poisson_mu_N_mu", tv));
            st.push_back(row("avoidance_gap_budget", budget, cs_se));
            st.push_back(row("avoid_E", avoid, std::exp(-mu)));
            st.push_back(row("gap_to_poisson_mu_N", std::abs(avoid.value - std::exp(-mean_e.value))));
            st.push_back(row("gap_to_limit", std::abs(avoid.value - std::exp(-mu))));
            break;
        }
        case ExperimentKind::max_law: {
            std::vector<double> maxima;
            std::uint64_t clean = 0;
            for (const auto& s : samples) {
                maxima.push_back(s.max_energy);
                if (!s.any_path_above_U) ++clean;
            }
            const auto report = gumbel_report(maxima, batch.params);
            const double loc = gumbel_limit_location();
            const double beta = beta_c();
            st.push_back(row("mean_recentered", report.mean_recentered, std::sqrt(report.var_recentered / maxima.size()),
                             loc + std::numbers::egamma / beta));
            st.push_back(row("var_recentered", report.var_recentered, nan,
                             std::numbers::pi * std::numbers::pi / (6.0 * beta * beta)));
            st.push_back(row("gumbel_location", report.location, nan, loc));
            st.push_back(row("ks_statistic", report.ks_statistic));
            st.push_back(row("no_path_above_U", binomial_estimate(clean, samples.size()), 1.0));
            break;
        }
        case ExperimentKind::log_correction: {
            Estimate e;
            maxima_mean(batch, &e);
            st.push_back(row("mean_max", e, centering(batch.params)));
            levels.push_back({static_cast<double>(batch.params.size()), e.value});
            common_alpha = batch.params.alpha();
            break;
        }
        default:
            break;
        }
        result.entries.push_back(std::move(entry));
    }

    if (cfg.kind == ExperimentKind::log_correction) {
        const auto fit = log_correction_fit(levels);
        result.summary.push_back(row("c_hat", fit.c_hat, nan, 1.0 + 2.0 * common_alpha));
        result.summary.push_back(row("rms_residual", fit.rms_residual));
    }
}

void run_bridge_kind(const ExperimentConfig& cfg, ExperimentResult& result)
{
    auto entry_for_n = [](std::size_t n) {
        EntryResult e;
        e.size = static_cast<double>(n);
        e.alpha = nan;
        return e;
    };
    if (cfg.kind == ExperimentKind::ballot) {
        for (std::size_t n : cfg.n_grid) {
            EntryResult e = entry_for_n(n);
            const auto est = bridge_below_mc(n, 0.0, cfg.reps, cfg.master_seed, cfg.threads);
            e.stats.push_back(row("below_zero", est, ballot_exact(static_cast<std::int64_t>(n)).value()));
            result.entries.push_back(std::move(e));
            result.gaussian_draws += n * cfg.reps;
            result.expected_draws += n * cfg.reps;
        }
        return;
    }
    const auto report = perturbation_check(cfg.n_grid, cfg.eps, cfg.reps, cfg.master_seed, perturbation_default_cap,
                                           cfg.threads);
    for (const auto& pt : report.points) {
        EntryResult e = entry_for_n(pt.n);
        e.stats.push_back(row("below_zero", pt.below_zero, 1.0 / static_cast<double>(pt.n)));
        e.stats.push_back(row("below_eps", pt.below_eps));
        e.stats.push_back(row("difference", pt.difference));
        e.stats.push_back(row("scaled_difference", pt.scaled));
        result.entries.push_back(std::move(e));
        result.gaussian_draws += pt.n * cfg.reps;
        result.expected_draws += pt.n * cfg.reps;
    }
    result.summary.push_back(row("c_fit", report.c_fit));
    result.summary.push_back(row("spread", report.spread));
    result.summary.push_back(row("trend_rho", report.trend_rho));
    result.summary.push_back(row("trend_pvalue", report.trend_pvalue));
    result.summary.push_back(row("cap_violations", static_cast<double>(report.violations.size()), nan, 0.0));
}

json stats_json(const std::vector<StatRow>& rows)
{
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"name", r.name}, {"estimate", r.estimate}, {"std_error", r.std_error}, {"oracle", r.oracle}});
    }
    return out;
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

} // namespace

ExperimentResult execute(const ExperimentConfig& cfg)
{
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult result;
    result.config = cfg;
    result.config_hash = config_hash(cfg);
    if (is_bridge_kind(cfg.kind)) {
        run_bridge_kind(cfg, result);
    } else {
        run_sampler_kind(cfg, result);
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string statistics_block(const ExperimentResult& result)
{
    std::string out;
    for (std::size_t i = 0; i < result.entries.size(); ++i) {
        const auto& e = result.entries[i];
        json line = {{"record", "entry"}, {"index", i},       {"K", e.scales},
                     {"m", e.bits_per_scale}, {"N", e.size}, {"alpha", e.alpha},
                     {"stats", stats_json(e.stats)}};
        out += line.dump() + "\n";
    }
    json summary = {{"record", "summary"}, {"stats", stats_json(result.summary)}};
    out += summary.dump() + "\n";
    return out;
}

std::string result_jsonl(const ExperimentResult& result, std::string_view started_at)
{
    json header = {{"record", "header"},
                   {"schema_version", result.schema_version},
                   {"kind", std::string(to_string(result.config.kind))},
                   {"config", config_to_json(result.config)},
                   {"config_hash", result.config_hash},
                   {"started_at", std::string(started_at)}};
    json footer = {{"record", "footer"},
                   {"wall_seconds", result.wall_seconds},
                   {"gaussian_draws", result.gaussian_draws},
                   {"expected_draws", result.expected_draws},
                   {"threads", result.config.threads}};
    return header.dump() + "\n" + statistics_block(result) + footer.dump() + "\n";
}

std::string plot_table(const ExperimentResult& result)
{
    std::string out = "N,alpha,statistic,estimate,std_error,oracle\n";
    auto emit = [&](double size, double alpha, const StatRow& r) {
        out += fmt_double(size) + "," + fmt_double(alpha) + "," + r.name + "," + fmt_double(r.estimate) + "," +
               fmt_double(r.std_error) + "," + fmt_double(r.oracle) + "\n";
    };
    for (const auto& e : result.entries) {
        for (const auto& r : e.stats) emit(e.size, e.alpha, r);
    }
    for (const auto& r : result.summary) emit(nan, nan, r);
    return out;
}

void emit_plot_data(const ExperimentResult& result, const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write plot table '" + path.string() + "'");
    out << plot_table(result);
    if (!out) throw std::runtime_error("failed writing plot table '" + path.string() + "'");
}

std::vector<PlotRow> parse_plot_data(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read plot table '" + path.string() + "'");
    std::string line;
    std::getline(in, line);
    if (line != "N,alpha,statistic,estimate,std_error,oracle") throw std::runtime_error("unexpected plot table header");
    std::vector<PlotRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 6) throw std::runtime_error("malformed plot row: " + line);
        auto num = [](const std::string& s) { return std::strtod(s.c_str(), nullptr); };
        rows.push_back({num(cells[0]), num(cells[1]), cells[2], num(cells[3]), num(cells[4]), num(cells[5])});
    }
    return rows;
}

RunArtifacts persist(const ExperimentResult& result)
{
    const std::string stamp = utc_timestamp();
    const fs::path root(result.config.output);
    fs::create_directories(root);
    fs::path dir = root / stamp;
    for (int i = 1; !fs::create_directory(dir); ++i) dir = root / (stamp + "-" + std::to_string(i));

    RunArtifacts art{dir, dir / (result.config_hash + ".jsonl"), dir / (result.config_hash + ".plot.csv")};
    {
        std::ofstream out(art.result_file, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write result file '" + art.result_file.string() + "'");
        out << result_jsonl(result, stamp);
        if (!out) throw std::runtime_error("failed writing result file '" + art.result_file.string() + "'");
    }
    emit_plot_data(result, art.plot_file);
    return art;
}

ExperimentResult run(const ExperimentConfig& cfg, RunArtifacts* artifacts)
{
    ExperimentResult result = execute(cfg);
    const RunArtifacts art = persist(result);
    if (artifacts) *artifacts = art;
    return result;
}

} // namespace hgf
