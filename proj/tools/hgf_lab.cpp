// Command-line front end for the experiment runner.
//
//   hgf_lab <kind> [--config FILE] [--ladder K,m ...] [--window LO,HI] [--reps R]
//           [--seed S] [--threads T] [--out DIR] [--budget LEAVES] [--gamma G]
//           [--n-grid n ...] [--eps E] [--check]
//   hgf_lab run --config FILE
//
// Flags override the config file. HGF_THREADS overrides the config thread
// count and is itself overridden by --threads.
//
// Exit codes: 0 success, 1 I/O or internal failure, 2 invalid input,
// 3 leaf budget exceeded.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hgf/exp_runner.hpp"

namespace
{

using nlohmann::json;

struct Overrides
{
    std::string config_file;
    std::vector<std::string> ladder;
    std::string window;
    std::optional<std::uint64_t> reps;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> out;
    std::optional<std::uint64_t> budget;
    std::optional<double> gamma;
    std::vector<std::size_t> n_grid;
    std::optional<double> eps;
    bool check_only = false;
};

void add_flags(CLI::App* cmd, Overrides& o, bool config_required)
{
    auto* cfg = cmd->add_option("--config", o.config_file, "JSON experiment config");
    if (config_required) cfg->required();
    cmd->add_option("--ladder", o.ladder, "ladder entries as K,m (repeatable)");
    cmd->add_option("--window", o.window, "window LO,HI (HI may be 'inf')");
    cmd->add_option("--reps", o.reps, "replicates per ladder entry or grid point");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--threads", o.threads, "worker threads");
    cmd->add_option("--out", o.out, "output root directory");
    cmd->add_option("--budget", o.budget, "maximum number of leaves per replicate");
    cmd->add_option("--gamma", o.gamma, "barrier exponent gamma");
    cmd->add_option("--n-grid", o.n_grid, "bridge lengths (repeatable)");
    cmd->add_option("--eps", o.eps, "barrier shift for the perturbation check");
    cmd->add_flag("--check", o.check_only, "validate the config, print its hash and exit");
}

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw hgf::ConfigError({"config: cannot open '" + path + "'"});
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw hgf::ConfigError({std::string("config: JSON parse error: ") + e.what()});
    }
}

std::pair<std::string, std::string> split_pair(const std::string& text, const std::string& flag)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw hgf::ConfigError({flag + ": expected two comma-separated values"});
    return {text.substr(0, comma), text.substr(comma + 1)};
}

double parse_number(const std::string& s, const std::string& flag)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw hgf::ConfigError({flag + ": '" + s + "' is not a number"});
    }
}

json build_document(const std::optional<std::string>& kind, const Overrides& o)
{
    json doc = o.config_file.empty() ? json::object() : read_json(o.config_file);
    if (!doc.is_object()) throw hgf::ConfigError({"<root>: config must be a JSON object"});
    if (kind) {
        if (doc.contains("kind") && doc["kind"] != *kind) {
            throw hgf::ConfigError({"kind: config file names '" + doc["kind"].dump() + "' but the subcommand is '" +
                                    *kind + "'"});
        }
        doc["kind"] = *kind;
    }
    if (!o.ladder.empty()) {
        json ladder = json::array();
        for (const auto& entry : o.ladder) {
            const auto [k, m] = split_pair(entry, "--ladder");
            ladder.push_back({static_cast<int>(parse_number(k, "--ladder")), static_cast<int>(parse_number(m, "--ladder"))});
        }
        doc["ladder"] = ladder;
    }
    if (!o.window.empty()) {
        const auto [lo, hi] = split_pair(o.window, "--window");
        json upper = (hi == "inf" || hi == "+inf") ? json(nullptr) : json(parse_number(hi, "--window"));
        doc["window"] = json::array({parse_number(lo, "--window"), upper});
    }
    if (o.reps) doc["reps"] = *o.reps;
    if (o.seed) doc["master_seed"] = *o.seed;
    if (o.out) doc["output"] = *o.out;
    if (o.budget) doc["leaf_budget"] = *o.budget;
    if (o.gamma) doc["gamma"] = *o.gamma;
    if (!o.n_grid.empty()) doc["n_grid"] = o.n_grid;
    if (o.eps) doc["eps"] = *o.eps;

    if (const char* env = std::getenv("HGF_THREADS"); env && *env) {
        char* end = nullptr;
        const unsigned long t = std::strtoul(env, &end, 10);
        if (*end != '\0') throw hgf::ConfigError({"HGF_THREADS: '" + std::string(env) + "' is not an integer"});
        doc["threads"] = t;
    }
    if (o.threads) doc["threads"] = *o.threads;
    return doc;
}

std::string format_value(double x)
{
    if (std::isnan(x)) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void print_row(const hgf::StatRow& r)
{
    std::printf("    %-28s %14s  se %-12s oracle %s\n", r.name.c_str(), format_value(r.estimate).c_str(),
                format_value(r.std_error).c_str(), format_value(r.oracle).c_str());
}

void print_result(const hgf::ExperimentResult& result, const hgf::RunArtifacts& art)
{
    std::printf("%s  hash %s  %.2fs  draws %llu\n", std::string(hgf::to_string(result.config.kind)).c_str(),
                result.config_hash.c_str(), result.wall_seconds,
                static_cast<unsigned long long>(result.gaussian_draws));
    for (const auto& e : result.entries) {
        if (e.scales > 0) {
            std::printf("  K=%d m=%d N=%g alpha=%.4f\n", e.scales, e.bits_per_scale, e.size, e.alpha);
        } else {
            std::printf("  n=%g\n", e.size);
        }
        for (const auto& r : e.stats) print_row(r);
    }
    if (!result.summary.empty()) {
        std::printf("  summary\n");
        for (const auto& r : result.summary) print_row(r);
    }
    std::printf("result %s\nplot   %s\n", art.result_file.string().c_str(), art.plot_file.string().c_str());
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hierarchical Gaussian field experiments"};
    app.require_subcommand(1);

    std::optional<std::string> chosen;
    Overrides overrides;
    for (auto kind : hgf::all_kinds()) {
        const std::string name(hgf::to_string(kind));
        auto* cmd = app.add_subcommand(name, "run the " + name + " experiment");
        add_flags(cmd, overrides, false);
        cmd->callback([&chosen, name] { chosen = name; });
    }
    auto* run_cmd = app.add_subcommand("run", "run the experiment named by the config file");
    add_flags(run_cmd, overrides, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const auto config = hgf::config_from_json(build_document(chosen, overrides));
        if (overrides.check_only) {
            std::printf("%s %s\n", std::string(hgf::to_string(config.kind)).c_str(), hgf::config_hash(config).c_str());
            return 0;
        }
        hgf::RunArtifacts art;
        const auto result = hgf::run(config, &art);
        print_result(result, art);
        if (result.gaussian_draws != result.expected_draws) {
            std::fprintf(stderr, "draw count mismatch: %llu drawn, %llu expected\n",
                         static_cast<unsigned long long>(result.gaussian_draws),
                         static_cast<unsigned long long>(result.expected_draws));
            return 1;
        }
        return 0;
    } catch (const hgf::ConfigError& e) {
        for (const auto& d : e.diagnostics()) std::fprintf(stderr, "error: %s\n", d.c_str());
        return 2;
    } catch (const hgf::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const hgf::BudgetError& e) {
        std::fprintf(stderr, "budget: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failure: %s\n", e.what());
        return 1;
    }
}
