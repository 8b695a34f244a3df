#pragma once

// Declarative experiments: a JSON config names an experiment kind, a ladder of
// (K, m) geometries and sampling controls; run() turns it into statistics and
// writes a line-delimited JSON result plus a flat CSV table.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hgf/error.hpp"
#include "hgf/field_model.hpp"

namespace hgf
{

inline constexpr int result_schema_version = 1;

enum class ExperimentKind
{
    mean_measure,
    avoidance,
    max_law,
    overlap_census,
    ballot,
    perturbation,
    log_correction,
    chen_stein_budget,
};

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(std::string_view name);
const std::vector<ExperimentKind>& all_kinds();

struct LadderPoint
{
    int scales = 1;
    int bits_per_scale = 1;

    friend bool operator==(const LadderPoint&, const LadderPoint&) = default;
};

struct ExperimentConfig
{
    ExperimentKind kind = ExperimentKind::mean_measure;
    std::vector<LadderPoint> ladder;
    double window_lower = -1.0;
    double window_upper = 4.0; ///< +infinity allowed (null in JSON)
    std::optional<double> gamma;
    std::uint64_t reps = 1000;
    std::uint64_t master_seed = 1;
    unsigned threads = 1;
    std::string output = "results";
    std::uint64_t leaf_budget = std::uint64_t{1} << 28;
    std::vector<std::size_t> n_grid; ///< bridge lengths for ballot / perturbation
    double eps = 0.1;                ///< barrier shift for perturbation

    Interval window() const { return Interval(window_lower, window_upper); }
};

/// Invalid configuration; carries one diagnostic per offending field.
class ConfigError : public ValidationError
{
public:
    explicit ConfigError(std::vector<std::string> diagnostics);
    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

/// Parses and validates. Missing fields take the defaults above; unknown
/// fields are errors. Throws ConfigError (all diagnostics at once) or
/// BudgetError when a ladder entry exceeds the leaf budget.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError / BudgetError.
void validate(const ExperimentConfig& config);

/// Canonical JSON form (sorted keys).
nlohmann::json config_to_json(const ExperimentConfig& config);

/// 16 hex digits of FNV-1a over the canonical JSON without the
/// execution-only fields (threads, output).
std::string config_hash(const ExperimentConfig& config);

/// Seed used for the replicates of one ladder entry.
std::uint64_t entry_seed(std::uint64_t master_seed, const LadderPoint& point);

struct StatRow
{
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0; ///< NaN when not applicable
    double oracle = 0.0;    ///< NaN when there is no reference value
};

struct EntryResult
{
    int scales = 0; ///< 0 for bridge experiments
    int bits_per_scale = 0;
    double size = 0.0;  ///< N, or the bridge length n
    double alpha = 0.0; ///< NaN for bridge experiments
    std::vector<StatRow> stats;
};

struct ExperimentResult
{
    int schema_version = result_schema_version;
    ExperimentConfig config;
    std::string config_hash;
    std::vector<EntryResult> entries;
    std::vector<StatRow> summary;
    std::uint64_t gaussian_draws = 0;
    std::uint64_t expected_draws = 0; ///< analytic count the draws must equal
    double wall_seconds = 0.0;
};

/// Computes the statistics; no I/O.
ExperimentResult execute(const ExperimentConfig& config);

/// The JSON lines holding entries and summary: everything that must be
/// reproducible from the config (no timings, no thread count).
std::string statistics_block(const ExperimentResult& result);

struct RunArtifacts
{
    std::filesystem::path directory;
    std::filesystem::path result_file;
    std::filesystem::path plot_file;
};

/// Writes <output>/<UTC timestamp>[-i]/<hash>.jsonl and <hash>.plot.csv into a
/// fresh directory; never overwrites.
RunArtifacts persist(const ExperimentResult& result);

/// execute() followed by persist().
ExperimentResult run(const ExperimentConfig& config, RunArtifacts* artifacts = nullptr);

/// Full result file contents (header, entries, summary, footer).
std::string result_jsonl(const ExperimentResult& result, std::string_view started_at);

struct PlotRow
{
    double size = 0.0;
    double alpha = 0.0;
    std::string statistic;
    double estimate = 0.0;
    double std_error = 0.0;
    double oracle = 0.0;
};

/// CSV with header N,alpha,statistic,estimate,std_error,oracle; one row per
/// (entry, statistic), then summary rows with N and alpha set to nan.
void emit_plot_data(const ExperimentResult& result, const std::filesystem::path& path);
std::string plot_table(const ExperimentResult& result);
std::vector<PlotRow> parse_plot_data(const std::filesystem::path& path);

} // namespace hgf
