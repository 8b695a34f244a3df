#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "hgf/exp_runner.hpp"
#include "hgf/normal.hpp"

using namespace hgf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

struct TempDir
{
    fs::path path;
    TempDir()
    {
        std::random_device rd;
        path = fs::temp_directory_path() / ("hgf-test-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

ExperimentConfig small_config(ExperimentKind kind)
{
    ExperimentConfig c;
    c.kind = kind;
    c.reps = 200;
    c.master_seed = 17;
    switch (kind) {
    case ExperimentKind::ballot:
        c.n_grid = {2, 5, 10};
        break;
    case ExperimentKind::perturbation:
        c.n_grid = {2, 4, 8};
        break;
    case ExperimentKind::log_correction:
        c.ladder = {{2, 2}, {3, 3}, {4, 4}};
        break;
    case ExperimentKind::max_law:
        c.ladder = {{2, 5}};
        break;
    default:
        c.ladder = {{2, 5}, {2, 6}};
        break;
    }
    return c;
}

std::vector<std::string> diagnostics_of(const json& doc)
{
    try {
        config_from_json(doc);
    } catch (const ConfigError& e) {
        return e.diagnostics();
    }
    return {};
}

bool same(double a, double b)
{
    return (std::isnan(a) && std::isnan(b)) || a == b;
}

} // namespace

TEST_CASE("config parsing")
{
    const json doc = json::parse(R"({"kind": "mean_measure", "ladder": [[2, 8], [4, 5]], "window": [-1, null],
                                     "reps": 50, "master_seed": 9, "threads": 3, "gamma": 0.1})");
    // An unbounded window is only allowed for maxima-only kinds.
    CHECK(diagnostics_of(doc).size() == 1);

    json ok = doc;
    ok["window"] = json::array({-1, 4});
    const auto cfg = config_from_json(ok);
    CHECK(cfg.kind == ExperimentKind::mean_measure);
    CHECK(cfg.ladder == std::vector<LadderPoint>{{2, 8}, {4, 5}});
    CHECK(cfg.reps == 50);
    CHECK(cfg.threads == 3);
    CHECK(cfg.gamma == 0.1);
    CHECK(config_from_json(config_to_json(cfg)).ladder == cfg.ladder);
    CHECK(config_to_json(config_from_json(config_to_json(cfg))) == config_to_json(cfg));

    json maxlaw = doc;
    maxlaw["kind"] = "max_law";
    maxlaw["reps"] = 100;
    maxlaw.erase("gamma");
    CHECK(std::isinf(config_from_json(maxlaw).window_upper));

    SUBCASE("field-level diagnostics")
    {
        const json bad = json::parse(R"({"kind": "mean_measure", "ladder": [[0, 4], [2, 70], "x"], "reps": 0,
                                         "colour": 1})");
        const auto d = diagnostics_of(bad);
        auto has = [&](const std::string& prefix) {
            return std::any_of(d.begin(), d.end(), [&](const std::string& s) { return s.rfind(prefix, 0) == 0; });
        };
        CHECK(has("colour:"));
        CHECK(has("ladder[2]:"));
        CHECK(!has("reps:")); // parse errors are reported before validation
        const auto d2 = diagnostics_of(json::parse(R"({"kind": "mean_measure", "ladder": [[0, 4], [2, 70]], "reps": 0})"));
        auto has2 = [&](const std::string& prefix) {
            return std::any_of(d2.begin(), d2.end(), [&](const std::string& s) { return s.rfind(prefix, 0) == 0; });
        };
        CHECK(has2("reps:"));
        CHECK(has2("ladder[0]:"));
        CHECK(has2("ladder[1]:"));
        CHECK(!diagnostics_of(json::parse(R"({"kind": "nope"})")).empty());
        CHECK(!diagnostics_of(json::parse(R"({"ladder": [[2, 4]]})")).empty());
        CHECK(!diagnostics_of(json::parse(R"({"kind": "overlap_census", "ladder": [[1, 8]]})")).empty());
        CHECK(!diagnostics_of(json::parse(R"({"kind": "avoidance", "ladder": [[4, 1]]})")).empty());
        CHECK(!diagnostics_of(json::parse(R"({"kind": "avoidance", "ladder": [[4, 4]], "gamma": 0.3})")).empty());
        CHECK(!diagnostics_of(json::parse(R"({"kind": "log_correction", "ladder": [[2, 4], [2, 5]]})")).empty());
        CHECK(!diagnostics_of(json::parse(R"({"kind": "log_correction", "ladder": [[2, 4], [2, 5], [3, 3]]})")).empty());
        CHECK(!diagnostics_of(json::parse(R"({"kind": "max_law", "ladder": [[2, 4]], "reps": 99})")).empty());
        CHECK(!diagnostics_of(json::parse(R"({"kind": "ballot"})")).empty());
        CHECK(!diagnostics_of(json::parse(R"({"kind": "ballot", "n_grid": [1, 4]})")).empty());
        CHECK(!diagnostics_of(json::parse(R"({"kind": "perturbation", "n_grid": [4], "eps": 0})")).empty());
        CHECK(!diagnostics_of(json::parse(R"({"kind": "perturbation", "n_grid": [4], "eps": 2})")).empty());
        CHECK(!diagnostics_of(json::parse(R"({"kind": "mean_measure", "threads": 0})")).empty());
        CHECK(!diagnostics_of(json::parse(R"({"kind": "mean_measure", "window": [4, 1]})")).empty());
        CHECK(!diagnostics_of(json::parse(R"([1, 2])")).empty());
    }
    SUBCASE("leaf budget")
    {
        CHECK_THROWS_AS(config_from_json(json::parse(R"({"kind": "avoidance", "ladder": [[2, 15]]})")), BudgetError);
        CHECK_NOTHROW(config_from_json(json::parse(R"({"kind": "avoidance", "ladder": [[2, 14]]})")));
        CHECK_THROWS_AS(config_from_json(json::parse(R"({"kind": "avoidance", "ladder": [[2, 8]], "leaf_budget": 1000})")),
                        BudgetError);
    }
}

TEST_CASE("config hash")
{
    auto c = small_config(ExperimentKind::avoidance);
    const auto h = config_hash(c);
    CHECK(h.size() == 16);
    c.threads = 8;
    c.output = "elsewhere";
    CHECK(config_hash(c) == h);
    c.reps += 1;
    CHECK(config_hash(c) != h);
    CHECK(entry_seed(1, {2, 8}) != entry_seed(1, {2, 9}));
    CHECK(entry_seed(1, {2, 8}) != entry_seed(2, {2, 8}));
}

TEST_CASE("ballot experiment")
{
    const auto r = execute(small_config(ExperimentKind::ballot));
    REQUIRE(r.entries.size() == 3);
    const double n[] = {2, 5, 10};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.entries[i].size == n[i]);
        REQUIRE(r.entries[i].stats.size() == 1);
        CHECK(r.entries[i].stats[0].oracle == 1.0 / n[i]);
        CHECK(std::isnan(r.entries[i].alpha));
    }
    CHECK(r.gaussian_draws == 200 * 17);
    CHECK(r.gaussian_draws == r.expected_draws);
}

TEST_CASE("mean-measure quadrature column against the normal-cdf closed form")
{
    ExperimentConfig c = small_config(ExperimentKind::mean_measure);
    c.ladder = {{1, 8}, {1, 12}, {1, 14}};
    c.reps = 20;
    const auto r = execute(c);
    REQUIRE(r.entries.size() == 3);
    const Interval a(-1.0, 4.0);
    for (const auto& e : r.entries) {
        const ModelParams p(e.scales, e.bits_per_scale);
        const double level = centering(p);
        const double sd = std::sqrt(static_cast<double>(p.size()));
        const double ref = std::exp2(p.size()) * (normal_cdf((a.upper + level) / sd) - normal_cdf((a.lower + level) / sd));
        CHECK(e.stats[0].name == "exact_unbarred");
        CHECK(std::abs(e.stats[0].estimate - ref) <= 1e-10 * ref);
        CHECK(e.alpha == 0.0);
    }
}

TEST_CASE("every kind is deterministic across reruns and thread counts")
{
    for (auto kind : all_kinds()) {
        CAPTURE(to_string(kind));
        auto c = small_config(kind);
        if (kind == ExperimentKind::max_law) c.reps = 150;
        const auto a = execute(c);
        c.threads = 4;
        const auto b = execute(c);
        CHECK(statistics_block(a) == statistics_block(b));
        CHECK(a.config_hash == b.config_hash);
        CHECK(a.gaussian_draws == a.expected_draws);
        CHECK(!a.entries.empty());
    }
}

TEST_CASE("draw accounting")
{
    auto c = small_config(ExperimentKind::avoidance);
    c.reps = 7;
    const auto r = execute(c);
    std::uint64_t expected = 0;
    for (const auto& p : c.ladder) {
        const std::uint64_t b = std::uint64_t{1} << p.bits_per_scale;
        std::uint64_t nodes = 0, level = 1;
        for (int j = 1; j <= p.scales; ++j) nodes += (level *= b);
        expected += nodes * 7;
    }
    CHECK(r.gaussian_draws == expected);
}

TEST_CASE("plot data")
{
    TempDir tmp;
    SUBCASE("empty ladder gives a header-only table")
    {
        auto c = small_config(ExperimentKind::mean_measure);
        c.ladder.clear();
        const auto r = execute(c);
        emit_plot_data(r, tmp.path / "empty.csv");
        std::ifstream in(tmp.path / "empty.csv");
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(all == "N,alpha,statistic,estimate,std_error,oracle\n");
        CHECK(parse_plot_data(tmp.path / "empty.csv").empty());
    }
    SUBCASE("one row per entry and statistic, exact round trip")
    {
        auto c = small_config(ExperimentKind::mean_measure);
        c.ladder = {{2, 4}, {2, 5}, {3, 3}, {1, 9}};
        c.reps = 30;
        const auto r = execute(c);
        emit_plot_data(r, tmp.path / "four.csv");
        const auto rows = parse_plot_data(tmp.path / "four.csv");
        std::map<std::string, int> per_stat;
        for (const auto& row : rows) ++per_stat[row.statistic];
        for (const auto& [name, count] : per_stat) CHECK(count == 4);

        std::size_t k = 0;
        for (const auto& e : r.entries) {
            for (const auto& s : e.stats) {
                const auto& row = rows.at(k++);
                CHECK(row.size == e.size);
                CHECK(row.alpha == e.alpha);
                CHECK(row.statistic == s.name);
                CHECK(same(row.estimate, s.estimate));
                CHECK(same(row.std_error, s.std_error));
                CHECK(same(row.oracle, s.oracle));
            }
        }
        CHECK(k == rows.size());
    }
    SUBCASE("summary rows carry nan geometry")
    {
        const auto r = execute(small_config(ExperimentKind::log_correction));
        emit_plot_data(r, tmp.path / "log.csv");
        const auto rows = parse_plot_data(tmp.path / "log.csv");
        REQUIRE(rows.size() == 3 + 2);
        CHECK(rows.back().statistic == "rms_residual");
        CHECK(std::isnan(rows.back().size));
        CHECK(rows[3].oracle == doctest::Approx(2.0));
    }
}

TEST_CASE("persisted runs never overwrite")
{
    TempDir tmp;
    auto c = small_config(ExperimentKind::ballot);
    c.output = tmp.path.string();
    RunArtifacts first, second;
    run(c, &first);
    run(c, &second);
    CHECK(first.directory != second.directory);
    CHECK(first.result_file.filename() == config_hash(c) + ".jsonl");
    CHECK(fs::exists(first.result_file));
    CHECK(fs::exists(second.plot_file));

    std::ifstream in(first.result_file);
    std::vector<json> records;
    for (std::string line; std::getline(in, line);) records.push_back(json::parse(line));
    REQUIRE(records.size() == 3 + 3);
    CHECK(records.front()["record"] == "header");
    CHECK(records.front()["schema_version"] == result_schema_version);
    CHECK(records.front()["config_hash"] == config_hash(c));
    CHECK(records[1]["record"] == "entry");
    CHECK(records[1]["alpha"].is_null());
    CHECK(records[1]["stats"][0]["oracle"] == 0.5);
    CHECK(records[4]["record"] == "summary");
    CHECK(records.back()["record"] == "footer");
    CHECK(records.back()["gaussian_draws"] == records.back()["expected_draws"]);
}
