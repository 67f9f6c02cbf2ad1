#include "doctest.h"

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "banditfolio/experiment.hpp"

using namespace banditfolio;
namespace fs = std::filesystem;

namespace {

std::string tiny_config(const std::string& extra = "") {
    std::string doc = R"({
        "mode": "simulate", "k": 3, "universe_size": 3, "n": 8, "delta": 6,
        "drifts": [0.05, 0.02, 0.04], "vols": [0.2, 0.25, 0.3],
        "corr_pairwise": 0.2, "dt": 0.01, "seeds": [1, 2])";
    if (!extra.empty()) doc += "," + extra;
    return doc + "}";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config parsing applies defaults and rejects unknown keys") {
    const auto c = parse_config(tiny_config());
    CHECK(c.engine.k == 3);
    CHECK(c.engine.lambda == 0.9);
    CHECK(c.engine.gamma == 0.95);
    CHECK(c.engine.epsilon == 0.1);
    CHECK(c.engine.scaler.lower == -0.1);
    CHECK(c.engine.policies.size() == 5);

    CHECK_THROWS_WITH_AS(parse_config(R"({"moed": "simulate"})"),
                         doctest::Contains("unknown key"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("not json"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"mode": "simulate", "seeds": []})"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config(tiny_config(R"("policies": [])")),
                         doctest::Contains("policy"), std::invalid_argument);
}

TEST_CASE("presets parse and differ only in the volatility band") {
    const auto low = parse_config(merge_config(preset_config("fig2-low"), R"({"seeds":[1]})"));
    const auto high = parse_config(merge_config(preset_config("fig2-high"), R"({"seeds":[1]})"));
    CHECK(low.engine.k == 5);
    CHECK(low.engine.n == 200);
    CHECK(low.engine.delta == 50);
    CHECK(low.engine.lambda == 0.9);
    CHECK(low.engine.gamma == 0.95);
    CHECK(low.drifts == std::vector<double>{0.04, 0.035, 0.08, 0.02, 0.03});
    CHECK(low.vol_range->first == 0.02);
    CHECK(high.vol_range->first == 0.03);
    CHECK(low.dt == high.dt);
    CHECK_THROWS_AS(preset_config("fig3"), std::invalid_argument);
}

TEST_CASE("a tiny experiment runs, reports, and re-runs byte-identically") {
    const auto dir = fs::temp_directory_path() / "bf_exp_small";
    fs::remove_all(dir);
    const auto config = parse_config(tiny_config());
    const auto outcome = run_experiment(config);
    REQUIRE(outcome.all_completed);
    CHECK(outcome.summary.num_seeds == 2);

    const auto written = emit_report(outcome, dir.string());
    CHECK(fs::exists(dir / "ledger.csv"));
    CHECK(fs::exists(dir / "summary.json"));
    const std::string ledger1 = slurp(dir / "ledger.csv");
    const std::string summary1 = slurp(dir / "summary.json");

    // Ledger row count: seeds x trials x policies (+ header).
    const long rows = std::count(ledger1.begin(), ledger1.end(), '\n');
    CHECK(rows == 1 + 2 * 8 * 5);

    const auto outcome2 = run_experiment(config);
    emit_report(outcome2, dir.string());
    CHECK(slurp(dir / "ledger.csv") == ledger1);
    CHECK(slurp(dir / "summary.json") == summary1);
}

TEST_CASE("identical seeds listed twice produce identical runs") {
    auto config = parse_config(tiny_config());
    config.seeds = {9, 9};
    const auto outcome = run_experiment(config);
    REQUIRE(outcome.all_completed);
    const auto& a = outcome.runs[0].records;
    const auto& b = outcome.runs[1].records;
    REQUIRE(a.size() == b.size());
    for (std::size_t t = 0; t < a.size(); ++t) {
        for (std::size_t p = 0; p < a[t].policies.size(); ++p) {
            CHECK(a[t].policies[p].reward == b[t].policies[p].reward);
        }
    }
}

TEST_CASE("lambda = 1 with filtering off leaves combined equal to the bandit policy") {
    auto config = parse_config(tiny_config(R"("lambda": 1.0, "seeds": [5])"));
    const auto outcome = run_experiment(config);
    REQUIRE(outcome.all_completed);
    const auto& summary = outcome.summary;
    double combined = 0.0, ucb = 0.0;
    for (const auto& ps : summary.policies) {
        if (ps.policy == Policy::Combined) combined = ps.final_wealth.median;
        if (ps.policy == Policy::Ucb1) ucb = ps.final_wealth.median;
    }
    CHECK(combined == doctest::Approx(ucb).epsilon(1e-15));
}

TEST_CASE("summary statistics recompute exactly from the ledger") {
    const auto dir = fs::temp_directory_path() / "bf_exp_cross";
    fs::remove_all(dir);
    auto config = parse_config(tiny_config());
    config.seeds = {1, 2, 3, 4, 5};
    const auto outcome = run_experiment(config);
    emit_report(outcome, dir.string());

    // Recompute final wealth per policy per seed from ledger.csv.
    std::ifstream in(dir / "ledger.csv");
    std::string line;
    std::getline(in, line); // header
    std::map<std::string, std::map<long, double>> finals; // policy -> seed -> wealth
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string seed, trial, policy, weights, reward, cum, wealth;
        std::getline(ss, seed, ',');
        std::getline(ss, trial, ',');
        std::getline(ss, policy, ',');
        std::getline(ss, weights, ',');
        std::getline(ss, reward, ',');
        std::getline(ss, cum, ',');
        std::getline(ss, wealth, ',');
        if (std::stol(trial) == outcome.summary.trials) {
            finals[policy][std::stol(seed)] = std::stod(wealth);
        }
    }
    for (const auto& ps : outcome.summary.policies) {
        const auto& by_seed = finals.at(policy_name(ps.policy));
        std::vector<double> values;
        double sum = 0.0;
        for (auto seed : config.seeds) {
            values.push_back(by_seed.at(static_cast<long>(seed)));
            sum += by_seed.at(static_cast<long>(seed));
        }
        std::sort(values.begin(), values.end());
        CHECK(values[2] == ps.final_wealth.median); // 5 seeds: middle element, exact
        CHECK(sum / 5.0 == ps.final_wealth.mean);
    }
}

TEST_CASE("pseudo-regret series is emitted in simulate mode and is non-negative") {
    auto config = parse_config(tiny_config());
    const auto outcome = run_experiment(config);
    for (const auto& ps : outcome.summary.policies) {
        REQUIRE(ps.pseudo_regret_mean.size() == 8);
        for (double v : ps.pseudo_regret_mean) CHECK(v >= -1e-12);
    }
    const std::string json = summary_to_json(outcome);
    CHECK(json.find("pseudo_regret_mean") != std::string::npos);
    CHECK(json.find("runtime") == std::string::npos);
}

TEST_CASE("filtering selects peripheral assets and emits tree and spectrum") {
    const auto dir = fs::temp_directory_path() / "bf_exp_filter";
    fs::remove_all(dir);
    const std::string doc = R"({
        "mode": "simulate", "k": 3, "universe_size": 8, "n": 5, "delta": 30,
        "drift_range": [0.01, 0.05], "vol_range": [0.15, 0.3],
        "corr_pairwise": 0.3, "dt": 0.01, "seeds": [3], "filter": true})";
    const auto outcome = run_experiment(parse_config(doc));
    REQUIRE(outcome.all_completed);
    CHECK(outcome.runs[0].selected_assets.size() == 3);
    CHECK(outcome.summary.selected_assets.size() == 3);
    emit_report(outcome, dir.string());
    CHECK(fs::exists(dir / "tree.json"));
    CHECK(fs::exists(dir / "spectrum.csv"));
    const std::string spectrum = slurp(dir / "spectrum.csv");
    CHECK(spectrum.find("pre,0,") != std::string::npos);
    CHECK(spectrum.find("post,0,") != std::string::npos);

    // filter-only mode writes no ledger.
    const auto dir2 = fs::temp_directory_path() / "bf_exp_filter_only";
    fs::remove_all(dir2);
    auto fo = parse_config(doc);
    fo.filter_only = true;
    emit_report(run_experiment(fo), dir2.string());
    CHECK(fs::exists(dir2 / "tree.json"));
    CHECK_FALSE(fs::exists(dir2 / "ledger.csv"));
}

TEST_CASE("per-seed failures produce a manifest and a nonzero-completion flag") {
    const auto dir = fs::temp_directory_path() / "bf_exp_fail";
    fs::remove_all(dir);
    // Perfect pairwise correlation is rejected by the Cholesky factorization.
    const std::string doc = R"({
        "mode": "simulate", "k": 2, "universe_size": 2, "n": 4, "delta": 4,
        "drifts": [0.05, 0.02], "vols": [0.2, 0.25],
        "corr_pairwise": 1.0, "dt": 0.01, "seeds": [1]})";
    const auto outcome = run_experiment(parse_config(doc));
    CHECK_FALSE(outcome.all_completed);
    CHECK_FALSE(outcome.runs[0].ok);
    CHECK(!outcome.runs[0].error.empty());
    emit_report(outcome, dir.string());
    CHECK(fs::exists(dir / "failure_manifest.json"));
    const std::string manifest = slurp(dir / "failure_manifest.json");
    CHECK(manifest.find("\"failed\"") != std::string::npos);
}

TEST_CASE("csv mode consumes a price file without filtering") {
    const auto csv_path = fs::temp_directory_path() / "bf_prices.csv";
    {
        // 2 assets, 11 prices -> 10 returns: delta 6 + n 4.
        std::ofstream out(csv_path);
        out << "A,B\n";
        double a = 100.0, b = 50.0;
        Rng rng(4);
        for (int t = 0; t < 11; ++t) {
            out << a << "," << b << "\n";
            a *= std::exp(rng.uniform(-0.02, 0.02));
            b *= std::exp(rng.uniform(-0.02, 0.02));
        }
    }
    const std::string doc = std::string(R"({"mode": "csv", "csv_path": ")") + csv_path.string() +
                            R"(", "k": 2, "n": 4, "delta": 6})";
    const auto outcome = run_experiment(parse_config(doc));
    REQUIRE(outcome.all_completed);
    CHECK(outcome.summary.num_seeds == 1);
    // No true means in csv mode: no pseudo-regret series.
    for (const auto& ps : outcome.summary.policies) CHECK(ps.pseudo_regret_mean.empty());
}

TEST_CASE("worker pool size respects the environment cap") {
    setenv("BANDITFOLIO_THREADS", "3", 1);
    CHECK(worker_pool_size(10) == 3);
    CHECK(worker_pool_size(2) == 2);
    setenv("BANDITFOLIO_THREADS", "0", 1);
    CHECK_THROWS_AS(worker_pool_size(4), std::invalid_argument);
    unsetenv("BANDITFOLIO_THREADS");
    CHECK(worker_pool_size(1) == 1);
}

TEST_CASE("empty policy set fails before any file is written") {
    auto config = parse_config(tiny_config());
    config.engine.policies.clear();
    const auto dir = fs::temp_directory_path() / "bf_exp_nopolicy";
    fs::remove_all(dir);
    ExperimentOutcome outcome;
    outcome.config = config;
    CHECK_THROWS_AS(emit_report(outcome, dir.string()), std::invalid_argument);
    CHECK_FALSE(fs::exists(dir / "ledger.csv"));
}

TEST_CASE("first trial LP dump is well-formed") {
    const auto config = parse_config(tiny_config());
    const CvarLp lp = first_trial_lp(config);
    CHECK(lp.problem.k == 3);
    CHECK(static_cast<int>(lp.problem.scenarios.size()) == 6);
    const std::string text = format_tableau(lp.program);
    CHECK(text.find("minimize:") != std::string::npos);
}
