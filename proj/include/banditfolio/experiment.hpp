#pragma once

#include <optional>
#include <string>
#include <vector>

#include "banditfolio/engine.hpp"
#include "banditfolio/gbm.hpp"

namespace banditfolio {

/// Flat experiment description; parsed from a single JSON document.
/// Exactly one data source is active: GBM simulation or a CSV price file.
struct ExperimentConfig {
    std::string mode = "simulate"; // "simulate" | "csv"
    std::string csv_path;

    // Market model (simulate mode). Fixed vectors take precedence over
    // per-seed ranges; vectors must have universe_size entries.
    int universe_size = 5;
    std::vector<double> drifts;
    std::optional<std::pair<double, double>> drift_range;
    std::vector<double> vols;
    std::optional<std::pair<double, double>> vol_range;
    double corr_pairwise = 0.3;
    std::optional<Matrix> corr_matrix;
    std::vector<double> initial_prices;
    double initial_price = 100.0;
    double dt = 0.1;

    EngineConfig engine;     // k, n, delta, lambda, gamma, epsilon, scaler, policies
    bool filter = false;     // MST peripherality filter on the historical window
    bool filter_only = false;

    std::vector<std::uint64_t> seeds;
    std::string out_dir = ".";
};

/// Parses and validates a config JSON string; unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);

/// Named regime presets (JSON text accepted by parse_config):
/// "fig2-low" and "fig2-high".
std::string preset_config(const std::string& name);

/// Merges overrides (JSON object) on top of a base JSON document.
std::string merge_config(const std::string& base_json, const std::string& overrides_json);

struct FinalWealthStats {
    double median = 0.0;
    double mean = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double iqr = 0.0;
};

struct PolicySummary {
    Policy policy;
    FinalWealthStats final_wealth;
    std::vector<double> pseudo_regret_mean; // empty when true means are unknown
};

struct ExperimentSummary {
    std::string mode;
    int num_seeds = 0;
    int trials = 0;
    bool filtered = false;
    std::vector<std::string> selected_assets; // first seed's selection when filtering
    std::vector<PolicySummary> policies;
    long clamp_count = 0;
    double runtime_seconds = 0.0; // logged, not serialized (reports stay reproducible)
};

struct SeedRun {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    std::vector<std::string> selected_assets;
    std::vector<TrialRecord> records;
    long clamp_count = 0;
    std::vector<double> true_means; // per selected asset; empty in csv mode
    std::string tree_json;          // filter runs only
    std::vector<double> spectrum_pre;
    std::vector<double> spectrum_post;
};

struct ExperimentOutcome {
    ExperimentConfig config;
    std::vector<SeedRun> runs; // seed order, one per configured seed
    ExperimentSummary summary; // over completed runs
    bool all_completed = false;
};

/// Runs every seed on a worker pool (size capped by BANDITFOLIO_THREADS)
/// and aggregates deterministically in seed order. Per-seed failures are
/// captured, not thrown.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

/// Writes ledger.csv and summary.json (plus tree.json and spectrum.csv
/// when the filter ran, and failure_manifest.json when seeds failed).
/// Returns the paths written.
std::vector<std::string> emit_report(const ExperimentOutcome& outcome, const std::string& dir);

/// JSON text of the summary, exactly as written to summary.json.
std::string summary_to_json(const ExperimentOutcome& outcome);

/// Worker pool width: BANDITFOLIO_THREADS when set, else hardware
/// concurrency, never more than the seed count.
int worker_pool_size(int num_tasks);

/// The trial-1 CVaR program the engine would solve for the first
/// configured seed (post-filter); feeds the --dump-lp debugging flag.
CvarLp first_trial_lp(const ExperimentConfig& config);

} // namespace banditfolio
