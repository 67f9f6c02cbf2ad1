#include "banditfolio/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "banditfolio/market_graph.hpp"

namespace banditfolio {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kMarketTag = 0x4d41524b4554ULL;
constexpr std::uint64_t kParamTag = 0x504152414dULL;

Policy policy_from_name(const std::string& name) {
    for (Policy p : kAllPolicies) {
        if (policy_name(p) == name) return p;
    }
    throw std::invalid_argument("config: unknown policy '" + name + "'");
}

std::pair<double, double> parse_range(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 2) {
        throw std::invalid_argument("config: " + key + " must be a [lo, hi] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

    static const std::set<std::string> known = {
        "mode",           "csv_path",    "universe_size", "drifts",      "drift_range",
        "vols",           "vol_range",   "corr_pairwise", "corr_matrix", "initial_price",
        "initial_prices", "dt",          "k",             "n",           "delta",
        "lambda",         "gamma",       "epsilon",       "scale_lower", "scale_upper",
        "policies",       "filter",      "filter_only",   "seeds",       "out_dir"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");
    }

    ExperimentConfig c;
    c.mode = j.value("mode", c.mode);
    if (c.mode != "simulate" && c.mode != "csv") {
        throw std::invalid_argument("config: mode must be 'simulate' or 'csv'");
    }
    c.csv_path = j.value("csv_path", c.csv_path);
    c.universe_size = j.value("universe_size", c.universe_size);
    if (j.contains("drifts")) c.drifts = j["drifts"].get<std::vector<double>>();
    if (j.contains("drift_range")) c.drift_range = parse_range(j["drift_range"], "drift_range");
    if (j.contains("vols")) c.vols = j["vols"].get<std::vector<double>>();
    if (j.contains("vol_range")) c.vol_range = parse_range(j["vol_range"], "vol_range");
    c.corr_pairwise = j.value("corr_pairwise", c.corr_pairwise);
    if (j.contains("corr_matrix")) {
        const auto rows = j["corr_matrix"].get<std::vector<std::vector<double>>>();
        const int n = static_cast<int>(rows.size());
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(rows[i].size()) != n) {
                throw std::invalid_argument("config: corr_matrix must be square");
            }
            for (int k = 0; k < n; ++k) m(i, k) = rows[i][k];
        }
        c.corr_matrix = std::move(m);
    }
    c.initial_price = j.value("initial_price", c.initial_price);
    if (j.contains("initial_prices")) {
        c.initial_prices = j["initial_prices"].get<std::vector<double>>();
    }
    c.dt = j.value("dt", c.dt);

    c.engine.k = j.value("k", c.engine.k);
    c.engine.n = j.value("n", c.engine.n);
    c.engine.delta = j.value("delta", c.engine.delta);
    c.engine.lambda = j.value("lambda", c.engine.lambda);
    c.engine.gamma = j.value("gamma", c.engine.gamma);
    c.engine.epsilon = j.value("epsilon", c.engine.epsilon);
    c.engine.scaler.lower = j.value("scale_lower", c.engine.scaler.lower);
    c.engine.scaler.upper = j.value("scale_upper", c.engine.scaler.upper);
    if (j.contains("policies")) {
        c.engine.policies.clear();
        for (const auto& name : j["policies"]) {
            c.engine.policies.push_back(policy_from_name(name.get<std::string>()));
        }
    }
    c.filter = j.value("filter", c.filter);
    c.filter_only = j.value("filter_only", c.filter_only);
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    c.out_dir = j.value("out_dir", c.out_dir);

    validate_config(c.engine);
    if (c.mode == "csv") {
        // Universe size comes from the file; checked against k at run time.
        if (c.csv_path.empty()) throw std::invalid_argument("config: csv mode needs csv_path");
    } else {
        if (!c.csv_path.empty()) {
            throw std::invalid_argument("config: csv_path is only valid in csv mode");
        }
        if (c.seeds.empty()) throw std::invalid_argument("config: simulate mode needs seeds");
        if (c.universe_size < c.engine.k) {
            throw std::invalid_argument("config: universe_size must be >= k");
        }
        if (!c.drifts.empty() && static_cast<int>(c.drifts.size()) != c.universe_size) {
            throw std::invalid_argument("config: drifts length must equal universe_size");
        }
        if (!c.vols.empty() && static_cast<int>(c.vols.size()) != c.universe_size) {
            throw std::invalid_argument("config: vols length must equal universe_size");
        }
        if (c.drifts.empty() && !c.drift_range) {
            throw std::invalid_argument("config: provide drifts or drift_range");
        }
        if (c.vols.empty() && !c.vol_range) {
            throw std::invalid_argument("config: provide vols or vol_range");
        }
        if (!c.initial_prices.empty() &&
            static_cast<int>(c.initial_prices.size()) != c.universe_size) {
            throw std::invalid_argument("config: initial_prices length must equal universe_size");
        }
        if (c.corr_matrix && c.corr_matrix->rows != c.universe_size) {
            throw std::invalid_argument("config: corr_matrix size must equal universe_size");
        }
    }
    if (c.seeds.empty()) c.seeds = {1};
    if (c.filter_only && !c.filter) {
        throw std::invalid_argument("config: filter_only requires filter");
    }
    return c;
}

std::string preset_config(const std::string& name) {
    ordered_json j;
    j["mode"] = "simulate";
    j["k"] = 5;
    j["universe_size"] = 5;
    j["n"] = 200;
    j["delta"] = 50;
    j["lambda"] = 0.9;
    j["gamma"] = 0.95;
    j["epsilon"] = 0.1;
    j["drifts"] = {0.04, 0.035, 0.08, 0.02, 0.03};
    j["corr_pairwise"] = 0.3;
    j["initial_price"] = 100.0;
    // One trial = 0.05 time units; scaler bounds sit ~4 sigma out so
    // clamping stays rare at both volatility regimes.
    j["dt"] = 0.05;
    j["scale_lower"] = -0.02;
    j["scale_upper"] = 0.02;
    j["filter"] = false;
    if (name == "fig2-low") {
        j["vol_range"] = {0.02, 0.025};
    } else if (name == "fig2-high") {
        j["vol_range"] = {0.03, 0.035};
    } else {
        throw std::invalid_argument("unknown preset '" + name + "' (expected fig2-low or fig2-high)");
    }
    return j.dump();
}

std::string merge_config(const std::string& base_json, const std::string& overrides_json) {
    json base = json::parse(base_json);
    const json over = json::parse(overrides_json);
    for (const auto& [key, value] : over.items()) base[key] = value;
    return base.dump();
}

int worker_pool_size(int num_tasks) {
    int n = 0;
    if (const char* env = std::getenv("BANDITFOLIO_THREADS")) {
        n = std::atoi(env);
        if (n < 1) throw std::invalid_argument("BANDITFOLIO_THREADS must be a positive integer");
    } else {
        n = static_cast<int>(std::thread::hardware_concurrency());
        if (n < 1) n = 1;
    }
    return std::min(n, std::max(1, num_tasks));
}

namespace {

struct PreparedData {
    ReturnMatrix history;  // universe x delta
    ReturnMatrix future;   // universe x n
    std::vector<double> drifts; // universe; empty in csv mode
    std::vector<double> vols;
};

PreparedData prepare_seed_data(const ExperimentConfig& c, std::uint64_t seed) {
    PreparedData d;
    const int u = c.universe_size;
    GbmParams params;
    Rng param_rng(splitmix64(seed ^ kParamTag));
    if (!c.drifts.empty()) {
        params.drifts = c.drifts;
    } else {
        params.drifts.resize(u);
        for (auto& v : params.drifts) v = param_rng.uniform(c.drift_range->first, c.drift_range->second);
    }
    if (!c.vols.empty()) {
        params.vols = c.vols;
    } else {
        params.vols.resize(u);
        for (auto& v : params.vols) v = param_rng.uniform(c.vol_range->first, c.vol_range->second);
    }
    params.corr = c.corr_matrix ? CorrelationMatrix{*c.corr_matrix}
                                : uniform_correlation(u, c.corr_pairwise);
    params.initial_prices =
        c.initial_prices.empty() ? std::vector<double>(u, c.initial_price) : c.initial_prices;
    params.dt = c.dt;
    params.steps = c.engine.delta + c.engine.n;

    Rng market_rng(splitmix64(seed ^ kMarketTag));
    const PriceSeries prices = simulate_paths(params, market_rng);
    auto [history, future] = split_history(to_log_returns(prices), c.engine.delta);
    d.history = std::move(history);
    d.future = std::move(future);
    d.drifts = std::move(params.drifts);
    d.vols = std::move(params.vols);
    return d;
}

ReturnMatrix select_rows(const ReturnMatrix& r, const std::vector<int>& rows) {
    ReturnMatrix out;
    out.returns = Matrix(static_cast<int>(rows.size()), r.returns.cols);
    for (std::size_t a = 0; a < rows.size(); ++a) {
        out.asset_ids.push_back(r.asset_ids[rows[a]]);
        for (int t = 0; t < r.returns.cols; ++t) {
            out.returns(static_cast<int>(a), t) = r.returns(rows[a], t);
        }
    }
    return out;
}

SeedRun run_one_seed(const ExperimentConfig& c, std::uint64_t seed, const PreparedData* shared) {
    SeedRun run;
    run.seed = seed;
    try {
        PreparedData own;
        const PreparedData* data = shared;
        if (!data) {
            own = prepare_seed_data(c, seed);
            data = &own;
        }

        ReturnMatrix history = data->history;
        ReturnMatrix future = data->future;
        std::vector<int> selected_rows(history.num_assets());
        for (std::size_t i = 0; i < selected_rows.size(); ++i) selected_rows[i] = static_cast<int>(i);

        if (c.filter && history.num_assets() > c.engine.k) {
            const CorrelationMatrix corr = correlation_matrix(history);
            const SpanningTree tree =
                minimum_spanning_tree(distance_matrix(corr), history.asset_ids);
            const auto chosen = select_peripheral(tree, c.engine.k);
            std::map<std::string, int> index_of;
            for (int i = 0; i < history.num_assets(); ++i) index_of[history.asset_ids[i]] = i;
            selected_rows.clear();
            for (const auto& id : chosen) selected_rows.push_back(index_of.at(id));
            std::sort(selected_rows.begin(), selected_rows.end());

            run.tree_json = tree_to_json(tree);
            run.spectrum_pre = covariance_eigenvalues(history);
            ReturnMatrix filtered_history = select_rows(history, selected_rows);
            run.spectrum_post = covariance_eigenvalues(filtered_history);
            history = std::move(filtered_history);
            future = select_rows(future, selected_rows);
        }
        run.selected_assets = history.asset_ids;

        if (!data->drifts.empty()) {
            run.true_means.reserve(selected_rows.size());
            for (int row : selected_rows) {
                run.true_means.push_back(
                    (data->drifts[row] - 0.5 * data->vols[row] * data->vols[row]) * c.dt);
            }
        }

        if (c.filter_only) {
            run.ok = true;
            return run;
        }

        EngineConfig ec = c.engine;
        ec.seed = seed;
        run.records = run_engine(ec, history, future, &run.clamp_count, nullptr);
        run.ok = true;
    } catch (const std::exception& e) {
        run.ok = false;
        run.error = e.what();
    }
    return run;
}

// Linear-interpolation quantile over an ascending sample.
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const double h = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    double v = sorted[lo];
    if (frac > 0.0 && lo + 1 < sorted.size()) v += frac * (sorted[lo + 1] - sorted[lo]);
    return v;
}

FinalWealthStats wealth_stats(const std::vector<double>& finals) {
    FinalWealthStats s;
    std::vector<double> sorted = finals;
    std::sort(sorted.begin(), sorted.end());
    s.median = quantile_sorted(sorted, 0.5);
    s.q25 = quantile_sorted(sorted, 0.25);
    s.q75 = quantile_sorted(sorted, 0.75);
    s.iqr = s.q75 - s.q25;
    double sum = 0.0;
    for (double v : finals) sum += v;
    s.mean = sum / static_cast<double>(finals.size());
    return s;
}

ExperimentSummary summarize(const ExperimentConfig& c, const std::vector<SeedRun>& runs) {
    ExperimentSummary s;
    s.mode = c.mode;
    s.trials = c.engine.n;
    s.filtered = c.filter;

    std::vector<const SeedRun*> done;
    for (const auto& r : runs) {
        if (r.ok) done.push_back(&r);
    }
    s.num_seeds = static_cast<int>(done.size());
    if (done.empty()) return s;
    if (c.filter) s.selected_assets = done.front()->selected_assets;
    for (const auto* r : done) s.clamp_count += r->clamp_count;
    if (c.filter_only) return s;

    const auto& layout = c.engine.policies;
    for (std::size_t pi = 0; pi < layout.size(); ++pi) {
        PolicySummary ps;
        ps.policy = layout[pi];

        std::vector<double> finals;
        finals.reserve(done.size());
        for (const auto* r : done) {
            finals.push_back(std::exp(r->records.back().policies[pi].cum_reward));
        }
        ps.final_wealth = wealth_stats(finals);

        const bool have_means =
            std::all_of(done.begin(), done.end(), [](const SeedRun* r) { return !r->true_means.empty(); });
        if (have_means) {
            ps.pseudo_regret_mean.assign(c.engine.n, 0.0);
            for (const auto* r : done) {
                double mu_star = r->true_means[0];
                for (double m : r->true_means) mu_star = std::max(mu_star, m);
                double cum_mu = 0.0;
                for (int t = 0; t < c.engine.n; ++t) {
                    const auto& pt = r->records[t].policies[pi];
                    double step_mu = 0.0;
                    for (int i = 0; i < c.engine.k; ++i) step_mu += pt.weights.w[i] * r->true_means[i];
                    cum_mu += step_mu;
                    ps.pseudo_regret_mean[t] += (t + 1) * mu_star - cum_mu;
                }
            }
            for (auto& v : ps.pseudo_regret_mean) v /= static_cast<double>(done.size());
        }
        s.policies.push_back(std::move(ps));
    }
    return s;
}

} // namespace

namespace {

PreparedData prepare_csv_data(const ExperimentConfig& config) {
    const PriceSeries prices = load_prices(config.csv_path);
    if (config.filter && prices.num_assets() <= config.engine.k) {
        throw std::invalid_argument("csv mode with filtering needs more assets than k");
    }
    if (!config.filter && prices.num_assets() != config.engine.k) {
        throw std::invalid_argument("csv mode without filtering needs exactly k assets");
    }
    auto [history, future] = split_history(to_log_returns(prices), config.engine.delta);
    if (future.num_trials() < config.engine.n) {
        throw std::invalid_argument("csv data has fewer than delta + n return columns");
    }
    if (future.num_trials() > config.engine.n) {
        ReturnMatrix trimmed;
        trimmed.asset_ids = future.asset_ids;
        trimmed.returns = Matrix(future.num_assets(), config.engine.n);
        for (int i = 0; i < future.num_assets(); ++i) {
            for (int t = 0; t < config.engine.n; ++t) trimmed.returns(i, t) = future.returns(i, t);
        }
        future = std::move(trimmed);
    }
    PreparedData d;
    d.history = std::move(history);
    d.future = std::move(future);
    return d;
}

} // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentOutcome out;
    out.config = config;

    PreparedData shared;
    const PreparedData* shared_ptr = nullptr;
    if (config.mode == "csv") {
        shared = prepare_csv_data(config);
        shared_ptr = &shared;
    }

    const int s = static_cast<int>(config.seeds.size());
    out.runs.resize(s);
    std::atomic<int> next{0};
    const int workers = worker_pool_size(s);
    auto work = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= s) return;
            out.runs[i] = run_one_seed(config, config.seeds[i], shared_ptr);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    out.all_completed =
        std::all_of(out.runs.begin(), out.runs.end(), [](const SeedRun& r) { return r.ok; });
    out.summary = summarize(config, out.runs);
    out.summary.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string summary_to_json(const ExperimentOutcome& outcome) {
    const auto& s = outcome.summary;
    ordered_json j;
    j["mode"] = s.mode;
    j["num_seeds"] = s.num_seeds;
    j["trials"] = s.trials;
    j["filter"] = s.filtered;
    if (s.filtered) j["selected_assets"] = s.selected_assets;
    ordered_json pol = ordered_json::object();
    for (const auto& ps : s.policies) {
        ordered_json p;
        p["final_wealth"] = {{"median", ps.final_wealth.median}, {"mean", ps.final_wealth.mean},
                             {"q25", ps.final_wealth.q25},       {"q75", ps.final_wealth.q75},
                             {"iqr", ps.final_wealth.iqr}};
        if (!ps.pseudo_regret_mean.empty()) p["pseudo_regret_mean"] = ps.pseudo_regret_mean;
        pol[policy_name(ps.policy)] = std::move(p);
    }
    j["policies"] = std::move(pol);
    j["clamp_count"] = s.clamp_count;
    // Wall-clock runtime is reported on stdout only so identical configs
    // yield byte-identical files.
    return j.dump(2);
}

CvarLp first_trial_lp(const ExperimentConfig& config) {
    const std::uint64_t seed = config.seeds.front();
    const PreparedData data =
        config.mode == "csv" ? prepare_csv_data(config) : prepare_seed_data(config, seed);

    ReturnMatrix history = data.history;
    if (config.filter && history.num_assets() > config.engine.k) {
        const CorrelationMatrix corr = correlation_matrix(history);
        const SpanningTree tree = minimum_spanning_tree(distance_matrix(corr), history.asset_ids);
        const auto chosen = select_peripheral(tree, config.engine.k);
        std::map<std::string, int> index_of;
        for (int i = 0; i < history.num_assets(); ++i) index_of[history.asset_ids[i]] = i;
        std::vector<int> rows;
        for (const auto& id : chosen) rows.push_back(index_of.at(id));
        std::sort(rows.begin(), rows.end());
        history = select_rows(history, rows);
    }

    CvarProblem p;
    p.gamma = config.engine.gamma;
    p.k = history.num_assets();
    for (int s = 0; s < history.num_trials(); ++s) {
        std::vector<double> col(p.k);
        for (int i = 0; i < p.k; ++i) col[i] = history.returns(i, s);
        p.scenarios.push_back(std::move(col));
    }
    return build_lp(p);
}

std::vector<std::string> emit_report(const ExperimentOutcome& outcome, const std::string& dir) {
    namespace fs = std::filesystem;
    const auto& config = outcome.config;
    if (config.engine.policies.empty()) {
        throw std::invalid_argument("emit_report: empty policy set");
    }
    fs::create_directories(dir);
    std::vector<std::string> written;

    const auto open_out = [&](const std::string& name) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        if (!f) throw std::runtime_error("emit_report: cannot open " + (fs::path(dir) / name).string());
        return f;
    };

    if (!config.filter_only) {
        auto ledger = open_out("ledger.csv");
        ledger << "seed,trial,policy,weights,reward,cum_reward,wealth\n";
        for (const auto& run : outcome.runs) {
            if (!run.ok) continue;
            for (const auto& rec : run.records) {
                for (std::size_t pi = 0; pi < config.engine.policies.size(); ++pi) {
                    const auto& pt = rec.policies[pi];
                    ledger << run.seed << ',' << rec.trial << ','
                           << policy_name(config.engine.policies[pi]) << ',';
                    for (std::size_t i = 0; i < pt.weights.w.size(); ++i) {
                        ledger << (i ? ";" : "") << fmt_double(pt.weights.w[i]);
                    }
                    ledger << ',' << fmt_double(pt.reward) << ',' << fmt_double(pt.cum_reward)
                           << ',' << fmt_double(std::exp(pt.cum_reward)) << '\n';
                }
            }
        }
        ledger.flush();
        if (!ledger) throw std::runtime_error("emit_report: ledger write failed");
        written.push_back((fs::path(dir) / "ledger.csv").string());

        auto summary = open_out("summary.json");
        summary << summary_to_json(outcome) << '\n';
        summary.flush();
        if (!summary) throw std::runtime_error("emit_report: summary write failed");
        written.push_back((fs::path(dir) / "summary.json").string());
    }

    if (config.filter) {
        const SeedRun* first_ok = nullptr;
        for (const auto& run : outcome.runs) {
            if (run.ok) {
                first_ok = &run;
                break;
            }
        }
        if (first_ok && !first_ok->tree_json.empty()) {
            auto tree = open_out("tree.json");
            tree << first_ok->tree_json << '\n';
            written.push_back((fs::path(dir) / "tree.json").string());

            auto spectrum = open_out("spectrum.csv");
            spectrum << "stage,index,eigenvalue\n";
            for (std::size_t i = 0; i < first_ok->spectrum_pre.size(); ++i) {
                spectrum << "pre," << i << ',' << fmt_double(first_ok->spectrum_pre[i]) << '\n';
            }
            for (std::size_t i = 0; i < first_ok->spectrum_post.size(); ++i) {
                spectrum << "post," << i << ',' << fmt_double(first_ok->spectrum_post[i]) << '\n';
            }
            written.push_back((fs::path(dir) / "spectrum.csv").string());
        }
    }

    if (!outcome.all_completed) {
        ordered_json manifest;
        manifest["completed"] = ordered_json::array();
        manifest["failed"] = ordered_json::array();
        for (const auto& run : outcome.runs) {
            if (run.ok) {
                manifest["completed"].push_back(run.seed);
            } else {
                manifest["failed"].push_back({{"seed", run.seed}, {"error", run.error}});
            }
        }
        auto mf = open_out("failure_manifest.json");
        mf << manifest.dump(2) << '\n';
        written.push_back((fs::path(dir) / "failure_manifest.json").string());
    }
    return written;
}

} // namespace banditfolio
