#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "banditfolio/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string seeds_to_json(const std::string& csv) {
    std::string out = "{\"seeds\":[";
    std::stringstream ss(csv);
    std::string tok;
    bool first = true;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out += (first ? "" : ",") + tok;
        first = false;
    }
    out += "]}";
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential portfolio selection experiments: MST peripherality filtering, "
                 "a UCB1/CVaR blended policy and benchmark strategies over simulated or "
                 "CSV markets."};

    std::string config_path, out_dir, seeds_csv, preset, dump_lp_path;
    bool filter_only = false;
    app.add_option("--config", config_path, "Experiment config JSON file");
    app.add_option("--out", out_dir, "Output directory for reports");
    app.add_option("--seeds", seeds_csv, "Comma-separated seed list (overrides config)");
    app.add_option("--preset", preset, "Named regime preset: fig2-low or fig2-high");
    app.add_flag("--filter-only", filter_only, "Emit tree/spectrum without running the engine");
    app.add_option("--dump-lp", dump_lp_path,
                   "Write the trial-1 CVaR linear program as a plain-text tableau");
    CLI11_PARSE(app, argc, argv);

    try {
        std::string doc;
        if (!preset.empty()) doc = banditfolio::preset_config(preset);
        if (!config_path.empty()) {
            const std::string user = read_file(config_path);
            doc = doc.empty() ? user : banditfolio::merge_config(doc, user);
        }
        if (doc.empty()) {
            std::cerr << "error: provide --config and/or --preset\n";
            return 2;
        }
        if (!seeds_csv.empty()) doc = banditfolio::merge_config(doc, seeds_to_json(seeds_csv));
        if (!out_dir.empty()) {
            doc = banditfolio::merge_config(doc, std::string("{\"out_dir\":\"") + out_dir + "\"}");
        }
        if (filter_only) doc = banditfolio::merge_config(doc, "{\"filter_only\":true}");

        const banditfolio::ExperimentConfig config = banditfolio::parse_config(doc);

        if (!dump_lp_path.empty()) {
            const banditfolio::CvarLp lp = banditfolio::first_trial_lp(config);
            const auto parent = std::filesystem::path(dump_lp_path).parent_path();
            if (!parent.empty()) std::filesystem::create_directories(parent);
            std::ofstream f(dump_lp_path, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open '" + dump_lp_path + "'");
            f << banditfolio::format_tableau(lp.program);
            std::printf("wrote %s\n", dump_lp_path.c_str());
        }

        auto outcome = banditfolio::run_experiment(config);
        for (const auto& run : outcome.runs) {
            if (run.ok) {
                std::printf("seed %llu: ok\n", static_cast<unsigned long long>(run.seed));
            } else {
                std::printf("seed %llu: FAILED: %s\n", static_cast<unsigned long long>(run.seed),
                            run.error.c_str());
            }
        }
        const auto written = banditfolio::emit_report(outcome, config.out_dir);
        for (const auto& path : written) std::printf("wrote %s\n", path.c_str());
        std::printf("runtime: %.2fs over %d seed(s)\n", outcome.summary.runtime_seconds,
                    static_cast<int>(config.seeds.size()));
        return outcome.all_completed ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
