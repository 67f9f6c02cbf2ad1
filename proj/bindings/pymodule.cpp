#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "banditfolio/bandit.hpp"
#include "banditfolio/cvar.hpp"
#include "banditfolio/engine.hpp"
#include "banditfolio/experiment.hpp"
#include "banditfolio/gbm.hpp"
#include "banditfolio/ingest.hpp"
#include "banditfolio/market_graph.hpp"

namespace py = pybind11;
using namespace banditfolio;

namespace {

using Grid = std::vector<std::vector<double>>;

Matrix grid_to_matrix(const Grid& rows) {
    if (rows.empty()) throw std::invalid_argument("empty matrix");
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int i = 0; i < m.rows; ++i) {
        if (static_cast<int>(rows[i].size()) != m.cols) {
            throw std::invalid_argument("ragged matrix rows");
        }
        for (int j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Grid matrix_to_grid(const Matrix& m) {
    Grid rows(m.rows, std::vector<double>(m.cols));
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) rows[i][j] = m(i, j);
    }
    return rows;
}

ReturnMatrix make_return_matrix(const std::vector<std::string>& ids, const Grid& rows) {
    ReturnMatrix r;
    r.asset_ids = ids;
    r.returns = grid_to_matrix(rows);
    if (static_cast<int>(ids.size()) != r.returns.rows) {
        throw std::invalid_argument("asset id count does not match row count");
    }
    return r;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sequential portfolio selection: MST peripherality filtering, UCB1/CVaR "
              "blended policies, and correlated GBM simulation.";

    // ---- ingest ----
    m.def(
        "load_prices",
        [](const std::string& path) {
            const PriceSeries p = load_prices(path);
            return std::make_pair(p.asset_ids, matrix_to_grid(p.prices));
        },
        py::arg("path"), "Load a CSV price file; returns (asset_ids, prices).");
    m.def(
        "write_prices",
        [](const std::vector<std::string>& ids, const Grid& prices, const std::string& path) {
            PriceSeries p;
            p.asset_ids = ids;
            p.prices = grid_to_matrix(prices);
            write_prices_csv(p, path);
        },
        py::arg("asset_ids"), py::arg("prices"), py::arg("path"),
        "Write prices in the CSV layout load_prices reads.");
    m.def(
        "log_returns",
        [](const std::vector<std::string>& ids, const Grid& prices) {
            PriceSeries p;
            p.asset_ids = ids;
            p.prices = grid_to_matrix(prices);
            return matrix_to_grid(to_log_returns(p).returns);
        },
        py::arg("asset_ids"), py::arg("prices"),
        "Log price ratios, assets x trials (natural log).");

    // ---- market graph ----
    m.def(
        "correlation",
        [](const std::vector<std::string>& ids, const Grid& returns) {
            return matrix_to_grid(correlation_matrix(make_return_matrix(ids, returns)).values);
        },
        py::arg("asset_ids"), py::arg("returns"));
    m.def(
        "mantegna_distance",
        [](const Grid& corr) {
            CorrelationMatrix c{grid_to_matrix(corr)};
            return matrix_to_grid(distance_matrix(c).values);
        },
        py::arg("correlation"), "sqrt(2 (1 - rho)) elementwise.");
    m.def(
        "spanning_tree",
        [](const Grid& distances, const std::vector<std::string>& ids) {
            DistanceMatrix d{grid_to_matrix(distances)};
            const SpanningTree t = minimum_spanning_tree(d, ids);
            py::dict out;
            out["vertices"] = t.vertex_ids;
            out["degrees"] = t.degrees;
            std::vector<std::tuple<std::string, std::string, double>> edges;
            for (const auto& e : t.edges) {
                edges.emplace_back(t.vertex_ids[e.i], t.vertex_ids[e.j], e.weight);
            }
            out["edges"] = edges;
            return out;
        },
        py::arg("distances"), py::arg("asset_ids"),
        "Minimum spanning tree as {vertices, degrees, edges}.");
    m.def(
        "peripheral_assets",
        [](const Grid& distances, const std::vector<std::string>& ids, int k) {
            DistanceMatrix d{grid_to_matrix(distances)};
            return select_peripheral(minimum_spanning_tree(d, ids), k);
        },
        py::arg("distances"), py::arg("asset_ids"), py::arg("k"),
        "The k least-degree vertices of the MST.");
    m.def(
        "covariance_eigenvalues",
        [](const std::vector<std::string>& ids, const Grid& returns) {
            return covariance_eigenvalues(make_return_matrix(ids, returns));
        },
        py::arg("asset_ids"), py::arg("returns"), "Descending sample-covariance spectrum.");

    // ---- risk ----
    m.def(
        "empirical_var",
        [](const std::vector<double>& losses, double beta) {
            return empirical_var(LossSample{losses}, beta);
        },
        py::arg("losses"), py::arg("beta"));
    m.def(
        "empirical_cvar",
        [](const std::vector<double>& losses, double gamma) {
            return empirical_cvar(LossSample{losses}, gamma);
        },
        py::arg("losses"), py::arg("gamma"));
    m.def(
        "min_cvar_portfolio",
        [](const Grid& scenarios, double gamma) {
            CvarProblem p;
            p.gamma = gamma;
            p.scenarios = scenarios;
            p.k = scenarios.empty() ? 0 : static_cast<int>(scenarios.front().size());
            const CvarSolution sol = solve_lp(build_lp(p));
            return py::make_tuple(sol.weights, sol.alpha, sol.objective);
        },
        py::arg("scenarios"), py::arg("gamma"),
        "Minimize empirical CVaR over the simplex; returns (weights, alpha, objective).");

    // ---- bandit ----
    py::class_<UcbState>(m, "UcbState")
        .def(py::init<int>(), py::arg("k"))
        .def_readonly("plays", &UcbState::plays)
        .def_readonly("mean_rewards", &UcbState::mean_rewards)
        .def_readonly("trial", &UcbState::trial);
    m.def("ucb1_select", &ucb1_select, py::arg("state"));
    m.def("update_state", &update_state, py::arg("state"), py::arg("asset"),
          py::arg("scaled_reward"));
    m.def("ucb1_regret_bound", &ucb1_regret_bound, py::arg("true_means"), py::arg("n"));
    m.def(
        "scale_reward",
        [](double lower, double upper, double r) {
            return scale_reward(RewardScaler{lower, upper}, r);
        },
        py::arg("lower"), py::arg("upper"), py::arg("r"));
    m.def(
        "combine_portfolios",
        [](const std::vector<double>& bandit_arm, const std::vector<double>& risk_aware,
           double lam) {
            PortfolioWeights a{bandit_arm}, b{risk_aware};
            return combine(a, b, lam).w;
        },
        py::arg("bandit_weights"), py::arg("cvar_weights"), py::arg("lambda_"));

    // ---- simulation ----
    m.def(
        "simulate_gbm",
        [](const std::vector<double>& drifts, const std::vector<double>& vols, const Grid& corr,
           const std::vector<double>& initial_prices, double dt, int steps, std::uint64_t seed) {
            GbmParams p;
            p.drifts = drifts;
            p.vols = vols;
            p.corr = CorrelationMatrix{grid_to_matrix(corr)};
            p.initial_prices = initial_prices;
            p.dt = dt;
            p.steps = steps;
            Rng rng(seed);
            const PriceSeries s = simulate_paths(p, rng);
            return std::make_pair(s.asset_ids, matrix_to_grid(s.prices));
        },
        py::arg("drifts"), py::arg("vols"), py::arg("correlation"), py::arg("initial_prices"),
        py::arg("dt"), py::arg("steps"), py::arg("seed"),
        "Correlated GBM price paths; returns (asset_ids, prices).");

    // ---- experiment harness ----
    m.def("preset_config", &preset_config, py::arg("name"),
          "JSON text for a named regime preset (fig2-low, fig2-high).");
    m.def("merge_config", &merge_config, py::arg("base_json"), py::arg("overrides_json"));
    m.def(
        "run_experiment",
        [](const std::string& config_json, const std::string& out_dir) {
            const auto outcome = run_experiment(parse_config(config_json));
            if (!out_dir.empty()) emit_report(outcome, out_dir);
            if (!outcome.all_completed) {
                for (const auto& run : outcome.runs) {
                    if (!run.ok) {
                        throw std::runtime_error("seed " + std::to_string(run.seed) +
                                                 " failed: " + run.error);
                    }
                }
            }
            return summary_to_json(outcome);
        },
        py::arg("config_json"), py::arg("out_dir") = std::string(),
        "Run a config; optionally write reports; returns the summary JSON.");
}
