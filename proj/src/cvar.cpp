#include "banditfolio/cvar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace banditfolio {

namespace {

// ceil(x) guarded against the k*1.0 == k + epsilon float artifact.
std::size_t order_index(double level, std::size_t m) {
    const double raw = level * static_cast<double>(m);
    auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    if (k < 1) k = 1;
    if (k > m) k = m;
    return k;
}

} // namespace

double empirical_var(const LossSample& s, double beta) {
    if (s.losses.empty()) throw std::invalid_argument("empirical_var: empty sample");
    if (beta <= 0.0 || beta >= 1.0) throw std::invalid_argument("empirical_var: beta outside (0,1)");
    std::vector<double> sorted = s.losses;
    std::sort(sorted.begin(), sorted.end());
    return sorted[order_index(beta, sorted.size()) - 1];
}

double empirical_cvar(const LossSample& s, double gamma) {
    if (s.losses.empty()) throw std::invalid_argument("empirical_cvar: empty sample");
    if (gamma <= 0.0 || gamma >= 1.0) {
        throw std::invalid_argument("empirical_cvar: gamma outside (0,1)");
    }
    std::vector<double> sorted = s.losses;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    // The scalar Rockafellar-Uryasev objective is piecewise linear in
    // alpha with breakpoints at the order statistics; its minimum sits at
    // the ceil(gamma m)-th one.
    const double alpha = sorted[order_index(gamma, m) - 1];
    double excess = 0.0;
    for (double l : sorted) {
        if (l > alpha) excess += l - alpha;
    }
    return alpha + excess / ((1.0 - gamma) * static_cast<double>(m));
}

void validate_problem(const CvarProblem& p) {
    if (p.gamma <= 0.0 || p.gamma >= 1.0) {
        throw std::invalid_argument("cvar problem: gamma outside (0,1)");
    }
    if (p.k < 1) throw std::invalid_argument("cvar problem: asset count must be positive");
    if (p.scenarios.empty()) throw std::invalid_argument("cvar problem: no scenarios");
    for (const auto& s : p.scenarios) {
        if (static_cast<int>(s.size()) != p.k) {
            throw std::invalid_argument("cvar problem: scenario length does not match asset count");
        }
    }
}

CvarLp build_lp(const CvarProblem& p) {
    validate_problem(p);
    const int k = p.k;
    const int m = static_cast<int>(p.scenarios.size());
    const int nv = k + 1 + m; // u_1..u_K, alpha, z_1..z_m

    CvarLp lp;
    lp.problem = p;
    lp.program.objective.assign(nv, 0.0);
    lp.program.objective[k] = 1.0;
    const double z_cost = 1.0 / (static_cast<double>(m) * (1.0 - p.gamma));
    for (int s = 0; s < m; ++s) lp.program.objective[k + 1 + s] = z_cost;

    lp.program.free_vars.assign(nv, false);
    lp.program.free_vars[k] = true; // alpha unbounded in sign

    lp.program.rows.reserve(m + 1);
    for (int s = 0; s < m; ++s) {
        LpRow row;
        row.coeffs.assign(nv, 0.0);
        for (int i = 0; i < k; ++i) row.coeffs[i] = p.scenarios[s][i];
        row.coeffs[k] = 1.0;
        row.coeffs[k + 1 + s] = 1.0;
        row.relation = Relation::GreaterEq; // u.r_s + alpha + z_s >= 0
        row.rhs = 0.0;
        lp.program.rows.push_back(std::move(row));
    }
    LpRow budget;
    budget.coeffs.assign(nv, 0.0);
    for (int i = 0; i < k; ++i) budget.coeffs[i] = 1.0;
    budget.relation = Relation::Equal;
    budget.rhs = 1.0;
    lp.program.rows.push_back(std::move(budget));
    return lp;
}

double cvar_objective(const std::vector<double>& u, double alpha, const CvarProblem& p) {
    validate_problem(p);
    if (static_cast<int>(u.size()) != p.k) {
        throw std::invalid_argument("cvar_objective: weight length mismatch");
    }
    const double m = static_cast<double>(p.scenarios.size());
    double sum = 0.0;
    for (const auto& r : p.scenarios) {
        double ret = 0.0;
        for (int i = 0; i < p.k; ++i) ret += u[i] * r[i];
        sum += std::max(-ret - alpha, 0.0);
    }
    return alpha + sum / (m * (1.0 - p.gamma));
}

CvarSolution solve_lp(const CvarLp& lp, double tol) {
    const int k = lp.problem.k;
    const LpSolution sol = solve_simplex(lp.program, 1e-9);
    if (sol.status == LpStatus::Infeasible || sol.status == LpStatus::Unbounded) {
        throw std::runtime_error("cvar solve_lp: solver reported an infeasible or unbounded "
                                 "program; the reduction guarantees neither");
    }
    if (sol.status == LpStatus::IterationLimit) {
        throw std::runtime_error("cvar solve_lp: iteration cap exceeded; best incumbent objective " +
                                 std::to_string(sol.objective));
    }

    CvarSolution out;
    out.weights.assign(sol.x.begin(), sol.x.begin() + k);
    out.alpha = sol.x[k];
    out.objective = sol.objective;
    out.iterations = sol.iterations;

    // Certificates: simplex weights are non-negative by construction;
    // check the budget row and the direct objective evaluation.
    double wsum = 0.0;
    for (double w : out.weights) {
        if (w < -tol) throw std::runtime_error("cvar solve_lp: negative weight in solution");
        wsum += w;
    }
    if (std::fabs(wsum - 1.0) > 1e-9) {
        throw std::runtime_error("cvar solve_lp: weights violate the budget constraint");
    }
    const double direct = cvar_objective(out.weights, out.alpha, lp.problem);
    if (std::fabs(direct - out.objective) > std::max(tol, tol * std::fabs(direct))) {
        throw std::runtime_error("cvar solve_lp: LP objective disagrees with direct evaluation");
    }
    return out;
}

CvarSolution minimize_cvar(const ReturnMatrix& history, const ReturnMatrix& observed,
                           double gamma, int t) {
    if (t < 1) throw std::invalid_argument("minimize_cvar: trial index must be >= 1");
    const int k = history.num_assets();
    if (observed.num_assets() != 0 && observed.num_assets() != k) {
        throw std::invalid_argument("minimize_cvar: asset count mismatch");
    }
    const int observed_cols = t - 1;
    if (observed_cols > observed.num_trials()) {
        throw std::invalid_argument("minimize_cvar: fewer observed columns than t-1");
    }

    CvarProblem p;
    p.gamma = gamma;
    p.k = k;
    p.scenarios.reserve(history.num_trials() + observed_cols);
    for (int s = 0; s < history.num_trials(); ++s) {
        std::vector<double> col(k);
        for (int i = 0; i < k; ++i) col[i] = history.returns(i, s);
        p.scenarios.push_back(std::move(col));
    }
    for (int s = 0; s < observed_cols; ++s) {
        std::vector<double> col(k);
        for (int i = 0; i < k; ++i) col[i] = observed.returns(i, s);
        p.scenarios.push_back(std::move(col));
    }
    return solve_lp(build_lp(p));
}

} // namespace banditfolio
