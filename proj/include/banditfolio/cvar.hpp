#pragma once

#include <vector>

#include "banditfolio/ingest.hpp"
#include "banditfolio/simplex.hpp"

namespace banditfolio {

/// Uniformly weighted loss observations (loss = negative portfolio return).
struct LossSample {
    std::vector<double> losses;
};

/// Empirical value-at-risk at level beta: the ceil(beta * m)-th smallest
/// loss, consistent with the infimum definition under the empirical
/// measure.
double empirical_var(const LossSample& s, double beta);

/// Empirical conditional value-at-risk at level gamma, evaluated in
/// closed form as min_alpha [alpha + sum max(loss - alpha, 0) / ((1-gamma) m)].
double empirical_cvar(const LossSample& s, double gamma);

/// Scenario returns feeding the piecewise-linear CVaR objective:
/// historical columns followed by observed ones, each a K-vector.
struct CvarProblem {
    double gamma = 0.95;
    std::vector<std::vector<double>> scenarios;
    int k = 0;
};

void validate_problem(const CvarProblem& p);

/// The LP reduction plus the problem it came from (kept so the solution
/// can be certified against the direct objective).
struct CvarLp {
    LinearProgram program; // variables: u_1..u_K, alpha (free), z_1..z_m
    CvarProblem problem;
};

/// Epigraph reduction: minimize alpha + sum z_s / (m (1-gamma)) subject to
/// z_s >= -u.r_s - alpha, z_s >= 0, sum u = 1, u >= 0, alpha free.
CvarLp build_lp(const CvarProblem& p);

/// Direct evaluation of the approximate performance function at (u, alpha).
double cvar_objective(const std::vector<double>& u, double alpha, const CvarProblem& p);

/// Simplex point, threshold and minimized CVaR estimate.
struct CvarSolution {
    std::vector<double> weights;
    double alpha = 0.0;
    double objective = 0.0;
    long iterations = 0;
};

/// Solves the LP and certifies the result: primal feasibility residual
/// and the gap between the LP objective and the direct evaluation at the
/// returned point must both be below tol.
CvarSolution solve_lp(const CvarLp& lp, double tol = 1e-7);

/// Risk-aware allocation at trial t (1-based): scenarios are the delta
/// historical columns plus the first t-1 observed columns.
CvarSolution minimize_cvar(const ReturnMatrix& history, const ReturnMatrix& observed,
                           double gamma, int t);

} // namespace banditfolio
