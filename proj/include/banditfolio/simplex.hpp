#pragma once

#include <string>
#include <vector>

namespace banditfolio {

enum class Relation { LessEq, GreaterEq, Equal };

struct LpRow {
    std::vector<double> coeffs;
    Relation relation = Relation::GreaterEq;
    double rhs = 0.0;
};

/// minimize objective . x  subject to the rows, with x_j >= 0 unless
/// free_vars[j] is set (free variables are split into differences of
/// non-negative pairs inside the solver).
struct LinearProgram {
    std::vector<double> objective;
    std::vector<LpRow> rows;
    std::vector<bool> free_vars; // empty means all non-negative

    int num_vars() const { return static_cast<int>(objective.size()); }
};

enum class LpStatus { Optimal, IterationLimit, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Optimal;
    std::vector<double> x;
    double objective = 0.0;
    long iterations = 0;
    long degenerate_pivots = 0;
    bool used_bland = false;
};

/// Dense two-phase primal simplex. Dantzig pricing with a switch to
/// Bland's rule after 3 * (rows + cols) degenerate pivots; a singular
/// basis triggers one Bland-rule restart before a hard error.
LpSolution solve_simplex(const LinearProgram& lp, double tol = 1e-9);

/// Plain-text tableau of the program (variables as columns, one line per
/// row), for debugging dumps.
std::string format_tableau(const LinearProgram& lp);

} // namespace banditfolio
