#include "banditfolio/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace banditfolio {

namespace {

// Expanded standard form: equalities with rhs >= 0, all variables >= 0,
// free variables split as plus/minus pairs, slack columns for <= rows,
// artificial columns where no slack can seed the basis.
struct Standardized {
    int m = 0;             // rows
    int n_struct = 0;      // structural columns (after free-variable split)
    int n_total = 0;       // structural + slack + artificial
    int first_artificial = 0;
    std::vector<double> tab;    // m rows x (n_total + 1), rhs last
    std::vector<double> cost;   // phase-2 cost per column (artificials 0)
    std::vector<int> basis;     // basic column per row
    // column mapping back to original variables: col_plus[v], col_minus[v] (-1 if none)
    std::vector<int> col_plus;
    std::vector<int> col_minus;
};

Standardized standardize(const LinearProgram& lp) {
    const int nv = lp.num_vars();
    const int m = static_cast<int>(lp.rows.size());
    for (const auto& r : lp.rows) {
        if (static_cast<int>(r.coeffs.size()) != nv) {
            throw std::invalid_argument("solve_simplex: row width does not match variable count");
        }
    }

    Standardized s;
    s.m = m;
    s.col_plus.assign(nv, -1);
    s.col_minus.assign(nv, -1);
    int col = 0;
    for (int v = 0; v < nv; ++v) {
        s.col_plus[v] = col++;
        if (!lp.free_vars.empty() && lp.free_vars[v]) s.col_minus[v] = col++;
    }
    s.n_struct = col;

    // Normalize rows: rhs >= 0, >= with zero rhs flipped to <= so its
    // slack can seed the basis.
    struct NormRow {
        std::vector<double> a;
        double b;
        bool needs_artificial;
        bool slack;        // has a +1 slack column
    };
    std::vector<NormRow> rows(m);
    for (int i = 0; i < m; ++i) {
        const auto& src = lp.rows[i];
        double sign = 1.0;
        Relation rel = src.relation;
        if (src.rhs < 0.0 || (src.rhs == 0.0 && rel == Relation::GreaterEq)) {
            sign = -1.0;
            if (rel == Relation::GreaterEq) rel = Relation::LessEq;
            else if (rel == Relation::LessEq) rel = Relation::GreaterEq;
        }
        NormRow& nr = rows[i];
        nr.a.assign(s.n_struct, 0.0);
        for (int v = 0; v < nv; ++v) {
            const double c = sign * src.coeffs[v];
            nr.a[s.col_plus[v]] = c;
            if (s.col_minus[v] >= 0) nr.a[s.col_minus[v]] = -c;
        }
        nr.b = sign * src.rhs;
        nr.slack = (rel != Relation::Equal);
        // <= rows get a basic slack; >= rows get a surplus (-1) plus an
        // artificial; equalities get just the artificial.
        nr.needs_artificial = (rel != Relation::LessEq);
    }

    int n_slack = 0, n_art = 0;
    for (const auto& r : rows) {
        if (r.slack) ++n_slack;
        if (r.needs_artificial) ++n_art;
    }
    s.first_artificial = s.n_struct + n_slack;
    s.n_total = s.first_artificial + n_art;

    const int width = s.n_total + 1;
    s.tab.assign(static_cast<std::size_t>(m) * width, 0.0);
    s.basis.assign(m, -1);

    int slack_col = s.n_struct;
    int art_col = s.first_artificial;
    for (int i = 0; i < m; ++i) {
        double* row = &s.tab[static_cast<std::size_t>(i) * width];
        for (int c = 0; c < s.n_struct; ++c) row[c] = rows[i].a[c];
        row[s.n_total] = rows[i].b;
        if (rows[i].slack) {
            const bool is_surplus = rows[i].needs_artificial;
            row[slack_col] = is_surplus ? -1.0 : 1.0;
            if (!is_surplus) s.basis[i] = slack_col;
            ++slack_col;
        }
        if (rows[i].needs_artificial) {
            row[art_col] = 1.0;
            s.basis[i] = art_col;
            ++art_col;
        }
    }

    s.cost.assign(s.n_total, 0.0);
    for (int v = 0; v < nv; ++v) {
        s.cost[s.col_plus[v]] = lp.objective[v];
        if (s.col_minus[v] >= 0) s.cost[s.col_minus[v]] = -lp.objective[v];
    }
    return s;
}

class Tableau {
public:
    Tableau(Standardized st, double tol, bool bland_from_start)
        : st_(std::move(st)), tol_(tol), bland_(bland_from_start) {
        width_ = st_.n_total + 1;
        pivot_budget_ = 3L * (st_.m + st_.n_total);
        iter_cap_ = 50L * (st_.m + st_.n_total) + 1000;
        // Reduced-cost rows for both phases, eliminated against the
        // starting basis (artificials for phase 1, costs for phase 2).
        phase1_.assign(width_, 0.0);
        for (int c = st_.first_artificial; c < st_.n_total; ++c) phase1_[c] = 1.0;
        phase2_.assign(width_, 0.0);
        for (int c = 0; c < st_.n_total; ++c) phase2_[c] = st_.cost[c];
        for (int i = 0; i < st_.m; ++i) {
            eliminate_basic(phase1_, i);
            eliminate_basic(phase2_, i);
        }
    }

    LpStatus run(LpSolution& out) {
        // Phase 1 only when artificials exist.
        if (st_.first_artificial < st_.n_total) {
            const LpStatus s1 = iterate(phase1_, /*phase1=*/true);
            if (s1 != LpStatus::Optimal) return s1;
            if (phase1_[st_.n_total] < -tol_) return LpStatus::Infeasible; // residual infeasibility
            pivot_out_artificials();
        }
        const LpStatus s2 = iterate(phase2_, /*phase1=*/false);
        out.iterations = iterations_;
        out.degenerate_pivots = degenerate_;
        out.used_bland = bland_;
        return s2;
    }

    std::vector<double> extract(const LinearProgram& lp) const {
        std::vector<double> full(st_.n_total, 0.0);
        for (int i = 0; i < st_.m; ++i) {
            if (st_.basis[i] >= 0) full[st_.basis[i]] = rhs(i);
        }
        std::vector<double> x(lp.num_vars(), 0.0);
        for (int v = 0; v < lp.num_vars(); ++v) {
            x[v] = full[st_.col_plus[v]];
            if (st_.col_minus[v] >= 0) x[v] -= full[st_.col_minus[v]];
        }
        return x;
    }

    bool hit_singularity() const { return singular_; }

private:
    double* row(int i) { return &st_.tab[static_cast<std::size_t>(i) * width_]; }
    const double* row(int i) const { return &st_.tab[static_cast<std::size_t>(i) * width_]; }
    double rhs(int i) const { return row(i)[st_.n_total]; }

    void eliminate_basic(std::vector<double>& cost_row, int i) {
        const int b = st_.basis[i];
        if (b < 0) return;
        const double f = cost_row[b];
        if (f == 0.0) return;
        const double* r = row(i);
        for (int c = 0; c <= st_.n_total; ++c) cost_row[c] -= f * r[c];
    }

    // Entering column, or -1 when reduced costs are all >= -tol.
    int choose_entering(const std::vector<double>& cost_row, bool phase1) const {
        const int limit = phase1 ? st_.n_total : st_.first_artificial;
        if (bland_) {
            for (int c = 0; c < limit; ++c) {
                if (cost_row[c] < -tol_) return c;
            }
            return -1;
        }
        int best = -1;
        double best_val = -tol_;
        for (int c = 0; c < limit; ++c) {
            if (cost_row[c] < best_val) {
                best_val = cost_row[c];
                best = c;
            }
        }
        return best;
    }

    // Leaving row by ratio test; ties to the smallest basis index.
    int choose_leaving(int s) const {
        int r = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < st_.m; ++i) {
            const double a = row(i)[s];
            if (a <= tol_) continue;
            const double ratio = rhs(i) / a;
            if (ratio < best_ratio - 1e-12 ||
                (ratio < best_ratio + 1e-12 && (r == -1 || st_.basis[i] < st_.basis[r]))) {
                best_ratio = ratio;
                r = i;
            }
        }
        return r;
    }

    void pivot(int r, int s) {
        double* pr = row(r);
        const double p = pr[s];
        if (std::fabs(p) < 1e-11) {
            singular_ = true;
            throw std::runtime_error("simplex: numerically singular pivot");
        }
        const double inv = 1.0 / p;
        for (int c = 0; c <= st_.n_total; ++c) pr[c] *= inv;
        pr[s] = 1.0;
        for (int i = 0; i < st_.m; ++i) {
            if (i == r) continue;
            double* ri = row(i);
            const double f = ri[s];
            if (f == 0.0) continue;
            for (int c = 0; c <= st_.n_total; ++c) ri[c] -= f * pr[c];
            ri[s] = 0.0;
        }
        for (auto* cost_row : {&phase1_, &phase2_}) {
            const double f = (*cost_row)[s];
            if (f == 0.0) continue;
            for (int c = 0; c <= st_.n_total; ++c) (*cost_row)[c] -= f * pr[c];
            (*cost_row)[s] = 0.0;
        }
        st_.basis[r] = s;
    }

    LpStatus iterate(std::vector<double>& cost_row, bool phase1) {
        for (;;) {
            const int s = choose_entering(cost_row, phase1);
            if (s < 0) return LpStatus::Optimal;
            const int r = choose_leaving(s);
            if (r < 0) return LpStatus::Unbounded;
            if (rhs(r) <= tol_) {
                if (++degenerate_ > pivot_budget_ && !bland_) bland_ = true;
            }
            pivot(r, s);
            if (++iterations_ > iter_cap_) return LpStatus::IterationLimit;
        }
    }

    // After phase 1, swap any artificial still basic (at zero) for a real
    // column; an all-zero row is redundant and its artificial stays
    // pinned at zero.
    void pivot_out_artificials() {
        for (int i = 0; i < st_.m; ++i) {
            if (st_.basis[i] < st_.first_artificial) continue;
            const double* ri = row(i);
            int s = -1;
            for (int c = 0; c < st_.first_artificial; ++c) {
                if (std::fabs(ri[c]) > tol_) {
                    s = c;
                    break;
                }
            }
            if (s >= 0) pivot(i, s);
        }
    }

    Standardized st_;
    double tol_;
    bool bland_;
    int width_ = 0;
    long pivot_budget_ = 0;
    long iter_cap_ = 0;
    long iterations_ = 0;
    long degenerate_ = 0;
    bool singular_ = false;
    std::vector<double> phase1_;
    std::vector<double> phase2_;
};

LpSolution solve_once(const LinearProgram& lp, double tol, bool bland) {
    Tableau tab(standardize(lp), tol, bland);
    LpSolution sol;
    sol.status = tab.run(sol);
    if (sol.status == LpStatus::Optimal || sol.status == LpStatus::IterationLimit) {
        sol.x = tab.extract(lp);
        sol.objective = 0.0;
        for (int v = 0; v < lp.num_vars(); ++v) sol.objective += lp.objective[v] * sol.x[v];
    }
    return sol;
}

} // namespace

LpSolution solve_simplex(const LinearProgram& lp, double tol) {
    if (lp.rows.empty()) throw std::invalid_argument("solve_simplex: no constraint rows");
    if (!lp.free_vars.empty() && lp.free_vars.size() != lp.objective.size()) {
        throw std::invalid_argument("solve_simplex: free_vars size mismatch");
    }
    try {
        return solve_once(lp, tol, /*bland=*/false);
    } catch (const std::runtime_error&) {
        // Singular pivot: restart with Bland's rule from the start.
        return solve_once(lp, tol, /*bland=*/true);
    }
}

std::string format_tableau(const LinearProgram& lp) {
    std::string out;
    char buf[64];
    out += "minimize:";
    for (double c : lp.objective) {
        std::snprintf(buf, sizeof(buf), " %10.6g", c);
        out += buf;
    }
    out += "\n";
    for (const auto& r : lp.rows) {
        out += "         ";
        for (double c : r.coeffs) {
            std::snprintf(buf, sizeof(buf), " %10.6g", c);
            out += buf;
        }
        const char* rel = r.relation == Relation::LessEq    ? "<="
                          : r.relation == Relation::Equal   ? " ="
                                                            : ">=";
        std::snprintf(buf, sizeof(buf), "  %s %10.6g\n", rel, r.rhs);
        out += buf;
    }
    if (!lp.free_vars.empty()) {
        out += "free:    ";
        for (bool f : lp.free_vars) out += f ? "          f" : "          .";
        out += "\n";
    }
    return out;
}

} // namespace banditfolio
