#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pricer/core.hpp"
#include "pricer/csv.hpp"
#include "pricer/elasticity.hpp"
#include "pricer/simplex.hpp"

namespace pricer {

/**
 * The assignment LP in vector form. A set of 3 columns represents one
 * product, ordered by ascending discount (discount-delta, base,
 * discount+delta). Rows 0..n-1 are the one-price-per-product selection
 * rows; the last row carries the candidate prices and must sum to the
 * budget c. r[3i+j] is the revenue p_ij * d_ij contributed if column j of
 * product i is chosen.
 */
struct LpInstance {
    int n = 0;  // products; columns = 3n, rows = n+1
    Eigen::VectorXd r;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    double c = 0.0;  // budget, INR
    std::vector<PriceLadder> ladders;
};

struct LpSolution {
    Eigen::VectorXd x;  // 3n values in [0, 1]
    double objective = 0.0;
    LpStatus status = LpStatus::infeasible;
    int n_fractional_products = 0;
    int iterations = 0;
};

/// One chosen ladder entry per product.
struct PriceAssignment {
    std::vector<ProductId> product_ids;
    std::vector<int> choice;  // index into the ladder, 0..2
    Money total_price;
    double expected_revenue = 0.0;
};

inline std::pair<Money, Money> budget_range(const std::vector<PriceLadder>& ladders) {
    Money lo{0}, hi{0};
    for (const auto& l : ladders) {
        Money pmin = l.entries[0].price, pmax = l.entries[0].price;
        for (const auto& e : l.entries) {
            pmin = std::min(pmin, e.price);
            pmax = std::max(pmax, e.price);
        }
        lo = lo + pmin;
        hi = hi + pmax;
    }
    return {lo, hi};
}

inline LpInstance build_lp_instance(const std::vector<PriceLadder>& ladders, double c_inr) {
    if (ladders.empty()) throw DomainError("build_lp_instance: no ladders");
    auto [lo, hi] = budget_range(ladders);
    if (c_inr < lo.inr() - 1e-9 || c_inr > hi.inr() + 1e-9)
        throw DomainError("build_lp_instance: budget " + std::to_string(c_inr) +
                          " outside feasible range [" + lo.str() + ", " + hi.str() + "]");

    LpInstance inst;
    inst.n = static_cast<int>(ladders.size());
    inst.ladders = ladders;
    inst.c = c_inr;
    const Eigen::Index cols = 3 * inst.n;
    inst.r.resize(cols);
    inst.A = Eigen::MatrixXd::Zero(inst.n + 1, cols);
    inst.b = Eigen::VectorXd::Ones(inst.n + 1);
    inst.b(inst.n) = c_inr;
    for (int i = 0; i < inst.n; ++i) {
        for (int j = 0; j < 3; ++j) {
            const LadderEntry& e = ladders[static_cast<std::size_t>(i)].entries[static_cast<std::size_t>(j)];
            Eigen::Index col = 3 * i + j;
            inst.r(col) = e.price.inr() * e.projected_demand;
            inst.A(i, col) = 1.0;
            inst.A(inst.n, col) = e.price.inr();
        }
    }
    return inst;
}

/**
 * Linear relaxation of the selection program: max r.x, A.x = b,
 * 0 <= x <= 1, by bounded-variable simplex with Bland's rule. The budget
 * row is scaled by 1/c and the objective by its max entry before solving
 * so currency magnitudes stay out of pivot decisions; the reported
 * objective is recomputed as r.x on the recovered basic solution.
 */
inline LpSolution solve_lp(const LpInstance& inst) {
    Eigen::MatrixXd A = inst.A;
    Eigen::VectorXd b = inst.b;
    if (inst.c > 0) {
        A.row(inst.n) /= inst.c;
        b(inst.n) = 1.0;
    }
    double r_scale = std::max(inst.r.cwiseAbs().maxCoeff(), 1e-12);
    Eigen::VectorXd c_scaled = inst.r / r_scale;
    Eigen::VectorXd u = Eigen::VectorXd::Ones(inst.r.size());

    const int cap = 10 * (3 * inst.n + inst.n + 1);
    auto raw = BoundedSimplex::solve(A, b, c_scaled, u, cap, 1e-9);

    LpSolution sol;
    sol.status = raw.status;
    sol.iterations = raw.iterations;
    if (raw.status != LpStatus::optimal) return sol;
    sol.x = raw.x;
    sol.objective = inst.r.dot(raw.x);
    for (int i = 0; i < inst.n; ++i) {
        bool integral = true;
        for (int j = 0; j < 3; ++j) {
            double v = sol.x(3 * i + j);
            if (std::abs(v) > 1e-7 && std::abs(v - 1.0) > 1e-7) integral = false;
        }
        if (!integral) ++sol.n_fractional_products;
    }
    return sol;
}

/**
 * Picks, per product, the column with the largest x. Ties go to the base
 * entry first and then toward the lower discount. The reported revenue is
 * recomputed from the chosen (price, demand) pairs, not from the LP bound.
 */
inline PriceAssignment round_solution(const LpSolution& sol, const LpInstance& inst) {
    if (sol.status != LpStatus::optimal)
        throw DomainError("round_solution: solution is not optimal");
    PriceAssignment a;
    a.total_price = Money{0};
    for (int i = 0; i < inst.n; ++i) {
        double best = std::max({sol.x(3 * i), sol.x(3 * i + 1), sol.x(3 * i + 2)});
        int pick;
        if (sol.x(3 * i + 1) >= best - 1e-9)
            pick = 1;
        else if (sol.x(3 * i) >= best - 1e-9)
            pick = 0;
        else
            pick = 2;
        const auto& ladder = inst.ladders[static_cast<std::size_t>(i)];
        const auto& e = ladder.entries[static_cast<std::size_t>(pick)];
        a.product_ids.push_back(ladder.product_id);
        a.choice.push_back(pick);
        a.total_price = a.total_price + e.price;
        a.expected_revenue += e.price.inr() * e.projected_demand;
    }
    return a;
}

struct SweepRow {
    double c = 0.0;
    double lp_objective = 0.0;
    double rounded_revenue = 0.0;
    double budget_residual = 0.0;  // |rounded total price - c|
    int n_fractional = 0;
};

struct SweepResult {
    PriceAssignment best;
    double best_c = 0.0;
    std::vector<SweepRow> table;
    int warnings = 0;  // failed sweep steps skipped
};

/**
 * Evaluates the budget on an even, inclusive grid between its feasible
 * minimum (every product at its cheapest candidate) and maximum, solving
 * and rounding at each step; keeps the assignment with the highest rounded
 * revenue. Rounding may land off the budget; the residual is reported
 * per step because the outer max makes per-step budget fidelity moot.
 */
inline SweepResult sweep_budget(const std::vector<PriceLadder>& ladders, int steps = 101) {
    if (steps < 2) throw DomainError("sweep_budget: steps must be >= 2");
    if (ladders.empty()) throw DomainError("sweep_budget: no ladders");
    auto [lo, hi] = budget_range(ladders);
    const double c_min = lo.inr(), c_max = hi.inr();

    SweepResult result;
    double best_rev = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < steps; ++t) {
        double c = c_min + (c_max - c_min) * static_cast<double>(t) /
                               static_cast<double>(steps - 1);
        LpSolution sol;
        LpInstance inst;
        try {
            inst = build_lp_instance(ladders, c);
            sol = solve_lp(inst);
        } catch (const std::exception&) {
            ++result.warnings;
            continue;
        }
        if (sol.status != LpStatus::optimal) {
            ++result.warnings;
            continue;
        }
        PriceAssignment a = round_solution(sol, inst);
        SweepRow row;
        row.c = c;
        row.lp_objective = sol.objective;
        row.rounded_revenue = a.expected_revenue;
        row.budget_residual = std::abs(a.total_price.inr() - c);
        row.n_fractional = sol.n_fractional_products;
        result.table.push_back(row);
        if (a.expected_revenue > best_rev) {
            best_rev = a.expected_revenue;
            result.best = std::move(a);
            result.best_c = c;
        }
    }
    if (result.table.empty()) throw DomainError("sweep_budget: every step failed");
    return result;
}

/**
 * Exact integer optimum by enumerating all 3^n selections (n <= 12).
 * Feasible selections are those whose price sum is within price_tolerance
 * of c; an infinite tolerance yields the unconstrained optimum.
 */
inline PriceAssignment brute_force_optimal(const std::vector<PriceLadder>& ladders, double c_inr,
                                           double price_tolerance) {
    const int n = static_cast<int>(ladders.size());
    if (n == 0) throw DomainError("brute_force_optimal: no ladders");
    if (n > 12)
        throw DomainError("brute_force_optimal: refusing 3^" + std::to_string(n) +
                          " enumeration (n > 12)");

    std::vector<int> choice(static_cast<std::size_t>(n), 0);
    std::vector<int> best_choice;
    double best_rev = -std::numeric_limits<double>::infinity();
    Money best_total{0};
    const bool unconstrained = std::isinf(price_tolerance);

    while (true) {
        Money total{0};
        double rev = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto& e = ladders[static_cast<std::size_t>(i)]
                                .entries[static_cast<std::size_t>(choice[static_cast<std::size_t>(i)])];
            total = total + e.price;
            rev += e.price.inr() * e.projected_demand;
        }
        if ((unconstrained || std::abs(total.inr() - c_inr) <= price_tolerance) &&
            rev > best_rev) {
            best_rev = rev;
            best_choice = choice;
            best_total = total;
        }
        // advance base-3 counter, product 0 most significant
        int i = n - 1;
        while (i >= 0 && choice[static_cast<std::size_t>(i)] == 2) {
            choice[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
        ++choice[static_cast<std::size_t>(i)];
    }

    if (best_choice.empty())
        throw DomainError("brute_force_optimal: no selection within tolerance of budget");

    PriceAssignment a;
    for (int i = 0; i < n; ++i) a.product_ids.push_back(ladders[static_cast<std::size_t>(i)].product_id);
    a.choice = best_choice;
    a.total_price = best_total;
    a.expected_revenue = best_rev;
    return a;
}

/// Sweep table to CSV: c,lp_objective,rounded_revenue,budget_residual,n_fractional.
inline void save_sweep_table(const std::vector<SweepRow>& table, const std::string& path) {
    csv::Writer w(path);
    w.write_row({"c", "lp_objective", "rounded_revenue", "budget_residual", "n_fractional"});
    for (const auto& row : table)
        w.write_row({csv::fmt(row.c, 17), csv::fmt(row.lp_objective, 17),
                     csv::fmt(row.rounded_revenue, 17), csv::fmt(row.budget_residual, 17),
                     std::to_string(row.n_fractional)});
}

/// Final assignment to CSV, one row per product.
inline void save_assignment(const PriceAssignment& a, const std::vector<PriceLadder>& ladders,
                            const std::string& path) {
    if (a.choice.size() != ladders.size())
        throw DomainError("save_assignment: assignment/ladder size mismatch");
    csv::Writer w(path);
    w.write_row(
        {"product_id", "chosen_discount_pct", "chosen_price", "projected_demand", "expected_revenue"});
    for (std::size_t i = 0; i < ladders.size(); ++i) {
        const auto& e = ladders[i].entries[static_cast<std::size_t>(a.choice[i])];
        w.write_row({ladders[i].product_id, csv::fmt(e.discount_pct), e.price.str(),
                     csv::fmt(e.projected_demand, 17),
                     csv::fmt(e.price.inr() * e.projected_demand, 17)});
    }
}

}  // namespace pricer
