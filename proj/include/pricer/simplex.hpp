#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "pricer/core.hpp"

namespace pricer {

enum class LpStatus { optimal, infeasible, iteration_limit };

/**
 * Dense two-phase simplex for box-constrained equality LPs:
 *
 *     max c.x   subject to   A.x = b,   0 <= x <= u.
 *
 * Phase 1 drives artificial variables out of an identity basis; phase 2
 * optimizes the true objective. Nonbasic variables rest at either bound,
 * entering steps are limited by basic bounds and by the entering
 * variable's own bound flip, and Bland's rule (lowest index among
 * eligible entering and tied leaving candidates) prevents cycling.
 *
 * The returned solution is recovered from the final basis by a fresh LU
 * solve rather than from the accumulated tableau, so constraint residuals
 * stay at machine precision regardless of pivot count.
 */
class BoundedSimplex {
public:
    struct Result {
        LpStatus status = LpStatus::infeasible;
        Eigen::VectorXd x;
        double objective = 0.0;
        int iterations = 0;
    };

    static Result solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& c, const Eigen::VectorXd& u, int max_iterations,
                        double pivot_tol = 1e-9) {
        BoundedSimplex s(A, b, c, u, pivot_tol);
        return s.run(max_iterations);
    }

private:
    enum VarState : unsigned char { AT_LOWER, AT_UPPER, BASIC };

    static constexpr double kInf = std::numeric_limits<double>::infinity();

    Eigen::MatrixXd T_;       // m x (n + m) current tableau, B^-1 [A | I]
    Eigen::MatrixXd A_orig_;  // m x n, sign-fixed copy for the final solve
    Eigen::VectorXd b_;
    Eigen::VectorXd cost_;    // phase-dependent objective over all columns
    Eigen::VectorXd obj_;     // structural objective (phase 2)
    Eigen::VectorXd upper_;   // bounds over all columns
    Eigen::VectorXd xb_;      // basic variable values by row
    std::vector<int> basis_;  // variable index per row
    std::vector<VarState> state_;
    Eigen::Index m_, n_;
    double tol_;

    BoundedSimplex(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                   const Eigen::VectorXd& u, double pivot_tol)
        : m_(A.rows()), n_(A.cols()), tol_(pivot_tol) {
        A_orig_ = A;
        b_ = b;
        for (Eigen::Index i = 0; i < m_; ++i) {  // artificial start needs b >= 0
            if (b_(i) < 0) {
                A_orig_.row(i) = -A_orig_.row(i);
                b_(i) = -b_(i);
            }
        }
        T_.resize(m_, n_ + m_);
        T_.leftCols(n_) = A_orig_;
        T_.rightCols(m_) = Eigen::MatrixXd::Identity(m_, m_);
        obj_ = c;
        upper_.resize(n_ + m_);
        upper_.head(n_) = u;
        upper_.tail(m_).setConstant(kInf);
        xb_ = b_;
        basis_.resize(static_cast<std::size_t>(m_));
        state_.assign(static_cast<std::size_t>(n_ + m_), AT_LOWER);
        for (Eigen::Index i = 0; i < m_; ++i) {
            basis_[static_cast<std::size_t>(i)] = static_cast<int>(n_ + i);
            state_[static_cast<std::size_t>(n_ + i)] = BASIC;
        }
    }

    double nonbasic_value(Eigen::Index j) const {
        return state_[static_cast<std::size_t>(j)] == AT_UPPER ? upper_(j) : 0.0;
    }

    Result run(int max_iterations) {
        Result res;
        int iterations = 0;

        // phase 1: maximize -sum(artificials)
        cost_ = Eigen::VectorXd::Zero(n_ + m_);
        cost_.tail(m_).setConstant(-1.0);
        bool ok = iterate(max_iterations, iterations, /*allow_artificial=*/false);
        if (!ok) {
            res.status = LpStatus::iteration_limit;
            res.iterations = iterations;
            return res;
        }
        double infeas = 0.0;
        for (Eigen::Index i = 0; i < m_; ++i)
            if (basis_[static_cast<std::size_t>(i)] >= n_) infeas += std::abs(xb_(i));
        if (infeas > 1e-7) {
            res.status = LpStatus::infeasible;
            res.iterations = iterations;
            return res;
        }
        pivot_out_artificials();

        // phase 2: the true objective; artificials pinned at zero
        cost_ = Eigen::VectorXd::Zero(n_ + m_);
        cost_.head(n_) = obj_;
        for (Eigen::Index j = n_; j < n_ + m_; ++j) upper_(j) = 0.0;
        ok = iterate(max_iterations, iterations, /*allow_artificial=*/false);
        res.iterations = iterations;
        if (!ok) {
            res.status = LpStatus::iteration_limit;
            return res;
        }

        res.x = recover_solution();
        res.objective = obj_.dot(res.x);
        res.status = LpStatus::optimal;
        return res;
    }

    /// Pricing + ratio test + pivot loop. Returns false on iteration budget.
    bool iterate(int max_iterations, int& iterations, bool allow_artificial) {
        while (true) {
            if (iterations >= max_iterations) return false;

            // reduced costs, Bland entering: smallest eligible index
            Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
            for (Eigen::Index i = 0; i < m_; ++i)
                y(i) = cost_(basis_[static_cast<std::size_t>(i)]);
            Eigen::Index enter = -1;
            int dir = +1;
            for (Eigen::Index j = 0; j < n_ + m_; ++j) {
                if (state_[static_cast<std::size_t>(j)] == BASIC) continue;
                if (j >= n_ && !allow_artificial) continue;
                if (upper_(j) == 0.0) continue;  // fixed at zero
                double d = cost_(j) - y.dot(T_.col(j));
                if (state_[static_cast<std::size_t>(j)] == AT_LOWER && d > tol_) {
                    enter = j;
                    dir = +1;
                    break;
                }
                if (state_[static_cast<std::size_t>(j)] == AT_UPPER && d < -tol_) {
                    enter = j;
                    dir = -1;
                    break;
                }
            }
            if (enter < 0) return true;  // optimal for this phase

            // ratio test
            const double sigma = static_cast<double>(dir);
            double t_best = upper_(enter);  // bound flip distance (may be inf)
            Eigen::Index leave_row = -1;
            bool leave_at_upper = false;
            for (Eigen::Index i = 0; i < m_; ++i) {
                double s = sigma * T_(i, enter);
                double t_i = kInf;
                bool to_upper = false;
                if (s > tol_) {
                    t_i = xb_(i) / s;  // basic variable falls to its lower bound
                } else if (s < -tol_) {
                    double ub = upper_(basis_[static_cast<std::size_t>(i)]);
                    if (ub == kInf) continue;
                    t_i = (xb_(i) - ub) / s;  // climbs to its upper bound
                    to_upper = true;
                } else {
                    continue;
                }
                if (t_i < -1e-12) t_i = 0.0;
                if (t_i < t_best - 1e-12 ||
                    (t_i < t_best + 1e-12 && leave_row >= 0 &&
                     basis_[static_cast<std::size_t>(i)] <
                         basis_[static_cast<std::size_t>(leave_row)])) {
                    t_best = t_i;
                    leave_row = i;
                    leave_at_upper = to_upper;
                }
            }

            ++iterations;
            if (leave_row < 0) {
                if (t_best == kInf)
                    throw std::logic_error("simplex: unbounded direction despite box bounds");
                // bound flip: entering variable crosses to its other bound
                xb_ -= sigma * t_best * T_.col(enter);
                state_[static_cast<std::size_t>(enter)] =
                    state_[static_cast<std::size_t>(enter)] == AT_LOWER ? AT_UPPER : AT_LOWER;
                continue;
            }

            // pivot: entering becomes basic at its stepped value
            double enter_value = nonbasic_value(enter) + sigma * t_best;
            int leaving = basis_[static_cast<std::size_t>(leave_row)];
            xb_ -= sigma * t_best * T_.col(enter);
            state_[static_cast<std::size_t>(leaving)] = leave_at_upper ? AT_UPPER : AT_LOWER;
            state_[static_cast<std::size_t>(enter)] = BASIC;
            basis_[static_cast<std::size_t>(leave_row)] = static_cast<int>(enter);
            xb_(leave_row) = enter_value;

            double piv = T_(leave_row, enter);
            T_.row(leave_row) /= piv;
            for (Eigen::Index i = 0; i < m_; ++i) {
                if (i == leave_row) continue;
                double f = T_(i, enter);
                if (f != 0.0) T_.row(i) -= f * T_.row(leave_row);
            }
        }
    }

    /// Degenerate artificials swap out for any structural column with a
    /// usable tableau entry; truly redundant rows keep their artificial
    /// pinned at zero.
    void pivot_out_artificials() {
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < n_) continue;
            Eigen::Index pick = -1;
            for (Eigen::Index j = 0; j < n_; ++j) {
                if (state_[static_cast<std::size_t>(j)] == BASIC) continue;
                if (std::abs(T_(i, j)) > tol_) {
                    pick = j;
                    break;
                }
            }
            if (pick < 0) continue;  // redundant constraint
            int leaving = basis_[static_cast<std::size_t>(i)];
            state_[static_cast<std::size_t>(leaving)] = AT_LOWER;
            double enter_value = nonbasic_value(pick);
            state_[static_cast<std::size_t>(pick)] = BASIC;
            basis_[static_cast<std::size_t>(i)] = static_cast<int>(pick);
            xb_(i) = enter_value;

            double piv = T_(i, pick);
            T_.row(i) /= piv;
            for (Eigen::Index r = 0; r < m_; ++r) {
                if (r == i) continue;
                double f = T_(r, pick);
                if (f != 0.0) T_.row(r) -= f * T_.row(i);
            }
        }
    }

    /// x from the final basis via a fresh factorization of B.
    Eigen::VectorXd recover_solution() const {
        Eigen::MatrixXd B(m_, m_);
        for (Eigen::Index i = 0; i < m_; ++i) {
            int v = basis_[static_cast<std::size_t>(i)];
            if (v < n_)
                B.col(i) = A_orig_.col(v);
            else
                B.col(i) = Eigen::VectorXd::Unit(m_, v - static_cast<int>(n_));
        }
        Eigen::VectorXd rhs = b_;
        for (Eigen::Index j = 0; j < n_; ++j)
            if (state_[static_cast<std::size_t>(j)] == AT_UPPER)
                rhs -= A_orig_.col(j) * upper_(j);
        Eigen::VectorXd xb = B.partialPivLu().solve(rhs);

        Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
        for (Eigen::Index j = 0; j < n_; ++j)
            if (state_[static_cast<std::size_t>(j)] == AT_UPPER) x(j) = upper_(j);
        for (Eigen::Index i = 0; i < m_; ++i) {
            int v = basis_[static_cast<std::size_t>(i)];
            if (v < n_) x(v) = xb(i);
        }
        return x;
    }
};

}  // namespace pricer
