#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pricer/core.hpp"
#include "pricer/tree.hpp"

namespace pricer {

/**
 * Gradient-boosted regression trees under squared loss: stagewise trees fit
 * to residuals, scaled by a shrinkage rate. With squared loss the residual
 * fit is the exact gradient step, so training MSE never increases round
 * over round. Split search is exhaustive (no feature subsampling here).
 */
class Gbt {
public:
    struct Params {
        int n_rounds = 100;
        double learning_rate = 0.1;
        int max_depth = 3;
        int min_samples_split = 2;
    };

    Gbt() = default;
    explicit Gbt(Params p) : params_(p) {}

    void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
        if (X.rows() < 2) throw DomainError("gbt: need at least 2 rows");
        if (X.rows() != y.rows()) throw DomainError("gbt: X/y row mismatch");
        if (!X.allFinite() || !y.allFinite()) throw DomainError("gbt: non-finite values in input");

        base_ = y.mean();
        n_features_ = static_cast<int>(X.cols());
        trees_.clear();
        training_mse_.clear();

        std::vector<int> all(static_cast<std::size_t>(X.rows()));
        std::iota(all.begin(), all.end(), 0);
        RegressionTree::Options opts;
        opts.max_depth = params_.max_depth;
        opts.min_samples_split = params_.min_samples_split;

        Eigen::VectorXd pred = Eigen::VectorXd::Constant(y.size(), base_);
        for (int round = 0; round < params_.n_rounds; ++round) {
            Eigen::VectorXd resid = y - pred;
            RegressionTree t;
            t.fit(X, resid, all, opts, nullptr);
            pred += params_.learning_rate * t.predict(X);
            trees_.push_back(std::move(t));
            training_mse_.push_back((y - pred).squaredNorm() / static_cast<double>(y.size()));
        }
    }

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const {
        if (n_features_ == 0) throw DomainError("gbt: not fitted");
        if (static_cast<int>(X.cols()) != n_features_)
            throw DomainError("gbt: feature count mismatch");
        Eigen::VectorXd out = Eigen::VectorXd::Constant(X.rows(), base_);
        for (const auto& t : trees_) out += params_.learning_rate * t.predict(X);
        return out;
    }

    /// Training MSE after each round; non-increasing by construction.
    const std::vector<double>& training_mse() const { return training_mse_; }
    const Params& params() const { return params_; }
    int n_features() const { return n_features_; }

    void save(std::ostream& os) const {
        os << "gbt 1\n"
           << params_.n_rounds << ' ' << params_.max_depth << ' ' << params_.min_samples_split
           << ' ' << n_features_ << ' ' << trees_.size() << '\n';
        serialize::write_scalar(os, params_.learning_rate);
        serialize::write_scalar(os, base_);
        for (const auto& t : trees_) t.save(os);
    }

    static Gbt load(std::istream& is) {
        serialize::expect_tag(is, "gbt", 1);
        Gbt g;
        std::size_t n_trees = 0;
        is >> g.params_.n_rounds >> g.params_.max_depth >> g.params_.min_samples_split >>
            g.n_features_ >> n_trees;
        g.params_.learning_rate = serialize::read_scalar(is);
        g.base_ = serialize::read_scalar(is);
        g.trees_.reserve(n_trees);
        for (std::size_t i = 0; i < n_trees; ++i) g.trees_.push_back(RegressionTree::load(is));
        return g;
    }

private:
    Params params_;
    std::vector<RegressionTree> trees_;
    std::vector<double> training_mse_;
    double base_ = 0.0;
    int n_features_ = 0;
};

}  // namespace pricer
