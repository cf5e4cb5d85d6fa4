#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "pricer/core.hpp"
#include "pricer/tree.hpp"

namespace pricer {

/**
 * Bagged regression trees with sqrt(p) feature subsampling per split and
 * cost-complexity post-pruning per tree. Prediction is the tree mean.
 *
 * A single-tree forest skips the bootstrap (the bag is the full sample),
 * so it degenerates to one plain tree over the data.
 */
class RandomForest {
public:
    struct Params {
        int n_trees = 100;
        int max_depth = -1;
        std::uint64_t seed = 0;
        double ccp_alpha = 0.0;
        int min_samples_split = 2;
    };

    RandomForest() = default;
    explicit RandomForest(Params p) : params_(p) {}

    void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
        if (X.rows() < 2) throw DomainError("random forest: need at least 2 rows");
        if (X.rows() != y.rows()) throw DomainError("random forest: X/y row mismatch");
        if (!X.allFinite() || !y.allFinite())
            throw DomainError("random forest: non-finite values in input");
        if (params_.n_trees < 1) throw DomainError("random forest: n_trees must be >= 1");

        const int n = static_cast<int>(X.rows());
        const int p = static_cast<int>(X.cols());
        std::mt19937_64 rng(params_.seed);
        RegressionTree::Options opts;
        opts.max_depth = params_.max_depth;
        opts.min_samples_split = params_.min_samples_split;
        opts.features_per_split = std::max(1, static_cast<int>(std::lround(std::sqrt(p))));
        opts.ccp_alpha = params_.ccp_alpha;

        trees_.assign(static_cast<std::size_t>(params_.n_trees), RegressionTree{});
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (auto& tree : trees_) {
            std::vector<int> bag(static_cast<std::size_t>(n));
            if (params_.n_trees == 1) {
                std::iota(bag.begin(), bag.end(), 0);
            } else {
                for (auto& b : bag) b = pick(rng);
            }
            tree.fit(X, y, bag, opts, &rng);
        }
        n_features_ = p;
    }

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const {
        if (trees_.empty()) throw DomainError("random forest: not fitted");
        if (static_cast<int>(X.cols()) != n_features_)
            throw DomainError("random forest: feature count mismatch");
        Eigen::VectorXd out = Eigen::VectorXd::Zero(X.rows());
        for (const auto& t : trees_) out += t.predict(X);
        return out / static_cast<double>(trees_.size());
    }

    const Params& params() const { return params_; }
    int n_features() const { return n_features_; }

    void save(std::ostream& os) const {
        os << "random_forest 1\n"
           << params_.n_trees << ' ' << params_.max_depth << ' ' << params_.seed << ' '
           << params_.min_samples_split << ' ' << n_features_ << '\n';
        serialize::write_scalar(os, params_.ccp_alpha);
        for (const auto& t : trees_) t.save(os);
    }

    static RandomForest load(std::istream& is) {
        serialize::expect_tag(is, "random_forest", 1);
        RandomForest f;
        is >> f.params_.n_trees >> f.params_.max_depth >> f.params_.seed >>
            f.params_.min_samples_split >> f.n_features_;
        f.params_.ccp_alpha = serialize::read_scalar(is);
        f.trees_.reserve(static_cast<std::size_t>(f.params_.n_trees));
        for (int i = 0; i < f.params_.n_trees; ++i) f.trees_.push_back(RegressionTree::load(is));
        return f;
    }

private:
    Params params_;
    std::vector<RegressionTree> trees_;
    int n_features_ = 0;
};

}  // namespace pricer
