#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "pricer/core.hpp"
#include "pricer/serialize.hpp"

namespace pricer {

/**
 * Variance-reduction regression tree. Splits are exhaustive over candidate
 * thresholds (midpoints between distinct sorted feature values); a node's
 * prediction is the mean label of its rows. Supports per-split feature
 * subsampling (for forests) and cost-complexity post-pruning.
 */
class RegressionTree {
public:
    struct Options {
        int max_depth = -1;           // -1 = unlimited
        int min_samples_split = 2;
        int features_per_split = 0;   // 0 = all features
        double ccp_alpha = -1.0;      // < 0 = no pruning
    };

    RegressionTree() = default;

    void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
             const std::vector<int>& rows, const Options& opts, std::mt19937_64* rng) {
        nodes_.clear();
        n_features_ = static_cast<int>(X.cols());
        std::vector<int> work = rows;
        build(X, y, work, 0, static_cast<int>(work.size()), 0, opts, rng);
        if (opts.ccp_alpha >= 0.0) prune(opts.ccp_alpha);
    }

    double predict_row(const Eigen::RowVectorXd& x) const {
        int i = 0;
        while (nodes_[static_cast<std::size_t>(i)].feature >= 0) {
            const Node& nd = nodes_[static_cast<std::size_t>(i)];
            i = x(nd.feature) < nd.threshold ? nd.left : nd.right;
        }
        return nodes_[static_cast<std::size_t>(i)].value;
    }

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const {
        Eigen::VectorXd out(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = predict_row(X.row(i));
        return out;
    }

    int n_features() const { return n_features_; }
    std::size_t n_nodes() const { return nodes_.size(); }

    /// Best split of the root sample by exhaustive search; exposed so a
    /// depth-1 boosted stump can be compared against an external oracle.
    struct SplitInfo {
        int feature = -1;
        double threshold = 0.0;
        double sse_after = std::numeric_limits<double>::infinity();
    };

    void save(std::ostream& os) const {
        os << "tree 1\n" << n_features_ << ' ' << nodes_.size() << '\n';
        for (const auto& nd : nodes_) {
            os << nd.feature << ' ' << nd.left << ' ' << nd.right << ' ' << nd.n << '\n';
            serialize::write_scalar(os, nd.threshold);
            serialize::write_scalar(os, nd.value);
            serialize::write_scalar(os, nd.sse);
        }
    }

    static RegressionTree load(std::istream& is) {
        serialize::expect_tag(is, "tree", 1);
        RegressionTree t;
        std::size_t n = 0;
        is >> t.n_features_ >> n;
        t.nodes_.resize(n);
        for (auto& nd : t.nodes_) {
            is >> nd.feature >> nd.left >> nd.right >> nd.n;
            nd.threshold = serialize::read_scalar(is);
            nd.value = serialize::read_scalar(is);
            nd.sse = serialize::read_scalar(is);
        }
        return t;
    }

private:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        double value = 0.0;  // mean label of the node's rows
        double sse = 0.0;    // sum of squared deviations at this node
        int n = 0;
        int left = -1, right = -1;
    };

    std::vector<Node> nodes_;
    int n_features_ = 0;

    struct BestSplit {
        int feature = -1;
        double threshold = 0.0;
        double gain = 0.0;
    };

    // builds the subtree over work[lo, hi) and returns its node index
    int build(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<int>& work,
              int lo, int hi, int depth, const Options& opts, std::mt19937_64* rng) {
        const int n = hi - lo;
        double sum = 0.0, sq = 0.0;
        for (int i = lo; i < hi; ++i) {
            double v = y(work[static_cast<std::size_t>(i)]);
            sum += v;
            sq += v * v;
        }
        double mean = sum / n;
        double sse = std::max(0.0, sq - sum * sum / n);

        int idx = static_cast<int>(nodes_.size());
        nodes_.push_back({-1, 0.0, mean, sse, n, -1, -1});

        if (n < opts.min_samples_split || sse <= 1e-12 ||
            (opts.max_depth >= 0 && depth >= opts.max_depth))
            return idx;

        BestSplit best = find_split(X, y, work, lo, hi, sum, opts, rng);
        if (best.feature < 0) return idx;

        int mid = static_cast<int>(
            std::partition(work.begin() + lo, work.begin() + hi,
                           [&](int r) { return X(r, best.feature) < best.threshold; }) -
            work.begin());
        if (mid == lo || mid == hi) return idx;  // degenerate partition

        nodes_[static_cast<std::size_t>(idx)].feature = best.feature;
        nodes_[static_cast<std::size_t>(idx)].threshold = best.threshold;
        int left = build(X, y, work, lo, mid, depth + 1, opts, rng);
        int right = build(X, y, work, mid, hi, depth + 1, opts, rng);
        nodes_[static_cast<std::size_t>(idx)].left = left;
        nodes_[static_cast<std::size_t>(idx)].right = right;
        return idx;
    }

    BestSplit find_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const std::vector<int>& work, int lo, int hi, double total_sum,
                         const Options& opts, std::mt19937_64* rng) const {
        const int n = hi - lo;
        std::vector<int> features(static_cast<std::size_t>(n_features_));
        std::iota(features.begin(), features.end(), 0);
        if (opts.features_per_split > 0 && opts.features_per_split < n_features_ && rng) {
            for (int i = 0; i < opts.features_per_split; ++i) {
                std::uniform_int_distribution<int> pick(i, n_features_ - 1);
                std::swap(features[static_cast<std::size_t>(i)],
                          features[static_cast<std::size_t>(pick(*rng))]);
            }
            features.resize(static_cast<std::size_t>(opts.features_per_split));
            std::sort(features.begin(), features.end());
        }

        BestSplit best;
        std::vector<std::pair<double, double>> vals(static_cast<std::size_t>(n));
        for (int f : features) {
            for (int i = 0; i < n; ++i) {
                int r = work[static_cast<std::size_t>(lo + i)];
                vals[static_cast<std::size_t>(i)] = {X(r, f), y(r)};
            }
            std::sort(vals.begin(), vals.end());
            double left_sum = 0.0;
            for (int i = 0; i + 1 < n; ++i) {
                left_sum += vals[static_cast<std::size_t>(i)].second;
                if (vals[static_cast<std::size_t>(i)].first ==
                    vals[static_cast<std::size_t>(i + 1)].first)
                    continue;
                int nl = i + 1, nr = n - nl;
                double right_sum = total_sum - left_sum;
                // SSE reduction = nl*mean_l^2 + nr*mean_r^2 - n*mean^2 (constant dropped)
                double gain = left_sum * left_sum / nl + right_sum * right_sum / nr -
                              total_sum * total_sum / n;
                if (gain > best.gain + 1e-12) {
                    best.feature = f;
                    best.threshold = 0.5 * (vals[static_cast<std::size_t>(i)].first +
                                            vals[static_cast<std::size_t>(i + 1)].first);
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    // cost-complexity: collapse weakest links while their alpha <= ccp_alpha
    void prune(double ccp_alpha) {
        if (nodes_.empty()) return;
        while (true) {
            double best_alpha = std::numeric_limits<double>::infinity();
            int best_node = -1;
            for (std::size_t i = 0; i < nodes_.size(); ++i) {
                if (nodes_[i].feature < 0) continue;
                auto [sub_sse, leaves] = subtree_stats(static_cast<int>(i));
                double alpha = (nodes_[i].sse - sub_sse) / std::max(1, leaves - 1);
                if (alpha < best_alpha) {
                    best_alpha = alpha;
                    best_node = static_cast<int>(i);
                }
            }
            if (best_node < 0 || best_alpha > ccp_alpha) break;
            nodes_[static_cast<std::size_t>(best_node)].feature = -1;
            nodes_[static_cast<std::size_t>(best_node)].left = -1;
            nodes_[static_cast<std::size_t>(best_node)].right = -1;
        }
    }

    std::pair<double, int> subtree_stats(int idx) const {
        const Node& nd = nodes_[static_cast<std::size_t>(idx)];
        if (nd.feature < 0) return {nd.sse, 1};
        auto [ls, ln] = subtree_stats(nd.left);
        auto [rs, rn] = subtree_stats(nd.right);
        return {ls + rs, ln + rn};
    }
};

}  // namespace pricer
