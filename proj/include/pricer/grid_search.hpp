#pragma once

#include <Eigen/Dense>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "pricer/artifact.hpp"
#include "pricer/metrics.hpp"

namespace pricer {

using ParamSet = std::map<std::string, double>;

struct CvCell {
    ParamSet params;
    double mean_mae = 0.0;
    std::vector<double> fold_mae;
};

struct GridSearchResult {
    ParamSet best;
    double best_mae = 0.0;
    std::vector<CvCell> table;  // in grid order
};

namespace detail {

inline double param_or(const ParamSet& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

/// Fit the given kind with one grid point and predict the held-out rows.
inline Eigen::VectorXd fit_predict(ModelKind kind, const ParamSet& p, const Eigen::MatrixXd& Xtr,
                                   const Eigen::VectorXd& ytr, const Eigen::MatrixXd& Xte) {
    switch (kind) {
        case ModelKind::linear_elastic_net: {
            ElasticNet::Params mp;
            mp.l1 = param_or(p, "l1", 0.0);
            mp.l2 = param_or(p, "l2", 0.0);
            mp.learning_rate = param_or(p, "learning_rate", 0.01);
            mp.max_iter = static_cast<int>(param_or(p, "max_iter", 1000));
            ElasticNet m(mp);
            m.fit(Xtr, ytr);
            return m.predict(Xte);
        }
        case ModelKind::random_forest: {
            RandomForest::Params mp;
            mp.n_trees = static_cast<int>(param_or(p, "n_trees", 100));
            mp.max_depth = static_cast<int>(param_or(p, "max_depth", -1));
            mp.seed = static_cast<std::uint64_t>(param_or(p, "seed", 0));
            mp.ccp_alpha = param_or(p, "ccp_alpha", 0.0);
            RandomForest m(mp);
            m.fit(Xtr, ytr);
            return m.predict(Xte);
        }
        case ModelKind::gbt: {
            Gbt::Params mp;
            mp.n_rounds = static_cast<int>(param_or(p, "n_rounds", 100));
            mp.learning_rate = param_or(p, "learning_rate", 0.1);
            mp.max_depth = static_cast<int>(param_or(p, "max_depth", 3));
            Gbt m(mp);
            m.fit(Xtr, ytr);
            return m.predict(Xte);
        }
        case ModelKind::mlp: {
            Mlp::Params mp;
            mp.hidden = static_cast<int>(param_or(p, "hidden", 100));
            mp.learning_rate = param_or(p, "learning_rate", 0.01);
            mp.max_epochs = static_cast<int>(param_or(p, "max_epochs", 1000));
            mp.seed = static_cast<std::uint64_t>(param_or(p, "seed", 0));
            Mlp m(mp);
            m.fit(Xtr, ytr);
            return m.predict(Xte);
        }
        default:
            throw DomainError("grid_search_cv: unsupported model kind for matrix CV");
    }
}

}  // namespace detail

/**
 * Exhaustive grid search scored by k-fold mean MAE. Fold assignment is a
 * seeded shuffle dealt round-robin, so a fixed seed fixes the folds; ties
 * on the score keep the earlier grid point.
 */
inline GridSearchResult grid_search_cv(ModelKind kind, const std::vector<ParamSet>& grid,
                                       const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                       int folds = 5, std::uint64_t seed = 0) {
    if (grid.empty()) throw DomainError("grid_search_cv: empty grid");
    if (folds < 2) throw DomainError("grid_search_cv: need at least 2 folds");
    if (X.rows() < folds) throw DomainError("grid_search_cv: fewer rows than folds");

    const auto n = X.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> fold_of(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < order.size(); ++i)
        fold_of[static_cast<std::size_t>(order[i])] = static_cast<int>(i % static_cast<std::size_t>(folds));

    GridSearchResult result;
    result.best_mae = std::numeric_limits<double>::infinity();
    for (const auto& params : grid) {
        CvCell cell;
        cell.params = params;
        for (int f = 0; f < folds; ++f) {
            std::vector<Eigen::Index> tr, te;
            for (Eigen::Index i = 0; i < n; ++i)
                (fold_of[static_cast<std::size_t>(i)] == f ? te : tr).push_back(i);
            Eigen::MatrixXd Xtr(static_cast<Eigen::Index>(tr.size()), X.cols());
            Eigen::MatrixXd Xte(static_cast<Eigen::Index>(te.size()), X.cols());
            Eigen::VectorXd ytr(static_cast<Eigen::Index>(tr.size()));
            Eigen::VectorXd yte(static_cast<Eigen::Index>(te.size()));
            for (std::size_t i = 0; i < tr.size(); ++i) {
                Xtr.row(static_cast<Eigen::Index>(i)) = X.row(tr[i]);
                ytr(static_cast<Eigen::Index>(i)) = y(tr[i]);
            }
            for (std::size_t i = 0; i < te.size(); ++i) {
                Xte.row(static_cast<Eigen::Index>(i)) = X.row(te[i]);
                yte(static_cast<Eigen::Index>(i)) = y(te[i]);
            }
            Eigen::VectorXd pred = detail::fit_predict(kind, params, Xtr, ytr, Xte);
            cell.fold_mae.push_back(evaluate_predictions(pred, yte).mae);
        }
        cell.mean_mae = std::accumulate(cell.fold_mae.begin(), cell.fold_mae.end(), 0.0) /
                        static_cast<double>(cell.fold_mae.size());
        if (cell.mean_mae < result.best_mae) {  // strict: ties keep the earlier point
            result.best_mae = cell.mean_mae;
            result.best = params;
        }
        result.table.push_back(std::move(cell));
    }
    return result;
}

}  // namespace pricer
