#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "pricer/core.hpp"

namespace pricer {

/// Headline accuracy numbers for a demand model; R^2 is deliberately
/// absent (the label is mostly zero, so its mean tells you nothing).
struct EvalReport {
    double mae = 0.0;
    double rmse = 0.0;
    std::size_t n = 0;
};

inline EvalReport evaluate_predictions(const Eigen::VectorXd& predicted,
                                       const Eigen::VectorXd& actual) {
    if (predicted.size() == 0 || predicted.size() != actual.size())
        throw DomainError("evaluate_predictions: inputs must be equal-length and non-empty");
    Eigen::VectorXd err = predicted - actual;
    EvalReport r;
    r.n = static_cast<std::size_t>(err.size());
    r.mae = err.cwiseAbs().mean();
    r.rmse = std::sqrt(err.squaredNorm() / static_cast<double>(err.size()));
    return r;
}

}  // namespace pricer
