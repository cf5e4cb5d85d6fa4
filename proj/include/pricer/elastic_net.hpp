#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <istream>
#include <ostream>

#include "pricer/core.hpp"
#include "pricer/serialize.hpp"

namespace pricer {

/**
 * Linear regression with combined L1/L2 penalties, fit by proximal
 * gradient descent on internally standardized features.
 *
 * Minimizes mean squared error + l1*|w| + l2*w^2. The smooth part steps
 * at `learning_rate`; the L1 part is applied as a soft-threshold after
 * each step. Standardization means and scales are stored with the model,
 * so predict() accepts raw features.
 */
class ElasticNet {
public:
    struct Params {
        double l1 = 0.0;
        double l2 = 0.0;
        double learning_rate = 0.01;
        int max_iter = 1000;
        double tol = 1e-10;
    };

    ElasticNet() = default;
    explicit ElasticNet(Params p) : params_(p) {}

    void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
        if (X.rows() < 2) throw DomainError("elastic net: need at least 2 rows");
        if (X.rows() != y.rows()) throw DomainError("elastic net: X/y row mismatch");
        if (!X.allFinite() || !y.allFinite())
            throw DomainError("elastic net: non-finite values in input");

        mean_ = X.colwise().mean();
        scale_ = ((X.rowwise() - mean_.transpose()).array().square().colwise().mean())
                     .sqrt()
                     .matrix();
        for (Eigen::Index j = 0; j < scale_.size(); ++j)
            if (scale_(j) < 1e-12) scale_(j) = 1.0;  // constant column

        Eigen::MatrixXd Z = (X.rowwise() - mean_.transpose()).array().rowwise() /
                            scale_.transpose().array();
        double y_mean = y.mean();
        Eigen::VectorXd yc = y.array() - y_mean;

        const double n = static_cast<double>(X.rows());
        Eigen::VectorXd w = Eigen::VectorXd::Zero(X.cols());
        const double lr = params_.learning_rate;
        for (int it = 0; it < params_.max_iter; ++it) {
            Eigen::VectorXd resid = Z * w - yc;
            Eigen::VectorXd grad = (2.0 / n) * (Z.transpose() * resid) + 2.0 * params_.l2 * w;
            Eigen::VectorXd w_next = w - lr * grad;
            // soft-threshold for the L1 part
            double thr = lr * params_.l1;
            for (Eigen::Index j = 0; j < w_next.size(); ++j) {
                double v = w_next(j);
                w_next(j) = v > thr ? v - thr : (v < -thr ? v + thr : 0.0);
            }
            double delta = (w_next - w).cwiseAbs().maxCoeff();
            w = w_next;
            if (delta < params_.tol) break;
        }
        if (!w.allFinite()) throw TrainingError("elastic net diverged");
        weights_ = w;
        intercept_ = y_mean;
        fitted_ = true;
    }

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const {
        if (!fitted_) throw DomainError("elastic net: not fitted");
        if (X.cols() != weights_.size()) throw DomainError("elastic net: feature count mismatch");
        Eigen::MatrixXd Z = (X.rowwise() - mean_.transpose()).array().rowwise() /
                            scale_.transpose().array();
        return (Z * weights_).array() + intercept_;
    }

    /// Coefficients on the original (unstandardized) feature scale.
    Eigen::VectorXd coefficients() const {
        return (weights_.array() / scale_.array()).matrix();
    }

    double intercept_raw() const {
        return intercept_ - (weights_.array() * mean_.array() / scale_.array()).sum();
    }

    const Params& params() const { return params_; }
    Eigen::Index n_features() const { return weights_.size(); }

    void save(std::ostream& os) const {
        os << "elastic_net 1\n";
        serialize::write_scalar(os, params_.l1);
        serialize::write_scalar(os, params_.l2);
        serialize::write_scalar(os, params_.learning_rate);
        os << params_.max_iter << '\n';
        serialize::write_scalar(os, intercept_);
        serialize::write_vector(os, weights_);
        serialize::write_vector(os, mean_);
        serialize::write_vector(os, scale_);
    }

    static ElasticNet load(std::istream& is) {
        serialize::expect_tag(is, "elastic_net", 1);
        ElasticNet m;
        m.params_.l1 = serialize::read_scalar(is);
        m.params_.l2 = serialize::read_scalar(is);
        m.params_.learning_rate = serialize::read_scalar(is);
        is >> m.params_.max_iter;
        m.intercept_ = serialize::read_scalar(is);
        m.weights_ = serialize::read_vector(is);
        m.mean_ = serialize::read_vector(is);
        m.scale_ = serialize::read_vector(is);
        m.fitted_ = true;
        return m;
    }

private:
    Params params_;
    Eigen::VectorXd weights_, mean_, scale_;
    double intercept_ = 0.0;
    bool fitted_ = false;
};

}  // namespace pricer
