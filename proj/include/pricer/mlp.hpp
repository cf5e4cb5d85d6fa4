#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "pricer/core.hpp"
#include "pricer/serialize.hpp"

namespace pricer {

/**
 * One-hidden-layer regressor trained full-batch with Adam. Features and
 * targets are standardized internally; training stops when the held-out
 * validation loss plateaus (patience in epochs) or at max_epochs.
 *
 * loss()/gradient()/flat_params() expose the raw network so analytic
 * gradients can be checked against finite differences.
 */
class Mlp {
public:
    enum class Activation { relu, tanh };

    struct Params {
        int hidden = 100;
        Activation activation = Activation::relu;
        double learning_rate = 0.01;
        int max_epochs = 1000;
        int patience = 20;
        double val_fraction = 0.2;
        std::uint64_t seed = 0;
    };

    Mlp() = default;
    explicit Mlp(Params p) : params_(p) {}

    /// Random-initializes the network for `input_dim` raw inputs (identity
    /// scaling); fit() calls this internally after fitting its scaler.
    void init(int input_dim) {
        std::mt19937_64 rng(params_.seed);
        auto glorot = [&](Eigen::Index rows, Eigen::Index cols) {
            double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
            std::uniform_real_distribution<double> u(-bound, bound);
            Eigen::MatrixXd m(rows, cols);
            for (Eigen::Index i = 0; i < rows; ++i)
                for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
            return m;
        };
        W1_ = glorot(params_.hidden, input_dim);
        b1_ = Eigen::VectorXd::Zero(params_.hidden);
        w2_ = glorot(params_.hidden, 1).col(0);
        b2_ = 0.0;
        x_mean_ = Eigen::VectorXd::Zero(input_dim);
        x_scale_ = Eigen::VectorXd::Ones(input_dim);
        y_mean_ = 0.0;
        y_scale_ = 1.0;
        fitted_ = true;
    }

    void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
        if (X.rows() < 2) throw DomainError("mlp: need at least 2 rows");
        if (X.rows() != y.rows()) throw DomainError("mlp: X/y row mismatch");
        if (!X.allFinite() || !y.allFinite()) throw DomainError("mlp: non-finite values in input");

        init(static_cast<int>(X.cols()));
        x_mean_ = X.colwise().mean();
        x_scale_ = ((X.rowwise() - x_mean_.transpose()).array().square().colwise().mean())
                       .sqrt()
                       .matrix();
        for (Eigen::Index j = 0; j < x_scale_.size(); ++j)
            if (x_scale_(j) < 1e-12) x_scale_(j) = 1.0;
        y_mean_ = y.mean();
        y_scale_ = std::sqrt((y.array() - y_mean_).square().mean());
        if (y_scale_ < 1e-12) y_scale_ = 1.0;

        Eigen::MatrixXd Z =
            (X.rowwise() - x_mean_.transpose()).array().rowwise() / x_scale_.transpose().array();
        Eigen::VectorXd t = (y.array() - y_mean_) / y_scale_;

        // deterministic validation split
        const auto n = Z.rows();
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 split_rng(params_.seed ^ 0x9e3779b97f4a7c15ull);
        std::shuffle(order.begin(), order.end(), split_rng);
        Eigen::Index n_val = static_cast<Eigen::Index>(params_.val_fraction * static_cast<double>(n));
        if (n_val >= n) n_val = n - 1;
        Eigen::Index n_tr = n - n_val;
        Eigen::MatrixXd Ztr(n_tr, Z.cols()), Zval(std::max<Eigen::Index>(n_val, 0), Z.cols());
        Eigen::VectorXd ttr(n_tr), tval(std::max<Eigen::Index>(n_val, 0));
        for (Eigen::Index i = 0; i < n_tr; ++i) {
            Ztr.row(i) = Z.row(order[static_cast<std::size_t>(i)]);
            ttr(i) = t(order[static_cast<std::size_t>(i)]);
        }
        for (Eigen::Index i = 0; i < n_val; ++i) {
            Zval.row(i) = Z.row(order[static_cast<std::size_t>(n_tr + i)]);
            tval(i) = t(order[static_cast<std::size_t>(n_tr + i)]);
        }

        AdamState adam(n_params());
        double best_val = std::numeric_limits<double>::infinity();
        Eigen::VectorXd best_params = flat_params();
        int stale = 0;
        epoch_losses_.clear();
        for (int epoch = 1; epoch <= params_.max_epochs; ++epoch) {
            Eigen::VectorXd g = gradient(Ztr, ttr);
            Eigen::VectorXd p = flat_params();
            adam.step(p, g, params_.learning_rate);
            set_flat_params(p);

            double cur = n_val > 0 ? loss(Zval, tval) : loss(Ztr, ttr);
            if (!std::isfinite(cur))
                throw TrainingError("mlp: loss diverged at epoch " + std::to_string(epoch));
            epoch_losses_.push_back(cur);
            if (cur < best_val - 1e-12) {
                best_val = cur;
                best_params = flat_params();
                stale = 0;
            } else if (++stale >= params_.patience) {
                break;
            }
        }
        set_flat_params(best_params);
    }

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const {
        if (!fitted_) throw DomainError("mlp: not fitted");
        if (X.cols() != W1_.cols()) throw DomainError("mlp: feature count mismatch");
        Eigen::MatrixXd Z =
            (X.rowwise() - x_mean_.transpose()).array().rowwise() / x_scale_.transpose().array();
        return forward(Z).array() * y_scale_ + y_mean_;
    }

    /// MSE of the raw network on (X, y); no scaling applied.
    double loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const {
        return (forward(X) - y).squaredNorm() / static_cast<double>(X.rows());
    }

    /// Analytic gradient of loss() with respect to flat_params().
    Eigen::VectorXd gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const {
        const double n = static_cast<double>(X.rows());
        Eigen::MatrixXd pre = (X * W1_.transpose()).rowwise() + b1_.transpose();
        Eigen::MatrixXd H = activate(pre);
        Eigen::VectorXd out = H * w2_;
        out.array() += b2_;

        Eigen::VectorXd dout = (2.0 / n) * (out - y);
        Eigen::VectorXd dw2 = H.transpose() * dout;
        double db2 = dout.sum();
        Eigen::MatrixXd dH = dout * w2_.transpose();
        Eigen::MatrixXd dpre = dH.array() * activate_grad(pre).array();
        Eigen::MatrixXd dW1 = dpre.transpose() * X;
        Eigen::VectorXd db1 = dpre.colwise().sum();

        Eigen::VectorXd g(n_params());
        Eigen::Index off = 0;
        pack(g, off, dW1);
        pack(g, off, db1);
        pack(g, off, dw2);
        g(off++) = db2;
        return g;
    }

    Eigen::VectorXd flat_params() const {
        Eigen::VectorXd p(n_params());
        Eigen::Index off = 0;
        pack(p, off, W1_);
        pack(p, off, b1_);
        pack(p, off, w2_);
        p(off++) = b2_;
        return p;
    }

    void set_flat_params(const Eigen::VectorXd& p) {
        Eigen::Index off = 0;
        unpack(p, off, W1_);
        unpack(p, off, b1_);
        unpack(p, off, w2_);
        b2_ = p(off++);
    }

    Eigen::Index n_params() const { return W1_.size() + b1_.size() + w2_.size() + 1; }
    /// Monitored (validation) loss per training epoch.
    const std::vector<double>& epoch_losses() const { return epoch_losses_; }
    const Params& params() const { return params_; }
    int n_features() const { return static_cast<int>(W1_.cols()); }

    void save(std::ostream& os) const {
        os << "mlp 1\n"
           << params_.hidden << ' ' << (params_.activation == Activation::relu ? 0 : 1) << ' '
           << params_.max_epochs << ' ' << params_.patience << ' ' << params_.seed << '\n';
        serialize::write_scalar(os, params_.learning_rate);
        serialize::write_scalar(os, params_.val_fraction);
        serialize::write_matrix(os, W1_);
        serialize::write_vector(os, b1_);
        serialize::write_vector(os, w2_);
        serialize::write_scalar(os, b2_);
        serialize::write_vector(os, x_mean_);
        serialize::write_vector(os, x_scale_);
        serialize::write_scalar(os, y_mean_);
        serialize::write_scalar(os, y_scale_);
    }

    static Mlp load(std::istream& is) {
        serialize::expect_tag(is, "mlp", 1);
        Mlp m;
        int act = 0;
        is >> m.params_.hidden >> act >> m.params_.max_epochs >> m.params_.patience >>
            m.params_.seed;
        m.params_.activation = act == 0 ? Activation::relu : Activation::tanh;
        m.params_.learning_rate = serialize::read_scalar(is);
        m.params_.val_fraction = serialize::read_scalar(is);
        m.W1_ = serialize::read_matrix(is);
        m.b1_ = serialize::read_vector(is);
        m.w2_ = serialize::read_vector(is);
        m.b2_ = serialize::read_scalar(is);
        m.x_mean_ = serialize::read_vector(is);
        m.x_scale_ = serialize::read_vector(is);
        m.y_mean_ = serialize::read_scalar(is);
        m.y_scale_ = serialize::read_scalar(is);
        m.fitted_ = true;
        return m;
    }

    /// Adam optimizer state shared with the LSTM trainer.
    struct AdamState {
        Eigen::VectorXd m, v;
        int t = 0;
        double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

        explicit AdamState(Eigen::Index n)
            : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}

        void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr) {
            ++t;
            m = beta1 * m + (1.0 - beta1) * grad;
            v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
            double bc1 = 1.0 - std::pow(beta1, t);
            double bc2 = 1.0 - std::pow(beta2, t);
            params -= (lr / bc1) * m.cwiseQuotient(((v / bc2).cwiseSqrt().array() + eps).matrix());
        }
    };

private:
    Params params_;
    Eigen::MatrixXd W1_;
    Eigen::VectorXd b1_, w2_;
    double b2_ = 0.0;
    Eigen::VectorXd x_mean_, x_scale_;
    double y_mean_ = 0.0, y_scale_ = 1.0;
    bool fitted_ = false;
    std::vector<double> epoch_losses_;

    Eigen::VectorXd forward(const Eigen::MatrixXd& X) const {
        Eigen::MatrixXd pre = (X * W1_.transpose()).rowwise() + b1_.transpose();
        Eigen::VectorXd out = activate(pre) * w2_;
        out.array() += b2_;
        return out;
    }

    Eigen::MatrixXd activate(const Eigen::MatrixXd& z) const {
        if (params_.activation == Activation::relu) return z.cwiseMax(0.0);
        return z.array().tanh().matrix();
    }

    Eigen::MatrixXd activate_grad(const Eigen::MatrixXd& z) const {
        if (params_.activation == Activation::relu)
            return (z.array() > 0.0).cast<double>().matrix();
        return (1.0 - z.array().tanh().square()).matrix();
    }

    static void pack(Eigen::VectorXd& dst, Eigen::Index& off, const Eigen::MatrixXd& m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) dst(off++) = m(i, j);
    }

    static void unpack(const Eigen::VectorXd& src, Eigen::Index& off, Eigen::MatrixXd& m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = src(off++);
    }

    static void pack(Eigen::VectorXd& dst, Eigen::Index& off, const Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) dst(off++) = v(i);
    }

    static void unpack(const Eigen::VectorXd& src, Eigen::Index& off, Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = src(off++);
    }
};

}  // namespace pricer
