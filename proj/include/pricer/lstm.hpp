#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "pricer/core.hpp"
#include "pricer/mlp.hpp"  // AdamState
#include "pricer/serialize.hpp"

namespace pricer {

/**
 * Single-layer LSTM with a linear head, trained by full backpropagation
 * through time under MSE. One optimizer step per batch, with each batch
 * holding every product's trailing window for one day.
 *
 * Gate layout in the stacked 4H pre-activation is [input, forget, cell,
 * output]. loss()/gradient() expose the raw network for finite-difference
 * gradient checks.
 */
class Lstm {
public:
    struct Params {
        int hidden = 50;
        int window = 7;
        double learning_rate = 0.01;
        int epochs = 1000;
        std::uint64_t seed = 0;
    };

    /// One day's training batch: every product's trailing window plus the
    /// next-day quantity it should predict.
    struct Batch {
        std::vector<Eigen::MatrixXd> sequences;  // each window x input_dim
        Eigen::VectorXd targets;
    };

    Lstm() = default;
    explicit Lstm(Params p) : params_(p) {}

    void init(int input_dim) {
        input_dim_ = input_dim;
        const int H = params_.hidden;
        std::mt19937_64 rng(params_.seed);
        auto uniform = [&](Eigen::Index rows, Eigen::Index cols, double bound) {
            std::uniform_real_distribution<double> u(-bound, bound);
            Eigen::MatrixXd m(rows, cols);
            for (Eigen::Index i = 0; i < rows; ++i)
                for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
            return m;
        };
        double bx = std::sqrt(6.0 / static_cast<double>(input_dim + H));
        double bh = std::sqrt(6.0 / static_cast<double>(2 * H));
        W_ = uniform(4 * H, input_dim, bx);
        U_ = uniform(4 * H, H, bh);
        b_ = Eigen::VectorXd::Zero(4 * H);
        b_.segment(H, H).setOnes();  // forget-gate bias starts open
        w_out_ = uniform(H, 1, std::sqrt(6.0 / static_cast<double>(H + 1))).col(0);
        b_out_ = 0.0;
        fitted_ = true;
    }

    /**
     * Trains over aligned per-product series. product_features[p] holds one
     * row per day (T x D, same T for every product); quantities[p] holds the
     * matching T daily quantities. Day t's batch pairs each product's window
     * [t-window, t-1] with its quantity on day t.
     */
    void fit(const std::vector<Eigen::MatrixXd>& product_features,
             const std::vector<Eigen::VectorXd>& quantities) {
        if (product_features.empty() || product_features.size() != quantities.size())
            throw DomainError("lstm: feature/quantity series mismatch");
        const Eigen::Index T = product_features.front().rows();
        const int D = static_cast<int>(product_features.front().cols());
        for (std::size_t p = 0; p < product_features.size(); ++p) {
            if (product_features[p].rows() != T || quantities[p].size() != T)
                throw DomainError("lstm: series must share one day axis");
            if (product_features[p].cols() != D)
                throw DomainError("lstm: inconsistent feature width");
        }
        if (T < params_.window + 1)
            throw DomainError("lstm: series length " + std::to_string(T) +
                              " shorter than window+1 (" + std::to_string(params_.window + 1) +
                              ")");

        std::vector<Batch> batches;
        for (Eigen::Index t = params_.window; t < T; ++t) {
            Batch b;
            b.targets.resize(static_cast<Eigen::Index>(product_features.size()));
            for (std::size_t p = 0; p < product_features.size(); ++p) {
                b.sequences.push_back(
                    product_features[p].middleRows(t - params_.window, params_.window));
                b.targets(static_cast<Eigen::Index>(p)) = quantities[p](t);
            }
            batches.push_back(std::move(b));
        }
        fit_batches(batches, D);
    }

    /// Trains directly on prepared day batches.
    void fit_batches(const std::vector<Batch>& batches, int input_dim) {
        if (batches.empty()) throw DomainError("lstm: no training batches");
        init(input_dim);
        Mlp::AdamState adam(n_params());
        epoch_losses_.clear();
        for (int epoch = 1; epoch <= params_.epochs; ++epoch) {
            double epoch_loss = 0.0;
            for (const auto& batch : batches) {
                Eigen::VectorXd g = gradient(batch);
                Eigen::VectorXd p = flat_params();
                adam.step(p, g, params_.learning_rate);
                set_flat_params(p);
                epoch_loss += loss(batch);
            }
            epoch_loss /= static_cast<double>(batches.size());
            if (!std::isfinite(epoch_loss))
                throw TrainingError("lstm: loss diverged at epoch " + std::to_string(epoch));
            epoch_losses_.push_back(epoch_loss);
        }
    }

    /// Next-day prediction from one trailing window (window x input_dim).
    double predict(const Eigen::MatrixXd& sequence) const {
        if (!fitted_) throw DomainError("lstm: not fitted");
        if (sequence.rows() != params_.window)
            throw DomainError("lstm: sequence shorter than window");
        if (static_cast<int>(sequence.cols()) != input_dim_)
            throw DomainError("lstm: feature width mismatch");
        Forward f = forward(sequence);
        return f.output;
    }

    double loss(const Batch& batch) const {
        double s = 0.0;
        for (std::size_t i = 0; i < batch.sequences.size(); ++i) {
            double out = forward(batch.sequences[i]).output;
            double e = out - batch.targets(static_cast<Eigen::Index>(i));
            s += e * e;
        }
        return s / static_cast<double>(batch.sequences.size());
    }

    /// Analytic BPTT gradient of loss() with respect to flat_params().
    Eigen::VectorXd gradient(const Batch& batch) const {
        const int H = params_.hidden;
        Eigen::MatrixXd dW = Eigen::MatrixXd::Zero(W_.rows(), W_.cols());
        Eigen::MatrixXd dU = Eigen::MatrixXd::Zero(U_.rows(), U_.cols());
        Eigen::VectorXd db = Eigen::VectorXd::Zero(b_.size());
        Eigen::VectorXd dw_out = Eigen::VectorXd::Zero(w_out_.size());
        double db_out = 0.0;
        const double inv_n = 1.0 / static_cast<double>(batch.sequences.size());

        for (std::size_t s = 0; s < batch.sequences.size(); ++s) {
            const Eigen::MatrixXd& X = batch.sequences[s];
            Forward f = forward(X);
            const auto T = X.rows();
            double dout = 2.0 * (f.output - batch.targets(static_cast<Eigen::Index>(s))) * inv_n;

            dw_out += dout * f.h[static_cast<std::size_t>(T)];
            db_out += dout;
            Eigen::VectorXd dh = dout * w_out_;
            Eigen::VectorXd dc = Eigen::VectorXd::Zero(H);
            for (Eigen::Index t = T - 1; t >= 0; --t) {
                const auto& st = f.steps[static_cast<std::size_t>(t)];
                Eigen::VectorXd tanh_c = f.c[static_cast<std::size_t>(t + 1)].array().tanh();
                dc += dh.cwiseProduct(st.o).cwiseProduct(
                    (1.0 - tanh_c.array().square()).matrix());
                Eigen::VectorXd do_ = dh.cwiseProduct(tanh_c);
                Eigen::VectorXd di = dc.cwiseProduct(st.g);
                Eigen::VectorXd dg = dc.cwiseProduct(st.i);
                Eigen::VectorXd df = dc.cwiseProduct(f.c[static_cast<std::size_t>(t)]);

                Eigen::VectorXd dz(4 * H);
                dz.segment(0, H) = di.cwiseProduct(st.i).cwiseProduct(
                    (1.0 - st.i.array()).matrix());
                dz.segment(H, H) = df.cwiseProduct(st.f).cwiseProduct(
                    (1.0 - st.f.array()).matrix());
                dz.segment(2 * H, H) =
                    dg.cwiseProduct((1.0 - st.g.array().square()).matrix());
                dz.segment(3 * H, H) = do_.cwiseProduct(st.o).cwiseProduct(
                    (1.0 - st.o.array()).matrix());

                dW += dz * X.row(t);
                dU += dz * f.h[static_cast<std::size_t>(t)].transpose();
                db += dz;
                dh = U_.transpose() * dz;
                dc = dc.cwiseProduct(st.f);
            }
        }

        Eigen::VectorXd g(n_params());
        Eigen::Index off = 0;
        pack(g, off, dW);
        pack(g, off, dU);
        pack(g, off, db);
        pack(g, off, dw_out);
        g(off++) = db_out;
        return g;
    }

    Eigen::VectorXd flat_params() const {
        Eigen::VectorXd p(n_params());
        Eigen::Index off = 0;
        pack(p, off, W_);
        pack(p, off, U_);
        pack(p, off, b_);
        pack(p, off, w_out_);
        p(off++) = b_out_;
        return p;
    }

    void set_flat_params(const Eigen::VectorXd& p) {
        Eigen::Index off = 0;
        unpack(p, off, W_);
        unpack(p, off, U_);
        unpack(p, off, b_);
        unpack(p, off, w_out_);
        b_out_ = p(off++);
    }

    Eigen::Index n_params() const {
        return W_.size() + U_.size() + b_.size() + w_out_.size() + 1;
    }

    const std::vector<double>& epoch_losses() const { return epoch_losses_; }
    const Params& params() const { return params_; }
    int input_dim() const { return input_dim_; }

    void save(std::ostream& os) const {
        os << "lstm 1\n"
           << params_.hidden << ' ' << params_.window << ' ' << params_.epochs << ' '
           << params_.seed << ' ' << input_dim_ << '\n';
        serialize::write_scalar(os, params_.learning_rate);
        serialize::write_matrix(os, W_);
        serialize::write_matrix(os, U_);
        serialize::write_vector(os, b_);
        serialize::write_vector(os, w_out_);
        serialize::write_scalar(os, b_out_);
    }

    static Lstm load(std::istream& is) {
        serialize::expect_tag(is, "lstm", 1);
        Lstm m;
        is >> m.params_.hidden >> m.params_.window >> m.params_.epochs >> m.params_.seed >>
            m.input_dim_;
        m.params_.learning_rate = serialize::read_scalar(is);
        m.W_ = serialize::read_matrix(is);
        m.U_ = serialize::read_matrix(is);
        m.b_ = serialize::read_vector(is);
        m.w_out_ = serialize::read_vector(is);
        m.b_out_ = serialize::read_scalar(is);
        m.fitted_ = true;
        return m;
    }

private:
    struct Step {
        Eigen::VectorXd i, f, g, o;
    };

    struct Forward {
        std::vector<Eigen::VectorXd> h, c;  // index 0 = initial state
        std::vector<Step> steps;
        double output = 0.0;
    };

    Params params_;
    Eigen::MatrixXd W_, U_;
    Eigen::VectorXd b_, w_out_;
    double b_out_ = 0.0;
    int input_dim_ = 0;
    bool fitted_ = false;
    std::vector<double> epoch_losses_;

    static Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) {
        return (1.0 / (1.0 + (-x.array()).exp())).matrix();
    }

    Forward forward(const Eigen::MatrixXd& X) const {
        const int H = params_.hidden;
        Forward f;
        f.h.push_back(Eigen::VectorXd::Zero(H));
        f.c.push_back(Eigen::VectorXd::Zero(H));
        for (Eigen::Index t = 0; t < X.rows(); ++t) {
            Eigen::VectorXd z = W_ * X.row(t).transpose() + U_ * f.h.back() + b_;
            Step st;
            st.i = sigmoid(z.segment(0, H));
            st.f = sigmoid(z.segment(H, H));
            st.g = z.segment(2 * H, H).array().tanh();
            st.o = sigmoid(z.segment(3 * H, H));
            Eigen::VectorXd c = st.f.cwiseProduct(f.c.back()) + st.i.cwiseProduct(st.g);
            Eigen::VectorXd h = st.o.cwiseProduct(c.array().tanh().matrix());
            f.steps.push_back(std::move(st));
            f.c.push_back(std::move(c));
            f.h.push_back(std::move(h));
        }
        f.output = w_out_.dot(f.h.back()) + b_out_;
        return f;
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
