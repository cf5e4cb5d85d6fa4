#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>
#include <vector>

#include "pricer/core.hpp"
#include "pricer/serialize.hpp"

namespace pricer {

/// Autocorrelation up to max_lag (biased estimator, acf[0] = 1).
/// A constant series has no autocorrelation structure: zeros past lag 0.
inline std::vector<double> acf(const std::vector<double>& x, int max_lag) {
    const int n = static_cast<int>(x.size());
    std::vector<double> out(static_cast<std::size_t>(max_lag) + 1, 0.0);
    out[0] = 1.0;
    if (n < 2) return out;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    if (var < 1e-12) return out;
    for (int lag = 1; lag <= max_lag && lag < n; ++lag) {
        double cov = 0.0;
        for (int t = lag; t < n; ++t) cov += (x[t] - mean) * (x[t - lag] - mean);
        out[static_cast<std::size_t>(lag)] = cov / var;
    }
    return out;
}

/// Partial autocorrelation via Durbin-Levinson on the sample ACF.
inline std::vector<double> pacf(const std::vector<double>& x, int max_lag) {
    std::vector<double> rho = acf(x, max_lag);
    std::vector<double> out(static_cast<std::size_t>(max_lag) + 1, 0.0);
    out[0] = 1.0;
    if (max_lag < 1) return out;

    std::vector<double> phi_prev(static_cast<std::size_t>(max_lag) + 1, 0.0);
    std::vector<double> phi(static_cast<std::size_t>(max_lag) + 1, 0.0);
    double v = 1.0;
    for (int k = 1; k <= max_lag; ++k) {
        double num = rho[static_cast<std::size_t>(k)];
        for (int j = 1; j < k; ++j)
            num -= phi_prev[static_cast<std::size_t>(j)] * rho[static_cast<std::size_t>(k - j)];
        if (v < 1e-12) break;
        double a = num / v;
        out[static_cast<std::size_t>(k)] = a;
        for (int j = 1; j < k; ++j)
            phi[static_cast<std::size_t>(j)] =
                phi_prev[static_cast<std::size_t>(j)] -
                a * phi_prev[static_cast<std::size_t>(k - j)];
        phi[static_cast<std::size_t>(k)] = a;
        v *= (1.0 - a * a);
        phi_prev = phi;
    }
    return out;
}

inline std::vector<double> difference(const std::vector<double>& x, int d) {
    std::vector<double> w = x;
    for (int k = 0; k < d; ++k) {
        std::vector<double> next(w.size() - 1);
        for (std::size_t i = 1; i < w.size(); ++i) next[i - 1] = w[i] - w[i - 1];
        w = std::move(next);
    }
    return w;
}

struct ArimaOrder {
    int p = 0, d = 0, q = 0;
    bool operator==(const ArimaOrder&) const = default;
};

namespace detail {

// Stationary enough when the ACF has decayed by lag 10: under the 1.96/sqrt(n)
// band, or at least halved from lag 1 for persistent-but-stationary series.
inline bool acf_decayed(const std::vector<double>& w) {
    double var = 0.0, mean = 0.0;
    for (double v : w) mean += v;
    mean /= static_cast<double>(w.size());
    for (double v : w) var += (v - mean) * (v - mean);
    if (var < 1e-12) return true;  // constant after differencing
    std::vector<double> a = acf(w, 10);
    double band = 1.96 / std::sqrt(static_cast<double>(w.size()));
    return std::abs(a[10]) < std::max(band, 0.5 * std::abs(a[1]));
}

}  // namespace detail

/**
 * Box-Jenkins order pick from the ACF/PACF plots.
 *
 * d = smallest differencing order (at most 2) whose ACF has decayed by lag
 * 10. On the differenced series, the run of leading lags (capped at 5)
 * outside the 1.96/sqrt(n) band is measured for both plots; the one that
 * cuts off sooner names the model: a short PACF run with a long ACF tail is
 * AR(p), the reverse is MA(q), equal runs give ARMA(p, q), and no
 * significant lags at all give (0, d, 0).
 */
inline ArimaOrder select_arima_order(const std::vector<double>& series) {
    if (series.size() < 30) throw DomainError("select_arima_order: need at least 30 points");
    {
        double mean = 0.0, var = 0.0;
        for (double v : series) mean += v;
        mean /= static_cast<double>(series.size());
        for (double v : series) var += (v - mean) * (v - mean);
        if (var < 1e-12) return {0, 0, 0};
    }

    int d = 0;
    for (; d < 2; ++d)
        if (detail::acf_decayed(difference(series, d))) break;

    std::vector<double> w = difference(series, d);
    double band = 1.96 / std::sqrt(static_cast<double>(w.size()));
    std::vector<double> a = acf(w, 5);
    std::vector<double> pa = pacf(w, 5);
    auto leading_run = [&](const std::vector<double>& v) {
        int run = 0;
        for (int k = 1; k <= 5; ++k, ++run)
            if (std::abs(v[static_cast<std::size_t>(k)]) <= band) break;
        return run;
    };
    int p_run = leading_run(pa);
    int q_run = leading_run(a);

    if (p_run == q_run) return {p_run, d, q_run};
    if (p_run < q_run) return {p_run, d, 0};  // PACF cuts off, ACF decays: AR
    return {0, d, q_run};                     // ACF cuts off, PACF decays: MA
}

/**
 * ARIMA(p, d, q) with intercept, fit by conditional least squares:
 * residuals are recursed with zero pre-sample values and the squared-error
 * sum is minimized by damped Gauss-Newton from a Hannan-Rissanen start.
 * The paper-default configuration is (1, 2, 1).
 */
class Arima {
public:
    Arima() = default;
    Arima(int p, int d, int q) : order_{p, d, q} {
        if (p < 0 || d < 0 || q < 0) throw DomainError("arima: negative order");
    }

    void fit(const std::vector<double>& series) {
        const int p = order_.p, d = order_.d, q = order_.q;
        if (static_cast<int>(series.size()) < 10 + p + d + q)
            throw DomainError("arima: series too short for order (" + std::to_string(p) + "," +
                              std::to_string(d) + "," + std::to_string(q) + ")");
        std::vector<double> w = difference(series, d);
        const int k = 1 + p + q;

        Eigen::VectorXd beta = hannan_rissanen_init(w);
        double sse = css(w, beta, nullptr);

        if (q > 0) {  // with q = 0 the problem is linear and the init is exact
            double lambda = 1e-3;
            for (int it = 0; it < 200; ++it) {
                Eigen::MatrixXd J;
                Eigen::VectorXd e;
                residuals_and_jacobian(w, beta, e, J);
                Eigen::VectorXd g = J.transpose() * e;
                Eigen::MatrixXd JtJ = J.transpose() * J;
                bool accepted = false;
                for (int tries = 0; tries < 20; ++tries) {
                    Eigen::MatrixXd M = JtJ + lambda * Eigen::MatrixXd::Identity(k, k);
                    Eigen::VectorXd step = M.ldlt().solve(-g);
                    Eigen::VectorXd cand = beta + step;
                    double cand_sse = css(w, cand, nullptr);
                    if (cand_sse <= sse) {
                        double improve = sse - cand_sse;
                        beta = cand;
                        sse = cand_sse;
                        lambda = std::max(lambda * 0.3, 1e-12);
                        accepted = true;
                        if (improve < 1e-12 * (1.0 + sse)) it = 200;
                        break;
                    }
                    lambda *= 10.0;
                }
                if (!accepted) break;
            }
        }

        c_ = beta(0);
        phi_ = beta.segment(1, p);
        theta_ = beta.segment(1 + p, q);
        check_invertible();
        std::vector<double> resid;
        sigma2_ = css(w, beta, &resid) / std::max<std::size_t>(resid.size(), 1);
        fitted_ = true;
    }

    /// One-step-ahead forecast given the series (typically the one fit on).
    double forecast_one(const std::vector<double>& series) const {
        if (!fitted_) throw DomainError("arima: not fitted");
        const int p = order_.p, d = order_.d, q = order_.q;
        if (static_cast<int>(series.size()) < p + d + 1)
            throw DomainError("arima: series too short to forecast");
        std::vector<double> w = difference(series, d);
        Eigen::VectorXd beta(1 + p + q);
        beta(0) = c_;
        beta.segment(1, p) = phi_;
        beta.segment(1 + p, q) = theta_;
        std::vector<double> e;
        css(w, beta, &e);

        const int n = static_cast<int>(w.size());
        double wf = c_;
        for (int i = 1; i <= p; ++i) wf += phi_(i - 1) * w[static_cast<std::size_t>(n - i)];
        for (int j = 1; j <= q; ++j) {
            int idx = static_cast<int>(e.size()) - j;
            if (idx >= 0) wf += theta_(j - 1) * e[static_cast<std::size_t>(idx)];
        }
        // undo the differencing
        double forecast = wf;
        for (int level = d; level >= 1; --level) {
            std::vector<double> diffed = difference(series, level - 1);
            forecast += diffed.back();
        }
        return forecast;
    }

    ArimaOrder order() const { return order_; }
    const Eigen::VectorXd& ar_coefficients() const { return phi_; }
    const Eigen::VectorXd& ma_coefficients() const { return theta_; }
    double intercept() const { return c_; }
    double sigma2() const { return sigma2_; }

    void save(std::ostream& os) const {
        os << "arima 1\n" << order_.p << ' ' << order_.d << ' ' << order_.q << '\n';
        serialize::write_scalar(os, c_);
        serialize::write_scalar(os, sigma2_);
        serialize::write_vector(os, phi_);
        serialize::write_vector(os, theta_);
    }

    static Arima load(std::istream& is) {
        serialize::expect_tag(is, "arima", 1);
        Arima m;
        is >> m.order_.p >> m.order_.d >> m.order_.q;
        m.c_ = serialize::read_scalar(is);
        m.sigma2_ = serialize::read_scalar(is);
        m.phi_ = serialize::read_vector(is);
        m.theta_ = serialize::read_vector(is);
        m.fitted_ = true;
        return m;
    }

private:
    ArimaOrder order_;
    Eigen::VectorXd phi_{0}, theta_{0};
    double c_ = 0.0;
    double sigma2_ = 0.0;
    bool fitted_ = false;

    // conditional sum of squares; optionally returns the residual path
    double css(const std::vector<double>& w, const Eigen::VectorXd& beta,
               std::vector<double>* resid_out) const {
        const int p = order_.p, q = order_.q;
        const int n = static_cast<int>(w.size());
        std::vector<double> e(static_cast<std::size_t>(n), 0.0);
        double sse = 0.0;
        for (int t = p; t < n; ++t) {
            double pred = beta(0);
            for (int i = 1; i <= p; ++i) pred += beta(i) * w[static_cast<std::size_t>(t - i)];
            for (int j = 1; j <= q; ++j)
                if (t - j >= p) pred += beta(p + j) * e[static_cast<std::size_t>(t - j)];
            e[static_cast<std::size_t>(t)] = w[static_cast<std::size_t>(t)] - pred;
            sse += e[static_cast<std::size_t>(t)] * e[static_cast<std::size_t>(t)];
        }
        if (resid_out) {
            resid_out->assign(e.begin() + p, e.end());
        }
        return sse;
    }

    void residuals_and_jacobian(const std::vector<double>& w, const Eigen::VectorXd& beta,
                                Eigen::VectorXd& e_out, Eigen::MatrixXd& J_out) const {
        const int p = order_.p, q = order_.q;
        const int n = static_cast<int>(w.size());
        const int k = 1 + p + q;
        std::vector<double> e(static_cast<std::size_t>(n), 0.0);
        // de[t][j]: derivative of e_t wrt beta_j, zero before the recursion start
        Eigen::MatrixXd de = Eigen::MatrixXd::Zero(n, k);
        for (int t = p; t < n; ++t) {
            double pred = beta(0);
            Eigen::VectorXd dpred = Eigen::VectorXd::Zero(k);
            dpred(0) = 1.0;
            for (int i = 1; i <= p; ++i) {
                pred += beta(i) * w[static_cast<std::size_t>(t - i)];
                dpred(i) += w[static_cast<std::size_t>(t - i)];
            }
            for (int j = 1; j <= q; ++j) {
                if (t - j >= p) {
                    pred += beta(p + j) * e[static_cast<std::size_t>(t - j)];
                    dpred(p + j) += e[static_cast<std::size_t>(t - j)];
                    dpred += beta(p + j) * de.row(t - j).transpose();
                }
            }
            e[static_cast<std::size_t>(t)] = w[static_cast<std::size_t>(t)] - pred;
            de.row(t) = -dpred.transpose();
        }
        e_out.resize(n - p);
        for (int t = p; t < n; ++t) e_out(t - p) = e[static_cast<std::size_t>(t)];
        J_out = de.bottomRows(n - p);
    }

    Eigen::VectorXd hannan_rissanen_init(const std::vector<double>& w) const {
        const int p = order_.p, q = order_.q;
        const int n = static_cast<int>(w.size());
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(1 + p + q);

        if (p == 0 && q == 0) {
            double mean = 0.0;
            for (double v : w) mean += v;
            beta(0) = mean / n;
            return beta;
        }

        std::vector<double> ehat(static_cast<std::size_t>(n), 0.0);
        if (q > 0) {
            // long-AR pass to proxy the innovations
            int m = std::min(std::max(10, p + q + 5), n / 3);
            Eigen::MatrixXd X(n - m, m + 1);
            Eigen::VectorXd y(n - m);
            for (int t = m; t < n; ++t) {
                X(t - m, 0) = 1.0;
                for (int i = 1; i <= m; ++i) X(t - m, i) = w[static_cast<std::size_t>(t - i)];
                y(t - m) = w[static_cast<std::size_t>(t)];
            }
            Eigen::VectorXd ar = X.colPivHouseholderQr().solve(y);
            for (int t = m; t < n; ++t)
                ehat[static_cast<std::size_t>(t)] = y(t - m) - X.row(t - m).dot(ar);
        }

        int t0 = std::max(p, q);
        if (n - t0 <= 1 + p + q) return beta;  // too short; start from zeros
        Eigen::MatrixXd X(n - t0, 1 + p + q);
        Eigen::VectorXd y(n - t0);
        for (int t = t0; t < n; ++t) {
            X(t - t0, 0) = 1.0;
            for (int i = 1; i <= p; ++i) X(t - t0, i) = w[static_cast<std::size_t>(t - i)];
            for (int j = 1; j <= q; ++j)
                X(t - t0, p + j) = ehat[static_cast<std::size_t>(t - j)];
            y(t - t0) = w[static_cast<std::size_t>(t)];
        }
        beta = X.colPivHouseholderQr().solve(y);
        // clamp the MA start into the invertible region
        for (int j = 1; j <= q; ++j)
            beta(p + j) = std::clamp(beta(p + j), -0.95, 0.95);
        return beta;
    }

    void check_invertible() const {
        const int q = order_.q;
        if (q == 0) return;
        // roots of 1 + theta_1 z + ... + theta_q z^q must be outside the unit circle
        int deg = q;
        while (deg > 0 && std::abs(theta_(deg - 1)) < 1e-12) --deg;
        if (deg == 0) return;
        // monic form: z^deg + (theta_{deg-1}/theta_deg) z^{deg-1} + ... + 1/theta_deg
        Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
        for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
        for (int i = 0; i < deg; ++i) {
            double a_i = (i == 0 ? 1.0 : theta_(i - 1)) / theta_(deg - 1);
            companion(i, deg - 1) = -a_i;
        }
        Eigen::VectorXcd roots = companion.eigenvalues();
        for (Eigen::Index i = 0; i < roots.size(); ++i) {
            if (std::abs(roots(i)) <= 1.0 + 1e-8) {
                std::string diag = "arima: non-invertible MA fit; theta = [";
                for (int j = 0; j < q; ++j)
                    diag += (j ? ", " : "") + std::to_string(theta_(j));
                diag += "], |root| = " + std::to_string(std::abs(roots(i)));
                throw TrainingError(diag);
            }
        }
    }
};

}  // namespace pricer
