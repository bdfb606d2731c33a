#include "aforge/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "aforge/rng.hpp"

namespace aforge {

namespace {

constexpr double kSqrt5 = 2.2360679774997896;

double matern52(double r2, double signal_var) {
    const double r = std::sqrt(std::max(r2, 0.0));
    return signal_var * (1.0 + kSqrt5 * r + (5.0 / 3.0) * r2) * std::exp(-kSqrt5 * r);
}

struct Hyper {
    Eigen::VectorXd log_ls;
    double log_sv = 0.0;
    double log_nv = std::log(1e-2);
};

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const Hyper& h,
                              const Eigen::VectorXd& noise_var, double jitter) {
    const int n = static_cast<int>(X.rows());
    const Eigen::VectorXd inv_ls2 = (-2.0 * h.log_ls).array().exp();
    const double sv = std::exp(h.log_sv);
    const double nv = std::exp(h.log_nv);
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i) {
        K(i, i) = sv + nv + noise_var[i] + jitter;
        for (int j = 0; j < i; ++j) {
            const Eigen::VectorXd d = X.row(i) - X.row(j);
            const double r2 = d.array().square().matrix().dot(inv_ls2);
            K(i, j) = K(j, i) = matern52(r2, sv);
        }
    }
    return K;
}

/// Log marginal likelihood and its gradient in (log_ls..., log_sv, log_nv).
double lml_and_grad(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Hyper& h,
                    const Eigen::VectorXd& noise_var, double jitter, Eigen::VectorXd& grad) {
    const int n = static_cast<int>(X.rows());
    const int d = static_cast<int>(X.cols());
    const Eigen::MatrixXd K = kernel_matrix(X, h, noise_var, jitter);
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success) {
        grad = Eigen::VectorXd::Zero(d + 2);
        return -std::numeric_limits<double>::infinity();
    }
    const Eigen::VectorXd alpha = llt.solve(y);
    double lml = -0.5 * y.dot(alpha) - 0.5 * n * std::log(2.0 * M_PI);
    const Eigen::MatrixXd& L = llt.matrixLLT();
    for (int i = 0; i < n; ++i) lml -= std::log(L(i, i));

    // W = alpha alpha^T - K^{-1}; d(lml)/dtheta = 0.5 tr(W dK/dtheta)
    Eigen::MatrixXd W = alpha * alpha.transpose();
    W -= llt.solve(Eigen::MatrixXd::Identity(n, n));

    grad = Eigen::VectorXd::Zero(d + 2);
    const Eigen::VectorXd inv_ls2 = (-2.0 * h.log_ls).array().exp();
    const double sv = std::exp(h.log_sv);
    const double nv = std::exp(h.log_nv);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double w = W(i, j);
            if (i == j) {
                grad[d] += 0.5 * w * sv;      // dK_ii/dlog_sv = sv
                grad[d + 1] += 0.5 * w * nv;  // dK_ii/dlog_nv = nv
                continue;
            }
            const Eigen::VectorXd diff = X.row(i) - X.row(j);
            const Eigen::VectorXd sq = diff.array().square();
            const double r2 = sq.dot(inv_ls2);
            const double r = std::sqrt(std::max(r2, 0.0));
            const double e = std::exp(-kSqrt5 * r);
            // dk/dlog_ls_k = sv * (5/3)(1 + sqrt5 r) e^{-sqrt5 r} * sq_k/ls_k^2
            const double common = sv * (5.0 / 3.0) * (1.0 + kSqrt5 * r) * e;
            for (int k = 0; k < d; ++k)
                grad[k] += 0.5 * w * common * sq[k] * inv_ls2[k];
            grad[d] += 0.5 * w * matern52(r2, sv); // dk/dlog_sv = k
        }
    }
    return lml;
}

} // namespace

void GaussianProcess::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const FitOptions& opts) {
    fit(X, y, Eigen::VectorXd::Zero(y.size()), opts);
}

void GaussianProcess::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& noise_std, const FitOptions& opts) {
    const int n = static_cast<int>(X.rows());
    const int d = static_cast<int>(X.cols());
    if (n < 2) throw std::invalid_argument("gp: need at least two observations");
    if (y.size() != n) throw std::invalid_argument("gp: X and y size mismatch");
    if (noise_std.size() != n) throw std::invalid_argument("gp: noise_std size mismatch");

    y_mean_ = y.mean();
    y_scale_ = std::sqrt((y.array() - y_mean_).square().sum() / n);
    if (y_scale_ < 1e-12) y_scale_ = 1.0;
    const Eigen::VectorXd ys = (y.array() - y_mean_) / y_scale_;
    const Eigen::VectorXd noise_var =
        (noise_std.array() / y_scale_).square(); // standardized variances

    const double log_min_nv = std::log(opts.min_noise);
    Rng rng(opts.seed);
    Hyper best;
    double best_lml = -std::numeric_limits<double>::infinity();
    bool any = false;

    for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
        Hyper h;
        h.log_ls = Eigen::VectorXd::Constant(d, std::log(0.3));
        h.log_sv = 0.0;
        h.log_nv = std::log(1e-2);
        if (restart > 0) {
            for (int k = 0; k < d; ++k) h.log_ls[k] = rng.uniform(std::log(0.05), std::log(2.0));
            h.log_sv = rng.uniform(std::log(0.2), std::log(5.0));
            h.log_nv = rng.uniform(std::log(1e-4), std::log(0.5));
        }

        // Adam ascent on the log marginal likelihood.
        Eigen::VectorXd m = Eigen::VectorXd::Zero(d + 2);
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d + 2);
        double lml = -std::numeric_limits<double>::infinity();
        for (int it = 1; it <= opts.iterations; ++it) {
            Eigen::VectorXd g;
            lml = lml_and_grad(X, ys, h, noise_var, opts.jitter, g);
            if (!std::isfinite(lml)) break;
            if (!g.allFinite()) break;
            m = 0.9 * m + 0.1 * g;
            v = 0.999 * v + 0.001 * g.cwiseProduct(g);
            const double bc1 = 1.0 - std::pow(0.9, it);
            const double bc2 = 1.0 - std::pow(0.999, it);
            const Eigen::VectorXd step =
                opts.learning_rate *
                (m / bc1).cwiseQuotient(((v / bc2).cwiseSqrt().array() + 1e-8).matrix());
            for (int k = 0; k < d; ++k)
                h.log_ls[k] = std::clamp(h.log_ls[k] + step[k], std::log(1e-3), std::log(1e3));
            h.log_sv = std::clamp(h.log_sv + step[d], std::log(1e-6), std::log(1e3));
            h.log_nv = std::clamp(h.log_nv + step[d + 1], log_min_nv, std::log(10.0));
        }
        if (std::isfinite(lml) && lml > best_lml) {
            best_lml = lml;
            best = h;
            any = true;
        }
    }
    if (!any) {
        // Fall back to a wide prior-ish kernel; still usable for prediction.
        best.log_ls = Eigen::VectorXd::Constant(d, std::log(0.5));
        best.log_sv = 0.0;
        best.log_nv = std::log(0.1);
        Eigen::VectorXd g;
        best_lml = lml_and_grad(X, ys, best, noise_var, opts.jitter, g);
        if (!std::isfinite(best_lml)) throw std::runtime_error("gp: fit failed");
    }

    X_ = X;
    lengthscales_ = best.log_ls.array().exp();
    signal_var_ = std::exp(best.log_sv);
    noise_var_ = std::exp(best.log_nv);
    const Eigen::MatrixXd K = kernel_matrix(X, best, noise_var, opts.jitter);
    llt_.compute(K);
    if (llt_.info() != Eigen::Success) throw std::runtime_error("gp: final factorization failed");
    alpha_ = llt_.solve(ys);
    best_lml_ = best_lml;
    fitted_ = true;
}

GpPrediction GaussianProcess::predict(const Eigen::VectorXd& x) const {
    if (!fitted_) throw std::logic_error("gp: predict before fit");
    const int n = static_cast<int>(X_.rows());
    const Eigen::VectorXd inv_ls2 = lengthscales_.array().square().inverse();
    Eigen::VectorXd k(n);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd d = X_.row(i).transpose() - x;
        k[i] = matern52(d.array().square().matrix().dot(inv_ls2), signal_var_);
    }
    GpPrediction out;
    out.mean = y_mean_ + y_scale_ * k.dot(alpha_);
    const Eigen::VectorXd w = llt_.solve(k);
    const double var = signal_var_ - k.dot(w);
    out.variance = y_scale_ * y_scale_ * std::max(var, 0.0);
    return out;
}

} // namespace aforge
