#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace aforge {

struct GpPrediction {
    double mean = 0.0;
    double variance = 0.0; // latent variance, noise not included
};

struct GpFitOptions {
    int restarts = 4;
    int iterations = 120; // gradient steps per restart
    double learning_rate = 0.08;
    std::uint64_t seed = 17;
    double min_noise = 1e-6; // floor on the noise variance (standardized)
    double jitter = 1e-8;
};

/// Gaussian process regression with a Matern 5/2 kernel, one lengthscale per
/// input dimension, and a fitted noise term. Targets are standardized
/// internally; predictions are returned on the original scale.
class GaussianProcess {
public:
    using FitOptions = GpFitOptions;

    /// X is n x d, one row per observation.
    void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
             const FitOptions& opts = FitOptions());

    /// As above with known per-point noise standard deviations (same units as
    /// y), added to the fitted homoscedastic noise term.
    void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
             const Eigen::VectorXd& noise_std, const FitOptions& opts);

    bool fitted() const { return fitted_; }
    GpPrediction predict(const Eigen::VectorXd& x) const;
    double log_marginal_likelihood() const { return best_lml_; }

    const Eigen::VectorXd& lengthscales() const { return lengthscales_; }
    double signal_variance() const { return signal_var_; }
    double noise_variance() const { return noise_var_; }

private:
    bool fitted_ = false;
    Eigen::MatrixXd X_;
    Eigen::VectorXd alpha_;       // K^{-1} y (standardized)
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd lengthscales_;
    double signal_var_ = 1.0;
    double noise_var_ = 1e-4;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    double best_lml_ = 0.0;
};

} // namespace aforge
