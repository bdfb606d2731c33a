#include "aforge/bo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aforge {

namespace {

int nth_prime(int n) {
    // Small and rarely called; trial division is plenty.
    int count = 0;
    for (int p = 2;; ++p) {
        bool prime = true;
        for (int q = 2; q * q <= p; ++q)
            if (p % q == 0) {
                prime = false;
                break;
            }
        if (prime && ++count == n + 1) return p;
    }
}

double radical_inverse(int index, int base) {
    double result = 0.0;
    double f = 1.0 / base;
    int i = index + 1; // skip the all-zero point
    while (i > 0) {
        result += f * (i % base);
        i /= base;
        f /= base;
    }
    return result;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

double expected_improvement(double mean, double var, double best) {
    const double s = std::sqrt(std::max(var, 0.0));
    if (s < 1e-12) return std::max(mean - best, 0.0);
    const double z = (mean - best) / s;
    return s * (z * normal_cdf(z) + normal_pdf(z));
}

} // namespace

Eigen::VectorXd halton_point(int index, int dim, const Eigen::VectorXd& shift) {
    Eigen::VectorXd x(dim);
    for (int k = 0; k < dim; ++k) {
        double v = radical_inverse(index, nth_prime(k)) + shift[k];
        x[k] = v - std::floor(v);
    }
    return x;
}

BoResult bo_phase(const BoxObjective& objective, int dim, int budget, Rng rng,
                  const BoOptions& opts) {
    BoResult result;
    if (budget <= 0) return result;
    if (dim <= 0) throw std::invalid_argument("bo: dimension must be positive");

    Rng shift_rng = rng.derive(1);
    Eigen::VectorXd shift(dim);
    for (int k = 0; k < dim; ++k) shift[k] = shift_rng.uniform();
    int halton_index = 0;

    Rng cand_rng = rng.derive(2);
    int since_improvement = 0;

    auto record = [&](const Eigen::VectorXd& xi, bool quasi, bool failed) {
        const ObjectiveValue val = objective(xi);
        BoRecord rec;
        rec.xi = xi;
        rec.score = val.score;
        rec.stderr_ = val.stderr_;
        rec.quasi_random = quasi;
        rec.surrogate_failed = failed;
        result.history.push_back(rec);
        if (!result.best_xi || val.score > result.best_score) {
            result.best_xi = xi;
            result.best_score = val.score;
            since_improvement = 0;
        } else {
            ++since_improvement;
        }
    };

    const int init = std::min(opts.init_points, budget);
    for (int i = 0; i < init; ++i)
        record(halton_point(halton_index++, dim, shift), true, false);

    GaussianProcess gp;
    while (static_cast<int>(result.history.size()) < budget) {
        if (opts.patience > 0 && since_improvement >= opts.patience) {
            result.stopped_early = true;
            break;
        }

        const int n = static_cast<int>(result.history.size());
        Eigen::VectorXd proposal;
        bool surrogate_failed = false;
        try {
            Eigen::MatrixXd X(n, dim);
            Eigen::VectorXd y(n), noise(n);
            for (int i = 0; i < n; ++i) {
                X.row(i) = result.history[i].xi.transpose();
                y[i] = result.history[i].score;
                noise[i] = result.history[i].stderr_;
            }
            GaussianProcess::FitOptions fit = opts.fit;
            if (opts.refit_interval > 1 && n % opts.refit_interval != 0) {
                fit.restarts = 1;
                fit.iterations = std::min(fit.iterations, 20);
            }
            gp.fit(X, y, noise, fit);

            // Incumbent value for improvement: best posterior mean over the
            // observed points, which discounts lucky noisy scores.
            double best_mean = -std::numeric_limits<double>::infinity();
            int best_row = 0;
            for (int i = 0; i < n; ++i) {
                const double m = gp.predict(X.row(i).transpose()).mean;
                if (m > best_mean) {
                    best_mean = m;
                    best_row = i;
                }
            }
            const Eigen::VectorXd incumbent = X.row(best_row).transpose();

            double best_ei = -1.0;
            double best_var = -1.0;
            Eigen::VectorXd best_by_var;
            const int total = opts.candidate_pool + opts.local_candidates;
            for (int c = 0; c < total; ++c) {
                Eigen::VectorXd x(dim);
                if (c < opts.candidate_pool) {
                    for (int k = 0; k < dim; ++k) x[k] = cand_rng.uniform();
                } else {
                    for (int k = 0; k < dim; ++k)
                        x[k] = std::clamp(
                            incumbent[k] + opts.local_sigma * cand_rng.normal(), 0.0, 1.0);
                }
                const GpPrediction p = gp.predict(x);
                const double ei = expected_improvement(p.mean, p.variance, best_mean);
                if (ei > best_ei) {
                    best_ei = ei;
                    proposal = x;
                }
                if (p.variance > best_var) {
                    best_var = p.variance;
                    best_by_var = x;
                }
            }
            // Degenerate posterior (all scores equal): explore by variance.
            if (best_ei < 1e-14 && best_by_var.size() == dim) proposal = best_by_var;
        } catch (const std::exception&) {
            surrogate_failed = true;
        }

        if (surrogate_failed || proposal.size() != dim) {
            proposal = halton_point(halton_index++, dim, shift);
            record(proposal, true, surrogate_failed);
        } else {
            record(proposal, false, false);
        }
    }
    return result;
}

} // namespace aforge
