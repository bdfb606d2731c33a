#include "aforge/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace aforge {

CmaEsResult cmaes_phase(const BoxObjective& objective, const Eigen::VectorXd& start,
                        int budget, Rng rng, const CmaEsOptions& opts) {
    const int n = static_cast<int>(start.size());
    if (n <= 0) throw std::invalid_argument("cmaes: empty start point");
    if ((start.array() < 0.0).any() || (start.array() > 1.0).any())
        throw std::invalid_argument("cmaes: start point outside the unit box");

    CmaEsResult result;
    result.best_xi = start;
    result.best_score = -std::numeric_limits<double>::infinity();
    if (budget <= 0) {
        result.best_score = 0.0;
        return result;
    }

    const int lambda =
        opts.lambda > 0 ? opts.lambda : 4 + static_cast<int>(std::floor(3.0 * std::log(n)));
    const int mu = lambda / 2;
    Eigen::VectorXd weights(mu);
    for (int i = 0; i < mu; ++i)
        weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
    weights /= weights.sum();
    const double mueff = 1.0 / weights.squaredNorm();

    const double cc = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n);
    const double cs = (mueff + 2.0) / (n + mueff + 5.0);
    const double c1 = 2.0 / ((n + 1.3) * (n + 1.3) + mueff);
    const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) /
                                              ((n + 2.0) * (n + 2.0) + mueff));
    const double damps =
        1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (n + 1.0)) - 1.0) + cs;
    const double chi_n = std::sqrt(static_cast<double>(n)) *
                         (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

    Eigen::VectorXd mean = start;
    double sigma = opts.sigma0;
    Eigen::MatrixXd C = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd ps = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd pc = Eigen::VectorXd::Zero(n);

    auto restart = [&]() {
        if (result.best_score > -std::numeric_limits<double>::infinity())
            mean = result.best_xi;
        sigma = opts.sigma0;
        C.setIdentity();
        ps.setZero();
        pc.setZero();
        ++result.restarts;
    };

    int evals = 0;
    int since_improvement = 0;
    int generation = 0;
    bool evaluated_start = false;

    while (evals < budget) {
        if (opts.patience > 0 && since_improvement >= opts.patience) {
            result.stopped_early = true;
            break;
        }
        if (!std::isfinite(sigma) || sigma < opts.min_sigma || !C.allFinite()) restart();

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
        if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0 ||
            !eig.eigenvalues().allFinite()) {
            restart();
            eig.compute(C);
        }
        const Eigen::MatrixXd& B = eig.eigenvectors();
        const Eigen::VectorXd D = eig.eigenvalues().cwiseSqrt();
        const Eigen::MatrixXd BD = B * D.asDiagonal();
        const Eigen::MatrixXd inv_sqrt_C =
            B * D.cwiseInverse().asDiagonal() * B.transpose();

        const int pop = std::min(lambda, budget - evals);
        Eigen::MatrixXd ys(n, pop);
        Eigen::MatrixXd xs(n, pop);
        std::vector<double> scores(pop);
        for (int k = 0; k < pop; ++k) {
            Eigen::VectorXd y(n), x(n);
            bool inside = false;
            for (int attempt = 0; attempt < opts.max_resamples && !inside; ++attempt) {
                for (int i = 0; i < n; ++i) y[i] = rng.normal();
                y = BD * y;
                x = mean + sigma * y;
                inside = (x.array() >= 0.0).all() && (x.array() <= 1.0).all();
            }
            if (!inside) {
                x = x.cwiseMax(0.0).cwiseMin(1.0);
                y = (x - mean) / sigma;
            }
            // The very first sample doubles as the start-point evaluation so
            // the baseline score is always on record.
            if (!evaluated_start) {
                x = start;
                y = Eigen::VectorXd::Zero(n);
                evaluated_start = true;
            }
            const ObjectiveValue val = objective(x);
            ++evals;
            ys.col(k) = y;
            xs.col(k) = x;
            scores[k] = val.score;

            CmaEsRecord rec;
            rec.xi = x;
            rec.score = val.score;
            rec.stderr_ = val.stderr_;
            rec.generation = generation;
            result.history.push_back(rec);
            if (val.score > result.best_score) {
                result.best_score = val.score;
                result.best_xi = x;
                since_improvement = 0;
            } else {
                ++since_improvement;
            }
        }
        ++generation;
        if (pop < lambda) break; // partial final generation; no update possible

        std::vector<int> order(pop);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return scores[a] > scores[b]; });

        Eigen::VectorXd y_w = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < mu; ++i) y_w += weights[i] * ys.col(order[i]);
        mean += sigma * y_w;
        mean = mean.cwiseMax(0.0).cwiseMin(1.0);

        ps = (1.0 - cs) * ps +
             std::sqrt(cs * (2.0 - cs) * mueff) * (inv_sqrt_C * y_w);
        const double hsig_thresh =
            (1.4 + 2.0 / (n + 1.0)) * chi_n *
            std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * (generation + 1)));
        const double hsig = ps.norm() < hsig_thresh ? 1.0 : 0.0;
        pc = (1.0 - cc) * pc + hsig * std::sqrt(cc * (2.0 - cc) * mueff) * y_w;

        Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < mu; ++i) {
            const Eigen::VectorXd& yi = ys.col(order[i]);
            rank_mu += weights[i] * yi * yi.transpose();
        }
        C = (1.0 - c1 - cmu) * C +
            c1 * (pc * pc.transpose() + (1.0 - hsig) * cc * (2.0 - cc) * C) +
            cmu * rank_mu;
        C = 0.5 * (C + C.transpose());

        sigma *= std::exp((cs / damps) * (ps.norm() / chi_n - 1.0));
    }
    return result;
}

} // namespace aforge
