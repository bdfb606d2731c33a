#pragma once

#include <optional>
#include <vector>

#include "aforge/bo.hpp"

namespace aforge {

struct CmaEsOptions {
    int lambda = 0;            // population size; 0 picks 4 + floor(3 ln d)
    double sigma0 = 0.1;       // initial step size in unit-box coordinates
    int patience = 100;        // consecutive non-improving evaluations before stop
    int max_resamples = 50;    // per sample before clamping to the box
    double min_sigma = 1e-12;  // below this the covariance is considered degenerate
};

struct CmaEsRecord {
    Eigen::VectorXd xi;
    double score = 0.0;
    double stderr_ = 0.0;
    int generation = 0;
};

struct CmaEsResult {
    std::vector<CmaEsRecord> history;
    Eigen::VectorXd best_xi;
    double best_score = 0.0;
    bool stopped_early = false;
    int restarts = 0; // covariance re-initializations
};

/// Local refinement of a box-constrained objective (higher is better) with a
/// standard rank-mu evolution strategy started at `start`. Samples outside
/// the box are redrawn, then clamped. With budget 0 the start point is
/// returned unevaluated.
CmaEsResult cmaes_phase(const BoxObjective& objective, const Eigen::VectorXd& start,
                        int budget, Rng rng, const CmaEsOptions& opts = {});

} // namespace aforge
