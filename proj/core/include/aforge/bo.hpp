#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "aforge/gp.hpp"
#include "aforge/rng.hpp"

namespace aforge {

struct ObjectiveValue {
    double score = 0.0;
    double stderr_ = 0.0; // standard error of the score estimate, 0 if exact
};

/// Objective over the unit box [0,1]^d; higher is better.
using BoxObjective = std::function<ObjectiveValue(const Eigen::VectorXd&)>;

/// Halton sequence point (index starts at 0), optionally rotated by a random
/// per-dimension shift so different seeds give different space-filling sets.
Eigen::VectorXd halton_point(int index, int dim, const Eigen::VectorXd& shift);

struct BoOptions {
    int init_points = 32;      // low-discrepancy warm-up batch
    int patience = 100;        // consecutive non-improving evaluations before stop
    int candidate_pool = 2048; // global acquisition candidates per iteration
    int local_candidates = 512;
    double local_sigma = 0.05; // spread of around-incumbent candidates
    int refit_interval = 5;    // evaluations between hyperparameter refits
    GaussianProcess::FitOptions fit{2, 60, 0.08, 17, 1e-6, 1e-8};
};

struct BoRecord {
    Eigen::VectorXd xi;
    double score = 0.0;
    double stderr_ = 0.0;
    bool quasi_random = false; // true for warm-up points and surrogate fallbacks
    bool surrogate_failed = false;
};

struct BoResult {
    std::vector<BoRecord> history;
    std::optional<Eigen::VectorXd> best_xi;
    double best_score = 0.0;
    bool stopped_early = false; // patience triggered before the budget ran out
};

BoResult bo_phase(const BoxObjective& objective, int dim, int budget, Rng rng,
                  const BoOptions& opts = {});

} // namespace aforge
