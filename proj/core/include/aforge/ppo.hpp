#pragma once

#include <memory>
#include <vector>

#include "aforge/environment.hpp"
#include "aforge/policy.hpp"

namespace aforge {

/// Adam on a flat parameter vector.
class Adam {
public:
    Adam() = default;
    Adam(int dim, double lr) : lr_(lr), m_(Eigen::VectorXd::Zero(dim)),
                               v_(Eigen::VectorXd::Zero(dim)) {}

    Eigen::VectorXd update(const Eigen::VectorXd& grad);
    double learning_rate() const { return lr_; }
    void set_learning_rate(double lr) { lr_ = lr; }

private:
    double lr_ = 3e-4;
    double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
    int t_ = 0;
    Eigen::VectorXd m_, v_;
};

struct PpoConfig {
    int epochs = 200;          // nominal schedule length (drives the curriculum)
    int num_envs = 64;
    int horizon = 64;          // steps per env per epoch
    int minibatches = 8;
    int update_epochs = 4;
    double clip = 0.2;
    double gamma = 0.99;
    double gae_lambda = 0.95;
    double learning_rate = 3e-4;
    double value_learning_rate = 1e-3;
    double entropy_coef = 0.0;
    double init_log_std = -1.0;        // pre-squash action noise
    double curriculum_fraction = 0.8;  // c ramps 0 -> 1 over this share of epochs
    double control_dt = 0.01;
    double smoothing_weight = 0.0;
    double max_grad_norm = 5.0;
};

struct TrainingCurvePoint {
    int epoch = 0;
    double mean_reward = 0.0;     // per step, averaged over the rollout
    double mean_task_metric = 0.0; // per-episode (crossed - w * missed) in the rollout
};

/// Clipped-surrogate policy-gradient trainer over a bank of synchronized
/// environments. Fully deterministic for a fixed seed and config.
class PpoTrainer {
public:
    PpoTrainer(const VehicleModel& model, const TaskSpec& task, const PpoConfig& cfg,
               std::uint64_t seed);

    void train_epochs(int n);
    int epochs_trained() const { return epoch_; }

    /// Task performance of the current deterministic policy.
    TaskScore evaluate(int episodes, std::uint64_t eval_seed) const;

    const Policy& policy() const { return policy_; }
    const std::vector<TrainingCurvePoint>& curve() const { return curve_; }
    const PpoConfig& config() const { return cfg_; }

    /// Controller closure for a policy (deterministic, mean action).
    static Controller make_controller(const Policy& policy);

private:
    void run_epoch();

    VehicleModel model_;
    TaskSpec task_;
    PpoConfig cfg_;
    Rng rng_;
    Policy policy_;
    Mlp value_;
    Vector6 log_std_;
    Adam policy_opt_;
    Adam value_opt_;
    Adam log_std_opt_;
    std::vector<Environment> envs_;
    std::vector<Observation> obs_;
    int epoch_ = 0;
    std::uint64_t episode_counter_ = 0;
    std::vector<TrainingCurvePoint> curve_;
};

struct TrainResult {
    Policy policy;
    std::vector<TrainingCurvePoint> curve;
};

TrainResult train(const VehicleModel& model, const TaskSpec& task, const PpoConfig& cfg,
                  std::uint64_t seed);

} // namespace aforge
