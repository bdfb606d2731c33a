#pragma once

#include <optional>

#include "aforge/reward.hpp"
#include "aforge/tasks.hpp"

namespace aforge {

/// Gym-style wrapper: dynamics stepping, gate tracking, observation and
/// reward computation for one vehicle. Instances are independent; run as
/// many in parallel as you like.
class Environment {
public:
    Environment(VehicleModel model, TaskSpec task, EpisodeConfig cfg,
                RewardWeights weights);

    void set_curriculum(double c) { curriculum_ = std::clamp(c, 0.0, 1.0); }
    double curriculum() const { return curriculum_; }

    Observation reset(Rng rng);

    struct StepResult {
        Observation obs;
        RewardBreakdown reward;
        bool done = false;
        GateEvent event = GateEvent::None;
    };
    /// Applies a motor command (rev/s, clamped by the dynamics).
    StepResult step(const Vector6& command);

    const RigidBodyState& state() const { return state_; }
    const EpisodeOutcome& outcome() const { return tracker_->outcome(); }
    const Gate& current_gate() const { return tracker_->current_gate(); }
    double time() const { return time_; }

    const VehicleModel& model() const { return model_; }
    const TaskSpec& task() const { return task_; }

private:
    VehicleModel model_;
    TaskSpec task_;
    EpisodeConfig cfg_;
    RewardWeights weights_;
    Vector6 hover_speeds_;

    std::optional<EpisodeTracker> tracker_;
    RigidBodyState state_;
    double time_ = 0.0;
    double curriculum_ = 0.0;
    double d_best_ = 0.0;
    Vector6 prev_action_ = Vector6::Zero();
    bool has_prev_action_ = false;
    bool done_ = true;
};

} // namespace aforge
