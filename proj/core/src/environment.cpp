#include "aforge/environment.hpp"

#include <stdexcept>

namespace aforge {

Environment::Environment(VehicleModel model, TaskSpec task, EpisodeConfig cfg,
                         RewardWeights weights)
    : model_(std::move(model)), task_(std::move(task)), cfg_(std::move(cfg)),
      weights_(std::move(weights)) {
    if (cfg_.initial_rotor_speeds) {
        hover_speeds_ = *cfg_.initial_rotor_speeds;
    } else {
        hover_speeds_ = Vector6::Constant(model_.rotor.rps_min);
        const HoverResult hr =
            hover_feasible(model_.map, model_.mass_props.mass, model_.rotor);
        if (hr.hover_speeds) hover_speeds_ = *hr.hover_speeds;
    }
    weights_.miss_weight = task_.miss_penalty_weight;
}

Observation Environment::reset(Rng rng) {
    tracker_.emplace(task_, cfg_.crash, rng.derive(2));
    Rng init_rng = rng.derive(1);
    state_ = cfg_.init.sample(init_rng, hover_speeds_);
    time_ = 0.0;
    d_best_ = (state_.position - tracker_->current_gate().center).norm();
    has_prev_action_ = false;
    done_ = false;
    return observe(state_, tracker_->current_gate());
}

Environment::StepResult Environment::step(const Vector6& command) {
    if (done_) throw std::logic_error("step() on a finished episode; call reset()");
    StepResult result;

    RewardInputs in;
    in.p_prev = state_.position;
    in.s = tracker_->current_gate().center;
    in.s_prev = tracker_->previous_center();
    in.gate_half_width = task_.gate_half_width;
    in.curriculum = curriculum_;
    in.action = command;
    in.action_prev = prev_action_;
    in.has_action_prev = has_prev_action_;

    bool step_failed = false;
    RigidBodyState next = state_;
    if (!command.allFinite()) {
        step_failed = true;
    } else {
        try {
            next = aforge::step(state_, command, cfg_.control_dt, model_);
        } catch (const std::exception&) {
            step_failed = true;
        }
    }

    time_ += cfg_.control_dt;
    result.event = step_failed
                       ? GateEvent::None
                       : tracker_->on_transition(state_.position, next.position, time_);
    state_ = next;

    in.p_cur = state_.position;
    in.omega = state_.angular_velocity;
    in.orientation = state_.orientation;
    in.gate_crossed = result.event == GateEvent::Crossed;
    in.gate_missed = result.event == GateEvent::Missed;

    // d_best is tracked against the gate targeted during this step; it
    // starts over when the target advances.
    d_best_ = std::min(d_best_, (state_.position - in.s).norm());
    in.d_best = d_best_;
    if (result.event != GateEvent::None)
        d_best_ = (state_.position - tracker_->current_gate().center).norm();

    in.crash_dist = step_failed || tracker_->crash_distance(state_);
    in.crash_orient = !step_failed && tracker_->crash_orientation(state_);
    if (in.crash_dist || in.crash_orient) tracker_->mark_crashed();

    result.reward = reward(in, weights_);
    prev_action_ = command;
    has_prev_action_ = true;

    done_ = tracker_->crashed() || time_ >= task_.episode_duration - 0.5 * cfg_.control_dt;
    if (done_) tracker_->finish(time_);
    result.done = done_;
    result.obs = observe(state_, tracker_->current_gate());
    return result;
}

} // namespace aforge
