#include "aforge/tasks.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace aforge {

TaskSpec TaskSpec::task_a() {
    TaskSpec t;
    t.kind = Kind::A;
    t.step_forward = 0.5;
    t.dy_lo = -0.25;
    t.dy_hi = 0.25;
    return t;
}

TaskSpec TaskSpec::task_b() {
    TaskSpec t;
    t.kind = Kind::B;
    t.step_forward = 0.25;
    t.turn_probability = 0.05;
    t.yjump_lo = 0.5;
    t.yjump_hi = 0.7;
    t.zjump_lo = -0.1;
    t.zjump_hi = 0.1;
    return t;
}

TaskSpec TaskSpec::by_name(const std::string& name) {
    if (name == "A" || name == "a") return task_a();
    if (name == "B" || name == "b") return task_b();
    throw std::invalid_argument("unknown task: " + name);
}

TaskSpec perturb_task(const TaskSpec& base, double pr_scale, double dy_scale,
                      double dz_scale) {
    for (double s : {pr_scale, dy_scale, dz_scale}) {
        if (s < 1.0 || s > 1.25)
            std::cerr << "perturb_task: scale " << s
                      << " is outside the documented [1.0, 1.25] sweep\n";
    }
    TaskSpec t = base;
    t.turn_probability = base.turn_probability * pr_scale;
    t.dy_lo = base.dy_lo * dy_scale;
    t.dy_hi = base.dy_hi * dy_scale;
    t.yjump_lo = base.yjump_lo * dy_scale;
    t.yjump_hi = base.yjump_hi * dy_scale;
    t.zjump_lo = base.zjump_lo * dz_scale;
    t.zjump_hi = base.zjump_hi * dz_scale;
    return t;
}

Eigen::Vector3d next_waypoint(const TaskSpec& task, const Eigen::Vector3d& prev, Rng& rng) {
    Eigen::Vector3d delta(task.step_forward, 0.0, 0.0);
    if (task.kind == TaskSpec::Kind::A) {
        delta.y() = rng.uniform(task.dy_lo, task.dy_hi);
    } else {
        if (rng.uniform() < task.turn_probability) {
            const double mag = rng.uniform(task.yjump_lo, task.yjump_hi);
            delta.y() = rng.uniform() < 0.5 ? -mag : mag;
            delta.z() = rng.uniform(task.zjump_lo, task.zjump_hi);
        }
    }
    return prev + delta;
}

GateEvent gate_event(const Eigen::Vector3d& p_prev, const Eigen::Vector3d& p_cur,
                     const Gate& gate) {
    const double s0 = p_prev.x() - gate.center.x();
    const double s1 = p_cur.x() - gate.center.x();
    // Gates face +x (waypoints always advance forward); only forward
    // traversals count, so re-crossing backwards is not an event.
    const bool traversed = s0 < 0.0 && s1 >= 0.0;
    if (!traversed) return GateEvent::None;
    const double f = s0 / (s0 - s1); // s0 != s1 by the traversal condition
    const Eigen::Vector3d hit = p_prev + f * (p_cur - p_prev);
    const bool inside = std::abs(hit.y() - gate.center.y()) <= gate.half_width &&
                        std::abs(hit.z() - gate.center.z()) <= gate.half_width;
    return inside ? GateEvent::Crossed : GateEvent::Missed;
}

RigidBodyState InitialStateRanges::sample(Rng& rng, const Vector6& initial_rotor_speeds) const {
    RigidBodyState s;
    s.position = Eigen::Vector3d(rng.uniform(x_lo, x_hi), rng.uniform(yz_lo, yz_hi),
                                 rng.uniform(yz_lo, yz_hi));
    const double yaw = rng.uniform(yaw_lo, yaw_hi);
    s.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()));
    for (int i = 0; i < 3; ++i) {
        s.linear_velocity[i] = rng.uniform(v_lo, v_hi);
        s.angular_velocity[i] = rng.uniform(omega_lo, omega_hi);
    }
    s.rotor_speeds = initial_rotor_speeds;
    return s;
}

EpisodeTracker::EpisodeTracker(const TaskSpec& task, const CrashConfig& crash, Rng rng)
    : task_(task), crash_(crash), rng_(rng) {
    // First gate follows the task's own increment rule, applied to the origin.
    gate_.center = next_waypoint(task_, Eigen::Vector3d::Zero(), rng_);
    gate_.half_width = task_.gate_half_width;
    prev_center_ = Eigen::Vector3d::Zero();
}

GateEvent EpisodeTracker::on_transition(const Eigen::Vector3d& p_prev,
                                        const Eigen::Vector3d& p_cur, double time) {
    const GateEvent ev = gate_event(p_prev, p_cur, gate_);
    if (ev == GateEvent::None) return ev;
    if (ev == GateEvent::Crossed)
        ++outcome_.crossed;
    else
        ++outcome_.missed;
    outcome_.events.push_back({time, gate_index_, ev});
    prev_center_ = gate_.center;
    gate_.center = next_waypoint(task_, gate_.center, rng_);
    ++gate_index_;
    return ev;
}

bool EpisodeTracker::crash_distance(const RigidBodyState& s) const {
    return ((s.position - gate_.center).cwiseAbs().maxCoeff() > crash_.distance_box);
}

bool EpisodeTracker::crash_orientation(const RigidBodyState& s) const {
    const Eigen::Vector3d body_z = s.orientation * Eigen::Vector3d::UnitZ();
    const double cos_tilt = std::clamp(body_z.z(), -1.0, 1.0);
    return std::acos(cos_tilt) > crash_.max_tilt;
}

EpisodeOutcome EpisodeTracker::finish(double duration) {
    outcome_.duration = duration;
    return outcome_;
}

EpisodeOutcome run_episode(const VehicleModel& model, const Controller& controller,
                           const TaskSpec& task, Rng rng, const EpisodeConfig& cfg) {
    Rng init_rng = rng.derive(1);
    Rng gate_rng = rng.derive(2);

    EpisodeTracker tracker(task, cfg.crash, gate_rng);

    Vector6 hover;
    if (cfg.initial_rotor_speeds) {
        hover = *cfg.initial_rotor_speeds;
    } else {
        hover = Vector6::Constant(model.rotor.rps_min);
        const HoverResult hr = hover_feasible(model.map, model.mass_props.mass, model.rotor);
        if (hr.hover_speeds) hover = *hr.hover_speeds;
    }
    RigidBodyState state = cfg.init.sample(init_rng, hover);

    const int steps = static_cast<int>(std::round(task.episode_duration / cfg.control_dt));
    double t = 0.0;
    for (int k = 0; k < steps; ++k) {
        Vector6 cmd;
        try {
            cmd = controller(state, tracker.current_gate());
        } catch (const std::exception&) {
            tracker.mark_crashed();
            break;
        }
        if (!cmd.allFinite()) {
            tracker.mark_crashed();
            break;
        }
        RigidBodyState next;
        try {
            next = step(state, cmd, cfg.control_dt, model);
        } catch (const std::exception&) {
            tracker.mark_crashed();
            break;
        }
        t += cfg.control_dt;
        tracker.on_transition(state.position, next.position, t);
        state = next;
        if (tracker.crash_distance(state) || tracker.crash_orientation(state)) {
            tracker.mark_crashed();
            if (cfg.stop_on_crash) break;
        }
    }
    return tracker.finish(t);
}

TaskScore task_performance(const VehicleModel& model, const Controller& controller,
                           const TaskSpec& task, int n_episodes, std::uint64_t seed,
                           const EpisodeConfig& cfg) {
    if (n_episodes < 1) throw std::invalid_argument("n_episodes must be >= 1");
    TaskScore score;
    score.episodes = n_episodes;
    double sum = 0.0, sumsq = 0.0, crossed = 0.0, missed = 0.0;
    Rng base(seed);
    EpisodeConfig ep_cfg = cfg;
    if (!ep_cfg.initial_rotor_speeds) {
        Vector6 hover = Vector6::Constant(model.rotor.rps_min);
        const HoverResult hr = hover_feasible(model.map, model.mass_props.mass, model.rotor);
        if (hr.hover_speeds) hover = *hr.hover_speeds;
        ep_cfg.initial_rotor_speeds = hover;
    }
    for (int e = 0; e < n_episodes; ++e) {
        const EpisodeOutcome out = run_episode(model, controller, task, base.derive(e), ep_cfg);
        const double s = out.score(task.miss_penalty_weight);
        sum += s;
        sumsq += s * s;
        crossed += out.crossed;
        missed += out.missed;
    }
    score.mean = sum / n_episodes;
    score.crossed_rate = crossed / n_episodes;
    score.missed_rate = missed / n_episodes;
    if (n_episodes > 1) {
        const double var = std::max(0.0, (sumsq - sum * sum / n_episodes) / (n_episodes - 1));
        score.stderr_ = std::sqrt(var / n_episodes);
    }
    return score;
}

} // namespace aforge
