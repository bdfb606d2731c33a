#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aforge/dynamics.hpp"
#include "aforge/rng.hpp"

namespace aforge {

struct TaskSpec {
    enum class Kind { A, B, Custom };

    Kind kind = Kind::A;
    double step_forward = 0.5;
    // Task A: dy ~ U([dy_lo, dy_hi]).
    double dy_lo = -0.25, dy_hi = 0.25;
    // Task B: with probability pr, dy = +-U([yjump_lo, yjump_hi]),
    // dz ~ U([zjump_lo, zjump_hi]); otherwise (0, 0).
    double turn_probability = 0.0;
    double yjump_lo = 0.5, yjump_hi = 0.7;
    double zjump_lo = -0.1, zjump_hi = 0.1;

    double gate_half_width = 0.25;
    double episode_duration = 5.0;
    double miss_penalty_weight = 10.0;

    static TaskSpec task_a();
    static TaskSpec task_b();
    static TaskSpec by_name(const std::string& name); // "A" or "B"
};

/// Scales Pr, dy, dz distribution parameters; factors in [1, 1.25] are the
/// documented sweep, anything else is accepted with a warning on stderr.
TaskSpec perturb_task(const TaskSpec& base, double pr_scale, double dy_scale,
                      double dz_scale);

struct Gate {
    Eigen::Vector3d center = Eigen::Vector3d::Zero(); // world; normal = +x
    double half_width = 0.25;
};

enum class GateEvent { None, Crossed, Missed };

Eigen::Vector3d next_waypoint(const TaskSpec& task, const Eigen::Vector3d& prev, Rng& rng);

/// Classifies one simulation step's segment against a gate plane. The
/// crossing point is linearly interpolated; crossed iff both lateral offsets
/// are within the half width.
GateEvent gate_event(const Eigen::Vector3d& p_prev, const Eigen::Vector3d& p_cur,
                     const Gate& gate);

struct InitialStateRanges {
    double x_lo = -1.0, x_hi = -0.5;
    double yz_lo = -0.5, yz_hi = 0.5;
    double yaw_lo = -0.5235987755982988, yaw_hi = 0.5235987755982988; // +-30 deg
    double v_lo = -0.2, v_hi = 0.2;
    double omega_lo = -0.2, omega_hi = 0.2; // +-11.46 deg/s in rad/s

    RigidBodyState sample(Rng& rng, const Vector6& initial_rotor_speeds) const;
};

struct CrashConfig {
    double distance_box = 10.0;     // meters around the current gate, per axis
    double max_tilt = 2.0943951023931953; // 120 deg between body z and world z
};

struct EpisodeEvent {
    double time = 0.0;
    int gate_index = 0;
    GateEvent type = GateEvent::None;
};

struct EpisodeOutcome {
    int crossed = 0;
    int missed = 0;
    bool crashed = false;
    double duration = 0.0;
    std::vector<EpisodeEvent> events;

    double score(double miss_weight) const { return crossed - miss_weight * missed; }
};

/// Gate sequencing + crossing/crash bookkeeping for one episode. The caller
/// owns the dynamics stepping; this class watches position transitions.
class EpisodeTracker {
public:
    EpisodeTracker(const TaskSpec& task, const CrashConfig& crash, Rng rng);

    const Gate& current_gate() const { return gate_; }
    const Eigen::Vector3d& previous_center() const { return prev_center_; }
    int gate_index() const { return gate_index_; }

    /// Processes one step; advances the gate on a crossed/missed event.
    GateEvent on_transition(const Eigen::Vector3d& p_prev, const Eigen::Vector3d& p_cur,
                            double time);

    /// Crash indicators for the given state, against the current gate.
    bool crash_distance(const RigidBodyState& s) const;
    bool crash_orientation(const RigidBodyState& s) const;

    void mark_crashed() { outcome_.crashed = true; }
    bool crashed() const { return outcome_.crashed; }

    EpisodeOutcome finish(double duration);
    const EpisodeOutcome& outcome() const { return outcome_; }

private:
    TaskSpec task_;
    CrashConfig crash_;
    Rng rng_;
    Gate gate_;
    Eigen::Vector3d prev_center_ = Eigen::Vector3d::Zero();
    int gate_index_ = 0;
    EpisodeOutcome outcome_;
};

/// Motor commands from the raw vehicle state and target gate.
using Controller =
    std::function<Vector6(const RigidBodyState&, const Gate&)>;

struct EpisodeConfig {
    double control_dt = 0.01;
    InitialStateRanges init{};
    CrashConfig crash{};
    bool stop_on_crash = true;
    /// Spawn rotor speeds; defaults to the vehicle's hover solution.
    std::optional<Vector6> initial_rotor_speeds;
};

EpisodeOutcome run_episode(const VehicleModel& model, const Controller& controller,
                           const TaskSpec& task, Rng rng, const EpisodeConfig& cfg = {});

struct TaskScore {
    double mean = 0.0;
    double stderr_ = 0.0;
    double crossed_rate = 0.0; // mean gates crossed per episode
    double missed_rate = 0.0;
    int episodes = 0;
};

/// Mean over episodes of (crossed - miss_weight * missed), with one
/// independent RNG stream per episode so results do not depend on execution
/// order.
TaskScore task_performance(const VehicleModel& model, const Controller& controller,
                           const TaskSpec& task, int n_episodes, std::uint64_t seed,
                           const EpisodeConfig& cfg = {});

} // namespace aforge
