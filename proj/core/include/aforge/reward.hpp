#pragma once

#include <Eigen/Dense>

#include "aforge/dynamics.hpp"
#include "aforge/tasks.hpp"

namespace aforge {

/// Policy observation: relative position to the target waypoint (world),
/// the first two rotation-matrix columns, world linear velocity, and body
/// angular velocity.
struct Observation {
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    Eigen::Matrix<double, 6, 1> r6d = Eigen::Matrix<double, 6, 1>::Zero();
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    Eigen::Vector3d omega = Eigen::Vector3d::Zero();

    Eigen::Matrix<double, 15, 1> to_vector() const;
};

Observation observe(const RigidBodyState& state, const Gate& gate);

/// Rebuilds the full rotation matrix from the 6D representation by
/// Gram-Schmidt on the two columns.
Eigen::Matrix3d rotation_from_r6d(const Eigen::Matrix<double, 6, 1>& r6d);

struct RewardWeights {
    double path_deviation = 2.0;
    double no_improvement = 2.0;
    double no_improvement_slack = 0.5;
    double angvel = 2.0;
    double angvel_threshold = 10.0; // rad/s
    double orientation_z = 2.0;
    double orientation_z_threshold = 1.5707963267948966; // pi/2
    double orientation_y = 0.01;
    double crash = 100.0;
    double task_gain = 10.0;
    double miss_weight = 10.0;
    double smoothing_weight = 0.0; // disabled unless set
};

struct RewardBreakdown {
    double pos = 0.0;
    double path_deviation = 0.0;
    double no_improvement = 0.0;
    double angvel = 0.0;
    double orientation = 0.0;
    double crash = 0.0;
    double instantaneous_task_performance = 0.0;
    double smoothing = 0.0;
    double total = 0.0;
};

/// Corridor deviation factor in [0, 1]: 0 inside the swept-gate corridor,
/// 1 outside the bounding cuboid of the two gates, clamped interpolation in
/// between. The along-track coordinate is clamped to the inter-gate span.
double path_deviation_factor(const Eigen::Vector3d& p, const Eigen::Vector3d& s_prev,
                             const Eigen::Vector3d& s, double gate_half_width);

struct RewardInputs {
    Eigen::Vector3d p_prev;   // vehicle position at t-1
    Eigen::Vector3d p_cur;    // vehicle position at t
    Eigen::Vector3d s;        // current target gate center
    Eigen::Vector3d s_prev;   // previous gate center
    double gate_half_width = 0.25;
    double d_best = 0.0;      // min distance to s observed up to and including t
    Eigen::Vector3d omega = Eigen::Vector3d::Zero();       // body rad/s
    Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
    bool crash_dist = false;
    bool crash_orient = false;
    bool gate_crossed = false;
    bool gate_missed = false;
    double curriculum = 0.0;  // c in [0, 1]
    Vector6 action = Vector6::Zero();
    Vector6 action_prev = Vector6::Zero();
    bool has_action_prev = false;
};

RewardBreakdown reward(const RewardInputs& in, const RewardWeights& w = {});

/// -weight * |a_t - a_{t-1}|^2.
double smoothing_penalty(const Vector6& action, const Vector6& action_prev, double weight);

/// Unsigned angle between the rotated axis and the corresponding world axis.
double axis_angle_y(const Eigen::Quaterniond& q);
double axis_angle_z(const Eigen::Quaterniond& q);

} // namespace aforge
