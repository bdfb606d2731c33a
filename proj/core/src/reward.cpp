#include "aforge/reward.hpp"

#include <cmath>

namespace aforge {

Eigen::Matrix<double, 15, 1> Observation::to_vector() const {
    Eigen::Matrix<double, 15, 1> v15;
    v15 << p, r6d, v, omega;
    return v15;
}

Observation observe(const RigidBodyState& state, const Gate& gate) {
    Observation o;
    o.p = gate.center - state.position;
    const Eigen::Matrix3d R = state.orientation.toRotationMatrix();
    o.r6d << R.col(0), R.col(1);
    o.v = state.linear_velocity;
    o.omega = state.angular_velocity;
    return o;
}

Eigen::Matrix3d rotation_from_r6d(const Eigen::Matrix<double, 6, 1>& r6d) {
    const Eigen::Vector3d a = r6d.head<3>().normalized();
    Eigen::Vector3d b = r6d.tail<3>();
    b = (b - a.dot(b) * a).normalized();
    Eigen::Matrix3d R;
    R.col(0) = a;
    R.col(1) = b;
    R.col(2) = a.cross(b);
    return R;
}

double path_deviation_factor(const Eigen::Vector3d& p, const Eigen::Vector3d& s_prev,
                             const Eigen::Vector3d& s, double hw) {
    const double span = s.x() - s_prev.x();
    const double f = span > 1e-12 ? std::clamp((p.x() - s_prev.x()) / span, 0.0, 1.0) : 0.0;
    const Eigen::Vector3d center = s_prev + f * (s - s_prev);

    const double dy = std::max(0.0, std::abs(p.y() - center.y()) - hw);
    const double dz = std::max(0.0, std::abs(p.z() - center.z()) - hw);
    if (dy == 0.0 && dz == 0.0) return 0.0; // inside the swept corridor

    // Outside the bounding cuboid of both gates.
    const double y_lo = std::min(s_prev.y(), s.y()) - hw;
    const double y_hi = std::max(s_prev.y(), s.y()) + hw;
    const double z_lo = std::min(s_prev.z(), s.z()) - hw;
    const double z_hi = std::max(s_prev.z(), s.z()) + hw;
    if (p.y() < y_lo || p.y() > y_hi || p.z() < z_lo || p.z() > z_hi) return 1.0;

    const double remaining = s.x() - p.x();
    if (remaining <= 1e-9) return 1.0;
    return std::clamp(2.0 * std::max(dy, dz) / remaining, 0.0, 1.0);
}

double smoothing_penalty(const Vector6& action, const Vector6& action_prev, double weight) {
    return -weight * (action - action_prev).squaredNorm();
}

double axis_angle_y(const Eigen::Quaterniond& q) {
    const Eigen::Vector3d body_y = q * Eigen::Vector3d::UnitY();
    return std::acos(std::clamp(body_y.y(), -1.0, 1.0));
}

double axis_angle_z(const Eigen::Quaterniond& q) {
    const Eigen::Vector3d body_z = q * Eigen::Vector3d::UnitZ();
    return std::acos(std::clamp(body_z.z(), -1.0, 1.0));
}

RewardBreakdown reward(const RewardInputs& in, const RewardWeights& w) {
    RewardBreakdown out;
    const double c = std::clamp(in.curriculum, 0.0, 1.0);
    const double fade = 1.0 - c;

    const double dist_prev = (in.p_prev - in.s).norm();
    const double dist_cur = (in.p_cur - in.s).norm();
    out.pos = (dist_prev - dist_cur) * fade;

    const double p_path =
        path_deviation_factor(in.p_cur, in.s_prev, in.s, in.gate_half_width);
    out.path_deviation = -w.path_deviation * std::abs(out.pos) * p_path * fade;

    out.no_improvement =
        -w.no_improvement * std::max((dist_cur - in.d_best) - w.no_improvement_slack, 0.0);

    out.angvel = -w.angvel * std::max(in.omega.norm() - w.angvel_threshold, 0.0);

    const double az = axis_angle_z(in.orientation);
    const double ay = axis_angle_y(in.orientation);
    out.orientation = -w.orientation_z * std::max(az - w.orientation_z_threshold, 0.0) -
                      w.orientation_y * ay;

    out.crash = -w.crash * ((in.crash_dist ? 1.0 : 0.0) + (in.crash_orient ? 1.0 : 0.0)) * c;

    out.instantaneous_task_performance =
        w.task_gain * (-w.miss_weight * (in.gate_missed ? 1.0 : 0.0) +
                       (in.gate_crossed ? 1.0 : 0.0));

    if (w.smoothing_weight > 0.0 && in.has_action_prev)
        out.smoothing = smoothing_penalty(in.action, in.action_prev, w.smoothing_weight);

    out.total = out.pos + out.path_deviation + out.no_improvement + out.angvel +
                out.orientation + out.crash + out.instantaneous_task_performance +
                out.smoothing;
    return out;
}

} // namespace aforge
