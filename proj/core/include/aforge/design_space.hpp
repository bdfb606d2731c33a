#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace aforge {

enum class Spin { CW, CCW };

inline double spin_sign(Spin s) { return s == Spin::CCW ? 1.0 : -1.0; }

/// Point in [0,1]^15: three 5-tuples (r, theta, phi, alpha, gamma), one per
/// independent motor. Entries are clamped on construction.
class DesignVector {
public:
    static constexpr int kDim = 15;

    DesignVector() { values_.setConstant(0.5); }
    explicit DesignVector(const Eigen::Matrix<double, kDim, 1>& v);

    const Eigen::Matrix<double, kDim, 1>& values() const { return values_; }
    double operator[](int i) const { return values_[i]; }

    /// 5-tuple for motor m in {0,1,2}.
    Eigen::Matrix<double, 5, 1> tuple(int m) const { return values_.segment<5>(5 * m); }

private:
    Eigen::Matrix<double, kDim, 1> values_;
};

/// One motor's pose in decode coordinates: spherical position (r, theta, phi)
/// and tilt Euler angles (alpha, gamma). theta is elevation from the body
/// xy-plane, phi the azimuth from +x.
struct MotorPose {
    double r = 0.0;
    double theta = 0.0;
    double phi = 0.0;
    double alpha = 0.0;
    double gamma = 0.0;
    Spin spin = Spin::CW;

    Eigen::Vector3d position() const;
    /// Body-frame rotation Rz(gamma) * Ry(alpha); thrust force acts along
    /// the rotated +z axis, so alpha = 0 means thrust along body +z.
    Eigen::Matrix3d rotation() const;
};

struct Motor {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
    Spin spin = Spin::CW;

    Eigen::Vector3d thrust_axis() const { return orientation * Eigen::Vector3d::UnitZ(); }
};

struct MotorLayout {
    std::array<Motor, 6> motors;
    double propeller_radius = 0.0375;
    /// Decode-space poses when the layout came from a design vector
    /// (motors 0-2 only are independent); empty for hand-built layouts.
    std::array<MotorPose, 3> source_poses{};
    bool has_source_poses = false;
    /// Provenance carried through export: the originating design vector and
    /// the hash of the bound table it was decoded with. Empty when unknown.
    std::vector<double> provenance_xi;
    std::uint64_t provenance_bounds_hash = 0;

    /// Max deviation from the i <-> i+3 xz-mirror relation (positions and
    /// thrust axes), in meters / axis units.
    double mirror_error() const;
};

/// Per-variable [lo, hi] ranges for the three independent motors. Angles in
/// radians.
struct BoundTable {
    struct MotorBounds {
        std::array<double, 2> r, theta, phi, alpha, gamma;
    };
    std::array<MotorBounds, 3> motor;

    static BoundTable defaults();
    void validate() const; // throws std::invalid_argument on lo > hi

    std::uint64_t hash() const;

    nlohmann::ordered_json to_json() const;
    static BoundTable from_json(const nlohmann::json& j);
};

struct BodyGeometry {
    Eigen::Vector3d cage_dims{0.09, 0.06, 0.09}; // full extents, meters
    double cage_mass = 0.45;
    double arm_linear_density = 0.08; // kg/m
    double motor_prop_mass = 0.035;
    double propeller_radius = 0.0375;

    void validate() const;
};

struct MassProperties {
    double mass = 0.0;
    Eigen::Vector3d center_of_mass = Eigen::Vector3d::Zero();
    Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero(); // about center_of_mass
};

/// Affine decode of a unit-box design vector into a six-motor layout.
/// Motors 3-5 are the xz-plane mirrors of motors 0-2; spin alternates with
/// motor index.
MotorLayout decode(const DesignVector& xi, const BoundTable& bounds,
                   double propeller_radius = 0.0375);

/// Inverse of decode's affine maps; requires a layout carrying source poses.
DesignVector encode(const MotorLayout& layout, const BoundTable& bounds);

/// Named layouts with motors on a horizontal ring at the given arm length.
/// Known names: planar, franchi, shen, rajappa.
MotorLayout baseline_layout(const std::string& name, double arm_length,
                            double propeller_radius = 0.0375);

/// Closest point on the cage surface to an exterior point; arm attachment.
Eigen::Vector3d cage_attachment(const Eigen::Vector3d& motor_pos, const BodyGeometry& geom);

/// Composite mass, center of mass, and inertia: cage cuboid + six point-mass
/// motors + slender-rod arms from the cage surface to each motor.
MassProperties mass_inertia(const MotorLayout& layout, const BodyGeometry& geom);

/// Mean motor-to-cage-surface distance; used to size baseline arms so they
/// match an optimized design's mass distribution.
double average_arm_length(const MotorLayout& layout, const BodyGeometry& geom);

nlohmann::ordered_json layout_to_json(const MotorLayout& layout);
MotorLayout layout_from_json(const nlohmann::json& j);

} // namespace aforge
