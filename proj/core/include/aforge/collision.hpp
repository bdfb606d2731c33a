#pragma once

#include <vector>

#include <Eigen/Dense>

#include "aforge/design_space.hpp"

namespace aforge {

/// Convex exclusion volume: a propeller airflow cylinder or the electronics
/// cage cuboid.
struct CollisionBody {
    enum class Kind { Cylinder, Cuboid };

    Kind kind = Kind::Cylinder;
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    Eigen::Matrix3d orientation = Eigen::Matrix3d::Identity(); // columns are body axes
    double radius = 0.0;      // cylinder
    double length = 0.0;      // cylinder, full length along local z
    Eigen::Vector3d half_extents = Eigen::Vector3d::Zero(); // cuboid

    /// Airflow volume of one motor: length 4*r_p, radius r_p + 1 mm,
    /// centered at and oriented as the motor.
    static CollisionBody airflow(const Motor& motor, double propeller_radius);
    static CollisionBody cage(const BodyGeometry& geom);
    static CollisionBody cylinder(const Eigen::Vector3d& center,
                                  const Eigen::Vector3d& axis, double radius,
                                  double length);
    static CollisionBody cuboid(const Eigen::Vector3d& center,
                                const Eigen::Vector3d& half_extents);

    void validate() const; // throws on degenerate (zero radius/extent) bodies

    /// Support function h(d) = max over body points of p . d.
    double support(const Eigen::Vector3d& d) const;

    /// Radius of a bounding sphere around center.
    double bounding_radius() const;
};

/// Translation needed along unit direction d to separate b from a; negative
/// when the projections already have a gap along d.
double directional_overlap(const CollisionBody& a, const CollisionBody& b,
                           const Eigen::Vector3d& d);

struct DepthOptions {
    int coarse_directions = 512;
    int refine_rounds = 64;
};

/// Signed separation measure: the minimum over all directions of the
/// translation needed to separate the bodies. Positive = penetration depth,
/// negative = (minus) the width of the widest separating gap found.
double signed_separation(const CollisionBody& a, const CollisionBody& b,
                         const DepthOptions& opts = {});

/// Minimum translation distance separating two overlapping bodies; exactly 0
/// when they are disjoint.
double penetration_depth(const CollisionBody& a, const CollisionBody& b,
                         const DepthOptions& opts = {});

/// Six airflow cylinders plus the cage cuboid.
std::vector<CollisionBody> build_collision_set(const MotorLayout& layout,
                                               const BodyGeometry& geom);

/// Largest pairwise penetration over the collision set.
double max_penetration(const std::vector<CollisionBody>& bodies,
                       const DepthOptions& opts = {});

} // namespace aforge
