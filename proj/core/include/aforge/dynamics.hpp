#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "aforge/design_space.hpp"

namespace aforge {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

constexpr double kGravity = 9.81;

struct SecondOrderParams {
    double natural_frequency = 60.0; // rad/s
    double damping = 0.8;
    double rate_limit = 4000.0;      // rev/s^2
};

struct RotorModel {
    enum class Order { First, Second };

    double thrust_coeff = 1.2e-5;  // N / (rev/s)^2
    double torque_coeff = 1.5e-7;  // N*m / (rev/s)^2
    double time_constant = 0.05;   // s
    double rps_min = 83.0;
    double rps_max = 400.0;
    Order order = Order::First;
    SecondOrderParams second{};

    void validate() const;
};

struct RigidBodyState {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();        // world, m
    Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity(); // body->world
    Eigen::Vector3d linear_velocity = Eigen::Vector3d::Zero(); // world, m/s
    Eigen::Vector3d angular_velocity = Eigen::Vector3d::Zero(); // body, rad/s
    Vector6 rotor_speeds = Vector6::Zero();                    // rev/s
    Vector6 rotor_rates = Vector6::Zero();                     // rev/s^2 (second-order model)

    bool finite() const;
};

/// 6x6 map from squared rotor speeds (rev^2/s^2) to body wrench [force; torque],
/// torques about the composite center of mass.
struct WrenchMap {
    Matrix6 matrix = Matrix6::Zero();

    Vector6 wrench(const Vector6& squared_speeds) const { return matrix * squared_speeds; }
};

WrenchMap wrench_map(const MotorLayout& layout, const MassProperties& mass_props,
                     const RotorModel& rotor);

enum class Integrator { SemiImplicitEuler, RungeKutta4 };

struct VehicleModel {
    WrenchMap map;
    MassProperties mass_props;
    RotorModel rotor;
    Integrator integrator = Integrator::SemiImplicitEuler;
    double gravity = kGravity;
};

VehicleModel make_vehicle_model(const MotorLayout& layout, const BodyGeometry& geom,
                                const RotorModel& rotor,
                                Integrator integrator = Integrator::SemiImplicitEuler);

/// One simulation step. Commands are clamped to [rps_min, rps_max];
/// dt must lie in (0, 0.02].
RigidBodyState step(const RigidBodyState& state, const Vector6& commands, double dt,
                    const VehicleModel& model);

struct HoverResult {
    bool feasible = false;
    std::optional<Vector6> hover_speeds; // rev/s
};

/// Checks for in-bound rotor speeds that exactly cancel gravity with zero
/// torque (hover attitude, body z aligned with world z).
HoverResult hover_feasible(const WrenchMap& map, double mass, const RotorModel& rotor);

struct EnvelopeOptions {
    bool include_gravity = false;
};

/// Per-direction maximum linear acceleration subject to zero net torque and
/// rotor speed bounds. Directions must be unit vectors; infeasible directions
/// report 0.
std::vector<double> accel_envelope(const WrenchMap& map, const MassProperties& mass_props,
                                   const RotorModel& rotor,
                                   const std::vector<Eigen::Vector3d>& directions,
                                   const EnvelopeOptions& opts = {});

/// Least-squares fit of the second-order motor parameters from a logged step
/// response (commanded constant, measured rps at fixed dt).
SecondOrderParams fit_second_order(double command, double initial_rps,
                                   const std::vector<double>& measured_rps, double dt);

} // namespace aforge
