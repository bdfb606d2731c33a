#include "aforge/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "aforge/lp.hpp"

namespace aforge {

namespace {

Eigen::Quaterniond quat_derivative(const Eigen::Quaterniond& q, const Eigen::Vector3d& omega_body) {
    const Eigen::Quaterniond w(0.0, omega_body.x(), omega_body.y(), omega_body.z());
    Eigen::Quaterniond dq = q * w;
    dq.coeffs() *= 0.5;
    return dq;
}

struct BodyDerivative {
    Eigen::Vector3d dp;
    Eigen::Vector3d dv;
    Eigen::Quaterniond dq;
    Eigen::Vector3d domega;
};

BodyDerivative body_derivative(const RigidBodyState& s, const Vector6& squared_speeds,
                               const VehicleModel& model) {
    const Vector6 wrench = model.map.wrench(squared_speeds);
    const Eigen::Matrix3d R = s.orientation.toRotationMatrix();
    const Eigen::Vector3d force_world = R * wrench.head<3>();
    const Eigen::Vector3d torque_body = wrench.tail<3>();
    const Eigen::Matrix3d& I = model.mass_props.inertia;
    BodyDerivative d;
    d.dp = s.linear_velocity;
    d.dv = force_world / model.mass_props.mass + Eigen::Vector3d(0, 0, -model.gravity);
    d.dq = quat_derivative(s.orientation, s.angular_velocity);
    d.domega = I.ldlt().solve(torque_body - s.angular_velocity.cross(I * s.angular_velocity));
    return d;
}

Vector6 clamp_rps(const Vector6& v, const RotorModel& rotor) {
    return v.cwiseMax(rotor.rps_min).cwiseMin(rotor.rps_max);
}

/// First-order rotor speed at time t after the step start (exact solution).
Vector6 rotor_first_order_at(const Vector6& w0, const Vector6& cmd, double t, double tau) {
    const double decay = std::exp(-t / tau);
    return cmd + (w0 - cmd) * decay;
}

} // namespace

void RotorModel::validate() const {
    if (thrust_coeff < 0.0 || torque_coeff < 0.0 || time_constant <= 0.0)
        throw std::invalid_argument("rotor model coefficients must be non-negative");
    if (!(rps_min >= 0.0) || !(rps_max > rps_min))
        throw std::invalid_argument("rotor model rps bounds invalid");
}

bool RigidBodyState::finite() const {
    return position.allFinite() && linear_velocity.allFinite() &&
           angular_velocity.allFinite() && rotor_speeds.allFinite() &&
           rotor_rates.allFinite() && orientation.coeffs().allFinite();
}

WrenchMap wrench_map(const MotorLayout& layout, const MassProperties& mass_props,
                     const RotorModel& rotor) {
    rotor.validate();
    WrenchMap map;
    for (int i = 0; i < 6; ++i) {
        const Motor& m = layout.motors[i];
        const Eigen::Vector3d a = m.thrust_axis();
        const Eigen::Vector3d arm = m.position - mass_props.center_of_mass;
        map.matrix.block<3, 1>(0, i) = rotor.thrust_coeff * a;
        map.matrix.block<3, 1>(3, i) =
            rotor.thrust_coeff * arm.cross(a) + spin_sign(m.spin) * rotor.torque_coeff * a;
    }
    return map;
}

VehicleModel make_vehicle_model(const MotorLayout& layout, const BodyGeometry& geom,
                                const RotorModel& rotor, Integrator integrator) {
    VehicleModel model;
    model.mass_props = mass_inertia(layout, geom);
    model.rotor = rotor;
    model.map = wrench_map(layout, model.mass_props, rotor);
    model.integrator = integrator;
    return model;
}

RigidBodyState step(const RigidBodyState& state, const Vector6& commands, double dt,
                    const VehicleModel& model) {
    if (!(dt > 0.0 && dt <= 0.02)) throw std::invalid_argument("dt must be in (0, 0.02]");
    if (!state.finite()) throw std::invalid_argument("non-finite state");

    const RotorModel& rotor = model.rotor;
    const Vector6 cmd = clamp_rps(commands, rotor);

    RigidBodyState next = state;

    // Rotor dynamics.
    if (rotor.order == RotorModel::Order::First) {
        next.rotor_speeds = clamp_rps(
            rotor_first_order_at(state.rotor_speeds, cmd, dt, rotor.time_constant), rotor);
        next.rotor_rates.setZero();
    } else {
        const auto& p = rotor.second;
        for (int i = 0; i < 6; ++i) {
            const double accel = p.natural_frequency * p.natural_frequency *
                                     (cmd[i] - state.rotor_speeds[i]) -
                                 2.0 * p.damping * p.natural_frequency * state.rotor_rates[i];
            double rate = state.rotor_rates[i] + dt * accel;
            rate = std::clamp(rate, -p.rate_limit, p.rate_limit);
            next.rotor_rates[i] = rate;
            next.rotor_speeds[i] = std::clamp(state.rotor_speeds[i] + dt * rate,
                                              rotor.rps_min, rotor.rps_max);
        }
    }

    if (model.integrator == Integrator::SemiImplicitEuler) {
        const Vector6 u = state.rotor_speeds.cwiseProduct(state.rotor_speeds);
        const BodyDerivative d = body_derivative(state, u, model);
        next.linear_velocity = state.linear_velocity + dt * d.dv;
        next.position = state.position + dt * next.linear_velocity;
        next.angular_velocity = state.angular_velocity + dt * d.domega;
        Eigen::Quaterniond dq = quat_derivative(state.orientation, next.angular_velocity);
        next.orientation.coeffs() = state.orientation.coeffs() + dt * dq.coeffs();
        next.orientation.normalize();
    } else {
        // RK4; rotor speeds follow their exact first-order trajectory during
        // the step (second-order model holds the start-of-step speed).
        auto speeds_at = [&](double t) -> Vector6 {
            if (rotor.order == RotorModel::Order::First)
                return clamp_rps(rotor_first_order_at(state.rotor_speeds, cmd, t,
                                                      rotor.time_constant),
                                 rotor);
            return state.rotor_speeds;
        };
        auto eval = [&](const RigidBodyState& s, double t) {
            const Vector6 w = speeds_at(t);
            return body_derivative(s, w.cwiseProduct(w), model);
        };
        auto advance = [&](const RigidBodyState& s, const BodyDerivative& d, double h) {
            RigidBodyState r = s;
            r.position = state.position + h * d.dp;
            r.linear_velocity = state.linear_velocity + h * d.dv;
            r.orientation.coeffs() = state.orientation.coeffs() + h * d.dq.coeffs();
            r.orientation.normalize();
            r.angular_velocity = state.angular_velocity + h * d.domega;
            return r;
        };
        const BodyDerivative k1 = eval(state, 0.0);
        const BodyDerivative k2 = eval(advance(state, k1, 0.5 * dt), 0.5 * dt);
        const BodyDerivative k3 = eval(advance(state, k2, 0.5 * dt), 0.5 * dt);
        const BodyDerivative k4 = eval(advance(state, k3, dt), dt);
        auto blend = [&](auto get) -> Eigen::Vector3d {
            return (get(k1) + 2.0 * get(k2) + 2.0 * get(k3) + get(k4)) / 6.0;
        };
        next.position = state.position + dt * blend([](const BodyDerivative& d) { return d.dp; });
        next.linear_velocity =
            state.linear_velocity + dt * blend([](const BodyDerivative& d) { return d.dv; });
        next.angular_velocity =
            state.angular_velocity + dt * blend([](const BodyDerivative& d) { return d.domega; });
        const Eigen::Vector4d dq =
            (k1.dq.coeffs() + 2.0 * k2.dq.coeffs() + 2.0 * k3.dq.coeffs() + k4.dq.coeffs()) / 6.0;
        next.orientation.coeffs() = state.orientation.coeffs() + dt * dq;
        next.orientation.normalize();
    }

    if (!next.finite()) throw std::runtime_error("simulation produced non-finite state");
    return next;
}

namespace {

/// Orthonormal nullspace basis of the torque rows (3x6).
Eigen::MatrixXd torque_nullspace(const Matrix6& map) {
    const Eigen::Matrix<double, 3, 6> T = map.bottomRows<3>();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(T, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double tol = 1e-12 * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > tol) ++rank;
    return svd.matrixV().rightCols(6 - rank);
}

} // namespace

HoverResult hover_feasible(const WrenchMap& map, double mass, const RotorModel& rotor) {
    rotor.validate();
    HoverResult result;
    Vector6 target;
    target << 0, 0, mass * kGravity, 0, 0, 0;

    const double lo = rotor.rps_min * rotor.rps_min;
    const double hi = rotor.rps_max * rotor.rps_max;

    // Minimum-norm particular solution, then alternating projections between
    // the affine set {Mu = w} and the box.
    Eigen::CompleteOrthogonalDecomposition<Matrix6> cod(map.matrix);
    Vector6 u = cod.solve(target);
    for (int it = 0; it < 500; ++it) {
        u = u.cwiseMax(lo).cwiseMin(hi);
        u -= cod.solve((map.matrix * u - target).eval());
    }
    u = u.cwiseMax(lo).cwiseMin(hi);

    const double scale = std::max(1.0, target.norm());
    if ((map.matrix * u - target).norm() < 1e-6 * scale) {
        result.feasible = true;
        result.hover_speeds = u.cwiseSqrt();
    }
    return result;
}

std::vector<double> accel_envelope(const WrenchMap& map, const MassProperties& mass_props,
                                   const RotorModel& rotor,
                                   const std::vector<Eigen::Vector3d>& directions,
                                   const EnvelopeOptions& opts) {
    rotor.validate();
    const Eigen::MatrixXd N = torque_nullspace(map.matrix);
    const Eigen::Matrix<double, 3, 6> F = map.matrix.topRows<3>();
    const Eigen::VectorXd lb =
        Eigen::VectorXd::Constant(6, rotor.rps_min * rotor.rps_min);
    const Eigen::VectorXd ub =
        Eigen::VectorXd::Constant(6, rotor.rps_max * rotor.rps_max);

    std::vector<double> out;
    out.reserve(directions.size());
    for (const Eigen::Vector3d& dir : directions) {
        double accel = 0.0;
        if (N.cols() > 0) {
            const Eigen::VectorXd c = N.transpose() * F.transpose() * dir;
            const auto z = lp_box_vertex(c, N, lb, ub);
            if (z) {
                const Eigen::VectorXd u = N * (*z);
                accel = dir.dot(F * u) / mass_props.mass;
            }
        }
        if (opts.include_gravity) accel -= kGravity * dir.z();
        out.push_back(accel);
    }
    return out;
}

SecondOrderParams fit_second_order(double command, double initial_rps,
                                   const std::vector<double>& measured_rps, double dt) {
    if (measured_rps.size() < 4) throw std::invalid_argument("need at least 4 samples");

    auto simulate_sse = [&](double wn, double zeta, double rate_limit) {
        double w = initial_rps;
        double rate = 0.0;
        double sse = 0.0;
        for (double target : measured_rps) {
            const double accel = wn * wn * (command - w) - 2.0 * zeta * wn * rate;
            rate = std::clamp(rate + dt * accel, -rate_limit, rate_limit);
            w += dt * rate;
            const double e = w - target;
            sse += e * e;
        }
        return sse;
    };

    // Rate limit from the steepest observed slope, then a coarse-to-fine grid
    // over (wn, zeta).
    double max_slope = 0.0;
    for (std::size_t i = 1; i < measured_rps.size(); ++i)
        max_slope = std::max(max_slope, std::abs(measured_rps[i] - measured_rps[i - 1]) / dt);
    const double rate_limit = std::max(1.0, 1.05 * max_slope);

    double best_wn = 10.0, best_zeta = 0.7;
    double best = std::numeric_limits<double>::infinity();
    double wn_lo = 1.0, wn_hi = 400.0, z_lo = 0.1, z_hi = 2.0;
    for (int level = 0; level < 4; ++level) {
        for (int i = 0; i <= 20; ++i) {
            for (int j = 0; j <= 20; ++j) {
                const double wn = wn_lo + (wn_hi - wn_lo) * i / 20.0;
                const double zeta = z_lo + (z_hi - z_lo) * j / 20.0;
                const double sse = simulate_sse(wn, zeta, rate_limit);
                if (sse < best) {
                    best = sse;
                    best_wn = wn;
                    best_zeta = zeta;
                }
            }
        }
        const double wn_span = (wn_hi - wn_lo) / 10.0;
        const double z_span = (z_hi - z_lo) / 10.0;
        wn_lo = std::max(1.0, best_wn - wn_span);
        wn_hi = best_wn + wn_span;
        z_lo = std::max(0.01, best_zeta - z_span);
        z_hi = best_zeta + z_span;
    }

    SecondOrderParams p;
    p.natural_frequency = best_wn;
    p.damping = best_zeta;
    p.rate_limit = rate_limit;
    return p;
}

} // namespace aforge
