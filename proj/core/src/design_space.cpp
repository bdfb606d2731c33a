#include "aforge/design_space.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace aforge {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg(double d) { return d * kPi / 180.0; }

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

double affine(double u, const std::array<double, 2>& range) {
    return range[0] + u * (range[1] - range[0]);
}

double affine_inv(double v, const std::array<double, 2>& range) {
    const double w = range[1] - range[0];
    if (w == 0.0) return 0.5;
    return (v - range[0]) / w;
}

Spin spin_for_index(int i) { return (i % 2 == 0) ? Spin::CCW : Spin::CW; }

Eigen::Matrix3d mirror_xz() {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(1, 1) = -1.0;
    return m;
}

} // namespace

DesignVector::DesignVector(const Eigen::Matrix<double, kDim, 1>& v) {
    for (int i = 0; i < kDim; ++i) values_[i] = clamp01(v[i]);
}

Eigen::Vector3d MotorPose::position() const {
    const double ct = std::cos(theta);
    return r * Eigen::Vector3d(ct * std::cos(phi), ct * std::sin(phi), std::sin(theta));
}

Eigen::Matrix3d MotorPose::rotation() const {
    return (Eigen::AngleAxisd(gamma, Eigen::Vector3d::UnitZ()) *
            Eigen::AngleAxisd(alpha, Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
}

double MotorLayout::mirror_error() const {
    const Eigen::Matrix3d m = mirror_xz();
    double err = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Motor& a = motors[i];
        const Motor& b = motors[i + 3];
        err = std::max(err, (a.position - m * b.position).norm());
        err = std::max(err, (a.thrust_axis() - m * b.thrust_axis()).norm());
    }
    return err;
}

BoundTable BoundTable::defaults() {
    BoundTable t;
    for (int m = 0; m < 3; ++m) {
        auto& b = t.motor[m];
        b.r = {0.09, 0.25};
        b.theta = {-kPi / 3.0, kPi / 3.0};
        b.phi = {m * kPi / 3.0, (m + 1) * kPi / 3.0};
        b.alpha = {0.0, kPi / 2.0};
        b.gamma = {0.0, 2.0 * kPi};
    }
    return t;
}

void BoundTable::validate() const {
    for (const auto& b : motor) {
        for (const auto* range : {&b.r, &b.theta, &b.phi, &b.alpha, &b.gamma}) {
            if (!((*range)[0] <= (*range)[1]) || !std::isfinite((*range)[0]) ||
                !std::isfinite((*range)[1])) {
                throw std::invalid_argument("bound table range with min > max or non-finite");
            }
        }
        if (b.r[0] <= 0.0) throw std::invalid_argument("bound table: r lower bound must be > 0");
    }
}

std::uint64_t BoundTable::hash() const {
    std::uint64_t h = 1469598103934665603ULL; // FNV-1a
    auto feed = [&h](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        for (const char* p = buf; *p; ++p) {
            h ^= static_cast<unsigned char>(*p);
            h *= 1099511628211ULL;
        }
    };
    for (const auto& b : motor) {
        for (const auto* range : {&b.r, &b.theta, &b.phi, &b.alpha, &b.gamma}) {
            feed((*range)[0]);
            feed((*range)[1]);
        }
    }
    return h;
}

nlohmann::ordered_json BoundTable::to_json() const {
    nlohmann::ordered_json j;
    for (int m = 0; m < 3; ++m) {
        nlohmann::ordered_json jm;
        const auto& b = motor[m];
        jm["r"] = b.r;
        jm["theta"] = b.theta;
        jm["phi"] = b.phi;
        jm["alpha"] = b.alpha;
        jm["gamma"] = b.gamma;
        j["motor" + std::to_string(m + 1)] = jm;
    }
    return j;
}

BoundTable BoundTable::from_json(const nlohmann::json& j) {
    BoundTable t = defaults();
    for (int m = 0; m < 3; ++m) {
        const std::string key = "motor" + std::to_string(m + 1);
        if (!j.contains(key)) throw std::invalid_argument("bound table missing " + key);
        const auto& jm = j.at(key);
        auto& b = t.motor[m];
        auto get = [&jm](const char* name, std::array<double, 2>& out) {
            if (!jm.contains(name))
                throw std::invalid_argument(std::string("bound table missing field ") + name);
            out[0] = jm.at(name).at(0).get<double>();
            out[1] = jm.at(name).at(1).get<double>();
        };
        get("r", b.r);
        get("theta", b.theta);
        get("phi", b.phi);
        get("alpha", b.alpha);
        get("gamma", b.gamma);
    }
    t.validate();
    return t;
}

void BodyGeometry::validate() const {
    if (cage_dims.minCoeff() <= 0.0 || cage_mass <= 0.0 || arm_linear_density <= 0.0 ||
        motor_prop_mass <= 0.0 || propeller_radius <= 0.0) {
        throw std::invalid_argument("body geometry fields must be strictly positive");
    }
}

MotorLayout decode(const DesignVector& xi, const BoundTable& bounds, double propeller_radius) {
    bounds.validate();
    MotorLayout layout;
    layout.propeller_radius = propeller_radius;
    const Eigen::Matrix3d m = mirror_xz();
    for (int i = 0; i < 3; ++i) {
        const auto t = xi.tuple(i);
        const auto& b = bounds.motor[i];
        MotorPose pose;
        pose.r = affine(t[0], b.r);
        pose.theta = affine(t[1], b.theta);
        pose.phi = affine(t[2], b.phi);
        pose.alpha = affine(t[3], b.alpha);
        pose.gamma = affine(t[4], b.gamma);
        pose.spin = spin_for_index(i);
        layout.source_poses[i] = pose;

        Motor& motor = layout.motors[i];
        motor.position = pose.position();
        motor.orientation = Eigen::Quaterniond(pose.rotation());
        motor.spin = spin_for_index(i);

        Motor& mirrored = layout.motors[i + 3];
        mirrored.position = m * motor.position;
        mirrored.orientation =
            Eigen::Quaterniond(m * motor.orientation.toRotationMatrix() * m);
        mirrored.spin = spin_for_index(i + 3);
    }
    layout.has_source_poses = true;
    layout.provenance_xi.assign(xi.values().data(), xi.values().data() + DesignVector::kDim);
    layout.provenance_bounds_hash = bounds.hash();
    return layout;
}

DesignVector encode(const MotorLayout& layout, const BoundTable& bounds) {
    if (!layout.has_source_poses)
        throw std::invalid_argument("encode requires a layout produced by decode");
    Eigen::Matrix<double, DesignVector::kDim, 1> v;
    for (int i = 0; i < 3; ++i) {
        const MotorPose& p = layout.source_poses[i];
        const auto& b = bounds.motor[i];
        v[5 * i + 0] = affine_inv(p.r, b.r);
        v[5 * i + 1] = affine_inv(p.theta, b.theta);
        v[5 * i + 2] = affine_inv(p.phi, b.phi);
        v[5 * i + 3] = affine_inv(p.alpha, b.alpha);
        v[5 * i + 4] = affine_inv(p.gamma, b.gamma);
    }
    return DesignVector(v);
}

MotorLayout baseline_layout(const std::string& name, double arm_length,
                            double propeller_radius) {
    if (arm_length <= 0.0) throw std::invalid_argument("arm_length must be > 0");

    // Motors are ordered so that index i+3 is the xz-mirror of index i:
    // arm azimuths 30/90/150 pair with 330/270/210. Each design below is
    // exactly mirror-symmetric under that pairing.
    static const double kPhi[6] = {30, 90, 150, 330, 270, 210};
    double alpha[6];
    double gamma[6];
    if (name == "planar") {
        for (int i = 0; i < 6; ++i) { alpha[i] = 0; gamma[i] = 180; }
    } else if (name == "franchi") {
        const double g[6] = {240, 60, 0, 300, 120, 180};
        for (int i = 0; i < 6; ++i) { alpha[i] = 42; gamma[i] = g[i]; }
    } else if (name == "shen") {
        const double g[6] = {240, 180, 120, 300, 0, 60};
        for (int i = 0; i < 6; ++i) { alpha[i] = 45; gamma[i] = g[i]; }
    } else if (name == "rajappa") {
        const double g[6] = {67, 307, 187, 113, 233, 353};
        for (int i = 0; i < 6; ++i) { alpha[i] = 17; gamma[i] = g[i]; }
    } else {
        throw std::invalid_argument("unknown baseline design: " + name);
    }

    MotorLayout layout;
    layout.propeller_radius = propeller_radius;
    for (int i = 0; i < 6; ++i) {
        MotorPose pose;
        pose.r = arm_length;
        pose.theta = 0.0;
        pose.phi = deg(kPhi[i]);
        pose.alpha = deg(alpha[i]);
        pose.gamma = deg(gamma[i]);
        Motor& motor = layout.motors[i];
        motor.position = pose.position();
        motor.orientation = Eigen::Quaterniond(pose.rotation());
        motor.spin = spin_for_index(i);
    }
    return layout;
}

Eigen::Vector3d cage_attachment(const Eigen::Vector3d& motor_pos, const BodyGeometry& geom) {
    const Eigen::Vector3d h = 0.5 * geom.cage_dims;
    Eigen::Vector3d q = motor_pos.cwiseMax(-h).cwiseMin(h);
    if ((q - motor_pos).norm() > 0.0) return q; // exterior point: clamp is the projection
    // Interior point: push to the nearest face.
    int axis = 0;
    double best = h[0] - std::abs(motor_pos[0]);
    for (int k = 1; k < 3; ++k) {
        const double gap = h[k] - std::abs(motor_pos[k]);
        if (gap < best) { best = gap; axis = k; }
    }
    q[axis] = motor_pos[axis] >= 0.0 ? h[axis] : -h[axis];
    return q;
}

namespace {

bool inside_cage(const Eigen::Vector3d& p, const BodyGeometry& geom) {
    const Eigen::Vector3d h = 0.5 * geom.cage_dims;
    return std::abs(p.x()) < h.x() && std::abs(p.y()) < h.y() && std::abs(p.z()) < h.z();
}

Eigen::Matrix3d point_mass_inertia(double m, const Eigen::Vector3d& r) {
    return m * (r.squaredNorm() * Eigen::Matrix3d::Identity() - r * r.transpose());
}

} // namespace

MassProperties mass_inertia(const MotorLayout& layout, const BodyGeometry& geom) {
    geom.validate();

    struct Component {
        double mass;
        Eigen::Vector3d center;
        Eigen::Matrix3d local_inertia;
    };
    std::vector<Component> parts;
    parts.reserve(13);

    // Cage cuboid, uniform density, centered at the body origin.
    {
        const Eigen::Vector3d d = geom.cage_dims;
        Eigen::Matrix3d ic = Eigen::Matrix3d::Zero();
        ic(0, 0) = geom.cage_mass / 12.0 * (d.y() * d.y() + d.z() * d.z());
        ic(1, 1) = geom.cage_mass / 12.0 * (d.x() * d.x() + d.z() * d.z());
        ic(2, 2) = geom.cage_mass / 12.0 * (d.x() * d.x() + d.y() * d.y());
        parts.push_back({geom.cage_mass, Eigen::Vector3d::Zero(), ic});
    }

    for (const Motor& motor : layout.motors) {
        if (!motor.position.allFinite())
            throw std::domain_error("motor position is not finite");
        if (inside_cage(motor.position, geom))
            throw std::domain_error("motor lies inside the electronics cage");

        parts.push_back({geom.motor_prop_mass, motor.position, Eigen::Matrix3d::Zero()});

        const Eigen::Vector3d attach = cage_attachment(motor.position, geom);
        const Eigen::Vector3d span = motor.position - attach;
        const double len = span.norm();
        if (len > 1e-12) {
            const double m = geom.arm_linear_density * len;
            const Eigen::Vector3d d = span / len;
            const Eigen::Matrix3d rod =
                m * len * len / 12.0 *
                (Eigen::Matrix3d::Identity() - d * d.transpose());
            parts.push_back({m, attach + 0.5 * span, rod});
        }
    }

    MassProperties props;
    for (const auto& c : parts) {
        props.mass += c.mass;
        props.center_of_mass += c.mass * c.center;
    }
    props.center_of_mass /= props.mass;
    for (const auto& c : parts) {
        props.inertia += c.local_inertia + point_mass_inertia(c.mass, c.center - props.center_of_mass);
    }
    // Numerical symmetrization; components are exactly symmetric already.
    props.inertia = 0.5 * (props.inertia + props.inertia.transpose()).eval();
    return props;
}

double average_arm_length(const MotorLayout& layout, const BodyGeometry& geom) {
    double total = 0.0;
    for (const Motor& motor : layout.motors)
        total += (motor.position - cage_attachment(motor.position, geom)).norm();
    return total / 6.0;
}

nlohmann::ordered_json layout_to_json(const MotorLayout& layout) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json motors = nlohmann::ordered_json::array();
    for (const Motor& m : layout.motors) {
        nlohmann::ordered_json jm;
        jm["position"] = {m.position.x(), m.position.y(), m.position.z()};
        jm["quaternion"] = {m.orientation.w(), m.orientation.x(), m.orientation.y(),
                            m.orientation.z()};
        jm["spin"] = m.spin == Spin::CW ? "CW" : "CCW";
        motors.push_back(jm);
    }
    j["motors"] = motors;
    j["propeller_radius"] = layout.propeller_radius;
    nlohmann::ordered_json prov;
    if (!layout.provenance_xi.empty()) {
        prov["design_vector"] = layout.provenance_xi;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(layout.provenance_bounds_hash));
        prov["bound_table_hash"] = buf;
    } else {
        prov = nullptr;
    }
    j["provenance"] = prov;
    return j;
}

MotorLayout layout_from_json(const nlohmann::json& j) {
    MotorLayout layout;
    const auto& motors = j.at("motors");
    if (motors.size() != 6) throw std::invalid_argument("layout JSON must contain 6 motors");
    for (int i = 0; i < 6; ++i) {
        const auto& jm = motors.at(i);
        Motor& m = layout.motors[i];
        for (int k = 0; k < 3; ++k) m.position[k] = jm.at("position").at(k).get<double>();
        const auto& q = jm.at("quaternion");
        m.orientation = Eigen::Quaterniond(q.at(0).get<double>(), q.at(1).get<double>(),
                                           q.at(2).get<double>(), q.at(3).get<double>());
        m.orientation.normalize();
        const std::string spin = jm.at("spin").get<std::string>();
        if (spin != "CW" && spin != "CCW")
            throw std::invalid_argument("spin must be CW or CCW");
        m.spin = spin == "CW" ? Spin::CW : Spin::CCW;
    }
    layout.propeller_radius = j.at("propeller_radius").get<double>();
    if (j.contains("provenance") && !j.at("provenance").is_null()) {
        const auto& prov = j.at("provenance");
        if (prov.contains("design_vector"))
            layout.provenance_xi = prov.at("design_vector").get<std::vector<double>>();
        if (prov.contains("bound_table_hash"))
            layout.provenance_bounds_hash =
                std::stoull(prov.at("bound_table_hash").get<std::string>(), nullptr, 16);
    }
    return layout;
}

} // namespace aforge
