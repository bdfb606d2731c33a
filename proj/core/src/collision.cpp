#include "aforge/collision.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace aforge {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Deterministic quasi-uniform unit directions (Fibonacci sphere).
std::vector<Eigen::Vector3d> fibonacci_sphere(int n) {
    std::vector<Eigen::Vector3d> dirs;
    dirs.reserve(n);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / n;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = golden * i;
        dirs.emplace_back(rho * std::cos(a), rho * std::sin(a), z);
    }
    return dirs;
}

} // namespace

CollisionBody CollisionBody::airflow(const Motor& motor, double propeller_radius) {
    return cylinder(motor.position, motor.thrust_axis(), propeller_radius + 1e-3,
                    4.0 * propeller_radius);
}

CollisionBody CollisionBody::cage(const BodyGeometry& geom) {
    return cuboid(Eigen::Vector3d::Zero(), 0.5 * geom.cage_dims);
}

CollisionBody CollisionBody::cylinder(const Eigen::Vector3d& center,
                                      const Eigen::Vector3d& axis, double radius,
                                      double length) {
    CollisionBody b;
    b.kind = Kind::Cylinder;
    b.center = center;
    b.radius = radius;
    b.length = length;
    const Eigen::Vector3d z = axis.normalized();
    Eigen::Vector3d x = std::abs(z.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    x = (x - x.dot(z) * z).normalized();
    b.orientation.col(0) = x;
    b.orientation.col(1) = z.cross(x);
    b.orientation.col(2) = z;
    b.validate();
    return b;
}

CollisionBody CollisionBody::cuboid(const Eigen::Vector3d& center,
                                    const Eigen::Vector3d& half_extents) {
    CollisionBody b;
    b.kind = Kind::Cuboid;
    b.center = center;
    b.half_extents = half_extents;
    b.validate();
    return b;
}

void CollisionBody::validate() const {
    if (!center.allFinite()) throw std::invalid_argument("collision body: non-finite pose");
    if (kind == Kind::Cylinder) {
        if (radius <= 0.0 || length <= 0.0)
            throw std::invalid_argument("collision body: degenerate cylinder");
    } else {
        if (half_extents.minCoeff() <= 0.0)
            throw std::invalid_argument("collision body: degenerate cuboid");
    }
}

double CollisionBody::support(const Eigen::Vector3d& d) const {
    double h = center.dot(d);
    if (kind == Kind::Cylinder) {
        const Eigen::Vector3d axis = orientation.col(2);
        const double along = axis.dot(d);
        h += 0.5 * length * std::abs(along);
        h += radius * (d - along * axis).norm();
    } else {
        for (int k = 0; k < 3; ++k)
            h += half_extents[k] * std::abs(orientation.col(k).dot(d));
    }
    return h;
}

double CollisionBody::bounding_radius() const {
    if (kind == Kind::Cylinder)
        return std::sqrt(0.25 * length * length + radius * radius);
    return half_extents.norm();
}

double directional_overlap(const CollisionBody& a, const CollisionBody& b,
                           const Eigen::Vector3d& d) {
    return a.support(d) + b.support(-d);
}

double signed_separation(const CollisionBody& a, const CollisionBody& b,
                         const DepthOptions& opts) {
    a.validate();
    b.validate();

    // Quick certificate: the center-line direction alone often proves a gap.
    const Eigen::Vector3d delta = b.center - a.center;
    const double dist = delta.norm();
    if (dist > 1e-12) {
        const double along = directional_overlap(a, b, -delta / dist);
        if (along <= -(a.bounding_radius() + b.bounding_radius()))
            return along; // far apart; fine search would not change the sign
    }

    static thread_local std::vector<Eigen::Vector3d> cached_dirs;
    static thread_local int cached_n = 0;
    if (cached_n != opts.coarse_directions) {
        cached_dirs = fibonacci_sphere(opts.coarse_directions);
        cached_n = opts.coarse_directions;
    }

    // The directional overlap restricted to the sphere can have several local
    // minima, so refine from a handful of the best coarse seeds rather than
    // only the single best one.
    constexpr int kSeeds = 4;
    std::array<Eigen::Vector3d, kSeeds> seed_dir;
    std::array<double, kSeeds> seed_val;
    seed_dir.fill(Eigen::Vector3d::UnitZ());
    seed_val.fill(std::numeric_limits<double>::infinity());
    // Evaluating both signs keeps the search symmetric in (a, b), since
    // overlap(a, b, d) == overlap(b, a, -d).
    auto offer = [&](const Eigen::Vector3d& d) {
        const double t = directional_overlap(a, b, d);
        for (int k = 0; k < kSeeds; ++k) {
            if (t < seed_val[k]) {
                for (int j = kSeeds - 1; j > k; --j) {
                    seed_val[j] = seed_val[j - 1];
                    seed_dir[j] = seed_dir[j - 1];
                }
                seed_val[k] = t;
                seed_dir[k] = d;
                break;
            }
        }
    };
    for (const Eigen::Vector3d& d : cached_dirs) {
        offer(d);
        offer(-d);
    }

    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < kSeeds; ++s) {
        // Local hill-climb on the sphere with a shrinking tangent step.
        Eigen::Vector3d dir = seed_dir[s];
        double val = seed_val[s];
        double step = 2.0 * kPi / std::sqrt(static_cast<double>(opts.coarse_directions));
        for (int round = 0; round < opts.refine_rounds; ++round) {
            Eigen::Vector3d u = std::abs(dir.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                                        : Eigen::Vector3d::UnitY();
            u = (u - u.dot(dir) * dir).normalized();
            const Eigen::Vector3d v = dir.cross(u);
            bool improved = false;
            for (const Eigen::Vector3d& tangent :
                 {u, Eigen::Vector3d(-u), v, Eigen::Vector3d(-v), Eigen::Vector3d(u + v),
                  Eigen::Vector3d(u - v), Eigen::Vector3d(-u + v), Eigen::Vector3d(-u - v)}) {
                const Eigen::Vector3d cand = (dir + step * tangent.normalized()).normalized();
                const double t = directional_overlap(a, b, cand);
                if (t < val) {
                    val = t;
                    dir = cand;
                    improved = true;
                }
            }
            if (!improved) step *= 0.5;
            if (step < 1e-10) break;
        }
        best = std::min(best, val);
    }
    return best;
}

double penetration_depth(const CollisionBody& a, const CollisionBody& b,
                         const DepthOptions& opts) {
    return std::max(0.0, signed_separation(a, b, opts));
}

std::vector<CollisionBody> build_collision_set(const MotorLayout& layout,
                                               const BodyGeometry& geom) {
    std::vector<CollisionBody> bodies;
    bodies.reserve(7);
    for (const Motor& motor : layout.motors)
        bodies.push_back(CollisionBody::airflow(motor, layout.propeller_radius));
    bodies.push_back(CollisionBody::cage(geom));
    return bodies;
}

double max_penetration(const std::vector<CollisionBody>& bodies, const DepthOptions& opts) {
    double worst = 0.0;
    for (std::size_t i = 0; i < bodies.size(); ++i)
        for (std::size_t j = i + 1; j < bodies.size(); ++j)
            worst = std::max(worst, penetration_depth(bodies[i], bodies[j], opts));
    return worst;
}

} // namespace aforge
