#pragma once

#include <array>
#include <cstdint>

#include "aforge/collision.hpp"
#include "aforge/design_space.hpp"

namespace aforge {

struct RepairConfig {
    std::uint64_t seed = 0;
    int population = 24;
    int max_generations = 80;
    double search_half_width = 0.25;  // meters, per translation component
    double penalty_initial = 10.0;
    double penalty_final = 1e4;
    double margin = 3e-4;             // extra separation targeted by the penalty
    double feasibility_tol = 1e-6;    // meters of allowed residual penetration
    DepthOptions solver_depth{128, 16};  // cheap measure inside the solver
    DepthOptions check_depth{1024, 48};  // final feasibility verdict
};

struct RepairResult {
    std::array<Eigen::Vector3d, 6> translations{};
    MotorLayout repaired_layout;
    double total_cost = 0.0;   // sum over all six motors of |dT|
    int iterations = 0;
    bool converged = false;
    double max_penetration = 0.0; // after repair, at check_depth resolution
};

/// Minimal-translation repair of airflow/cage collisions. Searches the 9-D
/// space of motor 0-2 translations; motors 3-5 receive the xz-mirrored
/// translation, so symmetry is preserved exactly. Orientations and spins are
/// never touched.
RepairResult repair(const MotorLayout& layout, const BodyGeometry& geom,
                    const RepairConfig& cfg = {});

/// Applies per-motor translations to a layout (positions only).
MotorLayout translate_motors(const MotorLayout& layout,
                             const std::array<Eigen::Vector3d, 6>& translations);

} // namespace aforge
