#include "aforge/repair.hpp"

#include <cmath>
#include <limits>

#include "aforge/rng.hpp"

namespace aforge {

namespace {

using Vec9 = Eigen::Matrix<double, 9, 1>;

Eigen::Vector3d mirror_y(const Eigen::Vector3d& v) {
    return Eigen::Vector3d(v.x(), -v.y(), v.z());
}

std::array<Eigen::Vector3d, 6> expand_translations(const Vec9& x) {
    std::array<Eigen::Vector3d, 6> dt;
    for (int i = 0; i < 3; ++i) {
        dt[i] = x.segment<3>(3 * i);
        dt[i + 3] = mirror_y(dt[i]);
    }
    return dt;
}

double translation_cost(const std::array<Eigen::Vector3d, 6>& dt) {
    double c = 0.0;
    for (const auto& t : dt) c += t.norm();
    return c;
}

/// Evaluates constraint violation for a candidate translation vector.
/// Cylinders move with their motors; the cage stays put.
class ViolationEval {
public:
    ViolationEval(std::vector<CollisionBody> bodies, const RepairConfig& cfg)
        : base_(std::move(bodies)), cfg_(cfg) {}

    /// Sum over pairs of max(signed separation + margin, 0). A return of 0
    /// certifies every pair separated by at least `margin`.
    double operator()(const Vec9& x, double margin, const DepthOptions& depth) const {
        const auto dt = expand_translations(x);
        std::vector<CollisionBody> bodies = base_;
        for (int i = 0; i < 6; ++i) bodies[i].center += dt[i];
        double total = 0.0;
        for (std::size_t i = 0; i < bodies.size(); ++i) {
            for (std::size_t j = i + 1; j < bodies.size(); ++j) {
                const double s = signed_separation(bodies[i], bodies[j], depth);
                total += std::max(s + margin, 0.0);
            }
        }
        return total;
    }

    double max_pen(const Vec9& x, const DepthOptions& depth) const {
        const auto dt = expand_translations(x);
        std::vector<CollisionBody> bodies = base_;
        for (int i = 0; i < 6; ++i) bodies[i].center += dt[i];
        return max_penetration(bodies, depth);
    }

private:
    std::vector<CollisionBody> base_;
    const RepairConfig& cfg_;
};

} // namespace

MotorLayout translate_motors(const MotorLayout& layout,
                             const std::array<Eigen::Vector3d, 6>& translations) {
    MotorLayout out = layout;
    for (int i = 0; i < 6; ++i) out.motors[i].position += translations[i];
    // Positions no longer follow from the source poses.
    out.has_source_poses = layout.has_source_poses;
    return out;
}

namespace {
RepairResult repair_attempt(const MotorLayout& layout, const BodyGeometry& geom,
                            const RepairConfig& cfg);
} // namespace

RepairResult repair(const MotorLayout& layout, const BodyGeometry& geom,
                    const RepairConfig& cfg) {
    // Rare hard cases slip past the cheap in-solver depth measure; retry them
    // with a wider margin and a finer measure rather than paying the higher
    // accuracy on every design.
    RepairConfig attempt_cfg = cfg;
    RepairResult result;
    for (int attempt = 0; attempt < 3; ++attempt) {
        result = repair_attempt(layout, geom, attempt_cfg);
        if (result.converged) return result;
        attempt_cfg.seed = Rng(attempt_cfg.seed).derive(0xa77e).at(0);
        attempt_cfg.margin *= 2.0;
        attempt_cfg.solver_depth.coarse_directions *= 2;
        attempt_cfg.solver_depth.refine_rounds += 16;
    }
    return result;
}

namespace {
RepairResult repair_attempt(const MotorLayout& layout, const BodyGeometry& geom,
                            const RepairConfig& cfg) {
    geom.validate();
    RepairResult result;
    result.translations.fill(Eigen::Vector3d::Zero());
    result.repaired_layout = layout;

    const std::vector<CollisionBody> bodies = build_collision_set(layout, geom);
    ViolationEval violation(bodies, cfg);

    const Vec9 zero = Vec9::Zero();
    if (violation.max_pen(zero, cfg.check_depth) < cfg.feasibility_tol) {
        result.converged = true;
        result.max_penetration = violation.max_pen(zero, cfg.check_depth);
        return result; // already feasible, nothing to move
    }

    Rng rng = Rng(cfg.seed).derive(0x7265706169ULL);

    // Differential evolution (rand/1/bin) with a ramped penetration penalty.
    const int np = cfg.population;
    const double F = 0.7;
    const double CR = 0.9;
    std::vector<Vec9> pop(np);
    std::vector<double> viol(np);
    for (int k = 0; k < np; ++k) {
        if (k == 0) {
            pop[k] = zero;
        } else {
            for (int d = 0; d < 9; ++d)
                pop[k][d] = rng.uniform(-cfg.search_half_width, cfg.search_half_width) *
                            (k < np / 2 ? 0.3 : 1.0);
        }
        viol[k] = violation(pop[k], cfg.margin, cfg.solver_depth);
    }

    Vec9 best_feasible = zero;
    double best_feasible_cost = std::numeric_limits<double>::infinity();
    bool found_feasible = false;
    Vec9 best_any = pop[0];
    double best_any_score = std::numeric_limits<double>::infinity();

    auto cost_of = [](const Vec9& x) { return translation_cost(expand_translations(x)); };

    int g = 0;
    for (; g < cfg.max_generations; ++g) {
        const double w = cfg.penalty_initial *
                         std::pow(cfg.penalty_final / cfg.penalty_initial,
                                  static_cast<double>(g) / std::max(1, cfg.max_generations - 1));
        for (int k = 0; k < np; ++k) {
            int a, b, c;
            do { a = static_cast<int>(rng.uniform_int(np)); } while (a == k);
            do { b = static_cast<int>(rng.uniform_int(np)); } while (b == k || b == a);
            do { c = static_cast<int>(rng.uniform_int(np)); } while (c == k || c == a || c == b);
            Vec9 trial = pop[k];
            const int jrand = static_cast<int>(rng.uniform_int(9));
            for (int d = 0; d < 9; ++d) {
                if (d == jrand || rng.uniform() < CR) {
                    double v = pop[a][d] + F * (pop[b][d] - pop[c][d]);
                    v = std::clamp(v, -cfg.search_half_width, cfg.search_half_width);
                    trial[d] = v;
                }
            }
            const double trial_viol = violation(trial, cfg.margin, cfg.solver_depth);
            const double trial_score = cost_of(trial) + w * trial_viol;
            const double cur_score = cost_of(pop[k]) + w * viol[k];
            if (trial_score <= cur_score) {
                pop[k] = trial;
                viol[k] = trial_viol;
            }
            if (viol[k] == 0.0) {
                const double c0 = cost_of(pop[k]);
                if (c0 < best_feasible_cost) {
                    best_feasible_cost = c0;
                    best_feasible = pop[k];
                    found_feasible = true;
                }
            }
            const double s = cost_of(pop[k]) + cfg.penalty_final * viol[k];
            if (s < best_any_score) {
                best_any_score = s;
                best_any = pop[k];
            }
        }
        // Stop early once a feasible repair has settled for a while.
        if (found_feasible && g > cfg.max_generations / 2) break;
    }
    result.iterations = g + 1;

    Vec9 x = found_feasible ? best_feasible : best_any;

    if (found_feasible) {
        // Polish: shrink each motor's translation toward zero, then each
        // coordinate, keeping the zero-violation certificate.
        // Keep the full margin while polishing: the solver-resolution depth
        // slightly under-measures relative to the final check, and the margin
        // is what absorbs that gap.
        auto feasible = [&](const Vec9& cand) {
            return violation(cand, cfg.margin, cfg.solver_depth) == 0.0;
        };
        for (int pass = 0; pass < 3; ++pass) {
            for (int i = 0; i < 3; ++i) {
                double lo = 0.0, hi = 1.0;
                Vec9 cand = x;
                cand.segment<3>(3 * i).setZero();
                if (feasible(cand)) { x = cand; continue; }
                for (int it = 0; it < 20; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    cand = x;
                    cand.segment<3>(3 * i) *= mid;
                    if (feasible(cand)) hi = mid; else lo = mid;
                }
                x.segment<3>(3 * i) *= hi;
            }
            double step = 0.01;
            while (step > 1e-5) {
                bool improved = false;
                for (int d = 0; d < 9; ++d) {
                    if (x[d] == 0.0) continue;
                    Vec9 cand = x;
                    const double delta = std::min(step, std::abs(x[d]));
                    cand[d] -= (x[d] > 0 ? delta : -delta);
                    if (cost_of(cand) < cost_of(x) && feasible(cand)) {
                        x = cand;
                        improved = true;
                    }
                }
                if (!improved) step *= 0.5;
            }
        }
    }

    result.translations = expand_translations(x);
    result.repaired_layout = translate_motors(layout, result.translations);
    result.total_cost = translation_cost(result.translations);
    result.max_penetration = violation.max_pen(x, cfg.check_depth);
    result.converged = result.max_penetration < cfg.feasibility_tol;
    return result;
}
} // namespace

} // namespace aforge
