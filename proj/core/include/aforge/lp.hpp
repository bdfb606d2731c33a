#pragma once

#include <optional>

#include <Eigen/Dense>

namespace aforge {

/// Maximizes c'z subject to lb <= A z <= ub for small problems (dim(z) <= 6)
/// by enumerating constraint-intersection vertices. A must have full column
/// rank so the feasible set is bounded. Returns nullopt when infeasible.
std::optional<Eigen::VectorXd> lp_box_vertex(const Eigen::VectorXd& c,
                                             const Eigen::MatrixXd& A,
                                             const Eigen::VectorXd& lb,
                                             const Eigen::VectorXd& ub,
                                             double tol = 1e-9);

} // namespace aforge
