#include "aforge/lp.hpp"

#include <vector>

namespace aforge {

namespace {

// Next k-combination of indices in lexicographic order.
bool next_combination(std::vector<int>& idx, int n) {
    const int k = static_cast<int>(idx.size());
    for (int i = k - 1; i >= 0; --i) {
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

} // namespace

std::optional<Eigen::VectorXd> lp_box_vertex(const Eigen::VectorXd& c,
                                             const Eigen::MatrixXd& A,
                                             const Eigen::VectorXd& lb,
                                             const Eigen::VectorXd& ub,
                                             double tol) {
    const int m = static_cast<int>(A.rows());
    const int k = static_cast<int>(A.cols());
    if (k == 0) return Eigen::VectorXd();

    // Stack as G z <= h.
    Eigen::MatrixXd G(2 * m, k);
    Eigen::VectorXd h(2 * m);
    G.topRows(m) = A;
    h.head(m) = ub;
    G.bottomRows(m) = -A;
    h.tail(m) = -lb;

    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    const double feas_tol = tol * scale;

    std::optional<Eigen::VectorXd> best;
    double best_val = -std::numeric_limits<double>::infinity();

    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    do {
        Eigen::MatrixXd Gs(k, k);
        Eigen::VectorXd hs(k);
        for (int i = 0; i < k; ++i) {
            Gs.row(i) = G.row(idx[i]);
            hs[i] = h[idx[i]];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(Gs);
        if (!lu.isInvertible()) continue;
        const Eigen::VectorXd z = lu.solve(hs);
        if (((G * z).array() > (h.array() + feas_tol)).any()) continue;
        const double val = c.dot(z);
        if (!best || val > best_val) {
            best = z;
            best_val = val;
        }
    } while (next_combination(idx, 2 * m));

    return best;
}

} // namespace aforge
