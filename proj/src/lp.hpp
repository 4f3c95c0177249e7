#pragma once

#include <Eigen/Dense>

#include <vector>

namespace spherecurve::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct LpResult {
    Eigen::VectorXd x;
    double value = 0;
    bool bounded = true;
    int iterations = 0;
};

// maximize c.x subject to A x <= b, starting from a feasible x0. Vertex walk with
// Bland's rule; intended for a handful of variables and many constraints.
LpResult lp_maximize(const RowMatrix& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                     Eigen::VectorXd x0);

// Basic feasible solution of { sum_i w_i p_i = target, sum_i w_i = 1, w >= 0 }.
// Returns the support (column indices) and weights; empty if infeasible.
struct BarycentricResult {
    std::vector<int> support;
    std::vector<double> weights;
    double infeasibility = 0;
};
BarycentricResult barycentric_bfs(const std::vector<Eigen::Vector3d>& points,
                                  const Eigen::Vector3d& target);

}  // namespace spherecurve::detail
