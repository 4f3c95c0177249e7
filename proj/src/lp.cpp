#include "lp.hpp"

#include <cmath>
#include <limits>

namespace spherecurve::detail {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd rows_of(const RowMatrix& A, const std::vector<int>& W) {
    MatrixXd AW(W.size(), A.cols());
    for (size_t k = 0; k < W.size(); ++k) AW.row(k) = A.row(W[k]);
    return AW;
}

// Orthonormal basis of the null space of AW (d x (d - rank)).
MatrixXd null_basis(const MatrixXd& AW, int d) {
    if (AW.rows() == 0) return MatrixXd::Identity(d, d);
    Eigen::JacobiSVD<MatrixXd> svd(AW, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (int k = 0; k < s.size(); ++k)
        if (s[k] > 1e-12 * std::max(1.0, s[0])) ++rank;
    return svd.matrixV().rightCols(d - rank);
}

}  // namespace

LpResult lp_maximize(const RowMatrix& A, const VectorXd& b, const VectorXd& c, VectorXd x) {
    const int m = static_cast<int>(A.rows());
    const int d = static_cast<int>(A.cols());
    std::vector<int> W;
    std::vector<char> in_w(m, 0);
    LpResult res;
    const int max_iter = 20 * (m + d) + 100;

    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it + 1;
        VectorXd dir;
        int leaving = -1;
        bool free_direction = false;
        if (static_cast<int>(W.size()) < d) {
            MatrixXd N = null_basis(rows_of(A, W), d);
            if (N.cols() == 0) {
                // dependent working set; treat as a vertex-less stall
                break;
            }
            dir = N * (N.transpose() * c);
            if (dir.norm() < 1e-13) {
                dir = N.col(0);
                free_direction = true;
            }
        } else {
            MatrixXd AW = rows_of(A, W);
            Eigen::PartialPivLU<MatrixXd> lu(AW);
            Eigen::PartialPivLU<MatrixXd> lut(AW.transpose());
            VectorXd lam = lut.solve(c);
            int jpos = -1;
            for (int k = 0; k < d; ++k)
                if (lam[k] < -1e-12 && (jpos < 0 || W[k] < W[jpos])) jpos = k;
            if (jpos < 0) break;  // optimal vertex
            VectorXd e = VectorXd::Zero(d);
            e[jpos] = -1;
            dir = lu.solve(e);
            leaving = jpos;
        }

        auto ratio = [&](const VectorXd& dv, double& step) {
            int enter = -1;
            step = std::numeric_limits<double>::infinity();
            const double scale = 1e-13 * std::max(1.0, dv.norm());
            for (int i = 0; i < m; ++i) {
                if (in_w[i]) continue;
                double ad = A.row(i).dot(dv);
                if (ad <= scale) continue;
                double slack = b[i] - A.row(i).dot(x);
                if (slack < 0) slack = 0;
                double a = slack / ad;
                if (a < step - 1e-15) {
                    step = a;
                    enter = i;
                }
            }
            return enter;
        };

        double step = 0;
        int enter = ratio(dir, step);
        if (enter < 0 && free_direction) {
            dir = -dir;
            enter = ratio(dir, step);
        }
        if (enter < 0) {
            res.bounded = false;
            break;
        }
        x += step * dir;
        if (leaving >= 0) {
            in_w[W[leaving]] = 0;
            W.erase(W.begin() + leaving);
        }
        W.push_back(enter);
        in_w[enter] = 1;
    }
    res.x = x;
    res.value = c.dot(x);
    return res;
}

BarycentricResult barycentric_bfs(const std::vector<Eigen::Vector3d>& points,
                                  const Eigen::Vector3d& target) {
    const int M = static_cast<int>(points.size());
    Eigen::Vector4d beta(target.x(), target.y(), target.z(), 1.0);
    Eigen::Vector4d sign = Eigen::Vector4d::Ones();
    for (int r = 0; r < 4; ++r)
        if (beta[r] < 0) sign[r] = -1;
    beta = beta.cwiseProduct(sign);
    auto column = [&](int j) -> Eigen::Vector4d {
        if (j >= M) {
            Eigen::Vector4d e = Eigen::Vector4d::Zero();
            e[j - M] = 1;
            return e;
        }
        const auto& p = points[j];
        return Eigen::Vector4d(p.x(), p.y(), p.z(), 1.0).cwiseProduct(sign);
    };

    std::vector<int> basis = {M, M + 1, M + 2, M + 3};
    Eigen::Matrix4d B = Eigen::Matrix4d::Identity();
    Eigen::Vector4d xb = beta;
    double last_obj = xb.sum();
    int stall = 0;

    for (int it = 0; it < 2000; ++it) {
        Eigen::Vector4d cb;
        for (int k = 0; k < 4; ++k) cb[k] = basis[k] >= M ? 1.0 : 0.0;
        Eigen::Vector4d y = B.transpose().partialPivLu().solve(cb);
        const bool bland = stall > 30;
        int enter = -1;
        double best = -1e-12;
        for (int j = 0; j < M; ++j) {
            double r = -y.dot(column(j));
            if (r < best) {
                bool basic = false;
                for (int k = 0; k < 4; ++k) basic |= basis[k] == j;
                if (basic) continue;
                enter = j;
                best = r;
                if (bland) break;
            }
        }
        if (enter < 0) break;
        Eigen::Vector4d dcol = B.partialPivLu().solve(column(enter));
        int leave = -1;
        double step = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 4; ++k) {
            if (dcol[k] <= 1e-12) continue;
            double a = std::max(0.0, xb[k]) / dcol[k];
            if (a < step - 1e-15 || (std::abs(a - step) <= 1e-15 && basis[k] < basis[leave])) {
                step = a;
                leave = k;
            }
        }
        if (leave < 0) break;
        basis[leave] = enter;
        B.col(leave) = column(enter);
        xb = B.partialPivLu().solve(beta);
        double obj = 0;
        for (int k = 0; k < 4; ++k)
            if (basis[k] >= M) obj += xb[k];
        if (obj < last_obj - 1e-15) {
            stall = 0;
            last_obj = obj;
        } else {
            ++stall;
        }
    }

    BarycentricResult res;
    for (int k = 0; k < 4; ++k) {
        if (basis[k] >= M) {
            res.infeasibility += std::abs(xb[k]);
        } else if (xb[k] > 1e-14) {
            res.support.push_back(basis[k]);
            res.weights.push_back(xb[k]);
        }
    }
    return res;
}

}  // namespace spherecurve::detail
