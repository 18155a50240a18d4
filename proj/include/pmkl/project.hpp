#ifndef PMKL_PROJECT_HPP
#define PMKL_PROJECT_HPP

#include <vector>

#include "pmkl/types.hpp"

namespace pmkl {

/// argmin over the s-ball of (1/s) 1'theta^s - psi'theta: psi^r normalized,
/// r = 1/(s-1).
Vec theta_min_ball_s(const Vec& psi, double s);

/// Same objective constrained to the L1 ball: (max{psi - mu, 0})^r with mu the
/// smallest non-negative shift making ||theta||_1 <= 1.
Vec theta_min_ball_1(const Vec& psi, double s);

/// Euclidean projection of max{v, 0} onto {x >= 0, ||x||_q <= 1}, q >= 1
/// (q = inf clamps each coordinate to [0, 1]).
Vec project_lq_ball(const Vec& v, double q);

struct BetaLambdaPoint {
    std::vector<Vec> beta;  // one block per task
    Vec lambda;
    double objective = 0.0;
    double kkt_residual = 0.0;
    std::size_t iterations = 0;
};

/// Projection of z onto {beta'y = 0, 0 <= beta <= ub} by bisection on the
/// hyperplane multiplier. Exposed for the coupled QP and its tests.
Vec project_box_hyperplane(const Vec& z, const std::vector<int>& y, double ub);

/// Minimizes sum_t w_t (||beta^t||^2 - beta^t'a^t + lambda_t^2 - lambda_t c_t)
/// subject to beta^t'y^t = 0, 0 <= beta^t <= lambda_t C, lambda >= 0,
/// nu(lambda)_q <= 1. The beta block is eliminated exactly per task; the
/// reduced convex function of lambda is minimized by projected gradient with
/// backtracking. block_weights = nullptr means all w_t = 1 (only the relative
/// scale of the weights matters).
BetaLambdaPoint solve_beta_lambda_qp(const std::vector<Vec>& linear_beta,
                                     const Vec& linear_lambda, double C, double q,
                                     const std::vector<std::vector<int>>& labels,
                                     double tol = 1e-6, std::size_t max_sweeps = 100000,
                                     const Vec* block_weights = nullptr);

}  // namespace pmkl

#endif
