#ifndef PMKL_SVM_HPP
#define PMKL_SVM_HPP

#include "pmkl/kernels.hpp"
#include "pmkl/types.hpp"

namespace pmkl {

/// Dual solution of one task's SVM under the combined kernel sum_m theta_m K_m^t.
struct TaskDual {
    Vec alpha;
    double bias = 0.0;
    double objective = 0.0;     // primal objective g^t
    double dual_objective = 0.0;
    Vec gram_stats;             // G_m = alpha' Y' K_m Y alpha, one per kernel
    double slack_total = 0.0;
    std::size_t iterations = 0;
};

/// SMO with maximal-violating-pair selection on the combined kernel.
TaskDual solve_task(const KernelBank& bank, std::size_t task, const Vec& theta,
                    double C, double tol = 1e-6, std::size_t max_pair_updates = 1000000);

/// Primal objective (1/2) sum_m theta_m G_m + C sum_i xi_i with slacks
/// recomputed from the decision values at (alpha, bias).
double compute_objective(const KernelBank& bank, std::size_t task, const Vec& alpha,
                         double bias, const Vec& theta, double C);

/// G_m = alpha' Y' K_m Y alpha for every kernel in the bank.
Vec gram_stats(const KernelBank& bank, std::size_t task, const Vec& alpha);

/// sum_m theta_m sum_i alpha_i y_i k_m(x_i, x) + b for each query row.
Vec decision_values(const KernelBank& bank, std::size_t task, const Vec& alpha,
                    double bias, const Vec& theta, const Matrix& points);

/// Decision values at the training points themselves (uses the cached Grams).
Vec training_decision_values(const KernelBank& bank, std::size_t task, const Vec& alpha,
                             double bias, const Vec& theta);

/// Bias from free support vectors, or the KKT interval midpoint if none are free.
double recover_bias(const KernelBank& bank, std::size_t task, const Vec& alpha,
                    const Vec& theta, double C);

}  // namespace pmkl

#endif
