#include "pmkl/svm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pmkl/simd.hpp"

namespace pmkl {

static void check_theta(const Vec& theta, std::size_t m) {
    if (theta.size() != m) throw InputError("theta size does not match kernel count");
    bool any = false;
    for (double v : theta) {
        if (v < 0.0) throw InputError("theta must be non-negative");
        if (v > 0.0) any = true;
    }
    if (!any) throw InputError("theta must not be all zero");
}

Vec gram_stats(const KernelBank& bank, std::size_t task, const Vec& alpha) {
    const std::size_t n = bank.task_size(task);
    const auto& y = bank.labels(task);
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = alpha[i] * y[i];
    Vec stats(bank.num_kernels());
    for (std::size_t m = 0; m < bank.num_kernels(); ++m) {
        const Matrix& K = bank.gram(task, m);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (v[i] != 0.0) s += v[i] * simd::dot(K.row(i), v.data(), n);
        stats[m] = s;
    }
    return stats;
}

Vec training_decision_values(const KernelBank& bank, std::size_t task, const Vec& alpha,
                             double bias, const Vec& theta) {
    const std::size_t n = bank.task_size(task);
    const auto& y = bank.labels(task);
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = alpha[i] * y[i];
    const Matrix K = bank.combined_gram(task, theta);
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = simd::dot(K.row(i), v.data(), n) + bias;
    return out;
}

Vec decision_values(const KernelBank& bank, std::size_t task, const Vec& alpha,
                    double bias, const Vec& theta, const Matrix& points) {
    check_theta(theta, bank.num_kernels());
    if (points.cols() != bank.feature_dim(task))
        throw InputError("decision_values: query dimension mismatch");
    const std::size_t n = bank.task_size(task);
    const auto& y = bank.labels(task);
    const Matrix& X = bank.samples(task);
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = alpha[i] * y[i];
    Vec out(points.rows(), bias);
    for (std::size_t m = 0; m < bank.num_kernels(); ++m) {
        if (theta[m] == 0.0) continue;
        const KernelSpec& spec = bank.specs()[m];
        for (std::size_t r = 0; r < points.rows(); ++r) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (v[i] == 0.0) continue;
                s += v[i] * eval_kernel(spec, X.row(i), points.row(r), X.cols());
            }
            out[r] += theta[m] * s;
        }
    }
    return out;
}

double compute_objective(const KernelBank& bank, std::size_t task, const Vec& alpha,
                         double bias, const Vec& theta, double C) {
    const std::size_t n = bank.task_size(task);
    const auto& y = bank.labels(task);
    const Vec u = training_decision_values(bank, task, alpha, bias, theta);
    double slack = 0.0;
    for (std::size_t i = 0; i < n; ++i) slack += std::max(0.0, 1.0 - y[i] * u[i]);
    const Vec stats = gram_stats(bank, task, alpha);
    double reg = 0.0;
    for (std::size_t m = 0; m < theta.size(); ++m) reg += theta[m] * stats[m];
    return 0.5 * reg + C * slack;
}

double recover_bias(const KernelBank& bank, std::size_t task, const Vec& alpha,
                    const Vec& theta, double C) {
    const std::size_t n = bank.task_size(task);
    const auto& y = bank.labels(task);
    const Vec u = training_decision_values(bank, task, alpha, 0.0, theta);
    const double eps = 1e-8 * std::max(1.0, C);
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > eps && alpha[i] < C - eps) {
            free_sum += y[i] - u[i];
            ++free_count;
        }
    }
    if (free_count > 0) return free_sum / free_count;
    // midpoint of the KKT-feasible bias interval
    double lo = -kInf, hi = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        const double bound = y[i] - u[i];
        const bool at_zero = alpha[i] <= eps;
        // alpha = 0: y(u+b) >= 1; alpha = C: y(u+b) <= 1
        if ((at_zero && y[i] > 0) || (!at_zero && y[i] < 0))
            lo = std::max(lo, bound);
        else
            hi = std::min(hi, bound);
    }
    if (lo == -kInf && hi == kInf) return 0.0;
    if (lo == -kInf) return hi;
    if (hi == kInf) return lo;
    return 0.5 * (lo + hi);
}

TaskDual solve_task(const KernelBank& bank, std::size_t task, const Vec& theta,
                    double C, double tol, std::size_t max_pair_updates) {
    check_theta(theta, bank.num_kernels());
    if (!(C > 0.0)) throw InputError("C must be positive");
    const std::size_t n = bank.task_size(task);
    const auto& y = bank.labels(task);
    {
        bool pos = false, neg = false;
        for (int l : y) (l > 0 ? pos : neg) = true;
        if (!pos || !neg) throw InputError("solve_task: task has a single class");
    }

    const Matrix K = bank.combined_gram(task, theta);
    Vec alpha(n, 0.0);
    Vec grad(n, -1.0);  // gradient of (1/2) a'Qa - 1'a, Q_ij = y_i y_j K_ij

    auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * K(i, j); };

    std::size_t iter = 0;
    for (; iter < max_pair_updates; ++iter) {
        // maximal violating pair
        double up = -kInf, low = kInf;
        std::size_t i = n, j = n;
        for (std::size_t k = 0; k < n; ++k) {
            const double v = -y[k] * grad[k];
            const bool in_up = (y[k] > 0 && alpha[k] < C) || (y[k] < 0 && alpha[k] > 0);
            const bool in_low = (y[k] > 0 && alpha[k] > 0) || (y[k] < 0 && alpha[k] < C);
            if (in_up && v > up) { up = v; i = k; }
            if (in_low && v < low) { low = v; j = k; }
        }
        if (i == n || j == n || up - low <= tol) break;

        const double old_i = alpha[i], old_j = alpha[j];
        if (y[i] != y[j]) {
            double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if (quad <= 0.0) quad = 1e-12;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
                if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
            } else {
                if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
                if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
            }
        } else {
            double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if (quad <= 0.0) quad = 1e-12;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
                if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
            } else {
                if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
                if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
            }
        }
        const double di = y[i] * (alpha[i] - old_i);
        const double dj = y[j] * (alpha[j] - old_j);
        for (std::size_t k = 0; k < n; ++k)
            grad[k] += y[k] * (di * K(i, k) + dj * K(j, k));
    }

    if (iter >= max_pair_updates) {
        double up = -kInf, low = kInf;
        for (std::size_t k = 0; k < n; ++k) {
            const double v = -y[k] * grad[k];
            if ((y[k] > 0 && alpha[k] < C) || (y[k] < 0 && alpha[k] > 0)) up = std::max(up, v);
            if ((y[k] > 0 && alpha[k] > 0) || (y[k] < 0 && alpha[k] < C)) low = std::min(low, v);
        }
        throw SolverError("solve_task: SMO did not converge within " +
                              std::to_string(max_pair_updates) + " pair updates",
                          up - low);
    }

    TaskDual out;
    out.alpha = alpha;
    out.iterations = iter;
    out.bias = recover_bias(bank, task, alpha, theta, C);
    out.gram_stats = gram_stats(bank, task, alpha);

    double sum_alpha = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum_alpha += alpha[i];
        quad += alpha[i] * (grad[i] + 1.0);
    }
    out.dual_objective = sum_alpha - 0.5 * quad;

    const Vec u = training_decision_values(bank, task, alpha, out.bias, theta);
    double slack = 0.0;
    for (std::size_t i = 0; i < n; ++i) slack += std::max(0.0, 1.0 - y[i] * u[i]);
    out.slack_total = slack;
    double reg = 0.0;
    for (std::size_t m = 0; m < theta.size(); ++m) reg += theta[m] * out.gram_stats[m];
    out.objective = 0.5 * reg + C * slack;
    return out;
}

}  // namespace pmkl
