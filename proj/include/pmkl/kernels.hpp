#ifndef PMKL_KERNELS_HPP
#define PMKL_KERNELS_HPP

#include <vector>

#include "pmkl/types.hpp"

namespace pmkl {

enum class KernelKind { Linear, Polynomial, Gaussian };

struct KernelSpec {
    KernelKind kind = KernelKind::Linear;
    int degree = 1;       // Polynomial only
    double spread = 0.0;  // Gaussian only, the gamma in exp(-gamma * ||x - z||^2)

    static KernelSpec linear() { return {KernelKind::Linear, 1, 0.0}; }
    static KernelSpec polynomial(int degree);
    static KernelSpec gaussian(double spread);
};

/// One binary task: feature rows plus labels in {-1, +1}.
struct TaskData {
    Matrix features;
    std::vector<int> labels;
};

double eval_kernel(const KernelSpec& spec, const double* x, const double* z, std::size_t dim);
double eval_kernel(const KernelSpec& spec, const Vec& x, const Vec& z);

/// The 11-kernel default: Linear, Poly(2), Gaussian(2^-7 .. 2^7).
std::vector<KernelSpec> default_bank_specs();

/// Precomputed Gram matrices K_m^t for M kernels x T tasks, plus the training
/// samples needed for test-time kernel evaluation. Immutable once built.
class KernelBank {
public:
    KernelBank() = default;

    std::size_t num_tasks() const { return tasks_.size(); }
    std::size_t num_kernels() const { return specs_.size(); }
    std::size_t task_size(std::size_t t) const { return tasks_[t].labels.size(); }
    std::size_t feature_dim(std::size_t t) const { return tasks_[t].features.cols(); }

    const std::vector<KernelSpec>& specs() const { return specs_; }
    const Matrix& gram(std::size_t t, std::size_t m) const { return grams_[t][m]; }
    const Matrix& samples(std::size_t t) const { return tasks_[t].features; }
    const std::vector<int>& labels(std::size_t t) const { return tasks_[t].labels; }

    /// Sum_m theta[m] * K_m^t, the combined Gram matrix for one task.
    Matrix combined_gram(std::size_t t, const Vec& theta) const;

    friend KernelBank build_bank(const std::vector<TaskData>& tasks,
                                 const std::vector<KernelSpec>& specs, int workers);

private:
    std::vector<KernelSpec> specs_;
    std::vector<TaskData> tasks_;
    std::vector<std::vector<Matrix>> grams_;  // [task][kernel]
};

KernelBank build_bank(const std::vector<TaskData>& tasks,
                      const std::vector<KernelSpec>& specs, int workers = 1);

}  // namespace pmkl

#endif
