#include "pmkl/kernels.hpp"

#include <atomic>
#include <cmath>
#include <future>
#include <utility>

#include "pmkl/simd.hpp"

namespace pmkl {

KernelSpec KernelSpec::polynomial(int degree) {
    if (degree < 1) throw InputError("polynomial kernel degree must be >= 1");
    return {KernelKind::Polynomial, degree, 0.0};
}

KernelSpec KernelSpec::gaussian(double spread) {
    if (!(spread > 0.0)) throw InputError("gaussian kernel spread must be > 0");
    return {KernelKind::Gaussian, 1, spread};
}

double eval_kernel(const KernelSpec& spec, const double* x, const double* z, std::size_t dim) {
    switch (spec.kind) {
        case KernelKind::Linear:
            return simd::dot(x, z, dim);
        case KernelKind::Polynomial:
            return std::pow(simd::dot(x, z, dim) + 1.0, spec.degree);
        case KernelKind::Gaussian:
            return std::exp(-spec.spread * simd::squared_distance(x, z, dim));
    }
    return 0.0;
}

double eval_kernel(const KernelSpec& spec, const Vec& x, const Vec& z) {
    if (x.size() != z.size()) throw InputError("eval_kernel: dimension mismatch");
    return eval_kernel(spec, x.data(), z.data(), x.size());
}

std::vector<KernelSpec> default_bank_specs() {
    std::vector<KernelSpec> specs;
    specs.push_back(KernelSpec::linear());
    specs.push_back(KernelSpec::polynomial(2));
    for (int e : {-7, -5, -3, -1, 0, 1, 3, 5, 7})
        specs.push_back(KernelSpec::gaussian(std::ldexp(1.0, e)));
    return specs;
}

Matrix KernelBank::combined_gram(std::size_t t, const Vec& theta) const {
    const std::size_t n = task_size(t);
    Matrix out(n, n, 0.0);
    for (std::size_t m = 0; m < num_kernels(); ++m) {
        if (theta[m] == 0.0) continue;
        simd::axpy(theta[m], grams_[t][m].data(), out.data(), n * n);
    }
    return out;
}

static Matrix build_gram(const TaskData& task, const KernelSpec& spec) {
    const std::size_t n = task.labels.size();
    const std::size_t d = task.features.cols();
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = eval_kernel(spec, task.features.row(i), task.features.row(j), d);
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

KernelBank build_bank(const std::vector<TaskData>& tasks,
                      const std::vector<KernelSpec>& specs, int workers) {
    if (tasks.empty()) throw InputError("build_bank: no tasks");
    if (specs.empty()) throw InputError("build_bank: no kernel specs");
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        if (tasks[t].labels.empty()) throw InputError("build_bank: empty task");
        if (tasks[t].labels.size() != tasks[t].features.rows())
            throw InputError("build_bank: feature/label count mismatch");
        const double* p = tasks[t].features.data();
        for (std::size_t k = 0; k < tasks[t].features.rows() * tasks[t].features.cols(); ++k)
            if (!std::isfinite(p[k])) throw InputError("build_bank: non-finite feature value");
    }

    KernelBank bank;
    bank.specs_ = specs;
    bank.tasks_ = tasks;
    bank.grams_.resize(tasks.size());
    for (std::size_t t = 0; t < tasks.size(); ++t) bank.grams_[t].resize(specs.size());

    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t t = 0; t < tasks.size(); ++t)
        for (std::size_t m = 0; m < specs.size(); ++m) cells.emplace_back(t, m);

    if (workers <= 1 || cells.size() <= 1) {
        for (auto [t, m] : cells) bank.grams_[t][m] = build_gram(tasks[t], specs[m]);
    } else {
        std::vector<std::future<void>> futs;
        std::atomic<std::size_t> next{0};
        const int nthreads = std::min<std::size_t>(workers, cells.size());
        for (int w = 0; w < nthreads; ++w) {
            futs.push_back(std::async(std::launch::async, [&] {
                for (std::size_t c = next.fetch_add(1); c < cells.size(); c = next.fetch_add(1)) {
                    auto [t, m] = cells[c];
                    bank.grams_[t][m] = build_gram(tasks[t], specs[m]);
                }
            }));
        }
        for (auto& f : futs) f.get();
    }
    return bank;
}

}  // namespace pmkl
