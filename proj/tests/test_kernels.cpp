#include <cmath>
#include <random>

#include "doctest.h"
#include "pmkl/kernels.hpp"
#include "test_util.hpp"

using namespace pmkl;

TEST_CASE("kernel evaluations on hand points") {
    const Vec e1{1.0, 0.0}, e2{0.0, 1.0}, ones{1.0, 1.0};
    CHECK(eval_kernel(KernelSpec::linear(), e1, e2) == 0.0);
    CHECK(eval_kernel(KernelSpec::gaussian(0.5), ones, ones) == 1.0);
    // (x'z + 1)^2 with x = z = (1,1): (2 + 1)^2 = 9
    CHECK(eval_kernel(KernelSpec::polynomial(2), ones, ones) == doctest::Approx(9.0));
    CHECK_THROWS_AS(eval_kernel(KernelSpec::linear(), e1, Vec{1.0}), InputError);
}

TEST_CASE("kernel spec validation") {
    CHECK_THROWS_AS(KernelSpec::polynomial(0), InputError);
    CHECK_THROWS_AS(KernelSpec::gaussian(0.0), InputError);
    CHECK_THROWS_AS(KernelSpec::gaussian(-1.0), InputError);
}

TEST_CASE("default bank: 11 kernels in the documented order") {
    const auto specs = default_bank_specs();
    REQUIRE(specs.size() == 11);
    CHECK(specs[0].kind == KernelKind::Linear);
    CHECK(specs[1].kind == KernelKind::Polynomial);
    CHECK(specs[1].degree == 2);
    CHECK(specs[2].kind == KernelKind::Gaussian);
    CHECK(specs[2].spread == doctest::Approx(std::ldexp(1.0, -7)));
    CHECK(specs[10].spread == doctest::Approx(std::ldexp(1.0, 7)));
    for (std::size_t m = 3; m <= 10; ++m) CHECK(specs[m].spread > specs[m - 1].spread);
}

TEST_CASE("linear gram of the identity points is the identity") {
    TaskData td;
    td.features = Matrix(2, 2);
    td.features(0, 0) = 1.0;
    td.features(1, 1) = 1.0;
    td.labels = {1, -1};
    const KernelBank bank = build_bank({td}, {KernelSpec::linear()});
    const Matrix& g = bank.gram(0, 0);
    CHECK(g(0, 0) == 1.0);
    CHECK(g(0, 1) == 0.0);
    CHECK(g(1, 0) == 0.0);
    CHECK(g(1, 1) == 1.0);
}

TEST_CASE("gram properties on random data") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TaskData td;
    const std::size_t n = 12;
    td.features = Matrix(n, 3);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < 3; ++j) td.features(i, j) = u(rng);
    td.labels.assign(n, 1);
    td.labels[0] = -1;

    const auto specs = default_bank_specs();
    const KernelBank bank = build_bank({td}, specs);
    for (std::size_t m = 0; m < specs.size(); ++m) {
        const Matrix& g = bank.gram(0, m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                // symmetry: exact for linear/polynomial, 1e-15 for gaussian
                if (specs[m].kind == KernelKind::Gaussian) {
                    CHECK(std::abs(g(i, j) - g(j, i)) <= 1e-15);
                    CHECK(g(i, j) > 0.0);
                    CHECK(g(i, j) <= 1.0);
                } else {
                    CHECK(g(i, j) == g(j, i));
                }
            }
        // every 2x2 principal minor is PSD up to roundoff
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                CHECK(g(i, i) * g(j, j) - g(i, j) * g(j, i) >= -1e-10);
    }
}

TEST_CASE("combined_gram is the theta-weighted sum of the bank grams") {
    const KernelBank bank = testutil::synthetic_bank();
    const Vec theta{0.2, 0.5, 0.3};
    const Matrix K = bank.combined_gram(0, theta);
    const std::size_t n = bank.task_size(0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double ref = 0.0;
            for (std::size_t m = 0; m < 3; ++m) ref += theta[m] * bank.gram(0, m)(i, j);
            CHECK(K(i, j) == doctest::Approx(ref).epsilon(1e-14));
        }
}

TEST_CASE("build_bank input validation and worker invariance") {
    CHECK_THROWS_AS(build_bank({}, {KernelSpec::linear()}), InputError);
    TaskData td;
    td.features = Matrix(2, 1);
    td.labels = {1, -1};
    CHECK_THROWS_AS(build_bank({td}, {}), InputError);

    TaskData bad = td;
    bad.features(0, 0) = std::nan("");
    CHECK_THROWS_AS(build_bank({bad}, {KernelSpec::linear()}), InputError);

    bad = td;
    bad.labels = {1};
    CHECK_THROWS_AS(build_bank({bad}, {KernelSpec::linear()}), InputError);

    // parallel construction computes the same grams
    const auto tasks = testutil::synthetic_tasks();
    const auto specs = default_bank_specs();
    const KernelBank b1 = build_bank(tasks, specs, 1);
    const KernelBank b4 = build_bank(tasks, specs, 4);
    for (std::size_t t = 0; t < tasks.size(); ++t)
        for (std::size_t m = 0; m < specs.size(); ++m) {
            const Matrix& g1 = b1.gram(t, m);
            const Matrix& g4 = b4.gram(t, m);
            for (std::size_t i = 0; i < g1.rows(); ++i)
                for (std::size_t j = 0; j < g1.cols(); ++j) CHECK(g1(i, j) == g4(i, j));
        }
}
