#include <cmath>
#include <random>

#include "doctest.h"
#include "pmkl/scalarize.hpp"

using namespace pmkl;

TEST_CASE("PParam conjugate exponent") {
    CHECK(PParam(2.0).q() == doctest::Approx(2.0));
    CHECK(PParam(1.5).q() == doctest::Approx(3.0));
    CHECK(PParam(1.0).q() == kInf);
    CHECK(PParam::infinity().q() == 1.0);
    CHECK(PParam(0.5).q() == doctest::Approx(1.0));   // p/(1-p)
    CHECK(PParam(0.2).q() == doctest::Approx(0.25));
    CHECK_THROWS_AS(PParam(0.0), InputError);
    CHECK_THROWS_AS(PParam(-1.0), InputError);
}

TEST_CASE("nu_p hand values") {
    CHECK(nu_p({3.0, 4.0}, PParam(2.0)) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(nu_p({1.0, 1.0}, PParam(0.5)) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(nu_p({2.0, 7.0, 5.0}, PParam::infinity()) == 7.0);
    CHECK(nu_p({0.0, 0.0}, PParam(2.0)) == 0.0);
    CHECK_THROWS_AS(nu_p({-1.0, 2.0}, PParam(2.0)), InputError);
    // stays finite where a naive sum of powers would overflow
    CHECK(nu_p({1e200, 1e200}, PParam(50.0)) ==
          doctest::Approx(1e200 * std::pow(2.0, 1.0 / 50.0)).epsilon(1e-12));
}

TEST_CASE("lambda_star_convex hand values") {
    {
        const Vec lam = lambda_star_convex({3.0, 4.0}, PParam(1.0));
        CHECK(lam[0] == 1.0);
        CHECK(lam[1] == 1.0);
    }
    {
        const Vec lam = lambda_star_convex({3.0, 4.0}, PParam(2.0));
        CHECK(lam[0] == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(lam[1] == doctest::Approx(0.8).epsilon(1e-12));
    }
    {
        const Vec lam = lambda_star_convex({2.0, 7.0, 5.0}, PParam::infinity());
        CHECK(lam[0] == 0.0);
        CHECK(lam[1] == 1.0);
        CHECK(lam[2] == 0.0);
    }
    // argmax ties break to the lowest task index
    {
        const Vec lam = lambda_star_convex({7.0, 7.0}, PParam::infinity());
        CHECK(lam[0] == 1.0);
        CHECK(lam[1] == 0.0);
    }
    CHECK_THROWS_AS(lambda_star_convex({1.0, 2.0}, PParam(0.5)), InputError);
    CHECK_THROWS_AS(lambda_star_convex({0.0, 0.0}, PParam(2.0)), InputError);
}

TEST_CASE("lambda_star_nonconvex hand values") {
    {
        const Vec lam = lambda_star_nonconvex({1.0, 1.0}, PParam(0.5));
        CHECK(lam[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(lam[1] == doctest::Approx(0.5).epsilon(1e-12));
        // achieved objective g'lambda^{-1} = nu_p(g)
        CHECK(1.0 / lam[0] + 1.0 / lam[1] == doctest::Approx(4.0).epsilon(1e-12));
    }
    {
        const Vec lam = lambda_star_nonconvex({1.0, 4.0}, PParam(0.5));
        CHECK(lam[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(lam[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(1.0 / lam[0] + 4.0 / lam[1] == doctest::Approx(9.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(lambda_star_nonconvex({1.0, 2.0}, PParam(2.0)), InputError);
}

TEST_CASE("phi_star hand values and the lambda identity") {
    {
        const Vec ph = phi_star({1.0, 1.0}, PParam(0.5));
        CHECK(ph[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(ph[1] == doctest::Approx(0.5).epsilon(1e-12));
    }
    {
        const Vec ph = phi_star({1.0, 4.0}, PParam(0.25));
        const double r = std::sqrt(2.0);
        CHECK(ph[0] == doctest::Approx(1.0 / (1.0 + r)).epsilon(1e-12));
        CHECK(ph[1] == doctest::Approx(r / (1.0 + r)).epsilon(1e-12));
    }
    // phi* == (lambda*)^q componentwise on the nonconvex branch, q = p/(1-p)
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int rep = 0; rep < 50; ++rep) {
        const double p = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
        Vec g{u(rng), u(rng), u(rng)};
        const Vec lam = lambda_star_nonconvex(g, PParam(p));
        const Vec ph = phi_star(g, PParam(p));
        for (std::size_t t = 0; t < g.size(); ++t)
            CHECK(std::abs(ph[t] - std::pow(lam[t], PParam(p).q())) <= 1e-12);
    }
}

TEST_CASE("scalarization properties: homogeneity and monotone embedding") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (double p : {0.3, 0.7, 1.0, 1.5, 2.0, 5.0}) {
        for (int rep = 0; rep < 20; ++rep) {
            Vec g{u(rng), u(rng), u(rng)};
            const double c = u(rng);
            Vec cg = g;
            for (double& v : cg) v *= c;
            // positive homogeneity of nu_p
            CHECK(std::abs(nu_p(cg, PParam(p)) - c * nu_p(g, PParam(p))) <=
                  1e-12 * (1.0 + nu_p(cg, PParam(p))));

            // the largest lambda* component sits at the argmax of g
            std::size_t best = 0;
            for (std::size_t t = 1; t < g.size(); ++t)
                if (g[t] > g[best]) best = t;
            const Vec lam = p >= 1.0 ? lambda_star_convex(g, PParam(p))
                                     : lambda_star_nonconvex(g, PParam(p));
            for (std::size_t t = 0; t < g.size(); ++t) CHECK(lam[best] >= lam[t] - 1e-12);
        }
    }
}

TEST_CASE("is_dominated") {
    CHECK(is_dominated({2.0, 2.0}, {1.0, 1.0}, 1e-3));
    CHECK(is_dominated({2.0, 2.0}, {2.0, 1.0}, 1e-3));        // tie on one coordinate
    CHECK_FALSE(is_dominated({2.0, 2.0}, {1.0, 3.0}, 1e-3));  // trade-off
    CHECK_FALSE(is_dominated({2.0, 2.0}, {2.0, 2.0}, 1e-3));  // equal, no strict gain
    // inside the tolerance band nothing dominates
    CHECK_FALSE(is_dominated({2.0, 2.0}, {1.9995, 2.0005}, 1e-3));
    CHECK_THROWS_AS(is_dominated({1.0}, {1.0, 2.0}, 1e-3), InputError);
}
