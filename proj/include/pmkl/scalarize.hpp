#ifndef PMKL_SCALARIZE_HPP
#define PMKL_SCALARIZE_HPP

#include "pmkl/types.hpp"

namespace pmkl {

/// The path parameter p > 0 (possibly infinite) and its conjugate exponent:
/// q = p/(p-1) for p > 1, q = p/(1-p) for p in (0,1), with the symbolic
/// limits q = inf at p = 1 and q = 1 at p = inf.
struct PParam {
    double p;

    explicit PParam(double value) : p(value) {
        if (!(p > 0.0)) throw InputError("PParam: p must be > 0");
    }
    static PParam infinity() { return PParam(kInf); }

    bool is_inf() const { return p == kInf; }
    bool convex() const { return p >= 1.0; }

    double q() const {
        if (is_inf()) return 1.0;
        if (p == 1.0) return kInf;
        return p > 1.0 ? p / (p - 1.0) : p / (1.0 - p);
    }
};

/// (sum_t g_t^p)^(1/p); max_t g_t for p = inf.
double nu_p(const Vec& g, const PParam& p);

/// Maximizer of lambda'g over the q-ball, Eq-(6)-style closed form (p >= 1).
Vec lambda_star_convex(const Vec& g, const PParam& p);

/// Minimizer of g'lambda^{-1} over the q-ball for p in (0,1).
Vec lambda_star_nonconvex(const Vec& g, const PParam& p);

/// Simplex weights g^p / sum g^p; equals lambda_star_nonconvex^p.
Vec phi_star(const Vec& g, const PParam& p);

/// True when b dominates a: b <= a + tol everywhere and b < a - tol somewhere.
bool is_dominated(const Vec& a, const Vec& b, double tol);

}  // namespace pmkl

#endif
