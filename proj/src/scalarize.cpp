#include "pmkl/scalarize.hpp"

#include <algorithm>
#include <cmath>

namespace pmkl {

static void check_nonneg(const Vec& g) {
    for (double v : g)
        if (v < 0.0) throw InputError("objective vector must be non-negative");
}

static void check_nonzero(const Vec& g) {
    if (std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; }))
        throw InputError("objective vector must not be all zero");
}

double nu_p(const Vec& g, const PParam& p) {
    check_nonneg(g);
    if (g.empty()) return 0.0;
    const double gmax = *std::max_element(g.begin(), g.end());
    if (p.is_inf() || gmax == 0.0) return gmax;
    // factor out the max to stay in range for large p
    double s = 0.0;
    for (double v : g) s += std::pow(v / gmax, p.p);
    return gmax * std::pow(s, 1.0 / p.p);
}

Vec lambda_star_convex(const Vec& g, const PParam& p) {
    check_nonneg(g);
    check_nonzero(g);
    if (!p.convex()) throw InputError("lambda_star_convex requires p >= 1");
    const std::size_t T = g.size();
    Vec lam(T, 0.0);
    if (p.is_inf()) {
        std::size_t best = 0;
        for (std::size_t t = 1; t < T; ++t)
            if (g[t] > g[best]) best = t;  // ties -> lowest index
        lam[best] = 1.0;
        return lam;
    }
    if (p.p == 1.0) {
        std::fill(lam.begin(), lam.end(), 1.0);
        return lam;
    }
    const double norm = nu_p(g, p);
    for (std::size_t t = 0; t < T; ++t) lam[t] = std::pow(g[t] / norm, p.p - 1.0);
    return lam;
}

Vec lambda_star_nonconvex(const Vec& g, const PParam& p) {
    check_nonneg(g);
    check_nonzero(g);
    if (!(p.p > 0.0 && p.p < 1.0)) throw InputError("lambda_star_nonconvex requires 0 < p < 1");
    const double norm = nu_p(g, p);
    Vec lam(g.size(), 0.0);
    for (std::size_t t = 0; t < g.size(); ++t)
        lam[t] = g[t] > 0.0 ? std::pow(g[t] / norm, 1.0 - p.p) : 0.0;
    return lam;
}

Vec phi_star(const Vec& g, const PParam& p) {
    check_nonneg(g);
    check_nonzero(g);
    double denom = 0.0;
    for (double v : g) denom += std::pow(v, p.p);
    Vec phi(g.size(), 0.0);
    for (std::size_t t = 0; t < g.size(); ++t)
        phi[t] = g[t] > 0.0 ? std::pow(g[t], p.p) / denom : 0.0;
    return phi;
}

bool is_dominated(const Vec& a, const Vec& b, double tol) {
    if (a.size() != b.size()) throw InputError("is_dominated: length mismatch");
    bool strict = false;
    for (std::size_t t = 0; t < a.size(); ++t) {
        if (b[t] > a[t] + tol) return false;
        if (b[t] < a[t] - tol) strict = true;
    }
    return strict;
}

}  // namespace pmkl
