#include "pmkl/project.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pmkl {

static void check_nonneg_psi(const Vec& psi) {
    for (double v : psi)
        if (v < 0.0) throw InputError("psi must be non-negative");
}

static double norm_pow(const Vec& v, double e) {
    double s = 0.0;
    for (double x : v) s += std::pow(x, e);
    return s;
}

Vec theta_min_ball_s(const Vec& psi, double s) {
    if (!(s > 1.0)) throw InputError("theta_min_ball_s requires s > 1");
    check_nonneg_psi(psi);
    const double r = 1.0 / (s - 1.0);
    Vec w(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) w[i] = std::pow(psi[i], r);
    const double ns = std::pow(norm_pow(w, s), 1.0 / s);
    const double denom = std::max(1.0, ns);
    for (double& x : w) x /= denom;
    return w;
}

Vec theta_min_ball_1(const Vec& psi, double s) {
    if (!(s > 1.0)) throw InputError("theta_min_ball_1 requires s > 1");
    check_nonneg_psi(psi);
    const double r = 1.0 / (s - 1.0);
    auto theta_at = [&](double mu) {
        Vec th(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i)
            th[i] = std::pow(std::max(psi[i] - mu, 0.0), r);
        return th;
    };
    auto l1 = [](const Vec& v) { return std::accumulate(v.begin(), v.end(), 0.0); };

    Vec th0 = theta_at(0.0);
    if (l1(th0) <= 1.0) return th0;

    if (r == 1.0) {
        // breakpoint scan: sum max(psi - mu, 0) = 1
        Vec sorted = psi;
        std::sort(sorted.begin(), sorted.end(), std::greater<double>());
        double cumsum = 0.0;
        double mu = 0.0;
        for (std::size_t k = 0; k < sorted.size(); ++k) {
            cumsum += sorted[k];
            const double cand = (cumsum - 1.0) / static_cast<double>(k + 1);
            if (k + 1 == sorted.size() || sorted[k + 1] <= cand) {
                mu = cand;
                break;
            }
        }
        return theta_at(std::max(mu, 0.0));
    }

    double lo = 0.0, hi = *std::max_element(psi.begin(), psi.end());
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (l1(theta_at(mid)) > 1.0 ? lo : hi) = mid;
    }
    return theta_at(hi);
}

Vec project_lq_ball(const Vec& v, double q) {
    if (!(q >= 1.0)) throw InputError("project_lq_ball requires q >= 1");
    Vec w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::max(v[i], 0.0);
    if (w.empty()) return w;

    if (q == kInf) {
        for (double& x : w) x = std::min(x, 1.0);
        return w;
    }
    if (std::pow(norm_pow(w, q), 1.0 / q) <= 1.0) return w;

    if (q == 1.0) {
        // simplex projection by threshold scan
        Vec sorted = w;
        std::sort(sorted.begin(), sorted.end(), std::greater<double>());
        double cumsum = 0.0, tau = 0.0;
        for (std::size_t k = 0; k < sorted.size(); ++k) {
            cumsum += sorted[k];
            const double cand = (cumsum - 1.0) / static_cast<double>(k + 1);
            if (k + 1 == sorted.size() || sorted[k + 1] <= cand) {
                tau = cand;
                break;
            }
        }
        for (double& x : w) x = std::max(x - tau, 0.0);
        return w;
    }

    // KKT: x + tau*q*x^(q-1) = w_i componentwise; pick tau so sum x^q = 1
    auto solve_x = [&](double wi, double tau) {
        double lo = 0.0, hi = wi;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (mid + tau * q * std::pow(mid, q - 1.0) < wi ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    auto ball_gap = [&](double tau) {
        double s = 0.0;
        for (double wi : w) s += std::pow(solve_x(wi, tau), q);
        return s - 1.0;
    };
    double tlo = 0.0, thi = 1.0;
    while (ball_gap(thi) > 0.0) thi *= 2.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (tlo + thi);
        (ball_gap(mid) > 0.0 ? tlo : thi) = mid;
    }
    const double tau = 0.5 * (tlo + thi);
    Vec out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = solve_x(w[i], tau);
    return out;
}

Vec project_box_hyperplane(const Vec& z, const std::vector<int>& y, double ub) {
    const std::size_t n = z.size();
    if (y.size() != n) throw InputError("project_box_hyperplane: size mismatch");
    if (ub <= 0.0) return Vec(n, 0.0);
    auto beta_at = [&](double tau) {
        Vec b(n);
        for (std::size_t i = 0; i < n; ++i)
            b[i] = std::clamp(z[i] - tau * y[i], 0.0, ub);
        return b;
    };
    auto residual = [&](const Vec& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += y[i] * b[i];
        return s;
    };
    double zmax = 0.0;
    for (double v : z) zmax = std::max(zmax, std::abs(v));
    double lo = -(zmax + ub + 1.0), hi = zmax + ub + 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (residual(beta_at(mid)) > 0.0 ? lo : hi) = mid;
    }
    return beta_at(0.5 * (lo + hi));
}

namespace {

// ||beta||^2 - a'beta at the exact projection of a/2 onto {b'y=0, 0<=b<=ub}
double phi_block(const Vec& a, const std::vector<int>& y, double ub, Vec* beta_out) {
    Vec z(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) z[i] = 0.5 * a[i];
    Vec beta = project_box_hyperplane(z, y, ub);
    double phi = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) phi += beta[i] * beta[i] - a[i] * beta[i];
    if (beta_out) *beta_out = std::move(beta);
    return phi;
}

}  // namespace

BetaLambdaPoint solve_beta_lambda_qp(const std::vector<Vec>& linear_beta,
                                     const Vec& linear_lambda, double C, double q,
                                     const std::vector<std::vector<int>>& labels,
                                     double tol, std::size_t max_sweeps,
                                     const Vec* block_weights) {
    const std::size_t T = linear_beta.size();
    if (linear_lambda.size() != T || labels.size() != T)
        throw InputError("solve_beta_lambda_qp: block count mismatch");
    if (!(C > 0.0)) throw InputError("solve_beta_lambda_qp: C must be positive");
    if (!(q >= 1.0)) throw InputError("solve_beta_lambda_qp: q must be >= 1");
    if (block_weights && block_weights->size() != T)
        throw InputError("solve_beta_lambda_qp: weight count mismatch");

    // Weights are normalized by their maximum so the projected-gradient step
    // scale stays that of the stiffest block.
    Vec w(T, 1.0);
    if (block_weights) {
        double wmax = 0.0;
        for (double x : *block_weights) {
            if (!(x > 0.0)) throw InputError("solve_beta_lambda_qp: weights must be positive");
            wmax = std::max(wmax, x);
        }
        for (std::size_t t = 0; t < T; ++t) w[t] = (*block_weights)[t] / wmax;
    }

    // The beta block is eliminated exactly; h(lambda) is convex with curvature
    // at least 2 w_t from the ||lambda||^2 term.
    auto h_value = [&](const Vec& lam, std::vector<Vec>* betas_out) {
        double h = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            Vec* slot = betas_out ? &(*betas_out)[t] : nullptr;
            h += w[t] * (phi_block(linear_beta[t], labels[t], lam[t] * C, slot) +
                         lam[t] * lam[t] - linear_lambda[t] * lam[t]);
        }
        return h;
    };
    // difference-quotient slope of the convex phi_t; exact enough for the
    // projected-gradient fixed point and immune to the lambda = 0 corner
    auto h_grad = [&](const Vec& lam) {
        Vec g(T);
        for (std::size_t t = 0; t < T; ++t) {
            const double delta = 1e-6 * std::max(1.0, lam[t]);
            const double lo = std::max(lam[t] - delta, 0.0);
            const double hi = lam[t] + delta;
            const double phi_hi = phi_block(linear_beta[t], labels[t], hi * C, nullptr);
            const double phi_lo = phi_block(linear_beta[t], labels[t], lo * C, nullptr);
            g[t] = w[t] * (2.0 * lam[t] - linear_lambda[t] + (phi_hi - phi_lo) / (hi - lo));
        }
        return g;
    };

    Vec lam = project_lq_ball(Vec(T, 0.5), q);
    double h = h_value(lam, nullptr);
    double step = 0.25;
    double residual = kInf;
    std::size_t it = 0;
    for (; it < max_sweeps; ++it) {
        const Vec g = h_grad(lam);
        Vec fix(T);
        for (std::size_t t = 0; t < T; ++t) fix[t] = lam[t] - g[t];
        fix = project_lq_ball(fix, q);
        residual = 0.0;
        for (std::size_t t = 0; t < T; ++t) residual = std::max(residual, std::abs(fix[t] - lam[t]));
        if (residual <= tol) break;

        bool moved = false;
        while (step > 1e-14) {
            Vec cand(T);
            for (std::size_t t = 0; t < T; ++t) cand[t] = lam[t] - step * g[t];
            cand = project_lq_ball(cand, q);
            const double hc = h_value(cand, nullptr);
            double move = 0.0;
            for (std::size_t t = 0; t < T; ++t) move += (cand[t] - lam[t]) * (cand[t] - lam[t]);
            if (move > 0.0 && hc <= h - 1e-12 * (1.0 + std::abs(h))) {
                lam = std::move(cand);
                h = hc;
                step = std::min(step * 1.5, 4.0);
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;  // no further progress at numerical precision
        if (step < 1e-12) step = 0.25;
    }

    BetaLambdaPoint out;
    out.beta.resize(T);
    out.objective = h_value(lam, &out.beta);
    out.lambda = std::move(lam);
    out.kkt_residual = residual;
    out.iterations = it;
    if (it >= max_sweeps && residual > 10.0 * tol)
        throw SolverError("solve_beta_lambda_qp: iteration cap exceeded", residual);
    return out;
}

}  // namespace pmkl
