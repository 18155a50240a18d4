#include "pmkl/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pmkl/simd.hpp"

namespace pmkl {

namespace {

double conjugate_q(double p) {
    if (p == kInf) return 1.0;
    if (p == 1.0) return kInf;
    return p / (p - 1.0);
}

double p_from_q(double q) {
    if (q == kInf) return 1.0;
    if (q == 1.0) return kInf;
    return q / (q - 1.0);
}

// v = Y beta; returns v' K_m v for every kernel of one task
Vec task_quad_forms(const KernelBank& bank, std::size_t t, const Vec& beta) {
    const std::size_t n = bank.task_size(t);
    const auto& y = bank.labels(t);
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = beta[i] * y[i];
    Vec quads(bank.num_kernels(), 0.0);
    for (std::size_t m = 0; m < bank.num_kernels(); ++m) {
        const Matrix& K = bank.gram(t, m);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (v[i] != 0.0) s += v[i] * simd::dot(K.row(i), v.data(), n);
        quads[m] = s;
    }
    return quads;
}

bool block_nonzero(const Vec& b) {
    return std::any_of(b.begin(), b.end(), [](double x) { return x != 0.0; });
}

double sum(const Vec& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// u'q(u_eval) with q(u) = [grad_theta, -grad_beta, -grad_lambda]
double inner_uq(const Vec& theta, const std::vector<Vec>& beta, const Vec& lambda,
                const PhiGradient& g) {
    double s = 0.0;
    for (std::size_t m = 0; m < theta.size(); ++m) s += theta[m] * g.theta[m];
    for (std::size_t t = 0; t < beta.size(); ++t)
        s -= simd::dot(beta[t].data(), g.beta[t].data(), beta[t].size());
    for (std::size_t t = 0; t < lambda.size(); ++t) s -= lambda[t] * g.lambda[t];
    return s;
}

double bregman(const Vec& theta_u, const std::vector<Vec>& beta_u, const Vec& lambda_u,
               const TsengState& center, double sbar) {
    double d = 0.0;
    // theta block: h = (1/sbar)||theta||_sbar^sbar
    double hu = 0.0, hc = 0.0, cross = 0.0;
    for (std::size_t m = 0; m < theta_u.size(); ++m) {
        hu += std::pow(theta_u[m], sbar);
        hc += std::pow(center.theta[m], sbar);
        cross += (theta_u[m] - center.theta[m]) * std::pow(center.theta[m], sbar - 1.0);
    }
    d += (hu - hc) / sbar - cross;
    for (std::size_t t = 0; t < beta_u.size(); ++t)
        d += simd::squared_distance(beta_u[t].data(), center.beta[t].data(), beta_u[t].size());
    for (std::size_t t = 0; t < lambda_u.size(); ++t) {
        const double dl = lambda_u[t] - center.lambda[t];
        d += dl * dl;
    }
    return d;
}

struct ProxResult {
    TsengCandidate point;
};

// Per-block prox weights: Tseng's scheme with the Bregman function
// sum_b zeta_b h_b(u_b), so a stiff block (large local curvature) takes short
// steps without throttling the others. Uniform (zeta_theta = 0,
// zeta_task = nullptr) reduces every block weight to center.zeta.
struct ZetaBlocks {
    double theta = 0.0;
    const Vec* task = nullptr;

    double for_theta(double base) const { return theta > 0.0 ? theta : base; }
    double for_task(std::size_t t, double base) const {
        return task ? (*task)[t] : base;
    }
};

// argmin over the feasible set of u'grads + sum_b zeta_b D_b(u_b, center_b);
// tasks with active[t] == 0 are pinned to the face beta_t = 0, lambda_t = 0
// and excluded from the coupled QP (active == nullptr means every task
// participates)
ProxResult solve_prox(const TsengState& center, const PhiGradient& grads,
                      const KernelBank& bank, double C, double q, double s,
                      double qp_tol, const std::vector<char>* active = nullptr,
                      const ZetaBlocks& zeta = {}) {
    const double sbar = s > 1.0 ? s : 2.0;
    const std::size_t M = bank.num_kernels();
    const double zeta_theta = zeta.for_theta(center.zeta);
    Vec psi(M);
    for (std::size_t m = 0; m < M; ++m) {
        psi[m] = std::pow(center.theta[m], sbar - 1.0) - grads.theta[m] / zeta_theta;
        psi[m] = std::max(psi[m], 0.0);  // grad_theta <= 0, so only roundoff below zero
    }
    ProxResult res;
    res.point.theta = s > 1.0 ? theta_min_ball_s(psi, s) : theta_min_ball_1(psi, 2.0);

    const std::size_t T = bank.num_tasks();
    std::vector<std::size_t> rows;
    rows.reserve(T);
    for (std::size_t t = 0; t < T; ++t)
        if (!active || (*active)[t]) rows.push_back(t);

    std::vector<Vec> a(rows.size());
    std::vector<std::vector<int>> labels(rows.size());
    Vec c(rows.size());
    Vec weights(rows.size());
    bool uniform = true;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t t = rows[r];
        const double zt = zeta.for_task(t, center.zeta);
        weights[r] = zt;
        if (zt != center.zeta) uniform = false;
        a[r].resize(bank.task_size(t));
        for (std::size_t i = 0; i < a[r].size(); ++i)
            a[r][i] = grads.beta[t][i] / zt + 2.0 * center.beta[t][i];
        labels[r] = bank.labels(t);
        c[r] = grads.lambda[t] / zt + 2.0 * center.lambda[t];
    }

    BetaLambdaPoint qp =
        solve_beta_lambda_qp(a, c, C, q, labels, qp_tol, 100000,
                             uniform ? nullptr : &weights);
    res.point.beta.resize(T);
    res.point.lambda.assign(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) res.point.beta[t].assign(bank.task_size(t), 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        res.point.beta[rows[r]] = std::move(qp.beta[r]);
        res.point.lambda[rows[r]] = qp.lambda[r];
    }
    return res;
}

// sum_b zeta_b D_b(u_b, center_b) with the same per-block weights as the prox
double bregman_weighted(const Vec& theta_u, const std::vector<Vec>& beta_u,
                        const Vec& lambda_u, const TsengState& center, double sbar,
                        const ZetaBlocks& zeta) {
    double hu = 0.0, hc = 0.0, cross = 0.0;
    for (std::size_t m = 0; m < theta_u.size(); ++m) {
        hu += std::pow(theta_u[m], sbar);
        hc += std::pow(center.theta[m], sbar);
        cross += (theta_u[m] - center.theta[m]) * std::pow(center.theta[m], sbar - 1.0);
    }
    double d = zeta.for_theta(center.zeta) * ((hu - hc) / sbar - cross);
    for (std::size_t t = 0; t < beta_u.size(); ++t) {
        const double dl = lambda_u[t] - center.lambda[t];
        d += zeta.for_task(t, center.zeta) *
             (simd::squared_distance(beta_u[t].data(), center.beta[t].data(),
                                     beta_u[t].size()) +
              dl * dl);
    }
    return d;
}

Vec uniform_ball_point(std::size_t n, double exponent) {
    Vec v(n, 1.0);
    if (exponent == kInf) return v;
    const double scale = std::pow(static_cast<double>(n), -1.0 / exponent);
    std::fill(v.begin(), v.end(), scale);
    return v;
}

}  // namespace

double phi(const Vec& theta, const std::vector<Vec>& beta, const Vec& lambda,
           const KernelBank& bank, double /*C*/) {
    const std::size_t T = bank.num_tasks();
    double value = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        if (!block_nonzero(beta[t])) continue;
        if (lambda[t] <= 0.0)
            throw InputError("phi: lambda_t = 0 with nonzero beta block is infeasible");
        const Vec quads = task_quad_forms(bank, t, beta[t]);
        double combined = 0.0;
        for (std::size_t m = 0; m < theta.size(); ++m) combined += theta[m] * quads[m];
        value += sum(beta[t]) - combined / (2.0 * lambda[t]);
    }
    return value;
}

PhiGradient grad_phi(const Vec& theta, const std::vector<Vec>& beta, const Vec& lambda,
                     const KernelBank& bank, double /*C*/) {
    const std::size_t T = bank.num_tasks();
    const std::size_t M = bank.num_kernels();

    PhiGradient g;
    g.theta.assign(M, 0.0);
    g.beta.resize(T);
    g.lambda.assign(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        const std::size_t n = bank.task_size(t);
        const auto& y = bank.labels(t);
        if (lambda[t] <= 0.0) {
            // The box constraint beta <= C lambda pins beta to zero here, and
            // Phi extends continuously to 0 on the block (q = 1 steps may zero
            // a coordinate exactly). Use the limiting gradient along beta = 0.
            if (lambda[t] < 0.0 || block_nonzero(beta[t]))
                throw InputError("grad_phi: lambda must be positive where beta is nonzero");
            g.beta[t].assign(n, 1.0);
            continue;
        }
        const Vec quads = task_quad_forms(bank, t, beta[t]);
        for (std::size_t m = 0; m < M; ++m) g.theta[m] -= quads[m] / (2.0 * lambda[t]);

        double combined_quad = 0.0;
        for (std::size_t m = 0; m < M; ++m) combined_quad += theta[m] * quads[m];
        g.lambda[t] = combined_quad / (2.0 * lambda[t] * lambda[t]);

        Vec v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = beta[t][i] * y[i];
        const Matrix K = bank.combined_gram(t, theta);
        g.beta[t].resize(n);
        for (std::size_t i = 0; i < n; ++i)
            g.beta[t][i] = 1.0 - y[i] * simd::dot(K.row(i), v.data(), n) / lambda[t];
    }
    return g;
}

TsengCandidate tseng_inner_step(const TsengState& state, const KernelBank& bank,
                                double C, double q, double s, double qp_tol) {
    const PhiGradient grads = grad_phi(state.theta, state.beta, state.lambda, bank, C);
    return solve_prox(state, grads, bank, C, q, s, qp_tol).point;
}

std::pair<bool, TsengState> tseng_check_and_update(const TsengState& state,
                                                   const TsengCandidate& v,
                                                   const KernelBank& bank, double C,
                                                   double q, double s, double qp_tol) {
    const double sbar = s > 1.0 ? s : 2.0;
    const PhiGradient grads_v = grad_phi(v.theta, v.beta, v.lambda, bank, C);
    const ProxResult prox = solve_prox(state, grads_v, bank, C, q, s, qp_tol);

    const double lhs = inner_uq(prox.point.theta, prox.point.beta, prox.point.lambda, grads_v) +
                       state.zeta * bregman(prox.point.theta, prox.point.beta,
                                            prox.point.lambda, state, sbar);
    const double rhs = inner_uq(v.theta, v.beta, v.lambda, grads_v);
    const double slack = 1e-9 * (1.0 + std::abs(rhs));

    if (lhs >= rhs - slack) {
        TsengState next = state;
        next.theta = prox.point.theta;
        next.beta = prox.point.beta;
        next.lambda = prox.point.lambda;
        next.iter = state.iter + 1;
        return {true, std::move(next)};
    }
    TsengState next = state;
    next.zeta = state.zeta / 2.0;
    if (next.zeta < 1e-12)
        throw SolverError("tseng: zeta underflow (non-Lipschitz saddle data)", next.zeta);
    return {false, std::move(next)};
}

double duality_gap(const TsengState& state, const KernelBank& bank, double C,
                   double q, double s, double svm_tol, Vec* task_duals) {
    const std::size_t T = bank.num_tasks();
    const double p = p_from_q(q);

    Vec dual_opt(T);
    for (std::size_t t = 0; t < T; ++t)
        dual_opt[t] = std::max(0.0, solve_task(bank, t, state.theta, C, svm_tol).dual_objective);
    const double max_term = nu_p(dual_opt, PParam(p));
    if (task_duals) *task_duals = dual_opt;

    // Phi is linear in theta: Phi = sum_t beta'1 - theta'w
    double lin = 0.0;
    Vec w(bank.num_kernels(), 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        if (!block_nonzero(state.beta[t])) continue;
        if (state.lambda[t] <= 0.0)
            throw InputError("duality_gap: lambda must be positive where beta is nonzero");
        lin += sum(state.beta[t]);
        const Vec quads = task_quad_forms(bank, t, state.beta[t]);
        for (std::size_t m = 0; m < w.size(); ++m)
            w[m] += quads[m] / (2.0 * state.lambda[t]);
    }
    double max_linear;
    if (s > 1.0)
        max_linear = nu_p(w, PParam(s / (s - 1.0)));
    else
        max_linear = w.empty() ? 0.0 : *std::max_element(w.begin(), w.end());
    const double min_term = lin - max_linear;
    return max_term - min_term;
}

ModelState train_convex(const KernelBank& bank, const SolverConfig& config) {
    if (!(config.p >= 1.0)) throw InputError("train_convex requires p >= 1");
    const double q = conjugate_q(config.p);
    const double s = config.s;
    const std::size_t T = bank.num_tasks();
    const std::size_t M = bank.num_kernels();

    TsengState state;
    state.theta = config.warm_theta.empty() ? uniform_ball_point(M, s) : config.warm_theta;
    state.lambda = uniform_ball_point(T, q);
    state.beta.resize(T);
    for (std::size_t t = 0; t < T; ++t) state.beta[t].assign(bank.task_size(t), 0.0);
    state.zeta = config.zeta0;

    ModelState model;
    std::size_t rejects = 0;
    const double sbar = s > 1.0 ? s : 2.0;

    // A large zeta always passes the acceptance test but crawls (step length
    // ~ 1/zeta), so between regular steps we probe whether zeta/2 still
    // passes and commit the probe when it does. Rejects push zeta back up
    // toward the ceiling; only a reject at the ceiling halves the ceiling.
    double zeta_ceiling = state.zeta;
    std::size_t next_probe = 0;
    const std::size_t probe_interval = 10;
    std::vector<char> active(T, 1);
    Vec task_duals;

    // Per-block estimates of the local Lipschitz constant of q, from observed
    // gradient differences; decayed slowly so a block that leaves a stiff
    // region recovers a long step (the acceptance test catches underestimates).
    Vec lhat_task(T, 0.0);
    double lhat_theta = 0.0;
    auto update_lhat = [&](const TsengState& u, const TsengCandidate& v,
                           const PhiGradient& gu, const PhiGradient& gv) {
        double du = 0.0;
        for (std::size_t m = 0; m < u.theta.size(); ++m)
            du += (v.theta[m] - u.theta[m]) * (v.theta[m] - u.theta[m]);
        for (std::size_t t = 0; t < T; ++t) {
            du += simd::squared_distance(v.beta[t].data(), u.beta[t].data(),
                                         u.beta[t].size());
            const double dl = v.lambda[t] - u.lambda[t];
            du += dl * dl;
        }
        if (du < 1e-24) return;
        const double dn = std::sqrt(du);
        double dth = 0.0;
        for (std::size_t m = 0; m < u.theta.size(); ++m)
            dth += (gv.theta[m] - gu.theta[m]) * (gv.theta[m] - gu.theta[m]);
        lhat_theta = std::max(lhat_theta, std::sqrt(dth) / dn);
        for (std::size_t t = 0; t < T; ++t) {
            const double dgl = gv.lambda[t] - gu.lambda[t];
            const double db = simd::squared_distance(gv.beta[t].data(), gu.beta[t].data(),
                                                     gu.beta[t].size()) +
                              dgl * dgl;
            lhat_task[t] = std::max(lhat_task[t], std::sqrt(db) / dn);
        }
    };

    auto note_lambda = [&] {
        for (double l : state.lambda) model.min_lambda_seen = std::min(model.min_lambda_seen, l);
    };
    note_lambda();

    while (true) {
        const double phi_k = phi(state.theta, state.beta, state.lambda, bank, config.C);
        state.gap = duality_gap(state, bank, config.C, q, s, config.svm_tol, &task_duals);
        model.objective_trace.push_back(phi_k);
        if (state.gap < config.gap_rel_tol * (1.0 + std::abs(phi_k))) break;
        if (state.iter >= config.max_tseng)
            throw SolverError("train_convex: iteration cap exceeded", state.gap);

        // Face pinning: a task whose target weight lambda* (from the per-task
        // duals at the current theta) is essentially zero is pinned to the
        // face lambda_t = 0, beta_t = 0 once its iterate has drifted there.
        // Near that face the curvature of Phi in the block grows without
        // bound, which would force zeta (and so every block's step length)
        // toward zero; on the face itself Phi is smooth. The duality gap is
        // always measured against the full problem, so a wrong pin can only
        // delay convergence, never fake it, and pinned tasks wake up again
        // when their dual value says they matter.
        if (nu_p(task_duals, PParam(config.p)) > 0.0) {
            Vec target;
            if (config.p == kInf) {
                const double dmax =
                    *std::max_element(task_duals.begin(), task_duals.end());
                target.resize(T);
                for (std::size_t t = 0; t < T; ++t)
                    target[t] = task_duals[t] >= 0.99 * dmax ? 1.0 : 0.0;
            } else {
                target = lambda_star_convex(task_duals, PParam(config.p));
            }
            bool woke = false;
            for (std::size_t t = 0; t < T; ++t) {
                if (active[t] && target[t] < 1e-4 && state.lambda[t] < 5e-3) {
                    active[t] = 0;
                    state.lambda[t] = 0.0;
                    std::fill(state.beta[t].begin(), state.beta[t].end(), 0.0);
                    next_probe = state.iter;
                } else if (!active[t] && target[t] > 1e-2) {
                    active[t] = 1;
                    state.lambda[t] = 1e-2;
                    woke = true;
                }
            }
            if (woke) state.lambda = project_lq_ball(state.lambda, q);
        }

        const PhiGradient gu =
            grad_phi(state.theta, state.beta, state.lambda, bank, config.C);
        bool probing = state.iter >= next_probe;
        while (true) {
            TsengState center = state;
            if (probing) center.zeta = state.zeta / 2.0;
            // A block whose local curvature estimate exceeds the shared zeta
            // gets its own stiffer weight, so it cannot force the shared zeta
            // (and every other block's step length) up.
            ZetaBlocks zb;
            zb.theta = std::max(center.zeta, lhat_theta);
            Vec ztask(T);
            for (std::size_t t = 0; t < T; ++t)
                ztask[t] = std::max(center.zeta, lhat_task[t]);
            zb.task = &ztask;
            double zmax = zb.theta;
            for (std::size_t t = 0; t < T; ++t)
                if (active[t]) zmax = std::max(zmax, ztask[t]);
            bool accepted = false;
            TsengCandidate u_next;
            try {
                const TsengCandidate v =
                    solve_prox(center, gu, bank, config.C, q, s, config.qp_tol, &active,
                               zb)
                        .point;
                const PhiGradient gv = grad_phi(v.theta, v.beta, v.lambda, bank, config.C);
                update_lhat(state, v, gu, gv);
                u_next =
                    solve_prox(center, gv, bank, config.C, q, s, config.qp_tol, &active,
                               zb)
                        .point;
                const double lhs =
                    inner_uq(u_next.theta, u_next.beta, u_next.lambda, gv) +
                    bregman_weighted(u_next.theta, u_next.beta, u_next.lambda, center,
                                     sbar, zb);
                const double rhs = inner_uq(v.theta, v.beta, v.lambda, gv);
                // the prox subproblems are solved to ~qp_tol in their own
                // (1/zeta-scaled) units, so lhs carries an O(zeta * qp_tol)
                // error; the test must not reject inside that noise floor
                const double slack = (1e-9 + config.qp_tol * zmax) *
                                     (1.0 + std::abs(rhs));
                accepted = lhs >= rhs - slack;
            } catch (const InputError&) {
                accepted = false;  // step left the domain (a lambda_t hit zero)
            }
            if (accepted) {
                state.theta = std::move(u_next.theta);
                state.beta = std::move(u_next.beta);
                state.lambda = std::move(u_next.lambda);
                state.zeta = center.zeta;
                ++state.iter;
                note_lambda();
                lhat_theta *= 0.98;
                for (std::size_t t = 0; t < T; ++t) lhat_task[t] *= 0.98;
                break;
            }
            if (probing) {
                next_probe = state.iter + probe_interval;  // retry at the unhalved zeta
                probing = false;
                continue;
            }
            if (state.zeta < zeta_ceiling) {
                // zeta was lowered by probes, not by the halving rule; a reject
                // here means the local curvature grew past it, so back off
                // toward the ceiling instead of halving further.
                state.zeta = std::min(zeta_ceiling, 2.0 * state.zeta);
                next_probe = state.iter + probe_interval;
            } else {
                state.zeta /= 2.0;
                zeta_ceiling = state.zeta;
                if (state.zeta < 1e-12)
                    throw SolverError(
                        "train_convex: zeta underflow (non-Lipschitz saddle data)",
                        state.gap);
            }
            if (++rejects > 200)
                throw SolverError("train_convex: too many step rejections", state.gap);
        }
    }

    model.theta = state.theta;
    model.lambda = state.lambda;
    model.p = config.p;
    model.s = config.s;
    model.C = config.C;
    model.outer_iterations = state.iter;
    model.duals.reserve(T);
    model.objective_vector.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        // exact per-task best response at the final theta
        model.duals.push_back(solve_task(bank, t, state.theta, config.C, config.svm_tol));
        model.objective_vector[t] = model.duals.back().objective;
    }
    model.scalar_objective = nu_p(model.objective_vector, PParam(config.p));
    // Report the closed-form optimal lambda for the final objective vector:
    // strictly positive for finite p, whereas the iterate may sit on a face.
    if (config.p < kInf && model.scalar_objective > 0.0)
        model.lambda = lambda_star_convex(model.objective_vector, PParam(config.p));
    return model;
}

namespace {

// shared outer loop for the coordinate-descent branches; with use_lambda=false
// this is the p = 1 block-coordinate scheme
ModelState coordinate_descent(const KernelBank& bank, const SolverConfig& config,
                              bool use_lambda) {
    const std::size_t T = bank.num_tasks();
    const std::size_t M = bank.num_kernels();
    const double s = config.s;
    const double q = use_lambda ? config.p / (1.0 - config.p) : kInf;

    Vec theta = config.warm_theta.empty() ? uniform_ball_point(M, s) : config.warm_theta;
    Vec lambda = use_lambda ? uniform_ball_point(T, q) : Vec(T, 1.0);

    // the descent guard below allows 1e-8 relative per step, so the inner
    // solves must be tighter than that or their noise masks the descent
    const double inner_tol = std::min(config.svm_tol, 1e-9);

    ModelState model;
    double prev_obj = kInf;
    std::vector<TaskDual> duals(T);
    std::size_t k = 0;
    for (; k < config.max_outer; ++k) {
        for (std::size_t t = 0; t < T; ++t)
            duals[t] = solve_task(bank, t, theta, config.C, inner_tol);

        // theta update: minimize sum_m a_m / theta_m over the s-ball, with
        // a_m = sum_t ||f_m^t||^2 / lambda_t and ||f_m^t||^2 = theta_m^2 G_m^t.
        // The minimizer is invariant to a common scaling of the weights, so
        // 1/lambda_t is computed from lambda normalized by its largest
        // component: at small p every lambda_t is tiny (the q-ball has q near
        // 0) and an absolute floor would flatten the ratios between tasks.
        const double lam_max =
            std::max(*std::max_element(lambda.begin(), lambda.end()), 1e-300);
        Vec a(M, 0.0);
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t m = 0; m < M; ++m) {
                const double fnorm2 = theta[m] * theta[m] * duals[t].gram_stats[m];
                if (fnorm2 > 0.0)
                    a[m] += fnorm2 / std::max(lambda[t] / lam_max, 1e-300);
            }
        Vec new_theta = theta;
        if (std::any_of(a.begin(), a.end(), [](double x) { return x > 0.0; })) {
            Vec w(M);
            for (std::size_t m = 0; m < M; ++m) w[m] = std::pow(a[m], 1.0 / (s + 1.0));
            const double scale = nu_p(w, PParam(s));
            for (std::size_t m = 0; m < M; ++m) new_theta[m] = w[m] / scale;
        }

        // per-task objectives at (f_k, theta_{k+1})
        Vec g(T);
        for (std::size_t t = 0; t < T; ++t) {
            double reg = 0.0;
            for (std::size_t m = 0; m < M; ++m) {
                const double fnorm2 = theta[m] * theta[m] * duals[t].gram_stats[m];
                if (new_theta[m] > 0.0)
                    reg += fnorm2 / new_theta[m];
            }
            g[t] = 0.5 * reg + config.C * duals[t].slack_total;
        }
        theta = std::move(new_theta);

        double obj;
        if (use_lambda) {
            if (std::all_of(g.begin(), g.end(), [](double x) { return x == 0.0; })) {
                obj = 0.0;
            } else {
                lambda = lambda_star_nonconvex(g, PParam(config.p));
                obj = nu_p(g, PParam(config.p));
            }
        } else {
            obj = sum(g);
        }
        // relative slack: at small p the scalar objective is a huge power of
        // the per-task values and an absolute test is below double precision
        if (obj > prev_obj + 1e-8 * std::max(1.0, std::abs(prev_obj)))
            throw SolverError("coordinate descent: objective increased", obj - prev_obj);
        model.objective_trace.push_back(obj);
        const bool converged =
            prev_obj != kInf &&
            std::abs(prev_obj - obj) <= config.obj_rel_tol * std::max(1.0, std::abs(prev_obj));
        prev_obj = obj;
        if (converged) {
            ++k;
            break;
        }
    }

    model.theta = theta;
    model.p = config.p;
    model.s = config.s;
    model.C = config.C;
    model.outer_iterations = k;
    model.duals.resize(T);
    model.objective_vector.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        model.duals[t] = solve_task(bank, t, theta, config.C, inner_tol);
        model.objective_vector[t] = model.duals[t].objective;
    }
    model.scalar_objective = nu_p(model.objective_vector, PParam(config.p));
    if (use_lambda)
        model.lambda = lambda_star_nonconvex(model.objective_vector, PParam(config.p));
    else
        model.lambda.assign(T, 1.0);
    return model;
}

}  // namespace

ModelState train_nonconvex(const KernelBank& bank, const SolverConfig& config) {
    if (!(config.p > 0.0 && config.p < 1.0))
        throw InputError("train_nonconvex requires 0 < p < 1");
    return coordinate_descent(bank, config, true);
}

ModelState train_p1(const KernelBank& bank, const SolverConfig& config) {
    if (config.p != 1.0) throw InputError("train_p1 requires p = 1");
    return coordinate_descent(bank, config, false);
}

ModelState train(const KernelBank& bank, const SolverConfig& config) {
    if (config.p < 1.0) return train_nonconvex(bank, config);
    if (config.p == 1.0) return train_p1(bank, config);
    return train_convex(bank, config);
}

std::vector<int> predict(const ModelState& model, const KernelBank& bank,
                         std::size_t task, const Matrix& points) {
    if (task >= bank.num_tasks()) throw InputError("predict: task index out of range");
    const TaskDual& dual = model.duals[task];
    const Vec values =
        decision_values(bank, task, dual.alpha, dual.bias, model.theta, points);
    std::vector<int> labels(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) labels[i] = values[i] >= 0.0 ? 1 : -1;
    return labels;
}

}  // namespace pmkl
