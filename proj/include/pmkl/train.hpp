#ifndef PMKL_TRAIN_HPP
#define PMKL_TRAIN_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "pmkl/data.hpp"
#include "pmkl/kernels.hpp"
#include "pmkl/project.hpp"
#include "pmkl/scalarize.hpp"
#include "pmkl/svm.hpp"
#include "pmkl/types.hpp"

namespace pmkl {

struct SolverConfig {
    double p = 1.0;  // kInf for the minimax limit
    double s = 1.1;
    double C = 1.0;
    double svm_tol = 1e-6;
    double qp_tol = 1e-6;
    double gap_rel_tol = 1e-3;      // Tseng: stop when gap < tol * (1 + |Phi|)
    double obj_rel_tol = 1e-5;      // coordinate descent: relative objective change
    std::size_t max_outer = 200;    // coordinate descent outer cap
    std::size_t max_tseng = 2000;   // Tseng accepted-iteration cap
    double zeta0 = 1e3;
    Vec warm_theta;                 // optional warm start for theta (off by default)
};

struct ModelState {
    Vec theta;
    Vec lambda;
    std::vector<TaskDual> duals;
    double p = 1.0;
    double s = 1.1;
    double C = 1.0;
    Vec objective_vector;
    double scalar_objective = 0.0;
    std::size_t outer_iterations = 0;
    Vec objective_trace;  // one scalar objective per outer iteration
    // smallest lambda component over every accepted iterate (convex branch
    // diagnostic; stays +inf for the coordinate-descent branches)
    double min_lambda_seen = kInf;
};

struct TsengState {
    Vec theta;
    std::vector<Vec> beta;
    Vec lambda;
    double zeta = 1e3;
    std::size_t iter = 0;
    double gap = kInf;
};

/// Phi(theta, beta, lambda) = sum_t (beta'1 - (1/(2 lambda_t)) beta'Y'(sum theta_m K_m)Y beta).
double phi(const Vec& theta, const std::vector<Vec>& beta, const Vec& lambda,
           const KernelBank& bank, double C);

struct PhiGradient {
    Vec theta;
    std::vector<Vec> beta;
    Vec lambda;
};

PhiGradient grad_phi(const Vec& theta, const std::vector<Vec>& beta, const Vec& lambda,
                     const KernelBank& bank, double C);

struct TsengCandidate {
    Vec theta;
    std::vector<Vec> beta;
    Vec lambda;
};

/// One proximal step: minimize u'q(u_k) + zeta*D(u, u_k) over the feasible set.
TsengCandidate tseng_inner_step(const TsengState& state, const KernelBank& bank,
                                double C, double q, double s, double qp_tol = 1e-6);

/// The acceptance test of the extragradient scheme: solve the same prox problem
/// linearized at v_k; accept the minimizer as u_{k+1} if its value reaches
/// v_k'q(v_k), otherwise halve zeta.
std::pair<bool, TsengState> tseng_check_and_update(const TsengState& state,
                                                   const TsengCandidate& v,
                                                   const KernelBank& bank, double C,
                                                   double q, double s, double qp_tol = 1e-6);

/// max over (beta, lambda) of Phi at theta_k minus min over theta of Phi at
/// (beta_k, lambda_k). If task_duals is non-null it receives the per-task
/// SVM dual optima at theta_k (clamped at zero).
double duality_gap(const TsengState& state, const KernelBank& bank, double C,
                   double q, double s, double svm_tol = 1e-6,
                   Vec* task_duals = nullptr);

/// Algorithm for p >= 1 (Tseng's extragradient scheme on the saddle problem).
ModelState train_convex(const KernelBank& bank, const SolverConfig& config);

/// Group-coordinate descent for p in (0, 1).
ModelState train_nonconvex(const KernelBank& bank, const SolverConfig& config);

/// Block-coordinate descent for p = 1 (SVM solves alternated with the
/// closed-form theta update).
ModelState train_p1(const KernelBank& bank, const SolverConfig& config);

/// Dispatch on p.
ModelState train(const KernelBank& bank, const SolverConfig& config);

std::vector<int> predict(const ModelState& model, const KernelBank& bank,
                         std::size_t task, const Matrix& points);

/// Deployment context saved alongside the model: the feature scaling applied
/// before training (empty = identity) and, per task, the original class ids
/// behind the +1/-1 encoding (empty = raw +1/-1 labels).
struct ModelMeta {
    ScalingRecord scaling;
    std::vector<std::pair<int, int>> task_classes;  // (positive, negative)
};

/// Versioned self-describing text model format; reals round-trip exactly.
void save_model(const ModelState& model, const KernelBank& bank, std::ostream& os);
void save_model(const ModelState& model, const KernelBank& bank, const ModelMeta& meta,
                std::ostream& os);
struct LoadedModel {
    ModelState state;
    KernelBank bank;
    ModelMeta meta;
};
LoadedModel load_model(std::istream& is);
void save_model_file(const ModelState& model, const KernelBank& bank, const std::string& path);
void save_model_file(const ModelState& model, const KernelBank& bank, const ModelMeta& meta,
                     const std::string& path);
LoadedModel load_model_file(const std::string& path);

}  // namespace pmkl

#endif
