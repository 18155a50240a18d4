#ifndef PMKL_EXPERIMENT_HPP
#define PMKL_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pmkl/data.hpp"
#include "pmkl/train.hpp"

namespace pmkl {

Vec default_p_grid();

struct ExperimentConfig {
    std::vector<std::string> data_paths;
    std::string format = "dense";  // "dense" | "sparse"
    int label_column = -1;
    bool has_header = false;
    bool multitask = false;  // one binary task per file instead of OvO
    bool per_class_equal = false;
    std::vector<int> class_whitelist;  // empty = keep all classes

    double train_fraction = 0.5;
    std::size_t repeats = 1;
    std::uint64_t seed = 1;

    Vec p_grid = default_p_grid();
    double s = 1.1;
    double C = 1.0;
    Vec C_grid;  // >= 2 entries turn on cross-validation at p = 1
    std::size_t cv_folds = 5;
    std::vector<KernelSpec> kernel_specs = default_bank_specs();

    double svm_tol = 1e-6;
    double qp_tol = 1e-6;
    double gap_rel_tol = 1e-3;
    double obj_rel_tol = 1e-5;
    double dominance_tol = 1e-3;

    int workers = 1;
    std::string out_dir;
};

/// One (p, repeat) grid cell of a sweep.
struct SweepCell {
    double p = 1.0;
    std::size_t repeat = 0;
    bool ok = false;
    std::string error;
    Vec objective;       // per-task g
    Vec task_accuracy;   // per-task test accuracy
    double overall_accuracy = 0.0;
    Vec dcr;             // task accuracy minus the p=1 baseline, same repeat
    Vec theta;
    Vec lambda;
    Vec eta;             // eta^t proportional to (g^t)^(p-1), normalized to sum 1
    double wall_seconds = 0.0;
    std::size_t iterations = 0;
};

struct SweepReport {
    ExperimentConfig config;
    std::vector<SweepCell> cells;  // repeat-major, then p-grid order
    Vec chosen_C;                  // one per repeat
};

struct MulticlassEval {
    Vec task_accuracy;
    double overall = 0.0;
};

/// Per-task binary accuracy on each task's held-out rows plus, for OvO groups,
/// the majority-vote multi-class accuracy over the shared test rows (ties go
/// to the lowest class id). For direct multi-task groups the overall score is
/// the mean task accuracy.
MulticlassEval evaluate_multiclass(const ModelState& model, const KernelBank& bank,
                                   const TaskGroup& group, const Dataset& source);

/// k-fold selection on the training split at p = 1, maximizing mean overall
/// accuracy; ties go to the smaller C. Single-class folds are skipped.
double cross_validate_C(const ExperimentConfig& config, const TaskGroup& group,
                        const Dataset& source, const Vec& candidates);

SweepReport run_sweep(const ExperimentConfig& config);

/// objectives_vs_p.csv, dcr_vs_p.csv, accuracy_table.csv,
/// theta_lambda_trace.csv, manifest.txt (+ errors.csv and timing.txt when
/// applicable). All CSVs are byte-reproducible for a fixed config.
void emit_report(const SweepReport& report, const std::string& dir);

/// Two-sided paired t statistic for downstream significance testing.
double paired_t_statistic(const Vec& a, const Vec& b);

/// Line-oriented key=value config files; '#' starts a comment.
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace pmkl

#endif
