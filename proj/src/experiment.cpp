#include "pmkl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <random>
#include <sstream>

namespace pmkl {

namespace {

std::string fmt(double v) {
    if (v == kInf) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join(const Vec& v, char sep = ',') {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += fmt(v[i]);
    }
    return out;
}

void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng() % i]);
}

double binary_accuracy(const ModelState& model, const KernelBank& bank, std::size_t t,
                       const BinaryTask& task, const std::vector<std::size_t>& rows) {
    if (rows.empty()) return std::nan("");
    const std::size_t d = task.features.cols();
    Matrix pts(rows.size(), d);
    for (std::size_t r = 0; r < rows.size(); ++r)
        std::copy(task.features.row(rows[r]), task.features.row(rows[r]) + d, pts.row(r));
    const std::vector<int> pred = predict(model, bank, t, pts);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (pred[r] == task.labels[rows[r]]) ++hits;
    return static_cast<double>(hits) / rows.size();
}

/// Majority vote over pairwise classifiers on the given source rows.
double vote_accuracy(const ModelState& model, const KernelBank& bank, const TaskGroup& group,
                     const Dataset& source, const std::vector<std::size_t>& rows,
                     const std::vector<int>& truth) {
    if (rows.empty()) return std::nan("");
    const std::size_t d = source.features.cols();
    Matrix pts(rows.size(), d);
    for (std::size_t r = 0; r < rows.size(); ++r)
        std::copy(source.features.row(rows[r]), source.features.row(rows[r]) + d, pts.row(r));

    std::map<int, std::size_t> class_slot;
    for (std::size_t c = 0; c < group.class_ids.size(); ++c)
        class_slot[group.class_ids[c]] = c;
    std::vector<std::vector<int>> votes(rows.size(),
                                        std::vector<int>(group.class_ids.size(), 0));
    for (std::size_t t = 0; t < group.tasks.size(); ++t) {
        const std::vector<int> pred = predict(model, bank, t, pts);
        const std::size_t pos = class_slot.at(group.tasks[t].class_pos);
        const std::size_t neg = class_slot.at(group.tasks[t].class_neg);
        for (std::size_t r = 0; r < rows.size(); ++r)
            ++votes[r][pred[r] > 0 ? pos : neg];
    }
    std::size_t hits = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < votes[r].size(); ++c)
            if (votes[r][c] > votes[r][best]) best = c;  // ties keep the lowest class id
        if (group.class_ids[best] == truth[r]) ++hits;
    }
    return static_cast<double>(hits) / rows.size();
}

Vec eta_diagnostic(const Vec& g, double p) {
    Vec eta(g.size(), 0.0);
    if (p == kInf) {
        std::size_t best = 0;
        for (std::size_t t = 1; t < g.size(); ++t)
            if (g[t] > g[best]) best = t;
        eta[best] = 1.0;
        return eta;
    }
    double total = 0.0;
    for (std::size_t t = 0; t < g.size(); ++t) {
        eta[t] = std::pow(std::max(g[t], 1e-300), p - 1.0);
        total += eta[t];
    }
    if (total > 0.0)
        for (double& v : eta) v /= total;
    return eta;
}

SolverConfig make_solver_config(const ExperimentConfig& cfg, double p, double C) {
    SolverConfig sc;
    sc.p = p;
    sc.s = cfg.s;
    sc.C = C;
    sc.svm_tol = cfg.svm_tol;
    sc.qp_tol = cfg.qp_tol;
    sc.gap_rel_tol = cfg.gap_rel_tol;
    sc.obj_rel_tol = cfg.obj_rel_tol;
    return sc;
}

/// Fold ids for the training pool, stratified per class, deterministic.
std::vector<int> assign_folds(const std::vector<std::size_t>& pool,
                              const std::vector<int>& pool_labels, std::size_t folds,
                              std::uint64_t seed, std::size_t universe) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t k = 0; k < pool.size(); ++k) by_class[pool_labels[k]].push_back(pool[k]);
    std::vector<int> fold_of(universe, -1);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (auto& [cls, rows] : by_class) {
        shuffle_indices(rows, rng);
        for (std::size_t k = 0; k < rows.size(); ++k)
            fold_of[rows[k]] = static_cast<int>(k % folds);
    }
    return fold_of;
}

}  // namespace

Vec default_p_grid() {
    return {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, kInf};
}

MulticlassEval evaluate_multiclass(const ModelState& model, const KernelBank& bank,
                                   const TaskGroup& group, const Dataset& source) {
    MulticlassEval out;
    out.task_accuracy.resize(group.tasks.size());
    for (std::size_t t = 0; t < group.tasks.size(); ++t)
        out.task_accuracy[t] =
            binary_accuracy(model, bank, t, group.tasks[t], group.tasks[t].test_idx);

    if (!group.class_ids.empty()) {
        out.overall = vote_accuracy(model, bank, group, source, group.test_rows,
                                    group.test_multiclass_labels);
    } else {
        double total = 0.0;
        std::size_t n = 0;
        for (double a : out.task_accuracy)
            if (!std::isnan(a)) {
                total += a;
                ++n;
            }
        out.overall = n ? total / n : std::nan("");
    }
    return out;
}

double cross_validate_C(const ExperimentConfig& config, const TaskGroup& group,
                        const Dataset& source, const Vec& candidates) {
    if (candidates.empty()) throw InputError("cross_validate_C: no candidates");
    if (candidates.size() == 1) return candidates[0];
    if (config.cv_folds < 2) throw InputError("cross_validate_C: need at least 2 folds");

    const bool ovo = !group.class_ids.empty();

    // Fold assignment over the training pool. For OvO the pool lives in source
    // row space; for direct multi-task groups each task is folded on its own.
    std::vector<int> fold_of;
    std::vector<std::vector<int>> task_fold_of(group.tasks.size());
    if (ovo) {
        std::vector<bool> is_test(source.labels.size(), false);
        for (std::size_t r : group.test_rows) is_test[r] = true;
        std::vector<std::size_t> pool;
        std::vector<int> pool_labels;
        for (std::size_t r = 0; r < source.labels.size(); ++r)
            if (!is_test[r]) {
                pool.push_back(r);
                pool_labels.push_back(source.labels[r]);
            }
        fold_of = assign_folds(pool, pool_labels, config.cv_folds, group.seed,
                               source.labels.size());
    } else {
        for (std::size_t t = 0; t < group.tasks.size(); ++t) {
            const BinaryTask& task = group.tasks[t];
            std::vector<int> labels;
            for (std::size_t r : task.train_idx) labels.push_back(task.labels[r]);
            task_fold_of[t] = assign_folds(task.train_idx, labels, config.cv_folds,
                                           group.seed + t, task.features.rows());
        }
    }

    double best_C = candidates[0];
    double best_score = -kInf;
    Vec sorted_C(candidates);
    std::sort(sorted_C.begin(), sorted_C.end());
    for (double C : sorted_C) {
        double total = 0.0;
        std::size_t used_folds = 0;
        for (std::size_t f = 0; f < config.cv_folds; ++f) {
            // Carve fold f out of each task's training rows.
            std::vector<TaskData> sub(group.tasks.size());
            std::vector<std::vector<std::size_t>> held(group.tasks.size());
            bool viable = true;
            for (std::size_t t = 0; t < group.tasks.size() && viable; ++t) {
                const BinaryTask& task = group.tasks[t];
                const std::size_t d = task.features.cols();
                std::vector<std::size_t> keep;
                for (std::size_t r : task.train_idx) {
                    const int fr = ovo ? fold_of[task.source_rows[r]]
                                       : task_fold_of[t][r];
                    (fr == static_cast<int>(f) ? held[t] : keep).push_back(r);
                }
                bool pos = false, neg = false;
                for (std::size_t r : keep) (task.labels[r] > 0 ? pos : neg) = true;
                if (!pos || !neg || held[t].empty()) {
                    viable = false;
                    break;
                }
                sub[t].features = Matrix(keep.size(), d);
                sub[t].labels.reserve(keep.size());
                for (std::size_t k = 0; k < keep.size(); ++k) {
                    std::copy(task.features.row(keep[k]), task.features.row(keep[k]) + d,
                              sub[t].features.row(k));
                    sub[t].labels.push_back(task.labels[keep[k]]);
                }
            }
            if (!viable) continue;

            double score;
            try {
                const KernelBank bank = build_bank(sub, config.kernel_specs, config.workers);
                const ModelState model = train(bank, make_solver_config(config, 1.0, C));
                if (ovo) {
                    std::vector<std::size_t> rows;
                    std::vector<int> truth;
                    for (std::size_t r = 0; r < source.labels.size(); ++r)
                        if (fold_of[r] == static_cast<int>(f)) {
                            rows.push_back(r);
                            truth.push_back(source.labels[r]);
                        }
                    score = vote_accuracy(model, bank, group, source, rows, truth);
                } else {
                    double sum = 0.0;
                    for (std::size_t t = 0; t < group.tasks.size(); ++t)
                        sum += binary_accuracy(model, bank, t, group.tasks[t], held[t]);
                    score = sum / group.tasks.size();
                }
            } catch (const SolverError&) {
                continue;
            }
            if (!std::isnan(score)) {
                total += score;
                ++used_folds;
            }
        }
        if (used_folds == 0) {
            if (C == sorted_C.back() && best_score == -kInf)
                throw InputError("cross_validate_C: every fold lost a class");
            continue;
        }
        const double mean = total / used_folds;
        if (mean > best_score) {
            best_score = mean;
            best_C = C;
        }
    }
    if (best_score == -kInf) throw InputError("cross_validate_C: every fold lost a class");
    return best_C;
}

SweepReport run_sweep(const ExperimentConfig& config) {
    if (config.p_grid.empty()) throw InputError("run_sweep: empty p grid");
    for (double p : config.p_grid)
        if (!(p > 0.0)) throw InputError("run_sweep: p grid values must be positive");
    if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0))
        throw InputError("run_sweep: train_fraction must lie in (0, 1)");
    if (config.repeats < 1) throw InputError("run_sweep: repeats must be >= 1");
    if (config.data_paths.empty()) throw InputError("run_sweep: no dataset given");

    auto load = [&](const std::string& path) {
        Dataset d = config.format == "sparse"
                        ? load_sparse(path)
                        : load_dense(path, config.label_column, config.has_header);
        if (!config.class_whitelist.empty()) {
            Dataset kept;
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < d.labels.size(); ++i)
                if (std::find(config.class_whitelist.begin(), config.class_whitelist.end(),
                              d.labels[i]) != config.class_whitelist.end()) {
                    rows.emplace_back(d.features.row(i), d.features.row(i) + d.features.cols());
                    kept.labels.push_back(d.labels[i]);
                }
            if (rows.empty()) throw InputError("class whitelist removed every sample");
            kept.features = Matrix(rows.size(), d.features.cols());
            for (std::size_t i = 0; i < rows.size(); ++i)
                std::copy(rows[i].begin(), rows[i].end(), kept.features.row(i));
            d = std::move(kept);
        }
        return scale_01(d).first;
    };

    std::vector<Dataset> datasets;
    for (const std::string& path : config.data_paths) datasets.push_back(load(path));
    const Dataset& primary = datasets[0];

    SweepReport report;
    report.config = config;
    const std::size_t P = config.p_grid.size();
    report.cells.resize(config.repeats * P);
    report.chosen_C.resize(config.repeats);

    for (std::size_t rep = 0; rep < config.repeats; ++rep) {
        const std::uint64_t split_seed = config.seed + rep;
        const TaskGroup group =
            config.multitask
                ? build_multitask(datasets, config.train_fraction, split_seed)
                : build_ovo(primary, config.train_fraction, config.per_class_equal, split_seed);
        const KernelBank bank =
            build_bank(training_tasks(group), config.kernel_specs, config.workers);

        double C = config.C;
        if (config.C_grid.size() >= 2)
            C = cross_validate_C(config, group, primary, config.C_grid);
        else if (config.C_grid.size() == 1)
            C = config.C_grid[0];
        report.chosen_C[rep] = C;

        auto run_cell = [&](std::size_t pi) {
            SweepCell& cell = report.cells[rep * P + pi];
            cell.p = config.p_grid[pi];
            cell.repeat = rep;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const ModelState model = train(bank, make_solver_config(config, cell.p, C));
                const MulticlassEval eval = evaluate_multiclass(model, bank, group, primary);
                cell.objective = model.objective_vector;
                cell.task_accuracy = eval.task_accuracy;
                cell.overall_accuracy = eval.overall;
                cell.theta = model.theta;
                cell.lambda = model.lambda;
                cell.eta = eta_diagnostic(model.objective_vector, cell.p);
                cell.iterations = model.outer_iterations;
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
            }
            cell.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        };

        const int workers = std::max(1, config.workers);
        if (workers == 1 || P == 1) {
            for (std::size_t pi = 0; pi < P; ++pi) run_cell(pi);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::future<void>> pool;
            for (int w = 0; w < std::min<int>(workers, static_cast<int>(P)); ++w)
                pool.push_back(std::async(std::launch::async, [&] {
                    for (std::size_t pi = next++; pi < P; pi = next++) run_cell(pi);
                }));
            for (auto& f : pool) f.get();
        }

        // DCR relative to the p=1 cell of the same repeat.
        const SweepCell* base = nullptr;
        for (std::size_t pi = 0; pi < P; ++pi)
            if (config.p_grid[pi] == 1.0 && report.cells[rep * P + pi].ok)
                base = &report.cells[rep * P + pi];
        for (std::size_t pi = 0; pi < P; ++pi) {
            SweepCell& cell = report.cells[rep * P + pi];
            if (!cell.ok) continue;
            cell.dcr.assign(cell.task_accuracy.size(), std::nan(""));
            if (base)
                for (std::size_t t = 0; t < cell.task_accuracy.size(); ++t)
                    cell.dcr[t] = cell.task_accuracy[t] - base->task_accuracy[t];
        }
    }

    if (std::none_of(report.cells.begin(), report.cells.end(),
                     [](const SweepCell& c) { return c.ok; }))
        throw SolverError("run_sweep: every grid cell failed", kInf);

    if (!config.out_dir.empty()) emit_report(report, config.out_dir);
    return report;
}

void emit_report(const SweepReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());

    auto open = [&](const char* name) {
        std::ofstream os(fs::path(dir) / name);
        if (!os) throw InputError(std::string("cannot write ") + name + " in " + dir);
        return os;
    };
    const ExperimentConfig& cfg = report.config;

    {
        std::ofstream os = open("objectives_vs_p.csv");
        os << "p,repeat,task,objective,iterations\n";
        for (const SweepCell& c : report.cells) {
            if (!c.ok) continue;
            for (std::size_t t = 0; t < c.objective.size(); ++t)
                os << fmt(c.p) << "," << c.repeat << "," << t << "," << fmt(c.objective[t])
                   << "," << c.iterations << "\n";
        }
    }
    {
        std::ofstream os = open("dcr_vs_p.csv");
        os << "p,repeat,task,accuracy,dcr\n";
        for (const SweepCell& c : report.cells) {
            if (!c.ok) continue;
            for (std::size_t t = 0; t < c.task_accuracy.size(); ++t)
                os << fmt(c.p) << "," << c.repeat << "," << t << ","
                   << fmt(c.task_accuracy[t]) << "," << fmt(c.dcr[t]) << "\n";
        }
    }
    {
        std::ofstream os = open("accuracy_table.csv");
        os << "p,repeat,task,accuracy,overall\n";
        for (const SweepCell& c : report.cells) {
            if (!c.ok) continue;
            for (std::size_t t = 0; t < c.task_accuracy.size(); ++t)
                os << fmt(c.p) << "," << c.repeat << "," << t << ","
                   << fmt(c.task_accuracy[t]) << "," << fmt(c.overall_accuracy) << "\n";
            os << fmt(c.p) << "," << c.repeat << ",overall," << fmt(c.overall_accuracy)
               << "," << fmt(c.overall_accuracy) << "\n";
        }
    }
    {
        std::ofstream os = open("theta_lambda_trace.csv");
        os << "p,repeat,kind,index,value\n";
        for (const SweepCell& c : report.cells) {
            if (!c.ok) continue;
            for (std::size_t m = 0; m < c.theta.size(); ++m)
                os << fmt(c.p) << "," << c.repeat << ",theta," << m << "," << fmt(c.theta[m])
                   << "\n";
            for (std::size_t t = 0; t < c.lambda.size(); ++t)
                os << fmt(c.p) << "," << c.repeat << ",lambda," << t << ","
                   << fmt(c.lambda[t]) << "\n";
            for (std::size_t t = 0; t < c.eta.size(); ++t)
                os << fmt(c.p) << "," << c.repeat << ",eta," << t << "," << fmt(c.eta[t])
                   << "\n";
        }
    }

    bool any_error = false;
    for (const SweepCell& c : report.cells) any_error |= !c.ok;
    if (any_error) {
        std::ofstream os = open("errors.csv");
        os << "p,repeat,error\n";
        for (const SweepCell& c : report.cells) {
            if (c.ok) continue;
            std::string msg = c.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            os << fmt(c.p) << "," << c.repeat << "," << msg << "\n";
        }
    }
    {
        // Wall-clock times are run-dependent, so they live outside the
        // reproducible CSV set.
        std::ofstream os = open("timing.txt");
        for (const SweepCell& c : report.cells)
            os << fmt(c.p) << " " << c.repeat << " " << fmt(c.wall_seconds) << "\n";
    }
    {
        std::ofstream os = open("manifest.txt");
        os << "# paretomkl sweep manifest (usable as --config)\n";
        os << "version=1\n";
        std::string paths;
        for (std::size_t i = 0; i < cfg.data_paths.size(); ++i)
            paths += (i ? ";" : "") + cfg.data_paths[i];
        os << "data=" << paths << "\n";
        os << "format=" << cfg.format << "\n";
        os << "label_col=" << cfg.label_column << "\n";
        os << "header=" << (cfg.has_header ? 1 : 0) << "\n";
        os << "multitask=" << (cfg.multitask ? 1 : 0) << "\n";
        os << "per_class_equal=" << (cfg.per_class_equal ? 1 : 0) << "\n";
        if (!cfg.class_whitelist.empty()) {
            os << "class_whitelist=";
            for (std::size_t i = 0; i < cfg.class_whitelist.size(); ++i)
                os << (i ? "," : "") << cfg.class_whitelist[i];
            os << "\n";
        }
        os << "train_fraction=" << fmt(cfg.train_fraction) << "\n";
        os << "repeats=" << cfg.repeats << "\n";
        os << "seed=" << cfg.seed << "\n";
        os << "p_grid=" << join(cfg.p_grid) << "\n";
        os << "s=" << fmt(cfg.s) << "\n";
        os << "C=" << fmt(cfg.C) << "\n";
        if (!cfg.C_grid.empty()) os << "cv_C=" << join(cfg.C_grid) << "\n";
        os << "cv_folds=" << cfg.cv_folds << "\n";
        os << "svm_tol=" << fmt(cfg.svm_tol) << "\n";
        os << "qp_tol=" << fmt(cfg.qp_tol) << "\n";
        os << "gap_tol=" << fmt(cfg.gap_rel_tol) << "\n";
        os << "obj_tol=" << fmt(cfg.obj_rel_tol) << "\n";
        os << "dominance_tol=" << fmt(cfg.dominance_tol) << "\n";
        os << "workers=" << cfg.workers << "\n";
        for (std::size_t r = 0; r < report.chosen_C.size(); ++r)
            os << "# chosen C, repeat " << r << ": " << fmt(report.chosen_C[r]) << "\n";
    }
}

double paired_t_statistic(const Vec& a, const Vec& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw InputError("paired_t_statistic: need two equal-length samples, n >= 2");
    const std::size_t n = a.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i] - mean;
        var += d * d;
    }
    var /= (n - 1);
    if (var == 0.0) return mean == 0.0 ? 0.0 : (mean > 0 ? kInf : -kInf);
    return mean / std::sqrt(var / n);
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InputError("cannot open config file: " + path);
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;

    auto parse_vec = [](const std::string& text, std::size_t lno) {
        Vec out;
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok == "inf")
                out.push_back(kInf);
            else
                try {
                    out.push_back(std::stod(tok));
                } catch (const std::exception&) {
                    throw ParseError("bad numeric list entry '" + tok + "'", lno);
                }
        }
        return out;
    };

    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::size_t eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos) throw ParseError("expected key=value", lineno);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "version") {
                // informational
            } else if (key == "data") {
                cfg.data_paths.clear();
                std::stringstream ss(val);
                std::string tok;
                while (std::getline(ss, tok, ';'))
                    if (!tok.empty()) cfg.data_paths.push_back(tok);
            } else if (key == "format") {
                if (val != "dense" && val != "sparse")
                    throw ParseError("format must be dense or sparse", lineno);
                cfg.format = val;
            } else if (key == "label_col") {
                cfg.label_column = std::stoi(val);
            } else if (key == "header") {
                cfg.has_header = std::stoi(val) != 0;
            } else if (key == "multitask") {
                cfg.multitask = std::stoi(val) != 0;
            } else if (key == "per_class_equal") {
                cfg.per_class_equal = std::stoi(val) != 0;
            } else if (key == "class_whitelist") {
                cfg.class_whitelist.clear();
                for (double v : parse_vec(val, lineno))
                    cfg.class_whitelist.push_back(static_cast<int>(v));
            } else if (key == "train_fraction") {
                cfg.train_fraction = std::stod(val);
            } else if (key == "repeats") {
                cfg.repeats = std::stoul(val);
            } else if (key == "seed") {
                cfg.seed = std::stoull(val);
            } else if (key == "p_grid") {
                cfg.p_grid = parse_vec(val, lineno);
            } else if (key == "s") {
                cfg.s = std::stod(val);
            } else if (key == "C") {
                cfg.C = std::stod(val);
            } else if (key == "cv_C") {
                cfg.C_grid = parse_vec(val, lineno);
            } else if (key == "cv_folds") {
                cfg.cv_folds = std::stoul(val);
            } else if (key == "svm_tol") {
                cfg.svm_tol = std::stod(val);
            } else if (key == "qp_tol") {
                cfg.qp_tol = std::stod(val);
            } else if (key == "gap_tol") {
                cfg.gap_rel_tol = std::stod(val);
            } else if (key == "obj_tol") {
                cfg.obj_rel_tol = std::stod(val);
            } else if (key == "dominance_tol") {
                cfg.dominance_tol = std::stod(val);
            } else if (key == "workers") {
                cfg.workers = std::stoi(val);
            } else if (key == "out") {
                cfg.out_dir = val;
            } else {
                throw ParseError("unknown config key '" + key + "'", lineno);
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError("bad value for key '" + key + "': " + val, lineno);
        }
    }
    return cfg;
}

}  // namespace pmkl
