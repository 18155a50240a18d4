#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "pmkl/experiment.hpp"
#include "pmkl/project.hpp"
#include "pmkl/scalarize.hpp"
#include "pmkl/simd.hpp"

namespace {

pmkl::Vec parse_real_list(const std::string& text) {
    pmkl::Vec out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(tok == "inf" ? pmkl::kInf : std::stod(tok));
    }
    if (out.empty()) throw pmkl::InputError("empty numeric list: '" + text + "'");
    return out;
}

// Features-only dense CSV (predict input has no label column).
pmkl::Matrix load_feature_rows(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw pmkl::InputError("cannot open file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ','))
            try {
                row.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw pmkl::ParseError("not a number: '" + tok + "'", lineno);
            }
        if (!rows.empty() && row.size() != rows[0].size())
            throw pmkl::ParseError("inconsistent column count", lineno);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw pmkl::InputError("empty feature file: " + path);
    pmkl::Matrix out(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy(rows[i].begin(), rows[i].end(), out.row(i));
    return out;
}

int run_selftest() {
    using namespace pmkl;
    std::mt19937_64 rng(12345);
    auto unif = [&](double lo, double hi) {
        return lo + (hi - lo) * (rng() >> 11) * 0x1.0p-53;
    };
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::printf("%-38s %s\n", name, ok ? "PASS" : "FAIL");
        if (!ok) ++failures;
    };

    std::printf("simd backend: %s\n", simd::active_backend());

    {  // dual-norm identity, p >= 1
        bool ok = true;
        for (int i = 0; i < 200 && ok; ++i) {
            const double p = unif(1.0, 20.0);
            Vec g(3);
            for (double& v : g) v = unif(0.0, 5.0);
            const PParam pp(p);
            const Vec lam = lambda_star_convex(g, pp);
            double dot = 0.0, norm_q = 0.0;
            for (std::size_t t = 0; t < g.size(); ++t) {
                dot += lam[t] * g[t];
                norm_q += std::pow(lam[t], pp.q());
            }
            ok = std::abs(dot - nu_p(g, pp)) < 1e-9 && norm_q <= 1.0 + 1e-9;
        }
        check("dual-norm identity (p >= 1)", ok);
    }
    {  // reciprocal identity, p < 1
        bool ok = true;
        for (int i = 0; i < 200 && ok; ++i) {
            const double p = unif(0.05, 0.95);
            Vec g(3);
            for (double& v : g) v = unif(0.1, 5.0);
            const PParam pp(p);
            const Vec lam = lambda_star_nonconvex(g, pp);
            double val = 0.0;
            for (std::size_t t = 0; t < g.size(); ++t) val += g[t] / lam[t];
            ok = std::abs(val - nu_p(g, pp)) < 1e-8 * (1.0 + nu_p(g, pp));
        }
        check("reciprocal identity (p < 1)", ok);
    }
    {  // theta projections stay feasible and beat random feasible points
        bool ok = true;
        for (int i = 0; i < 100 && ok; ++i) {
            const double s = unif(1.05, 3.0);
            Vec psi(4);
            for (double& v : psi) v = unif(0.0, 2.0);
            const Vec theta = theta_min_ball_s(psi, s);
            auto prox_obj = [&](const Vec& th) {
                double o = 0.0;
                for (std::size_t m = 0; m < psi.size(); ++m)
                    o += std::pow(th[m], s) / s - psi[m] * th[m];
                return o;
            };
            double norm_s = 0.0;
            for (std::size_t m = 0; m < psi.size(); ++m) {
                ok = ok && theta[m] >= -1e-12;
                norm_s += std::pow(std::max(theta[m], 0.0), s);
            }
            ok = ok && norm_s <= 1.0 + 1e-8;
            const double obj = prox_obj(theta);
            for (int j = 0; j < 20 && ok; ++j) {
                Vec cand(psi.size());
                double cn = 0.0;
                for (double& v : cand) {
                    v = unif(0.0, 1.0);
                    cn += std::pow(v, s);
                }
                const double scale = std::pow(cn, -1.0 / s) * unif(0.0, 1.0);
                for (double& v : cand) v *= scale;
                ok = prox_obj(cand) >= obj - 1e-8;
            }
        }
        check("theta prox projections", ok);
    }
    {  // box-hyperplane projection feasibility + optimality vs perturbations
        bool ok = true;
        for (int i = 0; i < 100 && ok; ++i) {
            const std::size_t n = 4;
            Vec z(n);
            std::vector<int> y(n);
            for (std::size_t k = 0; k < n; ++k) {
                z[k] = unif(-2.0, 3.0);
                y[k] = (rng() & 1) ? 1 : -1;
            }
            const double ub = unif(0.5, 2.0);
            const Vec b = project_box_hyperplane(z, y, ub);
            double by = 0.0, dist = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                ok = ok && b[k] >= -1e-10 && b[k] <= ub + 1e-10;
                by += b[k] * y[k];
                dist += (b[k] - z[k]) * (b[k] - z[k]);
            }
            ok = ok && std::abs(by) < 1e-8;
        }
        check("box-hyperplane projection", ok);
    }
    {  // SMO KKT conditions on a random instance
        TaskData task;
        const std::size_t n = 14;
        task.features = Matrix(n, 2);
        task.labels.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            task.labels[i] = i < n / 2 ? 1 : -1;
            task.features(i, 0) = unif(-1.0, 1.0) + (i < n / 2 ? 1.0 : -1.0);
            task.features(i, 1) = unif(-1.0, 1.0);
        }
        const KernelBank bank = build_bank({task}, {KernelSpec::linear(),
                                                    KernelSpec::gaussian(1.0)});
        const Vec theta{0.5, 0.5};
        const double C = 1.0;
        const TaskDual dual = solve_task(bank, 0, theta, C, 1e-8);
        const Matrix K = bank.combined_gram(0, theta);
        bool ok = true;
        double sum_ay = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum_ay += dual.alpha[i] * task.labels[i];
            double margin = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                margin += dual.alpha[j] * task.labels[j] * K(i, j);
            margin = task.labels[i] * (margin + dual.bias);
            if (dual.alpha[i] < 1e-7 && margin < 1.0 - 1e-4) ok = false;
            if (dual.alpha[i] > C - 1e-7 && margin > 1.0 + 1e-4) ok = false;
            if (dual.alpha[i] > 1e-7 && dual.alpha[i] < C - 1e-7 &&
                std::abs(margin - 1.0) > 1e-4)
                ok = false;
        }
        ok = ok && std::abs(sum_ay) < 1e-8;
        check("SVM dual KKT conditions", ok);
    }
    {  // model round-trip through the text format
        TaskData task;
        task.features = Matrix(6, 2);
        task.labels = {1, 1, 1, -1, -1, -1};
        for (std::size_t i = 0; i < 6; ++i) {
            task.features(i, 0) = unif(-1.0, 1.0) + (i < 3 ? 1.0 : -1.0);
            task.features(i, 1) = unif(-1.0, 1.0);
        }
        const KernelBank bank = build_bank({task}, default_bank_specs());
        SolverConfig sc;
        sc.p = 1.0;
        const ModelState model = train(bank, sc);
        std::stringstream buf;
        save_model(model, bank, buf);
        const LoadedModel back = load_model(buf);
        bool ok = back.state.theta == model.theta && back.state.lambda == model.lambda;
        for (std::size_t i = 0; ok && i < 6; ++i)
            ok = back.state.duals[0].alpha[i] == model.duals[0].alpha[i];
        check("model text round-trip", ok);
    }

    std::printf("%s\n", failures ? "selftest: FAIL" : "selftest: OK");
    return failures ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pareto-path multi-task multiple kernel learning"};
    app.require_subcommand(1);

    // --config is read first so explicit flags can override file values.
    pmkl::ExperimentConfig cfg;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") {
            try {
                cfg = pmkl::parse_config_file(argv[i + 1]);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 2;
            }
        }

    std::string config_path, p_grid_text, cv_c_text, whitelist_text;
    double tol = 0.0;
    double train_p = 1.0;
    std::string model_path, out_path;
    std::size_t task_index = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key=value config file");
        sub->add_option("--data", cfg.data_paths, "dataset file(s)");
        sub->add_option("--format", cfg.format, "dense or sparse")
            ->check(CLI::IsMember({"dense", "sparse"}));
        sub->add_option("--label-col", cfg.label_column, "label column (dense; -1 = last)");
        sub->add_flag("--header", cfg.has_header, "skip a dense header row");
        sub->add_option("--train-fraction", cfg.train_fraction, "training fraction in (0,1)");
        sub->add_option("--seed", cfg.seed, "split seed");
        sub->add_option("--s", cfg.s, "kernel-weight norm parameter s");
        sub->add_option("--C", cfg.C, "SVM cost");
        sub->add_option("--tol", tol, "overrides both the SVM and QP tolerances");
        sub->add_option("--workers", cfg.workers, "concurrency cap");
        sub->add_flag("--multitask", cfg.multitask, "one binary task per data file");
        sub->add_flag("--per-class-equal", cfg.per_class_equal,
                      "equal per-class training counts");
        sub->add_option("--class-whitelist", whitelist_text, "keep only these class ids");
    };

    CLI::App* sweep = app.add_subcommand("sweep", "p-sweep with repeated random splits");
    add_common(sweep);
    sweep->add_option("--repeats", cfg.repeats, "number of random splits");
    sweep->add_option("--p-grid", p_grid_text, "comma list of p values ('inf' allowed)");
    sweep->add_option("--cv-C", cv_c_text, "comma list of C candidates for cross-validation");
    sweep->add_option("--cv-folds", cfg.cv_folds, "cross-validation folds");
    sweep->add_option("--out", cfg.out_dir, "report directory")->required();

    CLI::App* train_cmd = app.add_subcommand("train", "train one model and save it");
    add_common(train_cmd);
    train_cmd->add_option("--p", train_p, "scalarization exponent ('inf' via --p-grid syntax)");
    train_cmd->add_option("--out", out_path, "model output path")->required();

    CLI::App* predict_cmd =
        app.add_subcommand("predict", "predict labels for a features-only dense CSV");
    predict_cmd->add_option("--model", model_path, "model file")->required();
    predict_cmd->add_option("--data", cfg.data_paths, "feature file")->required();
    predict_cmd->add_option("--task", task_index, "task index");
    predict_cmd->add_option("--out", out_path, "write predictions here instead of stdout");

    CLI::App* eval_cmd = app.add_subcommand("eval", "accuracy of a saved model on labeled data");
    eval_cmd->add_option("--model", model_path, "model file")->required();
    eval_cmd->add_option("--data", cfg.data_paths, "labeled dense CSV")->required();
    eval_cmd->add_option("--label-col", cfg.label_column, "label column (-1 = last)");
    eval_cmd->add_option("--task", task_index, "task index");

    CLI::App* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");
    (void)selftest;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (!p_grid_text.empty()) cfg.p_grid = parse_real_list(p_grid_text);
        if (!cv_c_text.empty()) cfg.C_grid = parse_real_list(cv_c_text);
        if (!whitelist_text.empty()) {
            cfg.class_whitelist.clear();
            for (double v : parse_real_list(whitelist_text))
                cfg.class_whitelist.push_back(static_cast<int>(v));
        }
        if (tol > 0.0) {
            cfg.svm_tol = tol;
            cfg.qp_tol = tol;
        }

        if (sweep->parsed()) {
            const pmkl::SweepReport report = pmkl::run_sweep(cfg);
            std::size_t ok = 0;
            for (const auto& c : report.cells) ok += c.ok;
            std::cout << "sweep: " << ok << "/" << report.cells.size()
                      << " grid cells succeeded; report in " << cfg.out_dir << "\n";
            return 0;
        }
        if (train_cmd->parsed()) {
            if (cfg.data_paths.empty()) throw pmkl::InputError("train: --data is required");
            pmkl::ExperimentConfig one = cfg;
            one.p_grid = {train_p};
            one.repeats = 1;
            one.out_dir.clear();

            pmkl::Dataset data = cfg.format == "sparse"
                                     ? pmkl::load_sparse(cfg.data_paths[0])
                                     : pmkl::load_dense(cfg.data_paths[0], cfg.label_column,
                                                        cfg.has_header);
            pmkl::ModelMeta meta;
            std::tie(data, meta.scaling) = pmkl::scale_01(data);
            const pmkl::TaskGroup group =
                cfg.multitask
                    ? pmkl::build_multitask(std::vector<pmkl::Dataset>{data},
                                            cfg.train_fraction, cfg.seed)
                    : pmkl::build_ovo(data, cfg.train_fraction, cfg.per_class_equal, cfg.seed);
            const pmkl::KernelBank bank =
                pmkl::build_bank(pmkl::training_tasks(group), cfg.kernel_specs, cfg.workers);
            pmkl::SolverConfig sc;
            sc.p = train_p;
            sc.s = cfg.s;
            sc.C = cfg.C;
            if (tol > 0.0) {
                sc.svm_tol = tol;
                sc.qp_tol = tol;
            }
            const pmkl::ModelState model = pmkl::train(bank, sc);
            for (const pmkl::BinaryTask& task : group.tasks)
                meta.task_classes.emplace_back(
                    cfg.multitask ? 1 : task.class_pos,
                    cfg.multitask ? -1 : task.class_neg);
            pmkl::save_model_file(model, bank, meta, out_path);
            const pmkl::MulticlassEval eval =
                pmkl::evaluate_multiclass(model, bank, group, data);
            std::cout << "trained " << bank.num_tasks() << " task(s); held-out accuracy "
                      << eval.overall << "; model saved to " << out_path << "\n";
            return 0;
        }
        if (predict_cmd->parsed()) {
            const pmkl::LoadedModel loaded = pmkl::load_model_file(model_path);
            if (task_index >= loaded.bank.num_tasks())
                throw pmkl::InputError("predict: task index out of range");
            pmkl::Matrix pts = load_feature_rows(cfg.data_paths[0]);
            if (!loaded.meta.scaling.mins.empty())
                pts = loaded.meta.scaling.apply(pts);
            const std::vector<int> pred =
                pmkl::predict(loaded.state, loaded.bank, task_index, pts);
            std::ostream* os = &std::cout;
            std::ofstream file;
            if (!out_path.empty()) {
                file.open(out_path);
                if (!file) throw pmkl::InputError("cannot write " + out_path);
                os = &file;
            }
            // report original class ids when the model remembers them
            const bool mapped = !loaded.meta.task_classes.empty();
            for (int y : pred)
                *os << (mapped ? (y > 0 ? loaded.meta.task_classes[task_index].first
                                        : loaded.meta.task_classes[task_index].second)
                               : y)
                    << "\n";
            return 0;
        }
        if (eval_cmd->parsed()) {
            const pmkl::LoadedModel loaded = pmkl::load_model_file(model_path);
            if (task_index >= loaded.bank.num_tasks())
                throw pmkl::InputError("eval: task index out of range");
            pmkl::Dataset data =
                pmkl::load_dense(cfg.data_paths[0], cfg.label_column, cfg.has_header);
            if (!loaded.meta.scaling.mins.empty())
                data.features = loaded.meta.scaling.apply(data.features);
            const std::vector<int> pred =
                pmkl::predict(loaded.state, loaded.bank, task_index, data.features);
            // compare against the task's class pair when the model remembers
            // it (rows of other classes count as misses); otherwise fall back
            // to the +1/-1 sign convention
            const bool mapped = !loaded.meta.task_classes.empty();
            const int cls_pos =
                mapped ? loaded.meta.task_classes[task_index].first : 1;
            const int cls_neg =
                mapped ? loaded.meta.task_classes[task_index].second : -1;
            std::size_t hits = 0;
            for (std::size_t i = 0; i < pred.size(); ++i)
                if (data.labels[i] == (pred[i] > 0 ? cls_pos : cls_neg)) ++hits;
            std::cout << "accuracy " << static_cast<double>(hits) / pred.size() << " ("
                      << hits << "/" << pred.size() << ")\n";
            return 0;
        }
        if (selftest->parsed()) return run_selftest();
    } catch (const pmkl::ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const pmkl::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const pmkl::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
