#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pmkl/train.hpp"

namespace pmkl {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double read_real(std::istream& is, const char* what) {
    std::string tok;
    if (!(is >> tok)) throw ParseError(std::string("model: missing ") + what, 0);
    if (tok == "inf") return kInf;
    try {
        return std::stod(tok);
    } catch (const std::exception&) {
        throw ParseError(std::string("model: bad value for ") + what + ": " + tok, 0);
    }
}

std::string expect(std::istream& is, const char* keyword) {
    std::string tok;
    if (!(is >> tok) || tok != keyword)
        throw ParseError(std::string("model: expected '") + keyword + "' got '" + tok + "'", 0);
    return tok;
}

}  // namespace

void save_model(const ModelState& model, const KernelBank& bank, std::ostream& os) {
    save_model(model, bank, ModelMeta{}, os);
}

void save_model(const ModelState& model, const KernelBank& bank, const ModelMeta& meta,
                std::ostream& os) {
    if (!meta.task_classes.empty() && meta.task_classes.size() != bank.num_tasks())
        throw InputError("save_model: task_classes size does not match the task count");
    os << "paretomkl-model 1\n";
    os << "p " << fmt(model.p) << "\n";
    os << "s " << fmt(model.s) << "\n";
    os << "C " << fmt(model.C) << "\n";
    if (!meta.scaling.mins.empty()) {
        os << "scaling " << meta.scaling.mins.size() << "\n";
        for (std::size_t j = 0; j < meta.scaling.mins.size(); ++j)
            os << "col " << fmt(meta.scaling.mins[j]) << " " << fmt(meta.scaling.maxs[j])
               << "\n";
    }
    os << "kernels " << bank.num_kernels() << "\n";
    for (const KernelSpec& spec : bank.specs()) {
        switch (spec.kind) {
            case KernelKind::Linear: os << "linear\n"; break;
            case KernelKind::Polynomial: os << "polynomial " << spec.degree << "\n"; break;
            case KernelKind::Gaussian: os << "gaussian " << fmt(spec.spread) << "\n"; break;
        }
    }
    os << "theta";
    for (double v : model.theta) os << " " << fmt(v);
    os << "\n";
    os << "lambda";
    for (double v : model.lambda) os << " " << fmt(v);
    os << "\n";
    os << "tasks " << bank.num_tasks() << "\n";
    for (std::size_t t = 0; t < bank.num_tasks(); ++t) {
        const std::size_t n = bank.task_size(t);
        const std::size_t d = bank.feature_dim(t);
        os << "task " << t << " " << n << " " << d << "\n";
        if (!meta.task_classes.empty())
            os << "classes " << meta.task_classes[t].first << " "
               << meta.task_classes[t].second << "\n";
        os << "bias " << fmt(model.duals[t].bias) << "\n";
        os << "alpha";
        for (double v : model.duals[t].alpha) os << " " << fmt(v);
        os << "\n";
        os << "labels";
        for (int l : bank.labels(t)) os << " " << l;
        os << "\n";
        const Matrix& X = bank.samples(t);
        for (std::size_t i = 0; i < n; ++i) {
            os << "sample";
            for (std::size_t j = 0; j < d; ++j) os << " " << fmt(X(i, j));
            os << "\n";
        }
    }
}

LoadedModel load_model(std::istream& is) {
    std::string magic;
    int version = 0;
    if (!(is >> magic >> version) || magic != "paretomkl-model" || version != 1)
        throw ParseError("model: unrecognized header", 0);

    ModelState model;
    expect(is, "p");
    model.p = read_real(is, "p");
    expect(is, "s");
    model.s = read_real(is, "s");
    expect(is, "C");
    model.C = read_real(is, "C");

    LoadedModel loaded;
    std::string section;
    if (!(is >> section)) throw ParseError("model: truncated after C", 0);
    if (section == "scaling") {
        std::size_t d = 0;
        is >> d;
        loaded.meta.scaling.mins.resize(d);
        loaded.meta.scaling.maxs.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            expect(is, "col");
            loaded.meta.scaling.mins[j] = read_real(is, "scaling min");
            loaded.meta.scaling.maxs[j] = read_real(is, "scaling max");
        }
        if (!(is >> section)) throw ParseError("model: truncated after scaling", 0);
    }
    if (section != "kernels")
        throw ParseError("model: expected 'kernels' got '" + section + "'", 0);
    std::size_t M = 0;
    is >> M;
    std::vector<KernelSpec> specs;
    for (std::size_t m = 0; m < M; ++m) {
        std::string kind;
        is >> kind;
        if (kind == "linear") {
            specs.push_back(KernelSpec::linear());
        } else if (kind == "polynomial") {
            int deg;
            is >> deg;
            specs.push_back(KernelSpec::polynomial(deg));
        } else if (kind == "gaussian") {
            specs.push_back(KernelSpec::gaussian(read_real(is, "spread")));
        } else {
            throw ParseError("model: unknown kernel kind '" + kind + "'", 0);
        }
    }

    expect(is, "theta");
    model.theta.resize(M);
    for (double& v : model.theta) v = read_real(is, "theta");
    expect(is, "lambda");
    // lambda length equals the task count, read lazily below
    std::vector<double> lambda_vals;
    std::string tok;
    while (is >> tok && tok != "tasks") lambda_vals.push_back(tok == "inf" ? kInf : std::stod(tok));
    model.lambda = Vec(lambda_vals.begin(), lambda_vals.end());

    std::size_t T = 0;
    is >> T;
    if (model.lambda.size() != T) throw ParseError("model: lambda/task count mismatch", 0);

    std::vector<TaskData> tasks(T);
    model.duals.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        expect(is, "task");
        std::size_t idx, n, d;
        is >> idx >> n >> d;
        std::string next;
        if (!(is >> next)) throw ParseError("model: truncated task block", 0);
        if (next == "classes") {
            int pos = 0, neg = 0;
            is >> pos >> neg;
            loaded.meta.task_classes.emplace_back(pos, neg);
            if (!(is >> next)) throw ParseError("model: truncated task block", 0);
        }
        if (next != "bias") throw ParseError("model: expected 'bias' got '" + next + "'", 0);
        model.duals[t].bias = read_real(is, "bias");
        expect(is, "alpha");
        model.duals[t].alpha.resize(n);
        for (double& v : model.duals[t].alpha) v = read_real(is, "alpha");
        expect(is, "labels");
        tasks[t].labels.resize(n);
        for (int& l : tasks[t].labels) is >> l;
        tasks[t].features = Matrix(n, d);
        for (std::size_t i = 0; i < n; ++i) {
            expect(is, "sample");
            for (std::size_t j = 0; j < d; ++j) tasks[t].features(i, j) = read_real(is, "feature");
        }
    }

    if (!loaded.meta.task_classes.empty() && loaded.meta.task_classes.size() != T)
        throw ParseError("model: classes present for only some tasks", 0);
    loaded.bank = build_bank(tasks, specs);
    loaded.state = std::move(model);
    return loaded;
}

void save_model_file(const ModelState& model, const KernelBank& bank, const std::string& path) {
    save_model_file(model, bank, ModelMeta{}, path);
}

void save_model_file(const ModelState& model, const KernelBank& bank, const ModelMeta& meta,
                     const std::string& path) {
    std::ofstream os(path);
    if (!os) throw InputError("cannot open model file for writing: " + path);
    save_model(model, bank, meta, os);
}

LoadedModel load_model_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InputError("cannot open model file: " + path);
    return load_model(is);
}

}  // namespace pmkl
