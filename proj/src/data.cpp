#include "pmkl/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace pmkl {

namespace {

double parse_real(const std::string& tok, std::size_t line) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v))
        throw ParseError("not a finite number: '" + tok + "'", line);
    return v;
}

// deterministic Fisher-Yates, independent of the standard library's
// distribution implementation
void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng() % i]);
}

}  // namespace

Dataset load_dense(const std::string& path, int label_column, bool has_header) {
    std::ifstream is(path);
    if (!is) throw InputError("cannot open file: " + path);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::string line;
    std::size_t lineno = 0;
    std::size_t ncols = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (has_header && lineno == 1) continue;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<std::string> toks;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            while (!tok.empty() && (tok.back() == '\r' || tok.back() == ' ')) tok.pop_back();
            while (!tok.empty() && tok.front() == ' ') tok.erase(tok.begin());
            toks.push_back(tok);
        }
        if (ncols == 0) ncols = toks.size();
        if (toks.size() != ncols) throw ParseError("inconsistent column count", lineno);
        const std::size_t label_idx =
            label_column < 0 ? toks.size() + label_column : static_cast<std::size_t>(label_column);
        if (label_idx >= toks.size()) throw ParseError("label column out of range", lineno);
        std::vector<double> row;
        row.reserve(toks.size() - 1);
        for (std::size_t i = 0; i < toks.size(); ++i) {
            const double v = parse_real(toks[i], lineno);
            if (i == label_idx)
                labels.push_back(static_cast<int>(std::lround(v)));
            else
                row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("empty dataset: " + path);
    Dataset d;
    d.features = Matrix(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy(rows[i].begin(), rows[i].end(), d.features.row(i));
    d.labels = std::move(labels);
    return d;
}

Dataset load_sparse(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InputError("cannot open file: " + path);
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;
    std::vector<int> labels;
    std::string line;
    std::size_t lineno = 0;
    std::size_t dim = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string tok;
        if (!(ss >> tok)) continue;
        labels.push_back(static_cast<int>(std::lround(parse_real(tok, lineno))));
        std::vector<std::pair<std::size_t, double>> entries;
        std::size_t last_idx = 0;
        while (ss >> tok) {
            const std::size_t colon = tok.find(':');
            if (colon == std::string::npos) throw ParseError("expected index:value, got '" + tok + "'", lineno);
            const long idx = std::strtol(tok.substr(0, colon).c_str(), nullptr, 10);
            if (idx < 1) throw ParseError("indices are 1-based, got '" + tok + "'", lineno);
            if (static_cast<std::size_t>(idx) <= last_idx)
                throw ParseError("feature indices must be strictly increasing", lineno);
            last_idx = static_cast<std::size_t>(idx);
            entries.emplace_back(last_idx, parse_real(tok.substr(colon + 1), lineno));
        }
        dim = std::max(dim, last_idx);
        rows.push_back(std::move(entries));
    }
    if (rows.empty()) throw InputError("empty dataset: " + path);
    Dataset d;
    d.features = Matrix(rows.size(), dim, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (const auto& [idx, v] : rows[i]) d.features(i, idx - 1) = v;
    d.labels = std::move(labels);
    return d;
}

double ScalingRecord::apply(std::size_t column, double value) const {
    const double range = maxs[column] - mins[column];
    if (range <= 0.0) return 0.0;
    return (value - mins[column]) / range;
}

Matrix ScalingRecord::apply(const Matrix& features) const {
    Matrix out(features.rows(), features.cols());
    for (std::size_t i = 0; i < features.rows(); ++i)
        for (std::size_t j = 0; j < features.cols(); ++j)
            out(i, j) = apply(j, features(i, j));
    return out;
}

std::pair<Dataset, ScalingRecord> scale_01(const Dataset& data) {
    const std::size_t d = data.features.cols();
    ScalingRecord rec;
    rec.mins.assign(d, kInf);
    rec.maxs.assign(d, -kInf);
    for (std::size_t i = 0; i < data.features.rows(); ++i)
        for (std::size_t j = 0; j < d; ++j) {
            rec.mins[j] = std::min(rec.mins[j], data.features(i, j));
            rec.maxs[j] = std::max(rec.maxs[j], data.features(i, j));
        }
    Dataset out;
    out.labels = data.labels;
    out.features = rec.apply(data.features);
    return {std::move(out), std::move(rec)};
}

TaskGroup build_ovo(const Dataset& data, double train_fraction, bool per_class_equal,
                    std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw InputError("train_fraction must lie in (0, 1)");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < data.labels.size(); ++i)
        by_class[data.labels[i]].push_back(i);
    if (by_class.size() < 2) throw InputError("build_ovo needs at least 2 classes");
    std::size_t min_count = data.labels.size();
    for (const auto& [cls, idx] : by_class) {
        if (idx.size() < 2)
            throw InputError("class " + std::to_string(cls) + " has fewer than 2 samples");
        min_count = std::min(min_count, idx.size());
    }

    std::mt19937_64 rng(seed);
    std::vector<bool> in_train(data.labels.size(), false);
    for (auto& [cls, idx] : by_class) {
        shuffle_indices(idx, rng);
        const std::size_t base = per_class_equal ? min_count : idx.size();
        const std::size_t n_train =
            std::max<std::size_t>(1, static_cast<std::size_t>(train_fraction * base));
        for (std::size_t k = 0; k < std::min(n_train, idx.size() - 1); ++k)
            in_train[idx[k]] = true;
    }

    TaskGroup group;
    group.seed = seed;
    for (const auto& [cls, idx] : by_class) group.class_ids.push_back(cls);
    for (std::size_t i = 0; i < data.labels.size(); ++i)
        if (!in_train[i]) {
            group.test_rows.push_back(i);
            group.test_multiclass_labels.push_back(data.labels[i]);
        }

    const std::size_t d = data.features.cols();
    for (std::size_t a = 0; a < group.class_ids.size(); ++a) {
        for (std::size_t b = a + 1; b < group.class_ids.size(); ++b) {
            const int ca = group.class_ids[a], cb = group.class_ids[b];
            BinaryTask task;
            task.class_pos = ca;
            task.class_neg = cb;
            std::vector<std::size_t> rows;
            for (std::size_t i = 0; i < data.labels.size(); ++i)
                if (data.labels[i] == ca || data.labels[i] == cb) rows.push_back(i);
            task.features = Matrix(rows.size(), d);
            task.labels.resize(rows.size());
            task.source_rows = rows;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                std::copy(data.features.row(rows[r]), data.features.row(rows[r]) + d,
                          task.features.row(r));
                task.labels[r] = data.labels[rows[r]] == ca ? 1 : -1;
                (in_train[rows[r]] ? task.train_idx : task.test_idx).push_back(r);
            }
            group.tasks.push_back(std::move(task));
        }
    }
    return group;
}

TaskGroup build_multitask(const std::vector<Dataset>& task_sets, double train_fraction,
                          std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw InputError("train_fraction must lie in (0, 1)");
    if (task_sets.empty()) throw InputError("build_multitask: no tasks");
    TaskGroup group;
    group.seed = seed;
    std::mt19937_64 rng(seed);
    for (const Dataset& data : task_sets) {
        std::map<int, std::vector<std::size_t>> by_class;
        for (std::size_t i = 0; i < data.labels.size(); ++i)
            by_class[data.labels[i]].push_back(i);
        if (by_class.size() != 2)
            throw InputError("build_multitask: each task must have exactly 2 classes");

        BinaryTask task;
        task.features = data.features;
        const int pos_label = by_class.rbegin()->first;  // larger class id -> +1
        task.labels.resize(data.labels.size());
        task.source_rows.resize(data.labels.size());
        for (std::size_t i = 0; i < data.labels.size(); ++i) {
            task.labels[i] = data.labels[i] == pos_label ? 1 : -1;
            task.source_rows[i] = i;
        }
        for (auto& [cls, idx] : by_class) {
            shuffle_indices(idx, rng);
            const std::size_t n_train = std::max<std::size_t>(
                1, static_cast<std::size_t>(train_fraction * idx.size()));
            for (std::size_t k = 0; k < idx.size(); ++k)
                (k < std::min(n_train, idx.size() - 1) ? task.train_idx : task.test_idx)
                    .push_back(idx[k]);
        }
        std::sort(task.train_idx.begin(), task.train_idx.end());
        std::sort(task.test_idx.begin(), task.test_idx.end());
        group.tasks.push_back(std::move(task));
    }
    return group;
}

TaskGroup build_multitask(const std::vector<std::string>& task_files, double train_fraction,
                          std::uint64_t seed) {
    std::vector<Dataset> sets;
    sets.reserve(task_files.size());
    for (const std::string& path : task_files) sets.push_back(load_dense(path));
    return build_multitask(sets, train_fraction, seed);
}

std::vector<TaskData> training_tasks(const TaskGroup& group) {
    std::vector<TaskData> out;
    out.reserve(group.tasks.size());
    for (const BinaryTask& task : group.tasks) {
        TaskData td;
        const std::size_t d = task.features.cols();
        td.features = Matrix(task.train_idx.size(), d);
        td.labels.reserve(task.train_idx.size());
        for (std::size_t r = 0; r < task.train_idx.size(); ++r) {
            const std::size_t src = task.train_idx[r];
            std::copy(task.features.row(src), task.features.row(src) + d, td.features.row(r));
            td.labels.push_back(task.labels[src]);
        }
        bool pos = false, neg = false;
        for (int l : td.labels) (l > 0 ? pos : neg) = true;
        if (!pos || !neg) throw InputError("task training split lost a class");
        out.push_back(std::move(td));
    }
    return out;
}

}  // namespace pmkl
