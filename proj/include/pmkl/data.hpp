#ifndef PMKL_DATA_HPP
#define PMKL_DATA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pmkl/kernels.hpp"
#include "pmkl/types.hpp"

namespace pmkl {

struct Dataset {
    Matrix features;
    std::vector<int> labels;  // class ids
};

/// Per-attribute min/max record so the identical transform can be applied to
/// held-out data (no clamping).
struct ScalingRecord {
    Vec mins;
    Vec maxs;
    double apply(std::size_t column, double value) const;
    Matrix apply(const Matrix& features) const;
};

/// One binary task carved out of a multi-class set or loaded directly.
struct BinaryTask {
    Matrix features;             // all samples of the task (train + test)
    std::vector<int> labels;     // +1 / -1
    int class_pos = 0;           // originating class ids (OvO only)
    int class_neg = 0;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    std::vector<std::size_t> source_rows;  // task-local row -> source dataset row
};

struct TaskGroup {
    std::vector<BinaryTask> tasks;
    std::uint64_t seed = 0;
    // OvO bookkeeping for multi-class voting; empty for direct multi-task groups
    std::vector<int> class_ids;
    std::vector<std::size_t> test_rows;       // row indices into the source dataset
    std::vector<int> test_multiclass_labels;  // aligned with test_rows
};

Dataset load_dense(const std::string& path, int label_column = -1, bool has_header = false);
Dataset load_sparse(const std::string& path);

std::pair<Dataset, ScalingRecord> scale_01(const Dataset& data);

/// C(c,2) one-vs-one tasks with a global class-stratified train split; within
/// pair (i, j), i < j, class i maps to +1.
TaskGroup build_ovo(const Dataset& data, double train_fraction, bool per_class_equal,
                    std::uint64_t seed);

/// Direct multi-task construction: one binary task per file, stratified split.
TaskGroup build_multitask(const std::vector<std::string>& task_files, double train_fraction,
                          std::uint64_t seed);
TaskGroup build_multitask(const std::vector<Dataset>& task_sets, double train_fraction,
                          std::uint64_t seed);

/// Training-side TaskData for the kernel bank.
std::vector<TaskData> training_tasks(const TaskGroup& group);

}  // namespace pmkl

#endif
