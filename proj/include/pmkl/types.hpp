#ifndef PMKL_TYPES_HPP
#define PMKL_TYPES_HPP

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmkl {

using Vec = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ParseError : InputError {
    ParseError(const std::string& msg, std::size_t line)
        : InputError(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
    std::size_t line_number;
};

struct SolverError : std::runtime_error {
    SolverError(const std::string& msg, double residual_ = 0.0)
        : std::runtime_error(msg), residual(residual_) {}
    double residual;
};

}  // namespace pmkl

#endif
