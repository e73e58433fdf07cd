#include "drifting/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace drifting {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("Matrix: dimensions must be positive");
    }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("Matrix: dimensions must be positive");
    }
    if (data_.size() != rows * cols) {
        throw std::invalid_argument("Matrix: data size does not match shape");
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    if (rows_ == 0 || cols_ == 0) {
        throw std::invalid_argument("Matrix: dimensions must be positive");
    }
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::transposed() const {
    if (empty()) return {};
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void require_valid(const Matrix& m, const char* what) {
    if (m.empty()) throw std::invalid_argument(std::string(what) + ": empty matrix");
    if (!all_finite(m.values())) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
    if (top.empty()) return bottom;
    if (bottom.empty()) return top;
    if (top.cols() != bottom.cols()) throw std::invalid_argument("vstack: column mismatch");
    std::vector<double> data(top.storage());
    data.insert(data.end(), bottom.storage().begin(), bottom.storage().end());
    return Matrix(top.rows() + bottom.rows(), top.cols(), std::move(data));
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> idx) {
    if (idx.empty()) return {};
    Matrix out(idx.size(), m.cols());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= m.rows()) throw std::out_of_range("select_rows: index out of range");
        std::copy_n(m.row(idx[k]).begin(), m.cols(), out.row(k).begin());
    }
    return out;
}

Matrix scaled(const Matrix& m, double s) {
    Matrix out = m;
    for (double& v : out.values()) v *= s;
    return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    }
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
    return m;
}

}  // namespace drifting
