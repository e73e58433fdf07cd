#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace drifting {

// Dense row-major matrix of doubles. A default-constructed Matrix is the
// "absent" value (0x0); every constructed matrix has rows > 0 and cols > 0.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }
    const std::vector<double>& storage() const { return data_; }

    Matrix transposed() const;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Boolean companion of Matrix; true marks an excluded entry.
struct Mask {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<unsigned char> bits;

    Mask() = default;
    Mask(std::size_t r, std::size_t c) : rows(r), cols(c), bits(r * c, 0) {}

    bool operator()(std::size_t r, std::size_t c) const { return bits[r * cols + c] != 0; }
    void set(std::size_t r, std::size_t c, bool masked = true) { bits[r * cols + c] = masked ? 1 : 0; }
};

// Throws std::invalid_argument if the matrix is empty or holds NaN/Inf.
void require_valid(const Matrix& m, const char* what);
bool all_finite(std::span<const double> v);

Matrix vstack(const Matrix& top, const Matrix& bottom);
Matrix select_rows(const Matrix& m, std::span<const std::size_t> idx);
Matrix scaled(const Matrix& m, double s);
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace drifting
