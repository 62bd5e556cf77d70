#pragma once

#include <cstddef>
#include <vector>

namespace geomon::linalg {

// Small dense row-major matrix. Sized for the normal equations that show up
// here (a handful of rows/columns), not for anything bigger.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    Matrix transposed() const;
    Matrix operator*(const Matrix& rhs) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Gauss-Jordan with partial pivoting. Throws std::runtime_error on a
// singular (or numerically singular) input.
Matrix invert(const Matrix& m);

// Solves A x = b for square A. Throws std::runtime_error when singular.
std::vector<double> solve(const Matrix& a, const std::vector<double>& b);

}  // namespace geomon::linalg
