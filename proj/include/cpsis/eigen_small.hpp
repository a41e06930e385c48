#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace cpsis {

/// Row-major dense real matrix, sized for the (L+2)-dimensional Jacobians.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

/// All eigenvalues of a small dense real matrix: Parlett-Reinsch balancing,
/// Householder reduction to Hessenberg form, then shifted QR iteration with
/// complex Wilkinson shifts. Throws NoConvergence past the iteration cap.
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

/// Eigenvalue with the largest real part (ties broken by |Im|).
std::complex<double> leading_eigenvalue(const Matrix& a);

}  // namespace cpsis
