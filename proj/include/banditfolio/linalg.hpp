#pragma once

#include <string>
#include <vector>

namespace banditfolio {

/// Dense row-major matrix of doubles. Small and value-semantic; every
/// matrix in this project is at most a few hundred rows.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

    double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

/// Largest absolute entry of a - b; matrices must have identical shape.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// A * A^T.
Matrix mul_aat(const Matrix& a);

/// Lower-triangular Cholesky factor A with A*A^T = theta.
/// Rejects non-symmetric input and any pivot <= 1e-12, reporting the
/// failing leading minor. No regularization is applied.
Matrix cholesky_factor(const Matrix& theta);

/// All eigenvalues of a symmetric matrix, descending. Cyclic Jacobi
/// rotations; stops when the off-diagonal Frobenius norm drops below
/// 1e-12 or after 100 sweeps.
std::vector<double> jacobi_eigenvalues(Matrix a);

} // namespace banditfolio
