#include "banditfolio/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace banditfolio {

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        m = std::max(m, std::fabs(a.data[i] - b.data[i]));
    }
    return m;
}

Matrix mul_aat(const Matrix& a) {
    Matrix out(a.rows, a.rows);
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = 0; k < a.cols; ++k) s += a(i, k) * a(j, k);
            out(i, j) = s;
            out(j, i) = s;
        }
    }
    return out;
}

Matrix cholesky_factor(const Matrix& theta) {
    const int n = theta.rows;
    if (n != theta.cols) throw std::invalid_argument("cholesky_factor: matrix not square");
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            if (std::fabs(theta(i, j) - theta(j, i)) > 1e-12 * std::max(1.0, std::fabs(theta(i, j)))) {
                throw std::invalid_argument("cholesky_factor: matrix not symmetric at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }

    // Pivot threshold is relative to the matrix scale so that valid
    // factorizations of tiny covariances (vols near zero) still succeed.
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::fabs(theta(i, i)));
    const double pivot_floor = 1e-12 * std::max(scale, 1e-300);

    Matrix a(n, n);
    for (int j = 0; j < n; ++j) {
        double d = theta(j, j);
        for (int k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (d <= pivot_floor) {
            throw std::runtime_error("cholesky_factor: leading minor of order " +
                                     std::to_string(j + 1) + " is not positive definite");
        }
        a(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = theta(i, j);
            for (int k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / a(j, j);
        }
    }
    return a;
}

namespace {

double offdiag_frobenius(const Matrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < a.cols; ++j) {
            if (i != j) s += a(i, j) * a(i, j);
        }
    }
    return std::sqrt(s);
}

} // namespace

std::vector<double> jacobi_eigenvalues(Matrix a) {
    const int n = a.rows;
    if (n != a.cols) throw std::invalid_argument("jacobi_eigenvalues: matrix not square");
    constexpr double kOffTol = 1e-12;
    constexpr int kMaxSweeps = 100;

    for (int sweep = 0; sweep < kMaxSweeps && offdiag_frobenius(a) > kOffTol; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= kOffTol / (n * n + 1.0)) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double theta = 0.5 * (aqq - app) / apq;
                double t = 1.0 / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }

    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end(), std::greater<double>());
    return eig;
}

} // namespace banditfolio
