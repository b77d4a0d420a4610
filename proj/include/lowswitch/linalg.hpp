#pragma once
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lowswitch::linalg {

// Eigenvalues of a dense symmetric matrix (row-major n x n) by cyclic Jacobi
// rotations. Unsorted.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
    if (static_cast<int>(a.size()) != n * n)
        throw std::invalid_argument("symmetric_eigenvalues: size mismatch");
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a[p * n + q];
                if (std::abs(apq) < 1e-300) continue;
                double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = a[i * n + i];
    return eig;
}

inline double smallest_eigenvalue(const std::vector<double>& a, int n) {
    auto eig = symmetric_eigenvalues(a, n);
    double v = eig[0];
    for (double e : eig)
        if (e < v) v = e;
    return v;
}

}  // namespace lowswitch::linalg
