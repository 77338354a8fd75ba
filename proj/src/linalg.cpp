#include "qbnb/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace qbnb {

double SymMatrix::frobenius_norm() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) s += at(i, j) * at(i, j);
    return std::sqrt(s);
}

namespace {

double off_diagonal_norm(const SymMatrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.n(); ++i)
        for (int j = 0; j < a.n(); ++j)
            if (i != j) s += a.at(i, j) * a.at(i, j);
    return std::sqrt(s);
}

}  // namespace

std::vector<double> jacobi_eigenvalues(SymMatrix a) {
    const int n = a.n();
    std::vector<double> eig(static_cast<std::size_t>(n));
    if (n == 1) {
        eig[0] = a.at(0, 0);
        return eig;
    }

    const double stop = 1e-12 * a.frobenius_norm();
    // Each sweep reduces the off-diagonal norm at least quadratically once it
    // is small; 64 sweeps is a generous cap for any conditioning we meet.
    for (int sweep = 0; sweep < 64 && off_diagonal_norm(a) > stop; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a.at(p, q);
                if (apq == 0.0) continue;
                const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                const double app = a.at(p, p);
                const double aqq = a.at(q, q);
                a.at(p, p) = app - t * apq;
                a.at(q, q) = aqq + t * apq;
                a.at(p, q) = 0.0;
                a.at(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a.at(k, p);
                    const double akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(p, k) = a.at(k, p);
                    a.at(k, q) = s * akp + c * akq;
                    a.at(q, k) = a.at(k, q);
                }
            }
        }
    }

    for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = a.at(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

std::pair<double, double> eigen_range(const SymMatrix& a) {
    const std::vector<double> eig = jacobi_eigenvalues(a);
    return {eig.front(), eig.back()};
}

Ldlt::Ldlt(const SymMatrix& a, double threshold) : n_(a.n()) {
    f_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0.0);
    auto f = [&](int i, int j) -> double& { return f_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)]; };

    for (int j = 0; j < n_; ++j) {
        double d = a.at(j, j);
        for (int k = 0; k < j; ++k) d -= f(j, k) * f(j, k) * f(k, k);
        if (!(d > threshold)) return;  // not safely positive definite
        f(j, j) = d;
        for (int i = j + 1; i < n_; ++i) {
            double v = a.at(i, j);
            for (int k = 0; k < j; ++k) v -= f(i, k) * f(j, k) * f(k, k);
            f(i, j) = v / d;
        }
    }
    ok_ = true;
}

std::vector<double> Ldlt::solve(const std::vector<double>& b) const {
    auto f = [&](int i, int j) -> double { return f_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)]; };
    std::vector<double> x = b;
    // L y = b
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < i; ++k) x[static_cast<std::size_t>(i)] -= f(i, k) * x[static_cast<std::size_t>(k)];
    // D z = y
    for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(i)] /= f(i, i);
    // L^T x = z
    for (int i = n_ - 1; i >= 0; --i)
        for (int k = i + 1; k < n_; ++k) x[static_cast<std::size_t>(i)] -= f(k, i) * x[static_cast<std::size_t>(k)];
    return x;
}

}  // namespace qbnb
