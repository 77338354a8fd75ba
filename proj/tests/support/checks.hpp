#pragma once

// Shared helpers for the test suite: finite-difference derivative checks and
// random geometry generators. Everything here is deterministic given the
// caller's SplitMix64 stream.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "qbnb/geometry.hpp"
#include "qbnb/linalg.hpp"
#include "qbnb/rng.hpp"

namespace qbnb::testing {

using Objective = std::function<double(std::span<const double>)>;

// Central-difference gradient, O(h^2) truncation.
inline std::vector<double> fd_gradient(const Objective& f, const std::vector<double>& x,
                                       double h = 1e-6) {
    std::vector<double> g(x.size());
    std::vector<double> p = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double hi = h * (1.0 + std::fabs(x[i]));
        p[i] = x[i] + hi;
        const double fp = f(p);
        p[i] = x[i] - hi;
        const double fm = f(p);
        p[i] = x[i];
        g[i] = (fp - fm) / (2.0 * hi);
    }
    return g;
}

// Central-difference Hessian from gradient differences of f itself.
inline SymMatrix fd_hessian(const Objective& f, const std::vector<double>& x, double h = 1e-4) {
    const int d = static_cast<int>(x.size());
    SymMatrix m(d);
    std::vector<double> p = x;
    for (int i = 0; i < d; ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        const double hi = h * (1.0 + std::fabs(x[ui]));
        for (int j = i; j < d; ++j) {
            const std::size_t uj = static_cast<std::size_t>(j);
            const double hj = h * (1.0 + std::fabs(x[uj]));
            if (i == j) {
                const double f0 = f(x);
                p[ui] = x[ui] + hi;
                const double fp = f(p);
                p[ui] = x[ui] - hi;
                const double fm = f(p);
                p[ui] = x[ui];
                m.set_sym(i, i, (fp - 2.0 * f0 + fm) / (hi * hi));
            } else {
                p[ui] = x[ui] + hi;
                p[uj] = x[uj] + hj;
                const double fpp = f(p);
                p[uj] = x[uj] - hj;
                const double fpm = f(p);
                p[ui] = x[ui] - hi;
                const double fmm = f(p);
                p[uj] = x[uj] + hj;
                const double fmp = f(p);
                p[ui] = x[ui];
                p[uj] = x[uj];
                m.set_sym(i, j, (fpp - fpm - fmp + fmm) / (4.0 * hi * hj));
            }
        }
    }
    return m;
}

inline std::vector<double> random_point(const Box& box, SplitMix64& rng) {
    std::vector<double> x(box.lower.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(box.lower[i], box.upper[i]);
    return x;
}

// A random axis-aligned sub-cube of the box: per-axis half-edges between
// min_frac and max_frac of the domain half-width, center placed so the cube
// stays inside.
inline Cube random_subcube(const Box& box, SplitMix64& rng, double min_frac = 0.01,
                           double max_frac = 0.45) {
    const std::size_t d = box.lower.size();
    std::vector<double> center(d), half(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double w = box.upper[i] - box.lower[i];
        const double h = 0.5 * w * rng.uniform(min_frac, max_frac);
        half[i] = h;
        center[i] = rng.uniform(box.lower[i] + h, box.upper[i] - h);
    }
    return Cube(std::move(center), std::move(half));
}

inline double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = 1.0 + std::max(std::fabs(a[i]), std::fabs(b[i]));
        worst = std::max(worst, std::fabs(a[i] - b[i]) / scale);
    }
    return worst;
}

inline double max_rel_diff(const SymMatrix& a, const SymMatrix& b) {
    double worst = 0.0;
    for (int i = 0; i < a.n(); ++i) {
        for (int j = 0; j < a.n(); ++j) {
            const double scale = 1.0 + std::max(std::fabs(a.at(i, j)), std::fabs(b.at(i, j)));
            worst = std::max(worst, std::fabs(a.at(i, j) - b.at(i, j)) / scale);
        }
    }
    return worst;
}

}  // namespace qbnb::testing
