#include "qbnb/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qbnb {

std::vector<Expr> gradient_exprs(const Expr& f, int dim) {
    std::vector<Expr> g;
    g.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) g.push_back(f.differentiate(i));
    return g;
}

std::vector<Expr> hessian_upper_exprs(const Expr& f, int dim) {
    std::vector<Expr> h;
    h.reserve(static_cast<std::size_t>(dim * (dim + 1) / 2));
    for (int i = 0; i < dim; ++i) {
        const Expr gi = f.differentiate(i);
        for (int j = i; j < dim; ++j) h.push_back(gi.differentiate(j));
    }
    return h;
}

double lipschitz_bound(const Expr& f, const Box& domain, int order) {
    const int d = domain.dim();
    if (d < 1) throw std::invalid_argument("lipschitz_bound: empty domain");
    if (order < 1 || order > 3) throw std::invalid_argument("lipschitz_bound: order must be 1, 2, or 3");

    double sum = 0.0;
    if (order == 1) {
        for (int i = 0; i < d; ++i) sum += f.differentiate(i).eval_interval(domain).sq_mag();
    } else if (order == 2) {
        for (int i = 0; i < d; ++i) {
            const Expr gi = f.differentiate(i);
            for (int j = i; j < d; ++j) {
                const double weight = (i == j) ? 1.0 : 2.0;
                sum += weight * gi.differentiate(j).eval_interval(domain).sq_mag();
            }
        }
    } else {
        for (int i = 0; i < d; ++i) {
            const Expr gi = f.differentiate(i);
            for (int j = i; j < d; ++j) {
                const Expr gij = gi.differentiate(j);
                for (int k = j; k < d; ++k) {
                    // Multiplicity of the sorted triple (i, j, k) among all
                    // d^3 ordered index triples.
                    double weight = 6.0;
                    if (i == j && j == k) {
                        weight = 1.0;
                    } else if (i == j || j == k) {
                        weight = 3.0;
                    }
                    sum += weight * gij.differentiate(k).eval_interval(domain).sq_mag();
                }
            }
        }
    }
    return std::sqrt(sum);
}

double grid_derivative_norm_max(const Expr& f, const Box& domain, int order, long long budget) {
    const int d = domain.dim();
    if (d < 1) throw std::invalid_argument("grid_derivative_norm_max: empty domain");
    if (order < 1 || order > 3)
        throw std::invalid_argument("grid_derivative_norm_max: order must be 1, 2, or 3");
    if (budget < 1) throw std::invalid_argument("grid_derivative_norm_max: budget must be positive");

    std::vector<CompiledExpr> parts;
    std::vector<double> weights;
    if (order == 1) {
        for (const Expr& g : gradient_exprs(f, d)) {
            parts.emplace_back(g);
            weights.push_back(1.0);
        }
    } else {
        // The pair weight (2 for i<j) restores the full symmetric tensor from
        // its upper entries; for order 3 each entry is differentiated along
        // every axis, the free index covering the remaining dimension.
        const std::vector<Expr> uppers = hessian_upper_exprs(f, d);
        std::size_t k = 0;
        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j, ++k) {
                const double w = i == j ? 1.0 : 2.0;
                if (order == 2) {
                    parts.emplace_back(uppers[k]);
                    weights.push_back(w);
                } else {
                    for (int axis = 0; axis < d; ++axis) {
                        parts.emplace_back(uppers[k].differentiate(axis));
                        weights.push_back(w);
                    }
                }
            }
        }
    }

    const int n = std::max(2, static_cast<int>(std::floor(
                                  std::pow(static_cast<double>(budget),
                                           1.0 / static_cast<double>(d)))));
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> pt(static_cast<std::size_t>(d));
    double best = 0.0;
    for (;;) {
        for (int i = 0; i < d; ++i) {
            const std::size_t u = static_cast<std::size_t>(i);
            pt[u] = domain.lower[u] + (domain.upper[u] - domain.lower[u]) *
                                          static_cast<double>(idx[u]) / static_cast<double>(n - 1);
        }
        double norm_sq = 0.0;
        for (std::size_t m = 0; m < parts.size(); ++m) {
            const double v = parts[m].eval(pt);
            norm_sq += weights[m] * v * v;
        }
        best = std::max(best, std::sqrt(norm_sq));
        int axis = 0;
        while (axis < d && ++idx[static_cast<std::size_t>(axis)] == n) {
            idx[static_cast<std::size_t>(axis)] = 0;
            ++axis;
        }
        if (axis == d) break;
    }
    return best;
}

}  // namespace qbnb
