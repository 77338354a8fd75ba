#pragma once

#include <vector>

#include "qbnb/expr.hpp"
#include "qbnb/geometry.hpp"

namespace qbnb {

// Symbolic gradient: entry i is the partial derivative with respect to x_{i+1}.
std::vector<Expr> gradient_exprs(const Expr& f, int dim);

// Symbolic Hessian upper triangle in row-major (i <= j) order.
// Entry index for (i, j): i * dim - i * (i - 1) / 2 + (j - i).
std::vector<Expr> hessian_upper_exprs(const Expr& f, int dim);

// Lipschitz constant of order s for f over the box, from interval arithmetic:
//   s = 1  bounds sup |grad f|_2        via sqrt(sum_i max(lo_i^2, hi_i^2))
//   s = 2  bounds sup |H f|_F           over all d^2 entries
//   s = 3  bounds sup |D^3 f|_F         over all d^3 entries
// The Frobenius-style sums dominate the corresponding operator norms, so the
// result is a valid global constant of that order on the box. Each distinct
// sorted index tuple is differentiated once and weighted by its multiplicity.
// Throws DomainError if a derivative tree cannot be evaluated on the box.
double lipschitz_bound(const Expr& f, const Box& domain, int order);

// Empirical counterpart of lipschitz_bound: the same derivative-tensor norm
// maximized over an inclusive lattice of about `budget` points (so its value
// can only under-shoot the true supremum). A sound interval constant is >=
// this for any budget; the bounds command and the soundness tests compare
// the two.
double grid_derivative_norm_max(const Expr& f, const Box& domain, int order,
                                long long budget = 200000);

}  // namespace qbnb
