#pragma once

#include "qbnb/geometry.hpp"
#include "qbnb/problem.hpp"
#include "qbnb/rule_core.hpp"

namespace qbnb {

// Third-order bounding rule.
//
// At the cube center x0 with circumradius r it checks the curvature
// certificate lambda_min(H(x0)) >= -L3*r; failure eliminates the cube, since
// a cube containing an unconstrained minimizer must be near-convex at that
// scale. Otherwise it minimizes the regularized surrogate
//   fhat(x) = f(x) + (lambda_bar/2)*|x - x0|^2,
//   lambda_bar = max(0, 5*L3*r - lambda_min),
// by damped Newton steps solved with an LDL^T factorization. Each step must
// contract within shrinking balls (r_{k+1} = r_k^2 / (2r)); a violated
// containment certificate also eliminates the cube. The iteration stops at
// the first K with (M/2)*r_K^2 <= epsilon/200 where
// M = lambda_max(H(x0)) + lambda_bar + 2*L3*r, and returns
//   qlb = fhat(x_K) - (lambda_bar/2)*r^2 - epsilon/200
// with sample x_K, which stays inside the closed 2r-ball around x0. The gap
// f(cube minimum) - qlb is at most 3*L3*r^3 + epsilon/200 on minimizer cubes;
// with lambda_bar = 0 it is exactly epsilon/200.
//
// Callers must ensure the 2r-ball around the center lies inside the domain
// (the rule abstains with Unbounded otherwise). Needs gradient, hessian, l3.
// epsilon is the enclosing search accuracy.
RuleOutcome rule_qbnb3(const Problem& problem, const Cube& cube, double epsilon);

namespace detail {
CoreOutcome core_qbnb3(const Problem& p, const double* center, const double* half, double r,
                       double epsilon, double* sample_out, WorkCounters& work);
}  // namespace detail

}  // namespace qbnb
