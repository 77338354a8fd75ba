#pragma once

#include <span>

#include "qbnb/geometry.hpp"
#include "qbnb/newton3.hpp"
#include "qbnb/problem.hpp"
#include "qbnb/rule_core.hpp"

namespace qbnb {

// Tuning for the convex-underestimator rule's inner solver.
struct ConvexMinimizerConfig {
    // Target accuracy of the enclosing search; the inner solver stops once a
    // step decreases the underestimator by no more than 1e-2 of this.
    double epsilon = 1e-8;
    int max_iters = 10000;
};

// Quasi-lower-bound rules. Each bounds one cube of the search partition and
// returns a feasible sample point with its objective value. A rule may also
// report Eliminated (it certified the cube holds no global minimizer) or
// Unbounded (it does not apply to this cube and abstains).
//
// All rules assume cube is contained in problem.domain.

// f(center) - L1*r. Needs l1.
RuleOutcome rule_lipschitz(const Problem& problem, const Cube& cube);

// First-order bound f(center) - sum_i |g_i(center)|*h_i - (L2/2)*r^2, sampled
// at the corner the negative gradient points to. Needs gradient and l2.
RuleOutcome rule_lipschitz_gradient(const Problem& problem, const Cube& cube);

// Second-order quasi-bound f(center) - (L2/2)*r^2, valid for cubes that
// contain a global minimizer when no minimizer sits on the domain boundary.
// Needs l2 and problem.unconstrained; throws ConstraintViolation otherwise.
RuleOutcome rule_qbnb2(const Problem& problem, const Cube& cube);

// Boundary-aware variant of the second-order quasi-bound. Faces of the cube
// that lie on the domain boundary pull the sample point onto them; cubes
// spanning a full domain edge get no bound (Unbounded). Needs l2.
RuleOutcome rule_constrained_qbnb2(const Problem& problem, const Cube& cube);

// Convex-underestimator bound: shifts the objective by a quadratic with
// weight alpha = max(0, -(lambda_min(H(center)) - L3*r)/2), minimizes the
// shifted function over the cube by projected gradient descent, and corrects
// the attained value by pg_norm*2r for inexactness. Falls back to the
// gradient-Lipschitz bound (or abstains) if the inner solver hits its
// iteration cap. Needs gradient, hessian, l3.
RuleOutcome rule_alphabb(const Problem& problem, const Cube& cube,
                         const ConvexMinimizerConfig& config);

enum class RuleChoice { SecondOrder, ThirdOrder };

// Chooses the third-order rule exactly when its containment and contraction
// preconditions hold: the closed 2r-ball around the center fits inside the
// domain, and r <= L2/(6*L3) (always true when L3 = 0). Needs l2 and l3.
RuleChoice select_rule_qbnb23(const Problem& problem, const Cube& cube);

// Combined rule: applies the selector, then the second- or third-order rule.
// The outcome's third_order flag records the branch taken.
RuleOutcome rule_qbnb23(const Problem& problem, const Cube& cube, double epsilon);

namespace detail {

// Allocation-light cores used both by the public wrappers above and by the
// search hot loop, which bounds millions of cubes against pooled storage.
// sample_out must have room for problem.dim doubles; r is the cube
// circumradius |half|_2. Cores fill qlb / f_sample / status and write the
// sample point; they never allocate for the common rules.
CoreOutcome core_lipschitz(const Problem& p, const double* center, const double* half, double r,
                           double* sample_out, WorkCounters& work);
CoreOutcome core_lipschitz_gradient(const Problem& p, const double* center, const double* half,
                                    double r, double* sample_out, WorkCounters& work);
CoreOutcome core_qbnb2(const Problem& p, const double* center, const double* half, double r,
                       double* sample_out, WorkCounters& work);
CoreOutcome core_constrained_qbnb2(const Problem& p, const double* center, const double* half,
                                   double r, double* sample_out, WorkCounters& work);
CoreOutcome core_alphabb(const Problem& p, const double* center, const double* half, double r,
                         const ConvexMinimizerConfig& config, double* sample_out,
                         WorkCounters& work);
CoreOutcome core_qbnb23(const Problem& p, const double* center, const double* half, double r,
                        double epsilon, double* sample_out, WorkCounters& work);

}  // namespace detail

}  // namespace qbnb
