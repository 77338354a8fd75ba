#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbnb/geometry.hpp"
#include "qbnb/linalg.hpp"

namespace qbnb {

// Oracle call counts, aggregated per rule call and per solve.
struct WorkCounters {
    long long f_evals = 0;
    long long grad_evals = 0;
    long long hess_evals = 0;
    long long newton_iters = 0;
    long long pgd_iters = 0;

    WorkCounters& operator+=(const WorkCounters& o) {
        f_evals += o.f_evals;
        grad_evals += o.grad_evals;
        hess_evals += o.hess_evals;
        newton_iters += o.newton_iters;
        pgd_iters += o.pgd_iters;
        return *this;
    }
};

// Minimization problem over an axis-aligned box. Oracles must be pure and
// reentrant: rules may run from concurrent workers. gradient/hessian may be
// left empty for derivative-free use; rules that need them say so.
struct Problem {
    int dim = 0;
    Box domain;
    std::function<double(std::span<const double>)> objective;
    std::function<std::vector<double>(std::span<const double>)> gradient;
    std::function<SymMatrix(std::span<const double>)> hessian;
    std::optional<double> l1;  // Lipschitz constant of f
    std::optional<double> l2;  // Lipschitz constant of grad f
    std::optional<double> l3;  // Lipschitz constant of the Hessian
    // Caller's assertion that the minimum over an open superset of the domain
    // equals the minimum over the domain (no boundary minimum). Rules that
    // are only quasi-valid under this assumption refuse to run without it.
    bool unconstrained = false;
    std::string name;
};

enum class BoundStatus {
    Bounded,     // finite quasi-lower bound
    Eliminated,  // certificate that no global minimizer lives here (q = +inf)
    Unbounded,   // rule not applicable to this cube (q = -inf, never eliminated)
};

// Result of one bounding-rule application to one cube.
struct RuleOutcome {
    BoundStatus status = BoundStatus::Bounded;
    double qlb = 0.0;
    // Feasible point whose true objective value drives upper-bound updates.
    // Rules sample inside the cube; the third-order rule may return its final
    // Newton iterate anywhere in the closed 2r-ball around the cube center,
    // which its applicability test keeps inside the domain.
    std::vector<double> sample;
    double f_sample = 0.0;  // objective at sample, already evaluated
    // Diagnostics for instrumentation: which branch the 2+3 selector took and
    // the regularizer weight the third-order rule used.
    bool third_order = false;
    double lambda_bar = 0.0;
    WorkCounters work;
};

}  // namespace qbnb
