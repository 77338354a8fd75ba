#include "qbnb/rules.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <span>

#include "qbnb/errors.hpp"
#include "qbnb/linalg.hpp"
#include "qbnb/pgd.hpp"

namespace qbnb {
namespace detail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool ball2r_inside_raw(const double* center, double r, const Box& domain, int dim) {
    for (int i = 0; i < dim; ++i) {
        if (center[i] - 2.0 * r < domain.lower[i]) return false;
        if (center[i] + 2.0 * r > domain.upper[i]) return false;
    }
    return true;
}

CoreOutcome core_lipschitz(const Problem& p, const double* center, const double* /*half*/,
                           double r, double* sample_out, WorkCounters& work) {
    if (!p.l1) throw MissingConstant("rule_lipschitz: problem has no l1 constant");
    const double fc = p.objective(std::span<const double>(center, static_cast<std::size_t>(p.dim)));
    ++work.f_evals;
    std::memcpy(sample_out, center, static_cast<std::size_t>(p.dim) * sizeof(double));
    return {BoundStatus::Bounded, fc - *p.l1 * r, fc};
}

CoreOutcome core_lipschitz_gradient(const Problem& p, const double* center, const double* half,
                                    double r, double* sample_out, WorkCounters& work) {
    if (!p.gradient) throw MissingOracle("rule_lipschitz_gradient: problem has no gradient oracle");
    if (!p.l2) throw MissingConstant("rule_lipschitz_gradient: problem has no l2 constant");
    const std::span<const double> c(center, static_cast<std::size_t>(p.dim));
    const double fc = p.objective(c);
    ++work.f_evals;
    const std::vector<double> g = p.gradient(c);
    ++work.grad_evals;

    double slope = 0.0;
    for (int i = 0; i < p.dim; ++i) slope += std::fabs(g[i]) * half[i];
    const double qlb = fc - slope - 0.5 * *p.l2 * r * r;

    // Sample the corner the negative gradient points into; a zero component
    // counts as nonnegative so ties break the same way everywhere.
    for (int i = 0; i < p.dim; ++i) {
        sample_out[i] = center[i] - (g[i] >= 0.0 ? half[i] : -half[i]);
    }
    const double fs =
        p.objective(std::span<const double>(sample_out, static_cast<std::size_t>(p.dim)));
    ++work.f_evals;
    return {BoundStatus::Bounded, qlb, fs};
}

CoreOutcome core_qbnb2(const Problem& p, const double* center, const double* /*half*/, double r,
                       double* sample_out, WorkCounters& work) {
    if (!p.l2) throw MissingConstant("rule_qbnb2: problem has no l2 constant");
    if (!p.unconstrained) {
        throw ConstraintViolation(
            "rule_qbnb2: quasi-bound is only valid when no global minimizer sits on the "
            "domain boundary; set Problem::unconstrained to assert that");
    }
    const double fc = p.objective(std::span<const double>(center, static_cast<std::size_t>(p.dim)));
    ++work.f_evals;
    std::memcpy(sample_out, center, static_cast<std::size_t>(p.dim) * sizeof(double));
    return {BoundStatus::Bounded, fc - 0.5 * *p.l2 * r * r, fc};
}

CoreOutcome core_constrained_qbnb2(const Problem& p, const double* center, const double* half,
                                   double /*r*/, double* sample_out, WorkCounters& work) {
    if (!p.l2) throw MissingConstant("rule_constrained_qbnb2: problem has no l2 constant");

    // A cube spanning a full domain edge leaves no room for the reflection
    // argument behind the bound: abstain rather than mis-bound.
    for (int i = 0; i < p.dim; ++i) {
        if (2.0 * half[i] >= p.domain.upper[i] - p.domain.lower[i]) {
            std::memcpy(sample_out, center, static_cast<std::size_t>(p.dim) * sizeof(double));
            const double fc =
                p.objective(std::span<const double>(center, static_cast<std::size_t>(p.dim)));
            ++work.f_evals;
            return {BoundStatus::Unbounded, -kInf, fc};
        }
    }

    // Faces flush with the domain boundary attract the sample onto them (a
    // boundary minimizer can hide there); free coordinates sample the middle.
    double penalty = 0.0;
    for (int i = 0; i < p.dim; ++i) {
        const double lo_face = center[i] - half[i];
        const double hi_face = center[i] + half[i];
        const double tol = 1e-12 * (p.domain.upper[i] - p.domain.lower[i]);
        double xi = center[i];
        if (lo_face - p.domain.lower[i] <= tol) {
            xi = lo_face;
        } else if (p.domain.upper[i] - hi_face <= tol) {
            xi = hi_face;
        }
        sample_out[i] = xi;
        const double dlo = xi - lo_face;
        const double dhi = hi_face - xi;
        penalty += std::max(dlo * dlo, dhi * dhi);
    }
    const double fs =
        p.objective(std::span<const double>(sample_out, static_cast<std::size_t>(p.dim)));
    ++work.f_evals;
    return {BoundStatus::Bounded, fs - 0.5 * *p.l2 * penalty, fs};
}

CoreOutcome core_alphabb(const Problem& p, const double* center, const double* half, double r,
                         const ConvexMinimizerConfig& config, double* sample_out,
                         WorkCounters& work) {
    if (!p.gradient) throw MissingOracle("rule_alphabb: problem has no gradient oracle");
    if (!p.hessian) throw MissingOracle("rule_alphabb: problem has no hessian oracle");
    if (!p.l3) throw MissingConstant("rule_alphabb: problem has no l3 constant");

    const std::span<const double> c(center, static_cast<std::size_t>(p.dim));
    const SymMatrix hess = p.hessian(c);
    ++work.hess_evals;
    const auto [lambda_min, lambda_max] = eigen_range(hess);
    (void)lambda_max;
    // Shift weight that convexifies f over the whole cube: the Hessian's
    // smallest eigenvalue can drop at most L3*r below its center value.
    const double alpha = std::max(0.0, -0.5 * (lambda_min - *p.l3 * r));

    Box cube_box;
    cube_box.lower.resize(p.dim);
    cube_box.upper.resize(p.dim);
    for (int i = 0; i < p.dim; ++i) {
        cube_box.lower[i] = center[i] - half[i];
        cube_box.upper[i] = center[i] + half[i];
    }

    // Underestimator L(x) = f(x) + alpha*sum_i (x_i - lo_i)(x_i - hi_i):
    // the quadratic is nonpositive on the cube and vanishes at its corners.
    const auto under_value = [&](std::span<const double> x) {
        const double fx = p.objective(x);
        ++work.f_evals;
        double quad = 0.0;
        for (int i = 0; i < p.dim; ++i) {
            quad += (x[i] - cube_box.lower[i]) * (x[i] - cube_box.upper[i]);
        }
        return fx + alpha * quad;
    };
    const auto under_gradient = [&](std::span<const double> x) {
        std::vector<double> g = p.gradient(x);
        ++work.grad_evals;
        for (int i = 0; i < p.dim; ++i) g[i] += 2.0 * alpha * (x[i] - center[i]);
        return g;
    };

    PgdConfig pgd;
    pgd.objective_tol = 1e-2 * config.epsilon;
    pgd.max_iters = config.max_iters;
    const PgdResult res = minimize_box(under_value, under_gradient, cube_box, c, pgd);
    work.pgd_iters += res.iters;

    if (!res.converged) {
        // Inner solver ran out of iterations: fall back to a cheaper bound
        // rather than trusting an uncertified value.
        if (p.gradient && p.l2) {
            return core_lipschitz_gradient(p, center, half, r, sample_out, work);
        }
        std::memcpy(sample_out, center, static_cast<std::size_t>(p.dim) * sizeof(double));
        const double fc = p.objective(c);
        ++work.f_evals;
        return {BoundStatus::Unbounded, -kInf, fc};
    }

    // Convexity of L on the cube turns the projected-gradient norm into a
    // suboptimality certificate over the cube's diameter 2r.
    const double qlb = res.value - res.pg_norm * 2.0 * r;
    std::memcpy(sample_out, res.x.data(), static_cast<std::size_t>(p.dim) * sizeof(double));
    const double fs = p.objective(res.x);
    ++work.f_evals;
    return {BoundStatus::Bounded, qlb, fs};
}

CoreOutcome core_qbnb23(const Problem& p, const double* center, const double* half, double r,
                        double epsilon, double* sample_out, WorkCounters& work) {
    if (!p.l2) throw MissingConstant("rule_qbnb23: problem has no l2 constant");
    if (!p.l3) throw MissingConstant("rule_qbnb23: problem has no l3 constant");
    const bool third = ball2r_inside_raw(center, r, p.domain, p.dim) &&
                       (*p.l3 == 0.0 || r <= *p.l2 / (6.0 * *p.l3));
    if (third) {
        CoreOutcome out = core_qbnb3(p, center, half, r, epsilon, sample_out, work);
        out.third_order = true;
        return out;
    }
    return core_qbnb2(p, center, half, r, sample_out, work);
}

}  // namespace detail

namespace {

template <typename Core>
RuleOutcome run_core(const Problem& problem, const Cube& cube, Core&& core) {
    if (cube.dim() != problem.dim) {
        throw DomainError("bounding rule: cube dimension does not match problem dimension");
    }
    RuleOutcome out;
    out.sample.resize(problem.dim);
    const double r = radius(cube.half);
    const detail::CoreOutcome res =
        core(cube.center.data(), cube.half.data(), r, out.sample.data(), out.work);
    out.status = res.status;
    out.qlb = res.qlb;
    out.f_sample = res.f_sample;
    out.third_order = res.third_order;
    out.lambda_bar = res.lambda_bar;
    return out;
}

}  // namespace

RuleOutcome rule_lipschitz(const Problem& problem, const Cube& cube) {
    return run_core(problem, cube,
                    [&](const double* c, const double* h, double r, double* s, WorkCounters& w) {
                        return detail::core_lipschitz(problem, c, h, r, s, w);
                    });
}

RuleOutcome rule_lipschitz_gradient(const Problem& problem, const Cube& cube) {
    return run_core(problem, cube,
                    [&](const double* c, const double* h, double r, double* s, WorkCounters& w) {
                        return detail::core_lipschitz_gradient(problem, c, h, r, s, w);
                    });
}

RuleOutcome rule_qbnb2(const Problem& problem, const Cube& cube) {
    return run_core(problem, cube,
                    [&](const double* c, const double* h, double r, double* s, WorkCounters& w) {
                        return detail::core_qbnb2(problem, c, h, r, s, w);
                    });
}

RuleOutcome rule_constrained_qbnb2(const Problem& problem, const Cube& cube) {
    return run_core(problem, cube,
                    [&](const double* c, const double* h, double r, double* s, WorkCounters& w) {
                        return detail::core_constrained_qbnb2(problem, c, h, r, s, w);
                    });
}

RuleOutcome rule_alphabb(const Problem& problem, const Cube& cube,
                         const ConvexMinimizerConfig& config) {
    return run_core(problem, cube,
                    [&](const double* c, const double* h, double r, double* s, WorkCounters& w) {
                        return detail::core_alphabb(problem, c, h, r, config, s, w);
                    });
}

RuleChoice select_rule_qbnb23(const Problem& problem, const Cube& cube) {
    if (!problem.l2) throw MissingConstant("select_rule_qbnb23: problem has no l2 constant");
    if (!problem.l3) throw MissingConstant("select_rule_qbnb23: problem has no l3 constant");
    const double r = radius(cube.half);
    const bool third = ball2r_inside(cube, problem.domain) &&
                       (*problem.l3 == 0.0 || r <= *problem.l2 / (6.0 * *problem.l3));
    return third ? RuleChoice::ThirdOrder : RuleChoice::SecondOrder;
}

RuleOutcome rule_qbnb23(const Problem& problem, const Cube& cube, double epsilon) {
    return run_core(problem, cube,
                    [&](const double* c, const double* h, double r, double* s, WorkCounters& w) {
                        return detail::core_qbnb23(problem, c, h, r, epsilon, s, w);
                    });
}

}  // namespace qbnb
