#include "qbnb/newton3.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <span>
#include <vector>

#include "qbnb/errors.hpp"
#include "qbnb/linalg.hpp"
#include "qbnb/rule_core.hpp"

namespace qbnb {
namespace detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxNewtonSteps = 100;

double distance(std::span<const double> a, const double* b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace

CoreOutcome core_qbnb3(const Problem& p, const double* center, const double* /*half*/, double r,
                       double epsilon, double* sample_out, WorkCounters& work) {
    if (!p.gradient) throw MissingOracle("rule_qbnb3: problem has no gradient oracle");
    if (!p.hessian) throw MissingOracle("rule_qbnb3: problem has no hessian oracle");
    if (!p.l3) throw MissingConstant("rule_qbnb3: problem has no l3 constant");
    const double l3 = *p.l3;
    const int d = p.dim;
    const std::size_t n = static_cast<std::size_t>(d);
    const std::span<const double> x0(center, n);

    const auto abstain = [&](std::span<const double> at) {
        std::memcpy(sample_out, at.data(), n * sizeof(double));
        const double f = p.objective(at);
        ++work.f_evals;
        return CoreOutcome{BoundStatus::Unbounded, -kInf, f};
    };
    const auto eliminate = [&](std::span<const double> at) {
        std::memcpy(sample_out, at.data(), n * sizeof(double));
        const double f = p.objective(at);
        ++work.f_evals;
        return CoreOutcome{BoundStatus::Eliminated, kInf, f};
    };

    // Newton iterates are only certified inside the closed 2r-ball around the
    // center; if that ball pokes out of the domain, abstain.
    if (!ball2r_inside_raw(center, r, p.domain, d)) return abstain(x0);

    const SymMatrix h0 = p.hessian(x0);
    ++work.hess_evals;
    const auto [lambda_min, lambda_max] = eigen_range(h0);
    const double slack = 1e-12 * (1.0 + r);

    // A cube containing an unconstrained minimizer x* has
    // lambda_min(H(x0)) >= lambda_min(H(x*)) - L3*r >= -L3*r; cubes breaking
    // that are certified minimizer-free.
    if (lambda_min < -l3 * r - slack) return eliminate(x0);

    // Regularize enough that fhat is strongly convex on the 2r-ball: its
    // Hessian is H(x) + lambda_bar*I with lambda_min(H(x)) >= lambda_min - 2*L3*r
    // there, so the shift keeps curvature at least 3*L3*r.
    const double lambda_bar = std::max(0.0, 5.0 * l3 * r - lambda_min);
    const double curvature_cap = lambda_max + lambda_bar + 2.0 * l3 * r;
    const double eps_newton = epsilon / 200.0;

    std::vector<double> xk(center, center + d);
    std::vector<double> xnext(n);
    double rk = r;
    int steps = 0;
    while (0.5 * curvature_cap * rk * rk > eps_newton) {
        if (steps >= kMaxNewtonSteps) return abstain(xk);
        ++steps;

        SymMatrix hhat = (steps == 1) ? h0 : p.hessian(xk);
        if (steps > 1) ++work.hess_evals;
        for (int i = 0; i < d; ++i) hhat.at(i, i) += lambda_bar;

        // LDL^T doubles as the positive-definiteness certificate the step
        // needs; losing it means the curvature model broke down.
        Ldlt fact(hhat, 1e-14 * hhat.frobenius_norm());
        if (!fact.ok()) {
            return (l3 > 0.0) ? eliminate(xk) : abstain(xk);
        }

        std::vector<double> g = p.gradient(xk);
        ++work.grad_evals;
        for (int i = 0; i < d; ++i) g[i] += lambda_bar * (xk[i] - center[i]);
        const std::vector<double> step = fact.solve(g);
        for (int i = 0; i < d; ++i) xnext[i] = xk[i] - step[i];
        ++work.newton_iters;

        // Quadratic contraction certificates: on minimizer cubes the iterates
        // track the regularized minimizer through balls of radius
        // r_{k+1} = r_k^2/(2r); stepping outside eliminates the cube.
        const double r_next = rk * rk / (2.0 * r);
        if (distance(xnext, xk.data()) > rk + r_next + slack) return eliminate(xk);
        if (distance(xnext, center) > r_next + r + slack) return eliminate(xk);

        xk.swap(xnext);
        rk = r_next;
    }

    const double dist0 = distance(xk, center);
    const double fxk = p.objective(xk);
    ++work.f_evals;
    const double fhat = fxk + 0.5 * lambda_bar * dist0 * dist0;
    const double qlb = fhat - 0.5 * lambda_bar * r * r - eps_newton;
    std::memcpy(sample_out, xk.data(), n * sizeof(double));
    return {BoundStatus::Bounded, qlb, fxk, false, lambda_bar};
}

}  // namespace detail

RuleOutcome rule_qbnb3(const Problem& problem, const Cube& cube, double epsilon) {
    if (cube.dim() != problem.dim) {
        throw DomainError("rule_qbnb3: cube dimension does not match problem dimension");
    }
    RuleOutcome out;
    out.sample.resize(problem.dim);
    const double r = radius(cube.half);
    const detail::CoreOutcome res = detail::core_qbnb3(problem, cube.center.data(),
                                                       cube.half.data(), r, epsilon,
                                                       out.sample.data(), out.work);
    out.status = res.status;
    out.qlb = res.qlb;
    out.f_sample = res.f_sample;
    out.third_order = res.third_order;
    out.lambda_bar = res.lambda_bar;
    return out;
}

}  // namespace qbnb
