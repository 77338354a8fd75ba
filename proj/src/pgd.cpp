#include "qbnb/pgd.hpp"

#include <algorithm>
#include <cmath>

namespace qbnb {
namespace {

double clamp_to(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Norm of the gradient with components pointing out of the box zeroed; this
// vanishes exactly at box-constrained stationary points.
double projected_gradient_norm(std::span<const double> x, const std::vector<double>& g,
                               const Box& box) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double gi = g[i];
        if (x[i] <= box.lower[i] && gi > 0.0) gi = 0.0;
        if (x[i] >= box.upper[i] && gi < 0.0) gi = 0.0;
        sum += gi * gi;
    }
    return std::sqrt(sum);
}

}  // namespace

PgdResult minimize_box(const std::function<double(std::span<const double>)>& value,
                       const std::function<std::vector<double>(std::span<const double>)>& gradient,
                       const Box& box, std::span<const double> start, const PgdConfig& config) {
    const std::size_t n = start.size();
    PgdResult res;
    res.x.assign(start.begin(), start.end());
    for (std::size_t i = 0; i < n; ++i) {
        res.x[i] = clamp_to(res.x[i], box.lower[i], box.upper[i]);
    }
    res.value = value(res.x);

    double step = 1.0;
    std::vector<double> trial(n);
    for (res.iters = 0; res.iters < config.max_iters; ++res.iters) {
        const std::vector<double> g = gradient(res.x);
        res.pg_norm = projected_gradient_norm(res.x, g, box);
        if (res.pg_norm <= config.grad_tol_rel * (1.0 + std::fabs(res.value))) {
            res.converged = true;
            return res;
        }

        // Backtracking line search on the projected step. The Armijo test uses
        // the inner product with the actual displacement, which is the correct
        // sufficient-decrease model once projection bends the step.
        step *= 2.0;  // allow recovery after conservative previous steps
        bool accepted = false;
        double trial_value = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
            double descent = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = clamp_to(res.x[i] - step * g[i], box.lower[i], box.upper[i]);
                descent += g[i] * (trial[i] - res.x[i]);
            }
            trial_value = value(trial);
            if (trial_value <= res.value + config.armijo * descent) {
                accepted = true;
                break;
            }
            step *= config.shrink;
        }
        if (!accepted) {
            // The step underflowed without sufficient decrease: numerically
            // stationary. Report convergence at the current point.
            res.converged = true;
            return res;
        }

        const double decrease = res.value - trial_value;
        res.x.swap(trial);
        res.value = trial_value;
        if (decrease <= config.objective_tol) {
            ++res.iters;
            res.converged = true;
            const std::vector<double> gf = gradient(res.x);
            res.pg_norm = projected_gradient_norm(res.x, gf, box);
            return res;
        }
    }
    // Iteration cap: refresh the certificate norm at the final point.
    const std::vector<double> gf = gradient(res.x);
    res.pg_norm = projected_gradient_norm(res.x, gf, box);
    return res;
}

}  // namespace qbnb
