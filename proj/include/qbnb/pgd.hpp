#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qbnb/geometry.hpp"

namespace qbnb {

struct PgdConfig {
    // Stop when the decrease of one accepted step falls to this or below.
    double objective_tol = 0.0;
    // Stop when the projected-gradient norm falls to grad_tol_rel*(1+|value|).
    double grad_tol_rel = 1e-9;
    int max_iters = 10000;
    double armijo = 1e-4;   // sufficient-decrease fraction
    double shrink = 0.5;    // backtracking step multiplier
};

struct PgdResult {
    std::vector<double> x;
    double value = 0.0;
    double pg_norm = 0.0;  // projected-gradient norm at x
    int iters = 0;
    // False only when the iteration cap was reached before either stopping
    // test fired; the iterate is still the best point seen.
    bool converged = false;
};

// Projected gradient descent with Armijo backtracking for minimizing a smooth
// function over a box. Deterministic: no randomization, fixed evaluation
// order. The iterates decrease monotonically, so the final point is the best.
PgdResult minimize_box(const std::function<double(std::span<const double>)>& value,
                       const std::function<std::vector<double>(std::span<const double>)>& gradient,
                       const Box& box, std::span<const double> start, const PgdConfig& config);

}  // namespace qbnb
