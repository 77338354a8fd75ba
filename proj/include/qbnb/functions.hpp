#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qbnb/expr.hpp"
#include "qbnb/problem.hpp"

namespace qbnb {

// A catalog entry: the problem plus provenance of its constants and reference
// minimum, so tests and the benchmark harness know what may be trusted.
struct TestProblem {
    Problem problem;
    // Where the function definition comes from (standard benchmark literature).
    std::string citation;
    // True when the L-constants are closed-form; false when the interval
    // engine derived them from the expression tree.
    bool analytic_constants = false;
    // Reference minimum when one is known in closed form. Error columns for
    // the other functions come from the grid+polish oracle at run time.
    std::optional<double> known_minimum;
    std::vector<double> known_minimizer;  // empty when not pinned
    std::optional<Expr> expression;       // symbolic form when built from one
};

// Sum of alpha_i*(1 - cos(theta*x_i)) plus delta*|x|^2 on [-a, a]^d, with
// closed-form gradient, Hessian, and Lipschitz constants
//   L1 = |alpha|_2*|theta| + 2*|delta|*sqrt(d)*a,
//   L2 = |alpha|_2*theta^2 + 2*|delta|,
//   L3 = |alpha|_2*|theta|^3.
// With alpha >= 0 and delta >= 0 every term is minimized at the origin, so
// the problem is marked unconstrained and the minimum 0 is exact.
TestProblem rastrigin_family(std::vector<double> alpha, double theta, double delta, double a);

// Standard parameters: alpha_i = 10, theta = 2*pi, delta = 1, a = 5.12.
TestProblem rastrigin_standard(int dim);

enum class DixonSzego {
    Branin,
    Camelback,
    GoldsteinPrice,
    Shubert,
    Hartman3,
    Shekel5,
    Shekel7,
    Shekel10,
    Hartman6,
};

// Classic global-optimization test set, each built as an expression tree on
// its canonical domain; L1/L2/L3 come from the interval engine, so they are
// sound but not tight.
TestProblem dixon_szego(DixonSzego which);
const char* dixon_szego_name(DixonSzego which);

// d=3 instance of the family above with alpha drawn uniformly from [0,1]^3
// by a seeded deterministic generator; delta = +1 keeps the origin optimal,
// delta = -1 pushes the minimum onto the domain boundary.
TestProblem random_rastrigin_like(std::uint64_t seed, double delta);

// Name-based lookup used by the CLI: "rastrigin" and "sphere" honor dim,
// "random_rastrigin" honors seed and delta, and the Dixon-Szego names are
// fixed-dimension. Throws DomainError for unknown names or a dim mismatch.
TestProblem make_catalog_problem(const std::string& name, int dim = 0, std::uint64_t seed = 1,
                                 double delta = 1.0);
std::vector<std::string> catalog_names();

}  // namespace qbnb
