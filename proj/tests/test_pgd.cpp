#include <doctest.h>

#include <cmath>
#include <span>
#include <vector>

#include "qbnb/pgd.hpp"

using namespace qbnb;

namespace {

Box make_box(std::vector<double> lo, std::vector<double> hi) { return Box(std::move(lo), std::move(hi)); }

}  // namespace

TEST_CASE("interior minimum of a convex quadratic") {
    auto value = [](std::span<const double> x) {
        return (x[0] - 1.0) * (x[0] - 1.0) + (x[1] + 2.0) * (x[1] + 2.0);
    };
    auto gradient = [](std::span<const double> x) {
        return std::vector<double>{2.0 * (x[0] - 1.0), 2.0 * (x[1] + 2.0)};
    };
    const Box box = make_box({-5.0, -5.0}, {5.0, 5.0});
    const std::vector<double> start = {0.0, 0.0};

    const PgdResult res = minimize_box(value, gradient, box, start, PgdConfig{});
    CHECK(res.converged);
    CHECK(res.value <= 1e-12);
    CHECK(std::abs(res.x[0] - 1.0) <= 1e-6);
    CHECK(std::abs(res.x[1] + 2.0) <= 1e-6);
    CHECK(res.pg_norm <= 1e-9 * (1.0 + std::abs(res.value)) + 1e-15);
}

TEST_CASE("minimum on the box boundary projects cleanly") {
    // Unconstrained minimizer x = 10 lies far outside [0, 1]; the projected
    // gradient at the boundary optimum x = 1 is exactly zero.
    auto value = [](std::span<const double> x) { return (x[0] - 10.0) * (x[0] - 10.0); };
    auto gradient = [](std::span<const double> x) {
        return std::vector<double>{2.0 * (x[0] - 10.0)};
    };
    const Box box = make_box({0.0}, {1.0});
    const std::vector<double> start = {0.25};

    const PgdResult res = minimize_box(value, gradient, box, start, PgdConfig{});
    CHECK(res.converged);
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.value == doctest::Approx(81.0).epsilon(1e-12));
    CHECK(res.pg_norm <= 1e-12);
}

TEST_CASE("start point outside the box is clamped first") {
    auto value = [](std::span<const double> x) { return x[0] * x[0]; };
    auto gradient = [](std::span<const double> x) { return std::vector<double>{2.0 * x[0]}; };
    const Box box = make_box({1.0}, {3.0});
    const std::vector<double> start = {-7.0};

    const PgdResult res = minimize_box(value, gradient, box, start, PgdConfig{});
    CHECK(res.converged);
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("iteration cap reports non-convergence but a valid iterate") {
    auto value = [](std::span<const double> x) {
        return (x[0] - 1.0) * (x[0] - 1.0) + (x[1] + 2.0) * (x[1] + 2.0);
    };
    auto gradient = [](std::span<const double> x) {
        return std::vector<double>{2.0 * (x[0] - 1.0), 2.0 * (x[1] + 2.0)};
    };
    const Box box = make_box({-5.0, -5.0}, {5.0, 5.0});
    const std::vector<double> start = {4.0, 4.0};

    PgdConfig cfg;
    cfg.max_iters = 0;
    const PgdResult res = minimize_box(value, gradient, box, start, cfg);
    CHECK_FALSE(res.converged);
    CHECK(res.iters == 0);
    CHECK(res.x[0] == 4.0);  // never moved
    CHECK(res.x[1] == 4.0);
    CHECK(res.value == value(std::span<const double>(res.x)));
    CHECK(res.pg_norm > 1.0);  // refreshed at exit even without steps
}

TEST_CASE("a loose objective tolerance stops early") {
    auto value = [](std::span<const double> x) { return x[0] * x[0]; };
    auto gradient = [](std::span<const double> x) { return std::vector<double>{2.0 * x[0]}; };
    const Box box = make_box({-10.0}, {10.0});
    const std::vector<double> start = {8.0};

    PgdConfig cfg;
    cfg.objective_tol = 1e6;  // any accepted step satisfies it
    const PgdResult res = minimize_box(value, gradient, box, start, cfg);
    CHECK(res.converged);
    CHECK(res.iters <= 1);
    CHECK(res.value <= 64.0);  // still made progress (monotone descent)
}

TEST_CASE("descent is monotone relative to the start") {
    auto value = [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += std::cos(3.0 * v) + 0.1 * v * v;
        return s;
    };
    auto gradient = [](std::span<const double> x) {
        std::vector<double> g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = -3.0 * std::sin(3.0 * x[i]) + 0.2 * x[i];
        return g;
    };
    const Box box = make_box({-4.0, -4.0}, {4.0, 4.0});
    const std::vector<double> start = {3.5, -1.0};

    const PgdResult res = minimize_box(value, gradient, box, start, PgdConfig{});
    CHECK(res.value <= value(std::span<const double>(start)) + 1e-15);
    for (std::size_t i = 0; i < res.x.size(); ++i) {
        CHECK(res.x[i] >= box.lower[i]);
        CHECK(res.x[i] <= box.upper[i]);
    }
}
