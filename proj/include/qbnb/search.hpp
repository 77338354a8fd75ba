#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "qbnb/geometry.hpp"
#include "qbnb/problem.hpp"
#include "qbnb/rules.hpp"

namespace qbnb {

enum class Algorithm {
    Lipschitz,          // zeroth-order bound from l1
    LipschitzGradient,  // first-order bound from gradient + l2
    AlphaBB,            // convex-underestimator bound
    Qbnb2,              // second-order quasi-bound (needs unconstrained)
    ConstrainedQbnb2,   // boundary-aware second-order quasi-bound
    Qbnb3,              // third-order rule standalone
    Qbnb23,             // selector between second- and third-order rules
};

// Stable lowercase names used by the CLI and result records.
const char* algorithm_name(Algorithm algo);
std::optional<Algorithm> algorithm_from_name(std::string_view name);

enum class SolveStatus {
    Converged,        // ub - lb <= epsilon (or the frontier emptied)
    TimeLimit,        // wall-clock budget exhausted; partial generation discarded
    GenerationLimit,  // reached config.max_generations
    MemoryLimit,      // frontier exceeded config.max_frontier_bytes
};
const char* status_name(SolveStatus status);

// Statistics for one completed generation (all frontier cubes share a depth).
struct GenerationRecord {
    long long depth = 0;
    // Rule evaluations performed while building this generation (2 per
    // bisected parent; 1 for the root generation).
    long long cubes_processed = 0;
    // Entries of this generation removed by a survival test. Cubes removed
    // when the generation is later consumed are added retroactively, so the
    // value is final only once the next record exists.
    long long cubes_eliminated = 0;
    long long cumulative_cubes = 0;  // total rule evaluations so far
    double lb = -std::numeric_limits<double>::infinity();  // min bound over this generation
    double ub = std::numeric_limits<double>::infinity();   // best sample value so far
    double cumulative_time_ms = 0.0;
};

// Result of tracking a reference point (a known minimizer) through the run:
// a sound rule never removes a cube containing it, so any violation is a
// bug-or-theory-breach detector.
struct RetentionReport {
    bool enabled = false;
    // True if a cube containing the reference point failed a survival test.
    bool violated = false;
    long long violation_generation = -1;
    // Generations for which some surviving cube contained the point.
    long long generations_retained = 0;
};

struct SearchConfig {
    double epsilon = 1e-8;
    double time_limit_seconds = std::numeric_limits<double>::infinity();
    long long max_generations = -1;  // < 0: unlimited
    int parallelism = 1;
    // Hard cap on frontier storage; 0 means unlimited. The solve stops with
    // MemoryLimit rather than thrashing when a low-order rule's frontier
    // outgrows the machine.
    std::size_t max_frontier_bytes = 0;
    // Called after each generation is built and folded (from the calling
    // thread, in depth order).
    std::function<void(const GenerationRecord&)> generation_observer;
    // Per-cube hook: every bounded child cube with its rule outcome. Setting
    // it routes the solve through the cube-materializing engine, which is
    // slower but hands out full geometry; call order is unspecified when
    // parallelism > 1.
    std::function<void(const Cube&, const RuleOutcome&)> cube_observer;
    // Non-empty enables retention instrumentation against this point.
    std::vector<double> reference_point;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Converged;
    double lb = -std::numeric_limits<double>::infinity();
    double ub = std::numeric_limits<double>::infinity();
    double f_best = std::numeric_limits<double>::infinity();  // == ub
    std::vector<double> best_point;
    long long generations = 0;       // deepest completed generation
    long long cubes_processed = 0;   // total rule evaluations
    double wall_time_ms = 0.0;
    WorkCounters work;
    std::vector<GenerationRecord> records;
    RetentionReport retention;
};

// Breadth-first branch and bound over the problem's domain box.
//
// Each generation holds same-depth cubes. Consuming a generation tests every
// entry against the upper bound frozen at the end of the previous fold,
// bisects survivors along their longest edge (lowest index on ties), bounds
// both children, and collects the children's sample values. Improvements to
// the upper bound fold in deterministically at generation end (strictly
// better value wins; ties keep the earliest cube in generation order), so
// results are identical for any parallelism level. Children whose bound
// already exceeds the frozen upper bound are counted but not stored; the
// surviving set is unchanged because the upper bound never increases.
//
// Termination: Converged once ub - lb <= epsilon (an emptied frontier
// reports lb = ub), else TimeLimit / GenerationLimit / MemoryLimit per the
// config. A time-limited run reports the state of the last completed
// generation.
SolveResult solve(const Problem& problem, Algorithm algorithm, const SearchConfig& config = {});

// Same search skeleton driven by a caller-supplied bounding rule. This path
// always materializes Cube objects (with split paths) and is meant for
// experimentation, not for frontiers beyond a few million cubes.
using RuleFn = std::function<RuleOutcome(const Problem&, const Cube&)>;
SolveResult solve(const Problem& problem, const RuleFn& rule, const SearchConfig& config = {});

// Worst-case single-bisection radius contraction sqrt((d - 3/4)/d): cutting
// the longest edge in half removes at least 3/4 of that edge's squared
// half-length, which is at least a 1/d share of r^2.
double radius_contraction_factor(int dim);

}  // namespace qbnb
