#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <span>
#include <vector>

#include "qbnb/errors.hpp"
#include "qbnb/functions.hpp"
#include "qbnb/search.hpp"

using namespace qbnb;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (x - 0.3)^2 on [-1, 1]: simple, interior minimizer known by construction.
Problem shifted_parabola() {
    Problem p;
    p.dim = 1;
    p.domain = Box({-1.0}, {1.0});
    p.objective = [](std::span<const double> x) {
        return (x[0] - 0.3) * (x[0] - 0.3);
    };
    p.gradient = [](std::span<const double> x) {
        return std::vector<double>{2.0 * (x[0] - 0.3)};
    };
    p.hessian = [](std::span<const double>) {
        SymMatrix h(1);
        h.set_sym(0, 0, 2.0);
        return h;
    };
    p.l1 = 2.6;  // sup |2(x - 0.3)| on [-1, 1]
    p.l2 = 2.0;
    p.l3 = 0.0;
    p.unconstrained = true;
    p.name = "shifted_parabola";
    return p;
}

void check_record_invariants(const SolveResult& res) {
    REQUIRE_FALSE(res.records.empty());
    long long cumulative = 0;
    double prev_ub = kInf;
    for (std::size_t i = 0; i < res.records.size(); ++i) {
        const GenerationRecord& rec = res.records[i];
        CHECK(rec.depth == static_cast<long long>(i));
        CHECK(rec.cubes_processed >= 0);
        CHECK(rec.cubes_eliminated >= 0);
        CHECK(rec.cubes_eliminated <= rec.cubes_processed);
        cumulative += rec.cubes_processed;
        CHECK(rec.cumulative_cubes == cumulative);
        CHECK(rec.ub <= prev_ub);  // upper bound never increases
        prev_ub = rec.ub;
    }
    CHECK(res.cubes_processed == cumulative);
    CHECK(res.generations == res.records.back().depth);
    CHECK(res.f_best == res.ub);
}

}  // namespace

TEST_CASE("convex objective converges in a handful of generations") {
    const Problem p = make_catalog_problem("sphere", 2).problem;
    SearchConfig cfg;
    cfg.epsilon = 1e-8;

    const SolveResult res = solve(p, Algorithm::Qbnb2, cfg);
    CHECK(res.status == SolveStatus::Converged);
    CHECK(res.f_best == 0.0);  // root center is the exact minimizer
    CHECK(res.best_point[0] == 0.0);
    CHECK(res.best_point[1] == 0.0);
    CHECK(res.ub - res.lb <= 1e-8);
    CHECK(res.lb <= res.ub);
    CHECK(res.generations <= 6);
    CHECK(res.cubes_processed <= 63);
    check_record_invariants(res);
}

TEST_CASE("multimodal run: records, retention, and bound soundness") {
    const Problem p = rastrigin_standard(2).problem;
    SearchConfig cfg;
    cfg.epsilon = 1e-8;
    cfg.reference_point = {0.0, 0.0};

    const SolveResult res = solve(p, Algorithm::Qbnb2, cfg);
    REQUIRE(res.status == SolveStatus::Converged);
    check_record_invariants(res);

    CHECK(res.ub - res.lb <= 1e-8);
    CHECK(res.f_best <= 1e-8);
    CHECK(std::fabs(res.best_point[0]) <= 1e-4);
    CHECK(std::fabs(res.best_point[1]) <= 1e-4);
    CHECK(res.generations >= 20);
    CHECK(res.generations <= 60);
    CHECK(p.domain.contains(res.best_point));

    // The true minimum is 0 at the origin: every generation's bounds must
    // bracket it.
    for (const GenerationRecord& rec : res.records) {
        CHECK(rec.lb <= 1e-9);
        CHECK(rec.ub >= 0.0);
    }
    CHECK(res.records.back().lb == res.lb);
    CHECK(res.records.back().ub == res.ub);

    // One objective call per second-order rule application.
    CHECK(res.work.f_evals == res.cubes_processed);

    CHECK(res.retention.enabled);
    CHECK_FALSE(res.retention.violated);
    CHECK(res.retention.generations_retained ==
          static_cast<long long>(res.records.size()));
}

TEST_CASE("an emptied frontier converges with lb pinned to ub") {
    Problem p;
    p.dim = 1;
    p.domain = Box({0.0}, {1.0});
    p.objective = [](std::span<const double> x) { return x[0]; };
    p.name = "identity";

    // Keeps the root, then reports every deeper cube as worse than its own
    // sample: generation 1 is built, prefiltered away entirely, and the run
    // must still fold the children's samples into the upper bound.
    const RuleFn rule = [](const Problem& pr, const Cube& c) {
        RuleOutcome out;
        out.sample = c.center;
        out.f_sample = pr.objective(std::span<const double>(c.center));
        out.qlb = c.path.depth() == 0 ? -10.0 : out.f_sample + 1.0;
        return out;
    };

    const SolveResult res = solve(p, rule, SearchConfig{});
    CHECK(res.status == SolveStatus::Converged);
    CHECK(res.lb == res.ub);
    CHECK(res.ub == 0.25);  // best child sample f(0.25)
    CHECK(res.f_best == 0.25);
    CHECK(res.best_point[0] == 0.25);
    CHECK(res.generations == 1);
    REQUIRE(res.records.size() == 2);
    CHECK(res.records[1].cubes_processed == 2);
    CHECK(res.records[1].cubes_eliminated == 2);
    CHECK(res.records[1].lb == 1.25);  // min bound among the pruned children
}

TEST_CASE("a huge tolerance converges at the root generation") {
    const Problem p = rastrigin_standard(2).problem;
    SearchConfig cfg;
    cfg.epsilon = 1e6;
    const SolveResult res = solve(p, Algorithm::Qbnb2, cfg);
    CHECK(res.status == SolveStatus::Converged);
    CHECK(res.generations == 0);
    CHECK(res.cubes_processed == 1);
    CHECK(res.records.size() == 1);
}

TEST_CASE("stop reasons") {
    const Problem p = rastrigin_standard(2).problem;

    SUBCASE("generation limit") {
        SearchConfig cfg;
        cfg.epsilon = 1e-8;
        cfg.max_generations = 5;
        const SolveResult res = solve(p, Algorithm::Qbnb2, cfg);
        CHECK(res.status == SolveStatus::GenerationLimit);
        CHECK(res.generations == 5);
        CHECK(res.records.size() == 6);
        CHECK(res.ub - res.lb > 1e-8);  // genuinely unfinished
    }

    SUBCASE("time limit") {
        SearchConfig cfg;
        cfg.epsilon = 1e-12;
        cfg.time_limit_seconds = 0.05;
        const SolveResult res = solve(p, Algorithm::Lipschitz, cfg);
        CHECK(res.status == SolveStatus::TimeLimit);
        REQUIRE_FALSE(res.records.empty());
        CHECK(res.generations == res.records.back().depth);
    }

    SUBCASE("memory limit, compact engine") {
        SearchConfig cfg;
        cfg.epsilon = 1e-8;
        // Fits one storage chunk but not a parent and child side by side.
        cfg.max_frontier_bytes = 1500000;
        const SolveResult res = solve(p, Algorithm::Qbnb2, cfg);
        CHECK(res.status == SolveStatus::MemoryLimit);
    }

    SUBCASE("memory limit, cube-materializing engine") {
        SearchConfig cfg;
        cfg.epsilon = 1e-8;
        cfg.max_frontier_bytes = 2048;
        cfg.cube_observer = [](const Cube&, const RuleOutcome&) {};
        const SolveResult res = solve(p, Algorithm::Qbnb2, cfg);
        CHECK(res.status == SolveStatus::MemoryLimit);
    }
}

TEST_CASE("parallel runs reproduce serial runs field for field") {
    struct Spec {
        Problem problem;
        Algorithm algo;
        double eps;
    };
    std::vector<Spec> specs;
    specs.push_back({rastrigin_standard(2).problem, Algorithm::Qbnb2, 1e-8});
    specs.push_back({random_rastrigin_like(3, -1.0).problem, Algorithm::ConstrainedQbnb2, 1e-6});
    specs.push_back({make_catalog_problem("sphere", 3).problem, Algorithm::LipschitzGradient, 1e-4});

    for (const Spec& s : specs) {
        CAPTURE(s.problem.name);
        CAPTURE(algorithm_name(s.algo));
        SearchConfig serial;
        serial.epsilon = s.eps;
        serial.parallelism = 1;
        SearchConfig wide = serial;
        wide.parallelism = 8;

        const SolveResult a = solve(s.problem, s.algo, serial);
        const SolveResult b = solve(s.problem, s.algo, wide);

        CHECK(a.status == b.status);
        CHECK(a.lb == b.lb);
        CHECK(a.ub == b.ub);
        CHECK(a.f_best == b.f_best);
        CHECK(a.best_point == b.best_point);
        CHECK(a.generations == b.generations);
        CHECK(a.cubes_processed == b.cubes_processed);
        CHECK(a.work.f_evals == b.work.f_evals);
        CHECK(a.work.grad_evals == b.work.grad_evals);
        CHECK(a.work.hess_evals == b.work.hess_evals);
        REQUIRE(a.records.size() == b.records.size());
        for (std::size_t i = 0; i < a.records.size(); ++i) {
            CHECK(a.records[i].cubes_processed == b.records[i].cubes_processed);
            CHECK(a.records[i].cubes_eliminated == b.records[i].cubes_eliminated);
            CHECK(a.records[i].cumulative_cubes == b.records[i].cumulative_cubes);
            CHECK(a.records[i].lb == b.records[i].lb);
            CHECK(a.records[i].ub == b.records[i].ub);
        }
    }
}

TEST_CASE("the two engines agree on the search outcome") {
    const Problem p = rastrigin_standard(2).problem;
    SearchConfig plain;
    plain.epsilon = 1e-8;
    SearchConfig observed = plain;
    long long seen = 0;
    observed.cube_observer = [&seen](const Cube&, const RuleOutcome&) { ++seen; };

    const SolveResult fast = solve(p, Algorithm::Qbnb2, plain);
    const SolveResult boxed = solve(p, Algorithm::Qbnb2, observed);

    CHECK(fast.status == boxed.status);
    CHECK(fast.generations == boxed.generations);
    CHECK(fast.f_best == doctest::Approx(boxed.f_best).epsilon(1e-9));
    CHECK(fast.lb == doctest::Approx(boxed.lb).epsilon(1e-9));
    CHECK(fast.ub == doctest::Approx(boxed.ub).epsilon(1e-9));
    // Centers may differ by an ulp between the two representations, so cube
    // counts are compared with slack rather than bit for bit.
    const long long diff = std::llabs(fast.cubes_processed - boxed.cubes_processed);
    CHECK(diff <= std::max<long long>(8, fast.cubes_processed / 50));
    CHECK(seen > 0);
}

TEST_CASE("caller-supplied rules run the same search skeleton") {
    const Problem p = rastrigin_standard(2).problem;
    SearchConfig cfg;
    cfg.epsilon = 1e-8;

    const RuleFn wrapped = [](const Problem& pr, const Cube& c) { return rule_qbnb2(pr, c); };
    const SolveResult via_rule = solve(p, wrapped, cfg);

    SearchConfig observed = cfg;
    observed.cube_observer = [](const Cube&, const RuleOutcome&) {};
    const SolveResult via_algo = solve(p, Algorithm::Qbnb2, observed);

    CHECK(via_rule.status == via_algo.status);
    CHECK(via_rule.lb == via_algo.lb);
    CHECK(via_rule.ub == via_algo.ub);
    CHECK(via_rule.f_best == via_algo.f_best);
    CHECK(via_rule.cubes_processed == via_algo.cubes_processed);
    CHECK(via_rule.generations == via_algo.generations);
}

TEST_CASE("third-order rule alone abstains near walls and stays sound") {
    const Problem p = rastrigin_standard(2).problem;
    SearchConfig cfg;
    cfg.epsilon = 1e-8;
    cfg.max_generations = 8;
    cfg.reference_point = {0.0, 0.0};

    const SolveResult res = solve(p, Algorithm::Qbnb3, cfg);
    CHECK(res.status == SolveStatus::GenerationLimit);
    // Boundary cubes abstain with -inf bounds forever, so the lower bound
    // never becomes finite; the run is still sound.
    CHECK(res.lb == -kInf);
    CHECK_FALSE(res.retention.violated);
    CHECK(res.retention.generations_retained ==
          static_cast<long long>(res.records.size()));
}

TEST_CASE("interior minimizer in one dimension") {
    const Problem p = shifted_parabola();
    SearchConfig cfg;
    cfg.epsilon = 1e-6;
    cfg.reference_point = {0.3};

    const SolveResult res = solve(p, Algorithm::Qbnb2, cfg);
    CHECK(res.status == SolveStatus::Converged);
    CHECK(std::fabs(res.best_point[0] - 0.3) <= 1e-3);
    CHECK(res.f_best <= 1e-6);
    CHECK_FALSE(res.retention.violated);
    CHECK(res.retention.generations_retained ==
          static_cast<long long>(res.records.size()));
    check_record_invariants(res);
}

TEST_CASE("configuration and problem validation") {
    const Problem p = rastrigin_standard(2).problem;

    SearchConfig bad_eps;
    bad_eps.epsilon = 0.0;
    CHECK_THROWS_AS(solve(p, Algorithm::Qbnb2, bad_eps), DomainError);
    bad_eps.epsilon = -1.0;
    CHECK_THROWS_AS(solve(p, Algorithm::Qbnb2, bad_eps), DomainError);

    SearchConfig bad_ref;
    bad_ref.reference_point = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(solve(p, Algorithm::Qbnb2, bad_ref), DomainError);

    // Boundary-minimum problems may not use the unconstrained-only rules.
    const Problem boundary = random_rastrigin_like(1, -1.0).problem;
    CHECK_THROWS_AS(solve(boundary, Algorithm::Qbnb2, SearchConfig{}), ConstraintViolation);
    CHECK_THROWS_AS(solve(boundary, Algorithm::Qbnb23, SearchConfig{}), ConstraintViolation);

    Problem no_l1 = p;
    no_l1.l1.reset();
    CHECK_THROWS_AS(solve(no_l1, Algorithm::Lipschitz, SearchConfig{}), MissingConstant);

    Problem dimless;
    dimless.objective = [](std::span<const double>) { return 0.0; };
    CHECK_THROWS_AS(solve(dimless, Algorithm::Qbnb2, SearchConfig{}), DomainError);

    Problem no_objective = p;
    no_objective.objective = nullptr;
    CHECK_THROWS_AS(solve(no_objective, Algorithm::Qbnb2, SearchConfig{}), MissingOracle);

    CHECK_THROWS_AS(solve(p, RuleFn{}, SearchConfig{}), DomainError);
}

TEST_CASE("parallelism degrees outside the supported range are clamped") {
    const Problem p = make_catalog_problem("sphere", 2).problem;
    SearchConfig cfg;
    cfg.epsilon = 1e-8;
    cfg.parallelism = -4;
    CHECK(solve(p, Algorithm::Qbnb2, cfg).status == SolveStatus::Converged);
    cfg.parallelism = 1000;
    CHECK(solve(p, Algorithm::Qbnb2, cfg).status == SolveStatus::Converged);
}

TEST_CASE("algorithm and status names round-trip") {
    const Algorithm all[] = {Algorithm::Lipschitz, Algorithm::LipschitzGradient,
                             Algorithm::AlphaBB, Algorithm::Qbnb2,
                             Algorithm::ConstrainedQbnb2, Algorithm::Qbnb3, Algorithm::Qbnb23};
    for (Algorithm a : all) {
        const auto back = algorithm_from_name(algorithm_name(a));
        REQUIRE(back.has_value());
        CHECK(*back == a);
    }
    CHECK(algorithm_from_name("qbnb2") == Algorithm::Qbnb2);
    CHECK_FALSE(algorithm_from_name("speedrun").has_value());
    CHECK(std::string(status_name(SolveStatus::Converged)) == "converged");
    CHECK(std::string(status_name(SolveStatus::TimeLimit)) == "time_limit");
    CHECK(std::string(status_name(SolveStatus::GenerationLimit)) == "generation_limit");
    CHECK(std::string(status_name(SolveStatus::MemoryLimit)) == "memory_limit");
}
