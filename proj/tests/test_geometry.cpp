#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qbnb/errors.hpp"
#include "qbnb/geometry.hpp"
#include "qbnb/rng.hpp"
#include "qbnb/search.hpp"
#include "support/checks.hpp"

using qbnb::Box;
using qbnb::Cube;
using qbnb::PathId;

TEST_CASE("path ids order lexicographically with the parent first") {
    const PathId root;
    const PathId a = root.child(false);           // 0
    const PathId b = root.child(true);            // 1
    const PathId aa = a.child(false);             // 00
    const PathId ab = a.child(true);              // 01

    CHECK(root.depth() == 0);
    CHECK(a.depth() == 1);
    CHECK(aa.depth() == 2);

    CHECK(root < a);
    CHECK(root < b);
    CHECK(a < b);
    CHECK(a < aa);   // prefix precedes extension
    CHECK(aa < ab);
    CHECK(ab < b);   // 01... < 1...
    CHECK(a == a);
    CHECK_FALSE(a == b);
    CHECK_FALSE(a < a);

    CHECK(root.str() == "root");
    CHECK(ab.str() == "01");
    CHECK(ab.bit(0) == false);
    CHECK(ab.bit(1) == true);
}

TEST_CASE("path ids work beyond one storage word") {
    PathId p;
    for (int i = 0; i < 100; ++i) p = p.child(i % 3 == 0);
    CHECK(p.depth() == 100);
    for (int i = 0; i < 100; ++i) CHECK(p.bit(i) == (i % 3 == 0));
    PathId q = p.child(true);
    CHECK(p < q);
    CHECK_FALSE(q < p);
}

TEST_CASE("box and cube round-trip") {
    const Box b({-1.0, 2.0}, {3.0, 4.0});
    CHECK(b.dim() == 2);
    CHECK(b.contains({0.0, 3.0}));
    CHECK(b.contains({-1.0, 2.0}));
    CHECK_FALSE(b.contains({3.5, 3.0}));

    const Cube c = Cube::from_box(b);
    CHECK(c.center[0] == doctest::Approx(1.0));
    CHECK(c.center[1] == doctest::Approx(3.0));
    CHECK(c.half[0] == doctest::Approx(2.0));
    CHECK(c.half[1] == doctest::Approx(1.0));

    const Box back = c.to_box();
    CHECK(back.lower[0] == doctest::Approx(-1.0));
    CHECK(back.upper[1] == doctest::Approx(4.0));
}

TEST_CASE("radius is the distance from center to corner") {
    CHECK(qbnb::radius(std::vector<double>{3.0, 4.0}) == doctest::Approx(5.0));
    const Cube c({0.0}, {2.0});
    CHECK(qbnb::radius(c) == doctest::Approx(2.0));
}

TEST_CASE("bisection halves the longest edge, low child first") {
    const Cube c({0.0, 0.0}, {4.0, 1.0});
    const auto [lo, hi] = qbnb::bisect_longest(c);
    CHECK(lo.half[0] == doctest::Approx(2.0));
    CHECK(lo.half[1] == doctest::Approx(1.0));
    CHECK(lo.center[0] == doctest::Approx(-2.0));
    CHECK(hi.center[0] == doctest::Approx(2.0));
    CHECK(lo.center[1] == doctest::Approx(0.0));
    CHECK(lo.path.str() == "0");
    CHECK(hi.path.str() == "1");

    // Ties resolve to the lowest axis.
    const Cube tie({0.0, 0.0}, {1.0, 1.0});
    const auto [tl, th] = qbnb::bisect_longest(tie);
    CHECK(tl.half[0] == doctest::Approx(0.5));
    CHECK(tl.half[1] == doctest::Approx(1.0));
}

TEST_CASE("children tile the parent exactly") {
    qbnb::SplitMix64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 1 + static_cast<int>(rng.below(6));
        Box domain;
        domain.lower.assign(static_cast<std::size_t>(d), -3.0);
        domain.upper.assign(static_cast<std::size_t>(d), 3.0);
        const Cube parent = qbnb::testing::random_subcube(domain, rng);
        const auto [lo, hi] = qbnb::bisect_longest(parent);

        // Shared face: the low child's upper equals the high child's lower.
        const int k = qbnb::longest_edge(parent.half);
        const std::size_t uk = static_cast<std::size_t>(k);
        CHECK(lo.center[uk] + lo.half[uk] == doctest::Approx(hi.center[uk] - hi.half[uk]));
        // Outer faces match the parent.
        CHECK(lo.center[uk] - lo.half[uk] == doctest::Approx(parent.center[uk] - parent.half[uk]));
        CHECK(hi.center[uk] + hi.half[uk] == doctest::Approx(parent.center[uk] + parent.half[uk]));

        // Random points of the parent land in exactly one child (up to the
        // shared face).
        for (int s = 0; s < 20; ++s) {
            const std::vector<double> p = qbnb::testing::random_point(parent.to_box(), rng);
            const bool in_lo = qbnb::cube_contains(lo, p, 0.0);
            const bool in_hi = qbnb::cube_contains(hi, p, 0.0);
            CHECK((in_lo || in_hi));
        }
    }
}

TEST_CASE("single bisection contracts the radius by the dimension factor") {
    qbnb::SplitMix64 rng(21);
    for (int trial = 0; trial < 500; ++trial) {
        const int d = 1 + static_cast<int>(rng.below(10));
        Box domain;
        domain.lower.assign(static_cast<std::size_t>(d), -10.0);
        domain.upper.assign(static_cast<std::size_t>(d), 10.0);
        const Cube parent = qbnb::testing::random_subcube(domain, rng);
        const double q = qbnb::radius_contraction_factor(d);
        const double budget = q * qbnb::radius(parent) * (1.0 + 1e-12);
        const auto [lo, hi] = qbnb::bisect_longest(parent);
        CHECK(qbnb::radius(lo) <= budget);
        CHECK(qbnb::radius(hi) <= budget);
    }

    // The factor is tight for a perfect cube in d=1: halving the only edge.
    CHECK(qbnb::radius_contraction_factor(1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(qbnb::radius_contraction_factor(0), qbnb::DomainError);
}

TEST_CASE("ball2r containment") {
    const Box domain({0.0, 0.0}, {10.0, 10.0});
    // r = sqrt(2), 2r ~ 2.83: fits at the center, not near the wall.
    CHECK(qbnb::ball2r_inside(Cube({5.0, 5.0}, {1.0, 1.0}), domain));
    CHECK_FALSE(qbnb::ball2r_inside(Cube({1.0, 5.0}, {1.0, 1.0}), domain));
    // A cube spanning the domain never qualifies (2r exceeds the half-width).
    CHECK_FALSE(qbnb::ball2r_inside(Cube::from_box(domain), domain));
}

TEST_CASE("cube membership has face slack") {
    const Cube c({0.0}, {1.0});
    CHECK(qbnb::cube_contains(c, {1.0}));
    // One ulp beyond the face is still attributed to the cube...
    CHECK(qbnb::cube_contains(c, {1.0 + 1e-15}));
    // ...but a real miss is not.
    CHECK_FALSE(qbnb::cube_contains(c, {1.001}));
}
