#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qbnb/errors.hpp"
#include "qbnb/interval.hpp"
#include "qbnb/rng.hpp"

using qbnb::Interval;

namespace {

// Sample the interval including both endpoints; clamped because the naive
// formula can overshoot an endpoint by one rounding step.
double lerp(const Interval& a, double t) {
    return std::min(a.hi, std::max(a.lo, a.lo + (a.hi - a.lo) * t));
}

Interval random_interval(qbnb::SplitMix64& rng, double lo = -10.0, double hi = 10.0) {
    double a = rng.uniform(lo, hi);
    double b = rng.uniform(lo, hi);
    if (a > b) std::swap(a, b);
    return {a, b};
}

}  // namespace

TEST_CASE("interval basics") {
    const Interval a{-1.0, 3.0};
    CHECK(a.contains(0.0));
    CHECK(a.contains(-1.0));
    CHECK(a.contains(3.0));
    CHECK_FALSE(a.contains(3.5));
    CHECK(a.contains_zero());
    CHECK(a.width() == 4.0);
    CHECK(a.mag() == 3.0);
    CHECK(a.sq_mag() == 9.0);
    CHECK_FALSE(Interval{1.0, 2.0}.contains_zero());

    const Interval p = Interval::point(2.5);
    CHECK(p.lo == 2.5);
    CHECK(p.hi == 2.5);
}

TEST_CASE("interval arithmetic encloses sampled values") {
    qbnb::SplitMix64 rng(42);
    const double ts[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int trial = 0; trial < 400; ++trial) {
        const Interval a = random_interval(rng);
        const Interval b = random_interval(rng);
        const Interval sum = a + b;
        const Interval diff = a - b;
        const Interval prod = a * b;
        const Interval neg = -a;
        for (double ta : ts) {
            const double va = lerp(a, ta);
            CHECK(neg.contains(-va));
            for (double tb : ts) {
                const double vb = lerp(b, tb);
                CHECK(sum.contains(va + vb));
                CHECK(diff.contains(va - vb));
                CHECK(prod.contains(va * vb));
            }
        }
    }
}

TEST_CASE("interval division") {
    const Interval a{1.0, 2.0};
    const Interval b{4.0, 8.0};
    const Interval q = a / b;
    CHECK(q.contains(1.0 / 4.0));
    CHECK(q.contains(2.0 / 4.0));
    CHECK(q.contains(0.3));

    CHECK_THROWS_AS((a / Interval{-1.0, 1.0}), qbnb::DomainError);
    CHECK_THROWS_AS((a / Interval{0.0, 1.0}), qbnb::DomainError);
    CHECK_THROWS_AS((a / Interval{-1.0, 0.0}), qbnb::DomainError);

    // Negative divisor works and flips signs.
    const Interval qn = a / Interval{-4.0, -2.0};
    CHECK(qn.contains(-1.0));
    CHECK(qn.contains(-0.25));
}

TEST_CASE("interval integer powers") {
    // Even power over a sign-straddling interval reaches down to zero.
    const Interval sq = qbnb::int_pow(Interval{-2.0, 3.0}, 2);
    CHECK(sq.lo <= 0.0);
    CHECK(sq.contains(0.0));
    CHECK(sq.contains(9.0));
    CHECK(sq.hi >= 9.0);
    CHECK(sq.hi < 9.1);

    // Even power away from zero keeps the smaller magnitude as the floor.
    const Interval sq2 = qbnb::int_pow(Interval{2.0, 3.0}, 2);
    CHECK(sq2.contains(4.0));
    CHECK(sq2.contains(9.0));
    CHECK(sq2.lo > 3.9);

    // Odd powers are monotone.
    const Interval cu = qbnb::int_pow(Interval{-2.0, 3.0}, 3);
    CHECK(cu.contains(-8.0));
    CHECK(cu.contains(27.0));

    // n = 0 is the constant 1.
    const Interval one = qbnb::int_pow(Interval{-5.0, 5.0}, 0);
    CHECK(one.contains(1.0));
    CHECK(one.width() < 1e-9);

    qbnb::SplitMix64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Interval a = random_interval(rng, -3.0, 3.0);
        for (int n : {1, 2, 3, 4, 5}) {
            const Interval p = qbnb::int_pow(a, n);
            for (double t : {0.0, 0.3, 0.7, 1.0}) {
                CHECK(p.contains(std::pow(lerp(a, t), n)));
            }
        }
    }
}

TEST_CASE("interval sin and cos envelopes") {
    // Wide interval saturates.
    const Interval s = qbnb::sin(Interval{0.0, 10.0});
    CHECK(s.lo == -1.0);
    CHECK(s.hi == 1.0);

    // Narrow monotone stretch.
    const Interval s2 = qbnb::sin(Interval{0.1, 0.2});
    CHECK(s2.contains(std::sin(0.1)));
    CHECK(s2.contains(std::sin(0.15)));
    CHECK(s2.contains(std::sin(0.2)));
    CHECK(s2.lo > 0.0);

    // An interval covering pi/2 must reach the peak.
    const Interval s3 = qbnb::sin(Interval{1.0, 2.0});
    CHECK(s3.hi == 1.0);
    CHECK(s3.lo <= std::sin(1.0));

    // cos over an interval covering 0 must top out at 1.
    const Interval c1 = qbnb::cos(Interval{-0.5, 0.5});
    CHECK(c1.hi == 1.0);
    CHECK(c1.contains(std::cos(0.5)));

    // cos covering pi bottoms out at -1.
    const Interval c2 = qbnb::cos(Interval{3.0, 3.3});
    CHECK(c2.lo == -1.0);

    qbnb::SplitMix64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const Interval a = random_interval(rng, -20.0, 20.0);
        const Interval si = qbnb::sin(a);
        const Interval co = qbnb::cos(a);
        CHECK(si.lo >= -1.0);
        CHECK(si.hi <= 1.0);
        CHECK(co.lo >= -1.0);
        CHECK(co.hi <= 1.0);
        for (double t : {0.0, 0.2, 0.5, 0.8, 1.0}) {
            const double v = lerp(a, t);
            CHECK(si.contains(std::sin(v)));
            CHECK(co.contains(std::cos(v)));
        }
    }
}

TEST_CASE("interval exp and sqrt") {
    const Interval e = qbnb::exp(Interval{0.0, 1.0});
    CHECK(e.contains(1.0));
    CHECK(e.contains(std::exp(1.0)));
    CHECK(e.contains(std::exp(0.5)));

    const Interval r = qbnb::sqrt(Interval{4.0, 9.0});
    CHECK(r.contains(2.0));
    CHECK(r.contains(3.0));
    CHECK(r.lo >= 0.0);

    const Interval r0 = qbnb::sqrt(Interval{0.0, 1.0});
    CHECK(r0.lo == 0.0);
    CHECK(r0.contains(1.0));

    CHECK_THROWS_AS((qbnb::sqrt(Interval{-1.0, 1.0})), qbnb::DomainError);
}
