#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

#include "qbnb/errors.hpp"

namespace qbnb {

// Closed interval [lo, hi] with outward rounding by epsilon inflation.
//
// Every arithmetic operation first computes the exact-arithmetic envelope of
// its result from the endpoint formulas, then widens both endpoints by a
// relative 2^-40 plus an absolute 1e-30. The inflation absorbs the at most a
// few ulps of floating-point rounding each formula can commit, so the
// returned interval always contains the true range. 2^-40 per op is vastly
// coarser than the ~2^-52 worst-case rounding, which keeps the soundness
// argument trivial while costing nothing measurable against the inherent
// overestimation of interval arithmetic.
struct Interval {
    double lo;
    double hi;

    Interval() : lo(0.0), hi(0.0) {}
    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) { assert(lo <= hi); }

    static Interval point(double v) { return {v, v}; }

    bool contains(double v) const { return lo <= v && v <= hi; }
    bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
    double width() const { return hi - lo; }
    // Largest magnitude over the interval.
    double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }
    // max(lo^2, hi^2), the quantity summed by the Frobenius-style bounds.
    double sq_mag() const { return mag() * mag(); }
};

namespace detail {

inline constexpr double kInflateRel = 0x1.0p-40;
inline constexpr double kInflateAbs = 1e-30;

inline Interval inflate(double lo, double hi) {
    return {lo - (std::fabs(lo) * kInflateRel + kInflateAbs),
            hi + (std::fabs(hi) * kInflateRel + kInflateAbs)};
}

// x^n by binary exponentiation; exact sign handling, deterministic.
inline double ipow(double x, unsigned n) {
    double acc = 1.0;
    double base = x;
    while (n > 0) {
        if (n & 1u) acc *= base;
        base *= base;
        n >>= 1u;
    }
    return acc;
}

// True if some point p + k*period (integer k) lies in [lo, hi].
inline bool contains_periodic(double lo, double hi, double p, double period) {
    const double k = std::ceil((lo - p) / period);
    return p + k * period <= hi;
}

}  // namespace detail

inline Interval operator+(Interval a, Interval b) {
    return detail::inflate(a.lo + b.lo, a.hi + b.hi);
}

inline Interval operator-(Interval a, Interval b) {
    return detail::inflate(a.lo - b.hi, a.hi - b.lo);
}

inline Interval operator-(Interval a) { return {-a.hi, -a.lo}; }

inline Interval operator*(Interval a, Interval b) {
    const double p1 = a.lo * b.lo;
    const double p2 = a.lo * b.hi;
    const double p3 = a.hi * b.lo;
    const double p4 = a.hi * b.hi;
    return detail::inflate(std::min(std::min(p1, p2), std::min(p3, p4)),
                           std::max(std::max(p1, p2), std::max(p3, p4)));
}

inline Interval operator/(Interval a, Interval b) {
    if (b.contains_zero()) throw DomainError("interval division by an interval containing zero");
    const Interval inv{1.0 / b.hi, 1.0 / b.lo};
    return a * inv;
}

inline Interval int_pow(Interval a, int n) {
    assert(n >= 0);
    const unsigned un = static_cast<unsigned>(n);
    if (n == 0) return detail::inflate(1.0, 1.0);
    if (n % 2 == 1) return detail::inflate(detail::ipow(a.lo, un), detail::ipow(a.hi, un));
    // Even power: minimum at zero if the interval straddles it, otherwise at
    // the endpoint of smaller magnitude.
    const double big = detail::ipow(a.mag(), un);
    if (a.contains_zero()) return detail::inflate(0.0, big);
    const double small = detail::ipow(std::min(std::fabs(a.lo), std::fabs(a.hi)), un);
    return detail::inflate(small, big);
}

inline Interval sin(Interval a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    constexpr double half_pi = 0.5 * std::numbers::pi;
    if (a.width() >= two_pi) return {-1.0, 1.0};
    const double slo = std::sin(a.lo);
    const double shi = std::sin(a.hi);
    double lo = std::min(slo, shi);
    double hi = std::max(slo, shi);
    // Peaks of sin sit at pi/2 + 2*pi*k, troughs at -pi/2 + 2*pi*k.
    if (detail::contains_periodic(a.lo, a.hi, half_pi, two_pi)) hi = 1.0;
    if (detail::contains_periodic(a.lo, a.hi, -half_pi, two_pi)) lo = -1.0;
    Interval r = detail::inflate(lo, hi);
    r.lo = std::max(r.lo, -1.0);
    r.hi = std::min(r.hi, 1.0);
    return r;
}

inline Interval cos(Interval a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (a.width() >= two_pi) return {-1.0, 1.0};
    const double clo = std::cos(a.lo);
    const double chi = std::cos(a.hi);
    double lo = std::min(clo, chi);
    double hi = std::max(clo, chi);
    if (detail::contains_periodic(a.lo, a.hi, 0.0, two_pi)) hi = 1.0;
    if (detail::contains_periodic(a.lo, a.hi, std::numbers::pi, two_pi)) lo = -1.0;
    Interval r = detail::inflate(lo, hi);
    r.lo = std::max(r.lo, -1.0);
    r.hi = std::min(r.hi, 1.0);
    return r;
}

inline Interval exp(Interval a) { return detail::inflate(std::exp(a.lo), std::exp(a.hi)); }

inline Interval sqrt(Interval a) {
    if (a.lo < 0.0) throw DomainError("interval sqrt of an interval dipping below zero");
    Interval r = detail::inflate(std::sqrt(a.lo), std::sqrt(a.hi));
    r.lo = std::max(r.lo, 0.0);
    return r;
}

}  // namespace qbnb
