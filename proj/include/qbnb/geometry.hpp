#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qbnb {

// Identity of a cube in the bisection tree: the sequence of low/high choices
// taken from the root. Fixed 256-bit storage keeps frontier entries free of
// heap allocation; 256 levels is far beyond any reachable depth (the driver
// caps generations well below that).
class PathId {
  public:
    static constexpr int kMaxDepth = 256;

    PathId() : depth_(0), words_{0, 0, 0, 0} {}

    int depth() const { return depth_; }

    bool bit(int i) const {
        assert(i >= 0 && i < depth_);
        return (words_[static_cast<unsigned>(i) >> 6] >> (static_cast<unsigned>(i) & 63u)) & 1u;
    }

    PathId child(bool high) const {
        assert(depth_ < kMaxDepth);
        PathId c = *this;
        if (high) c.words_[static_cast<unsigned>(depth_) >> 6] |= 1ull << (static_cast<unsigned>(depth_) & 63u);
        c.depth_ = depth_ + 1;
        return c;
    }

    // Lexicographic: compare common prefix bit by bit, shorter path first.
    friend bool operator<(const PathId& a, const PathId& b) {
        const int common = std::min(a.depth_, b.depth_);
        for (int i = 0; i < common; ++i) {
            const bool ab = a.bit(i);
            const bool bb = b.bit(i);
            if (ab != bb) return !ab;
        }
        return a.depth_ < b.depth_;
    }

    friend bool operator==(const PathId& a, const PathId& b) {
        if (a.depth_ != b.depth_) return false;
        for (int i = 0; i < (a.depth_ + 63) / 64; ++i)
            if (a.words_[static_cast<std::size_t>(i)] != b.words_[static_cast<std::size_t>(i)]) return false;
        return true;
    }

    std::string str() const {
        std::string s;
        s.reserve(static_cast<std::size_t>(depth_));
        for (int i = 0; i < depth_; ++i) s.push_back(bit(i) ? '1' : '0');
        return s.empty() ? "root" : s;
    }

  private:
    int depth_;
    std::array<std::uint64_t, 4> words_;
};

// Axis-aligned box given by per-dimension bounds.
struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    Box() = default;
    Box(std::vector<double> lo, std::vector<double> hi) : lower(std::move(lo)), upper(std::move(hi)) {
        assert(lower.size() == upper.size());
    }

    int dim() const { return static_cast<int>(lower.size()); }

    bool contains(const std::vector<double>& x) const {
        for (std::size_t i = 0; i < lower.size(); ++i)
            if (x[i] < lower[i] || x[i] > upper[i]) return false;
        return true;
    }
};

// Axis-aligned cube (box, really: edges need not be equal after bisection)
// in center/half-edge form, carrying its bisection path.
struct Cube {
    std::vector<double> center;
    std::vector<double> half;
    PathId path;

    Cube() = default;
    Cube(std::vector<double> c, std::vector<double> h, PathId p = PathId())
        : center(std::move(c)), half(std::move(h)), path(std::move(p)) {
        assert(center.size() == half.size());
    }

    int dim() const { return static_cast<int>(center.size()); }

    static Cube from_box(const Box& b) {
        std::vector<double> c(b.lower.size()), h(b.lower.size());
        for (std::size_t i = 0; i < b.lower.size(); ++i) {
            c[i] = 0.5 * (b.lower[i] + b.upper[i]);
            h[i] = 0.5 * (b.upper[i] - b.lower[i]);
        }
        return Cube(std::move(c), std::move(h));
    }

    Box to_box() const {
        std::vector<double> lo(center.size()), hi(center.size());
        for (std::size_t i = 0; i < center.size(); ++i) {
            lo[i] = center[i] - half[i];
            hi[i] = center[i] + half[i];
        }
        return Box(std::move(lo), std::move(hi));
    }
};

// Circumscribed-ball radius: the l2 norm of the half-edge vector, i.e. the
// distance from the center to any corner.
inline double radius(const std::vector<double>& half) {
    double s = 0.0;
    for (double h : half) s += h * h;
    return std::sqrt(s);
}

inline double radius(const Cube& c) { return radius(c.half); }

// Index of the longest edge; ties resolved to the lowest index so bisection
// is deterministic.
inline int longest_edge(const std::vector<double>& half) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(half.size()); ++i)
        if (half[static_cast<std::size_t>(i)] > half[static_cast<std::size_t>(best)]) best = i;
    return best;
}

// Split the longest edge at its midpoint. The low child extends its parent
// path with 0, the high child with 1.
inline std::pair<Cube, Cube> bisect_longest(const Cube& c) {
    const int k = longest_edge(c.half);
    const double hk = 0.5 * c.half[static_cast<std::size_t>(k)];
    Cube lo = c;
    Cube hi = c;
    lo.half[static_cast<std::size_t>(k)] = hk;
    hi.half[static_cast<std::size_t>(k)] = hk;
    lo.center[static_cast<std::size_t>(k)] = c.center[static_cast<std::size_t>(k)] - hk;
    hi.center[static_cast<std::size_t>(k)] = c.center[static_cast<std::size_t>(k)] + hk;
    lo.path = c.path.child(false);
    hi.path = c.path.child(true);
    return {std::move(lo), std::move(hi)};
}

// True if the closed ball of radius 2*radius(cube) around the cube center
// lies inside the domain box. For a nondegenerate cube this is always false
// when the cube spans the whole domain, since 2r exceeds every half-edge.
inline bool ball2r_inside(const Cube& c, const Box& domain) {
    const double two_r = 2.0 * radius(c);
    for (std::size_t i = 0; i < c.center.size(); ++i) {
        if (c.center[i] - two_r < domain.lower[i]) return false;
        if (c.center[i] + two_r > domain.upper[i]) return false;
    }
    return true;
}

// Point membership with a small slack so points sitting on a face shared by
// sibling cubes (whose computed faces may differ by an ulp) are attributed to
// both.
inline bool cube_contains(const Cube& c, const std::vector<double>& x, double slack_scale = 1e-12) {
    for (std::size_t i = 0; i < c.center.size(); ++i) {
        const double slack = slack_scale * (1.0 + std::fabs(c.center[i]) + c.half[i]);
        if (std::fabs(x[i] - c.center[i]) > c.half[i] + slack) return false;
    }
    return true;
}

}  // namespace qbnb
