#include "qbnb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "qbnb/errors.hpp"
#include "qbnb/pgd.hpp"

namespace qbnb {
namespace {

// Best-K table ordered by value; ties keep the earlier lattice point.
struct Leaders {
    explicit Leaders(int k) : cap(static_cast<std::size_t>(k)) {}

    void offer(double value, const std::vector<double>& point) {
        if (entries.size() == cap && !(value < entries.back().first)) return;
        auto it = std::upper_bound(entries.begin(), entries.end(), value,
                                   [](double v, const auto& e) { return v < e.first; });
        entries.emplace(it, value, point);
        if (entries.size() > cap) entries.pop_back();
    }

    std::size_t cap;
    std::vector<std::pair<double, std::vector<double>>> entries;
};

}  // namespace

MinimumEstimate grid_polish_minimum(const Problem& p, long long grid_budget, int polish_starts) {
    if (!p.objective) throw MissingOracle("grid_polish_minimum: problem has no objective");
    if (p.dim < 1) throw DomainError("grid_polish_minimum: dimension must be positive");
    if (grid_budget < 1 || polish_starts < 1)
        throw DomainError("grid_polish_minimum: budget and start count must be positive");

    const int d = p.dim;
    // Largest per-axis count whose d-th power stays within the budget.
    int n = std::max(2, static_cast<int>(std::floor(
                            std::pow(static_cast<double>(grid_budget), 1.0 / static_cast<double>(d)))));
    while (n > 2 && std::pow(static_cast<double>(n), static_cast<double>(d)) >
                        static_cast<double>(grid_budget))
        --n;

    Leaders leaders(polish_starts);
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> pt(static_cast<std::size_t>(d));
    for (;;) {
        for (int i = 0; i < d; ++i) {
            const std::size_t u = static_cast<std::size_t>(i);
            const double w = p.domain.upper[u] - p.domain.lower[u];
            pt[u] = p.domain.lower[u] + w * static_cast<double>(idx[u]) / static_cast<double>(n - 1);
        }
        leaders.offer(p.objective(pt), pt);
        int axis = 0;
        while (axis < d && ++idx[static_cast<std::size_t>(axis)] == n) {
            idx[static_cast<std::size_t>(axis)] = 0;
            ++axis;
        }
        if (axis == d) break;
    }

    std::function<std::vector<double>(std::span<const double>)> grad = p.gradient;
    if (!grad) {
        grad = [&p, d](std::span<const double> xs) {
            std::vector<double> g(static_cast<std::size_t>(d));
            std::vector<double> probe(xs.begin(), xs.end());
            for (int i = 0; i < d; ++i) {
                const std::size_t u = static_cast<std::size_t>(i);
                const double h = 1e-6 * (1.0 + std::abs(xs[u]));
                const double saved = probe[u];
                probe[u] = saved + h;
                const double hi = p.objective(probe);
                probe[u] = saved - h;
                const double lo = p.objective(probe);
                probe[u] = saved;
                g[u] = (hi - lo) / (2.0 * h);
            }
            return g;
        };
    }

    PgdConfig cfg;
    cfg.grad_tol_rel = 1e-12;
    cfg.max_iters = 5000;

    MinimumEstimate best;
    bool have = false;
    for (const auto& [value, start] : leaders.entries) {
        PgdResult r = minimize_box(p.objective, grad, p.domain, start, cfg);
        const double attained = std::min(value, r.value);
        const std::vector<double>& at = r.value <= value ? r.x : start;
        if (!have || attained < best.value) {
            best.value = attained;
            best.point = at;
            have = true;
        }
    }
    return best;
}

}  // namespace qbnb
