#include "qbnb/functions.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <utility>

#include "qbnb/errors.hpp"
#include "qbnb/lipschitz.hpp"
#include "qbnb/linalg.hpp"
#include "qbnb/rng.hpp"

namespace qbnb {
namespace {

// Wires a compiled expression (objective, gradient, Hessian) into a Problem
// and derives the three Lipschitz constants with the interval engine.
Problem problem_from_expr(const Expr& f, Box domain, std::string name, bool unconstrained) {
    const int d = domain.dim();
    if (f.min_dimension() > d) {
        throw DomainError("expression uses variable x" + std::to_string(f.min_dimension() - 1) +
                          " outside a " + std::to_string(d) + "-dimensional domain");
    }

    Problem p;
    p.dim = d;
    p.l1 = lipschitz_bound(f, domain, 1);
    p.l2 = lipschitz_bound(f, domain, 2);
    p.l3 = lipschitz_bound(f, domain, 3);
    p.domain = std::move(domain);
    p.unconstrained = unconstrained;
    p.name = std::move(name);

    auto obj = std::make_shared<const CompiledExpr>(f);
    p.objective = [obj](std::span<const double> x) { return obj->eval(x); };

    auto grads = std::make_shared<std::vector<CompiledExpr>>();
    grads->reserve(static_cast<std::size_t>(d));
    for (const Expr& g : gradient_exprs(f, d)) grads->emplace_back(g);
    p.gradient = [grads, d](std::span<const double> x) {
        std::vector<double> g(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) g[static_cast<std::size_t>(i)] = (*grads)[static_cast<std::size_t>(i)].eval(x);
        return g;
    };

    auto hess = std::make_shared<std::vector<CompiledExpr>>();
    for (const Expr& h : hessian_upper_exprs(f, d)) hess->emplace_back(h);
    p.hessian = [hess, d](std::span<const double> x) {
        SymMatrix m(d);
        std::size_t k = 0;
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) m.set_sym(i, j, (*hess)[k++].eval(x));
        return m;
    };
    return p;
}

Expr c(double v) { return Expr::constant(v); }
Expr x(int i) { return Expr::variable(i); }
Expr sq(const Expr& e) { return Expr::int_pow(e, 2); }

Expr branin_expr() {
    const double pi = std::numbers::pi;
    const Expr x1 = x(0), x2 = x(1);
    const Expr inner = x2 - c(5.1 / (4.0 * pi * pi)) * sq(x1) + c(5.0 / pi) * x1 - c(6.0);
    return sq(inner) + c(10.0 * (1.0 - 1.0 / (8.0 * pi))) * Expr::cos(x1) + c(10.0);
}

Expr camelback_expr() {
    const Expr x1 = x(0), x2 = x(1);
    return (c(4.0) - c(2.1) * sq(x1) + c(1.0 / 3.0) * Expr::int_pow(x1, 4)) * sq(x1) + x1 * x2 +
           (c(-4.0) + c(4.0) * sq(x2)) * sq(x2);
}

Expr goldstein_price_expr() {
    const Expr x1 = x(0), x2 = x(1);
    const Expr a = c(1.0) + sq(x1 + x2 + c(1.0)) *
                                (c(19.0) - c(14.0) * x1 + c(3.0) * sq(x1) - c(14.0) * x2 +
                                 c(6.0) * x1 * x2 + c(3.0) * sq(x2));
    const Expr b = c(30.0) + sq(c(2.0) * x1 - c(3.0) * x2) *
                                 (c(18.0) - c(32.0) * x1 + c(12.0) * sq(x1) + c(48.0) * x2 -
                                  c(36.0) * x1 * x2 + c(27.0) * sq(x2));
    return a * b;
}

Expr shubert_expr() {
    auto factor = [](int var) {
        Expr s = c(0.0);
        for (int j = 1; j <= 5; ++j)
            s = s + c(static_cast<double>(j)) *
                        Expr::cos(c(static_cast<double>(j + 1)) * x(var) + c(static_cast<double>(j)));
        return s;
    };
    return factor(0) * factor(1);
}

template <int M, int D>
Expr hartman_expr(const double (&a)[M][D], const double (&cw)[M], const double (&p)[M][D]) {
    Expr f = c(0.0);
    for (int i = 0; i < M; ++i) {
        Expr inner = c(0.0);
        for (int j = 0; j < D; ++j) inner = inner + c(a[i][j]) * sq(x(j) - c(p[i][j]));
        f = f - c(cw[i]) * Expr::exp(-inner);
    }
    return f;
}

Expr hartman3_expr() {
    static const double a[4][3] = {{3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}, {3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}};
    static const double cw[4] = {1.0, 1.2, 3.0, 3.2};
    static const double p[4][3] = {{0.3689, 0.1170, 0.2673},
                                   {0.4699, 0.4387, 0.7470},
                                   {0.1091, 0.8732, 0.5547},
                                   {0.03815, 0.5743, 0.8828}};
    return hartman_expr(a, cw, p);
}

Expr hartman6_expr() {
    static const double a[4][6] = {{10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
                                   {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
                                   {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
                                   {17.0, 8.0, 0.05, 10.0, 0.1, 14.0}};
    static const double cw[4] = {1.0, 1.2, 3.0, 3.2};
    static const double p[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                   {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                   {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                   {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
    return hartman_expr(a, cw, p);
}

// Shekel data; the first `m` rows/weights are used for Shekel-m.
const double kShekelA[10][4] = {{4.0, 4.0, 4.0, 4.0}, {1.0, 1.0, 1.0, 1.0}, {8.0, 8.0, 8.0, 8.0},
                                {6.0, 6.0, 6.0, 6.0}, {3.0, 7.0, 3.0, 7.0}, {2.0, 9.0, 2.0, 9.0},
                                {5.0, 5.0, 3.0, 3.0}, {8.0, 1.0, 8.0, 1.0}, {6.0, 2.0, 6.0, 2.0},
                                {7.0, 3.6, 7.0, 3.6}};
const double kShekelC[10] = {0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5};

Expr shekel_expr(int m) {
    Expr f = c(0.0);
    for (int i = 0; i < m; ++i) {
        Expr denom = c(kShekelC[i]);
        for (int j = 0; j < 4; ++j) denom = denom + sq(x(j) - c(kShekelA[i][j]));
        f = f - c(1.0) / denom;
    }
    return f;
}

Box box_of(std::initializer_list<std::pair<double, double>> edges) {
    Box b;
    for (auto [lo, hi] : edges) {
        b.lower.push_back(lo);
        b.upper.push_back(hi);
    }
    return b;
}

Box unit_box(int d) {
    Box b;
    b.lower.assign(static_cast<std::size_t>(d), 0.0);
    b.upper.assign(static_cast<std::size_t>(d), 1.0);
    return b;
}

}  // namespace

TestProblem rastrigin_family(std::vector<double> alpha, double theta, double delta, double a) {
    const int d = static_cast<int>(alpha.size());
    if (d < 1) throw DomainError("rastrigin_family: need at least one coefficient");
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("rastrigin_family: a must be positive");
    if (!std::isfinite(theta) || !std::isfinite(delta))
        throw DomainError("rastrigin_family: theta and delta must be finite");
    double norm_sq = 0.0;
    bool nonneg = true;
    for (double ai : alpha) {
        if (!std::isfinite(ai)) throw DomainError("rastrigin_family: coefficients must be finite");
        norm_sq += ai * ai;
        nonneg = nonneg && ai >= 0.0;
    }
    const double alpha_norm = std::sqrt(norm_sq);

    TestProblem t;
    Problem& p = t.problem;
    p.dim = d;
    p.domain.lower.assign(static_cast<std::size_t>(d), -a);
    p.domain.upper.assign(static_cast<std::size_t>(d), a);
    p.l1 = alpha_norm * std::abs(theta) + 2.0 * std::abs(delta) * std::sqrt(static_cast<double>(d)) * a;
    p.l2 = alpha_norm * theta * theta + 2.0 * std::abs(delta);
    p.l3 = alpha_norm * std::abs(std::pow(theta, 3));
    p.unconstrained = nonneg && delta >= 0.0;
    p.name = "rastrigin";

    auto coef = std::make_shared<const std::vector<double>>(std::move(alpha));
    p.objective = [coef, theta, delta](std::span<const double> xs) {
        double s = 0.0;
        for (std::size_t i = 0; i < coef->size(); ++i)
            s += (*coef)[i] * (1.0 - std::cos(theta * xs[i])) + delta * xs[i] * xs[i];
        return s;
    };
    p.gradient = [coef, theta, delta](std::span<const double> xs) {
        std::vector<double> g(coef->size());
        for (std::size_t i = 0; i < coef->size(); ++i)
            g[i] = (*coef)[i] * theta * std::sin(theta * xs[i]) + 2.0 * delta * xs[i];
        return g;
    };
    p.hessian = [coef, theta, delta, d](std::span<const double> xs) {
        SymMatrix m(d);
        for (int i = 0; i < d; ++i) {
            const std::size_t u = static_cast<std::size_t>(i);
            m.set_sym(i, i, (*coef)[u] * theta * theta * std::cos(theta * xs[u]) + 2.0 * delta);
        }
        return m;
    };

    Expr f = c(0.0);
    for (int i = 0; i < d; ++i) {
        f = f + c((*coef)[static_cast<std::size_t>(i)]) * (c(1.0) - Expr::cos(c(theta) * x(i))) +
            c(delta) * sq(x(i));
    }
    t.expression = std::move(f);
    t.analytic_constants = true;
    t.citation = "Rastrigin's function (Torn & Zilinskas, Global Optimization, 1989), generalized coefficients";
    if (p.unconstrained) {
        t.known_minimum = 0.0;
        t.known_minimizer.assign(static_cast<std::size_t>(d), 0.0);
    }
    return t;
}

TestProblem rastrigin_standard(int dim) {
    if (dim < 1) throw DomainError("rastrigin_standard: dim must be at least 1");
    return rastrigin_family(std::vector<double>(static_cast<std::size_t>(dim), 10.0),
                            2.0 * std::numbers::pi, 1.0, 5.12);
}

const char* dixon_szego_name(DixonSzego which) {
    switch (which) {
        case DixonSzego::Branin: return "branin";
        case DixonSzego::Camelback: return "camelback";
        case DixonSzego::GoldsteinPrice: return "goldstein_price";
        case DixonSzego::Shubert: return "shubert";
        case DixonSzego::Hartman3: return "hartman3";
        case DixonSzego::Shekel5: return "shekel5";
        case DixonSzego::Shekel7: return "shekel7";
        case DixonSzego::Shekel10: return "shekel10";
        case DixonSzego::Hartman6: return "hartman6";
    }
    throw DomainError("dixon_szego_name: unknown function tag");
}

TestProblem dixon_szego(DixonSzego which) {
    Expr f;
    Box domain;
    std::string citation;
    switch (which) {
        case DixonSzego::Branin:
            f = branin_expr();
            domain = box_of({{-5.0, 10.0}, {0.0, 15.0}});
            citation = "Branin (1972); Dixon & Szego (1978) test set";
            break;
        case DixonSzego::Camelback:
            f = camelback_expr();
            domain = box_of({{-3.0, 3.0}, {-2.0, 2.0}});
            citation = "six-hump camelback; Dixon & Szego (1978) test set";
            break;
        case DixonSzego::GoldsteinPrice:
            f = goldstein_price_expr();
            domain = box_of({{-2.0, 2.0}, {-2.0, 2.0}});
            citation = "Goldstein & Price (1971)";
            break;
        case DixonSzego::Shubert:
            f = shubert_expr();
            domain = box_of({{-10.0, 10.0}, {-10.0, 10.0}});
            citation = "Shubert's function; Dixon & Szego (1978) era test set";
            break;
        case DixonSzego::Hartman3:
            f = hartman3_expr();
            domain = unit_box(3);
            citation = "Hartman three-dimensional family; Dixon & Szego (1978)";
            break;
        case DixonSzego::Shekel5:
        case DixonSzego::Shekel7:
        case DixonSzego::Shekel10: {
            const int m = which == DixonSzego::Shekel5 ? 5 : which == DixonSzego::Shekel7 ? 7 : 10;
            f = shekel_expr(m);
            domain = box_of({{0.0, 10.0}, {0.0, 10.0}, {0.0, 10.0}, {0.0, 10.0}});
            citation = "Shekel family, m=" + std::to_string(m) + "; Dixon & Szego (1978)";
            break;
        }
        case DixonSzego::Hartman6:
            f = hartman6_expr();
            domain = unit_box(6);
            citation = "Hartman six-dimensional family; Dixon & Szego (1978)";
            break;
    }
    TestProblem t;
    // Every minimizer in this set sits strictly inside its canonical domain,
    // so the curvature-only rules remain sound.
    t.problem = problem_from_expr(f, std::move(domain), dixon_szego_name(which), true);
    t.citation = std::move(citation);
    t.analytic_constants = false;
    t.expression = std::move(f);
    return t;
}

TestProblem random_rastrigin_like(std::uint64_t seed, double delta) {
    SplitMix64 rng(seed);
    std::vector<double> alpha(3);
    for (double& ai : alpha) ai = rng.uniform01();
    TestProblem t = rastrigin_family(std::move(alpha), 2.0 * std::numbers::pi, delta, 5.12);
    t.problem.name = "random_rastrigin";
    t.citation += "; seeded coefficients";
    return t;
}

TestProblem make_catalog_problem(const std::string& name, int dim, std::uint64_t seed, double delta) {
    auto check_dim = [&](int built) {
        if (dim > 0 && dim != built)
            throw DomainError("function '" + name + "' is " + std::to_string(built) +
                              "-dimensional, got --dim " + std::to_string(dim));
    };
    if (name == "rastrigin") {
        return rastrigin_standard(dim > 0 ? dim : 2);
    }
    if (name == "sphere") {
        const int d = dim > 0 ? dim : 2;
        TestProblem t = rastrigin_family(std::vector<double>(static_cast<std::size_t>(d), 0.0),
                                         2.0 * std::numbers::pi, 1.0, 5.12);
        t.problem.name = "sphere";
        t.citation = "convex quadratic reference problem";
        return t;
    }
    if (name == "random_rastrigin") {
        TestProblem t = random_rastrigin_like(seed, delta);
        check_dim(t.problem.dim);
        return t;
    }
    static const DixonSzego kAll[] = {DixonSzego::Branin,   DixonSzego::Camelback,
                                      DixonSzego::GoldsteinPrice, DixonSzego::Shubert,
                                      DixonSzego::Hartman3, DixonSzego::Shekel5,
                                      DixonSzego::Shekel7,  DixonSzego::Shekel10,
                                      DixonSzego::Hartman6};
    for (DixonSzego which : kAll) {
        if (name == dixon_szego_name(which)) {
            TestProblem t = dixon_szego(which);
            check_dim(t.problem.dim);
            return t;
        }
    }
    throw DomainError("unknown function '" + name + "'");
}

std::vector<std::string> catalog_names() {
    return {"rastrigin", "sphere",   "random_rastrigin", "branin",  "camelback", "goldstein_price",
            "shubert",   "hartman3", "shekel5",          "shekel7", "shekel10",  "hartman6"};
}

}  // namespace qbnb
