#include "qbnb/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>

#include "qbnb/errors.hpp"

namespace qbnb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Deterministic folding of per-generation results.
//
// Upper-bound updates keep the earliest strictly-better sample in generation
// order; minima and sums are order-independent. Workers therefore fold their
// own slice in iteration order and the driver merges slices in worker order,
// which reproduces the serial fold bit for bit.
// ---------------------------------------------------------------------------

struct SampleBest {
    double f = kInf;
    std::vector<double> x;
    bool has = false;

    void offer(double f_sample, const double* sample, int dim) {
        if (!has || f_sample < f) {
            f = f_sample;
            x.assign(sample, sample + dim);
            has = true;
        }
    }
    void merge(const SampleBest& other) {
        if (other.has && (!has || other.f < f)) {
            f = other.f;
            x = other.x;
            has = true;
        }
    }
};

// Everything one generation build hands back to the driver.
struct GenFold {
    long long processed = 0;           // children bounded
    long long prefiltered = 0;         // children dropped against the frozen ub
    long long parents_eliminated = 0;  // consumed entries failing the survival test
    std::size_t stored = 0;            // children kept in the new frontier
    double lb = kInf;                  // min bound over ALL children (kept or not)
    SampleBest best;
    WorkCounters work;
    bool time_abort = false;
    bool mem_abort = false;
    bool retention_present = false;
    bool retention_violated = false;

    void merge(GenFold&& o) {
        processed += o.processed;
        prefiltered += o.prefiltered;
        parents_eliminated += o.parents_eliminated;
        stored += o.stored;
        if (o.lb < lb) lb = o.lb;
        best.merge(o.best);
        work += o.work;
        time_abort = time_abort || o.time_abort;
        mem_abort = mem_abort || o.mem_abort;
        retention_present = retention_present || o.retention_present;
        retention_violated = retention_violated || o.retention_violated;
    }
};

bool point_in_cube_raw(const double* center, const double* half, const double* ref, int dim) {
    for (int i = 0; i < dim; ++i) {
        const double slack = 1e-12 * (1.0 + std::fabs(center[i]) + half[i]);
        if (std::fabs(ref[i] - center[i]) > half[i] + slack) return false;
    }
    return true;
}

// Survival test with a one-sided rounding cushion. In exact arithmetic a cube
// containing a global minimizer satisfies qlb <= f* <= ub, but the two sides
// are computed by different floating-point paths and can land on opposite
// sides of a tie by rounding noise (e.g. a sample evaluated exactly at the
// minimizer versus a bound whose cube corner misses it by one ulp). The
// cushion keeps such ties in the frontier; genuinely worse cubes exceed it by
// many orders of magnitude.
bool survives(double qlb, double ub) { return qlb <= ub + 1e-12 * (1.0 + std::fabs(ub)); }

// Driver-side bookkeeping shared by both engines.
struct DriverState {
    double ub = kInf;
    std::vector<double> best_x;
    long long cum_cubes = 0;
};

// Folds a finished generation into the driver state, records it, and decides
// whether the run stops here. Returns the final status if so.
std::optional<SolveStatus> fold_and_check(DriverState& st, SolveResult& res,
                                          const SearchConfig& cfg, long long depth, GenFold&& g,
                                          Clock::time_point t0,
                                          const std::optional<Clock::time_point>& deadline) {
    if (g.time_abort) return SolveStatus::TimeLimit;   // partial generation discarded
    if (g.mem_abort) return SolveStatus::MemoryLimit;  // ditto

    // Entries that failed the survival test when this build consumed the
    // previous generation belong to that generation's elimination count.
    if (!res.records.empty()) res.records.back().cubes_eliminated += g.parents_eliminated;

    if (g.best.has && g.best.f < st.ub) {
        st.ub = g.best.f;
        st.best_x = g.best.x;
    }
    st.cum_cubes += g.processed;
    res.work += g.work;

    if (res.retention.enabled) {
        if (g.retention_violated && !res.retention.violated) {
            res.retention.violated = true;
            res.retention.violation_generation = depth;
        }
        if (g.retention_present) ++res.retention.generations_retained;
    }

    GenerationRecord rec;
    rec.depth = depth;
    rec.cubes_processed = g.processed;
    rec.cubes_eliminated = g.prefiltered;
    rec.cumulative_cubes = st.cum_cubes;
    rec.lb = g.lb;
    rec.ub = st.ub;
    rec.cumulative_time_ms = ms_since(t0);
    res.records.push_back(rec);
    if (cfg.generation_observer) cfg.generation_observer(rec);

    if (g.stored == 0) return SolveStatus::Converged;  // emptied frontier: lb clamps to ub
    if (st.ub - g.lb <= cfg.epsilon) return SolveStatus::Converged;
    if (cfg.max_generations >= 0 && depth >= cfg.max_generations) {
        return SolveStatus::GenerationLimit;
    }
    if (deadline && Clock::now() >= *deadline) return SolveStatus::TimeLimit;
    return std::nullopt;
}

void finalize(SolveResult& res, DriverState& st, SolveStatus status, Clock::time_point t0) {
    res.status = status;
    res.ub = st.ub;
    res.f_best = st.ub;
    res.best_point = std::move(st.best_x);
    res.cubes_processed = st.cum_cubes;
    if (!res.records.empty()) {
        res.generations = res.records.back().depth;
        res.lb = res.records.back().lb;
    }
    // An emptied frontier certifies there is nothing below the incumbent.
    if (res.lb > res.ub) res.lb = res.ub;
    res.wall_time_ms = ms_since(t0);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

void validate_problem(const Problem& p) {
    if (p.dim < 1) throw DomainError("solve: problem dimension must be at least 1");
    if (p.domain.dim() != p.dim || static_cast<int>(p.domain.upper.size()) != p.dim) {
        throw DomainError("solve: domain box dimension does not match problem dimension");
    }
    for (int i = 0; i < p.dim; ++i) {
        const double lo = p.domain.lower[i];
        const double hi = p.domain.upper[i];
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
            throw DomainError("solve: domain box must have finite, nonempty edges");
        }
    }
    if (!p.objective) throw MissingOracle("solve: problem has no objective oracle");
}

void validate_algorithm(const Problem& p, Algorithm a) {
    switch (a) {
        case Algorithm::Lipschitz:
            if (!p.l1) throw MissingConstant("lipschitz: problem has no l1 constant");
            break;
        case Algorithm::LipschitzGradient:
            if (!p.gradient) throw MissingOracle("lipgrad: problem has no gradient oracle");
            if (!p.l2) throw MissingConstant("lipgrad: problem has no l2 constant");
            break;
        case Algorithm::AlphaBB:
            if (!p.gradient) throw MissingOracle("alphabb: problem has no gradient oracle");
            if (!p.hessian) throw MissingOracle("alphabb: problem has no hessian oracle");
            if (!p.l3) throw MissingConstant("alphabb: problem has no l3 constant");
            break;
        case Algorithm::Qbnb2:
            if (!p.l2) throw MissingConstant("qbnb2: problem has no l2 constant");
            if (!p.unconstrained) {
                throw ConstraintViolation(
                    "qbnb2: requires Problem::unconstrained (no boundary minimizer)");
            }
            break;
        case Algorithm::ConstrainedQbnb2:
            if (!p.l2) throw MissingConstant("cqbnb2: problem has no l2 constant");
            break;
        case Algorithm::Qbnb3:
            if (!p.gradient) throw MissingOracle("qbnb3: problem has no gradient oracle");
            if (!p.hessian) throw MissingOracle("qbnb3: problem has no hessian oracle");
            if (!p.l3) throw MissingConstant("qbnb3: problem has no l3 constant");
            break;
        case Algorithm::Qbnb23:
            if (!p.gradient) throw MissingOracle("qbnb23: problem has no gradient oracle");
            if (!p.hessian) throw MissingOracle("qbnb23: problem has no hessian oracle");
            if (!p.l2) throw MissingConstant("qbnb23: problem has no l2 constant");
            if (!p.l3) throw MissingConstant("qbnb23: problem has no l3 constant");
            if (!p.unconstrained) {
                throw ConstraintViolation(
                    "qbnb23: requires Problem::unconstrained (second-order branch)");
            }
            break;
    }
}

void validate_config(const Problem& p, const SearchConfig& cfg) {
    if (!(cfg.epsilon > 0.0)) throw DomainError("solve: epsilon must be positive");
    if (!cfg.reference_point.empty() &&
        static_cast<int>(cfg.reference_point.size()) != p.dim) {
        throw DomainError("solve: reference_point dimension does not match problem");
    }
}

int effective_parallelism(const SearchConfig& cfg) {
    return std::clamp(cfg.parallelism, 1, 64);
}

std::optional<Clock::time_point> make_deadline(Clock::time_point t0, double seconds) {
    if (!std::isfinite(seconds)) return std::nullopt;
    return t0 + std::chrono::duration_cast<Clock::duration>(
                    std::chrono::duration<double>(std::max(seconds, 0.0)));
}

// ---------------------------------------------------------------------------
// Compact engine: cubes as per-axis grid indices.
//
// Every cube at depth t is a cell of the grid obtained by splitting axis i
// s_i times (the split counts are depth-determined, shared by the whole
// generation), so a cube is fully described by one uint32 index per axis.
// Centers are reconstructed as lower + (idx + 0.5)*side, which is the cube's
// identity function across generations. Storage is 4*dim + 8 bytes per cube —
// this is what lets a low-order rule's ~10^8-cube frontier fit in RAM.
// ---------------------------------------------------------------------------

struct GenChunk {
    static constexpr std::size_t kCubes = std::size_t{1} << 16;
    std::unique_ptr<std::uint32_t[]> idx;  // kCubes * dim, row-major
    std::unique_ptr<double[]> q;
    std::size_t count = 0;

    explicit GenChunk(int dim)
        : idx(new std::uint32_t[kCubes * static_cast<std::size_t>(dim)]),
          q(new double[kCubes]) {}
};

std::size_t chunk_bytes(int dim) {
    return GenChunk::kCubes * (sizeof(std::uint32_t) * static_cast<std::size_t>(dim) +
                               sizeof(double)) +
           sizeof(GenChunk);
}

struct FrontierGen {
    long long depth = 0;
    std::vector<int> splits;  // per-axis split counts
    std::vector<std::unique_ptr<GenChunk>> chunks;
    std::size_t total = 0;
};

struct GenGeometry {
    std::vector<double> side;
    std::vector<double> half;
    double r = 0.0;
    int split_axis = 0;  // longest side, lowest index on ties
};

GenGeometry geometry_for(const Box& domain, const std::vector<int>& splits) {
    const int d = static_cast<int>(splits.size());
    GenGeometry g;
    g.side.resize(d);
    g.half.resize(d);
    double sum = 0.0;
    for (int i = 0; i < d; ++i) {
        const double width = domain.upper[i] - domain.lower[i];
        g.side[i] = std::ldexp(width, -splits[i]);
        g.half[i] = 0.5 * g.side[i];
        sum += g.half[i] * g.half[i];
    }
    g.r = std::sqrt(sum);
    g.split_axis = 0;
    for (int i = 1; i < d; ++i) {
        if (g.side[i] > g.side[g.split_axis]) g.split_axis = i;
    }
    return g;
}

void center_of(const Box& domain, const GenGeometry& g, const std::uint32_t* idx, double* out,
               int dim) {
    for (int i = 0; i < dim; ++i) {
        out[i] = domain.lower[i] + (static_cast<double>(idx[i]) + 0.5) * g.side[i];
    }
}

// Uniform dispatcher over the rule cores; the switch predicts perfectly in
// the hot loop.
struct Bounder {
    const Problem* p;
    Algorithm algo;
    double epsilon;
    ConvexMinimizerConfig convex;

    detail::CoreOutcome operator()(const double* c, const double* h, double r, double* s,
                                   WorkCounters& w) const {
        switch (algo) {
            case Algorithm::Lipschitz:
                return detail::core_lipschitz(*p, c, h, r, s, w);
            case Algorithm::LipschitzGradient:
                return detail::core_lipschitz_gradient(*p, c, h, r, s, w);
            case Algorithm::AlphaBB:
                return detail::core_alphabb(*p, c, h, r, convex, s, w);
            case Algorithm::Qbnb2:
                return detail::core_qbnb2(*p, c, h, r, s, w);
            case Algorithm::ConstrainedQbnb2:
                return detail::core_constrained_qbnb2(*p, c, h, r, s, w);
            case Algorithm::Qbnb3:
                return detail::core_qbnb3(*p, c, h, r, epsilon, s, w);
            case Algorithm::Qbnb23:
                return detail::core_qbnb23(*p, c, h, r, epsilon, s, w);
        }
        throw DomainError("solve: unknown algorithm");
    }
};

struct BuildControl {
    std::atomic<bool> abort_time{false};
    std::atomic<bool> abort_mem{false};
    std::atomic<std::size_t> live_bytes{0};
};

struct FastBuildCtx {
    const Problem* p = nullptr;
    const Bounder* bounder = nullptr;
    const GenGeometry* parent_geom = nullptr;
    const GenGeometry* child_geom = nullptr;
    int split_axis = 0;
    double ub_frozen = kInf;
    FrontierGen* cur = nullptr;
    bool instrument = false;
    const double* ref = nullptr;
    std::optional<Clock::time_point> deadline;
    std::size_t mem_cap = 0;
    BuildControl* ctl = nullptr;
};

struct FastWorkerOut {
    GenFold fold;
    std::vector<std::unique_ptr<GenChunk>> chunks;
    std::exception_ptr error;
};

// Appends one child to the worker's output, growing by fixed-size chunks so
// there are no doubling reallocations at 10^8-cube scale.
bool append_child(FastWorkerOut& out, int dim, const std::uint32_t* idx, double q,
                  const FastBuildCtx& ctx) {
    if (out.chunks.empty() || out.chunks.back()->count == GenChunk::kCubes) {
        const std::size_t now =
            ctx.ctl->live_bytes.fetch_add(chunk_bytes(dim)) + chunk_bytes(dim);
        if (ctx.mem_cap != 0 && now > ctx.mem_cap) {
            ctx.ctl->abort_mem.store(true, std::memory_order_relaxed);
            return false;
        }
        out.chunks.push_back(std::make_unique<GenChunk>(dim));
    }
    GenChunk& c = *out.chunks.back();
    std::memcpy(c.idx.get() + c.count * static_cast<std::size_t>(dim), idx,
                static_cast<std::size_t>(dim) * sizeof(std::uint32_t));
    c.q[c.count] = q;
    ++c.count;
    ++out.fold.stored;
    return true;
}

void fast_worker(const FastBuildCtx& ctx, std::size_t chunk_begin, std::size_t chunk_end,
                 FastWorkerOut& out) noexcept {
    try {
        const int d = ctx.p->dim;
        const Box& domain = ctx.p->domain;
        std::vector<double> center(d), sample(d);
        std::vector<std::uint32_t> cidx(d);
        int since_check = 0;

        for (std::size_t ci = chunk_begin; ci < chunk_end; ++ci) {
            GenChunk& chunk = *ctx.cur->chunks[ci];
            for (std::size_t k = 0; k < chunk.count; ++k) {
                if (++since_check >= 64) {
                    since_check = 0;
                    if (ctx.ctl->abort_time.load(std::memory_order_relaxed) ||
                        ctx.ctl->abort_mem.load(std::memory_order_relaxed)) {
                        return;
                    }
                    if (ctx.deadline && Clock::now() >= *ctx.deadline) {
                        ctx.ctl->abort_time.store(true, std::memory_order_relaxed);
                        out.fold.time_abort = true;
                        return;
                    }
                }

                const std::uint32_t* pidx = chunk.idx.get() + k * static_cast<std::size_t>(d);
                const double q = chunk.q[k];
                if (!survives(q, ctx.ub_frozen)) {
                    ++out.fold.parents_eliminated;
                    if (ctx.instrument) {
                        center_of(domain, *ctx.parent_geom, pidx, center.data(), d);
                        if (point_in_cube_raw(center.data(), ctx.parent_geom->half.data(),
                                              ctx.ref, d)) {
                            out.fold.retention_violated = true;
                        }
                    }
                    continue;
                }

                for (int hi = 0; hi < 2; ++hi) {
                    for (int i = 0; i < d; ++i) cidx[static_cast<std::size_t>(i)] = pidx[i];
                    cidx[static_cast<std::size_t>(ctx.split_axis)] =
                        2 * pidx[ctx.split_axis] + static_cast<std::uint32_t>(hi);
                    center_of(domain, *ctx.child_geom, cidx.data(), center.data(), d);

                    const detail::CoreOutcome co =
                        (*ctx.bounder)(center.data(), ctx.child_geom->half.data(),
                                       ctx.child_geom->r, sample.data(), out.fold.work);
                    ++out.fold.processed;
                    if (co.qlb < out.fold.lb) out.fold.lb = co.qlb;
                    out.fold.best.offer(co.f_sample, sample.data(), d);

                    if (survives(co.qlb, ctx.ub_frozen)) {
                        if (!append_child(out, d, cidx.data(), co.qlb, ctx)) {
                            out.fold.mem_abort = true;
                            return;
                        }
                        if (ctx.instrument &&
                            point_in_cube_raw(center.data(), ctx.child_geom->half.data(),
                                              ctx.ref, d)) {
                            out.fold.retention_present = true;
                        }
                    } else {
                        ++out.fold.prefiltered;
                        if (ctx.instrument &&
                            point_in_cube_raw(center.data(), ctx.child_geom->half.data(),
                                              ctx.ref, d)) {
                            out.fold.retention_violated = true;
                        }
                    }
                }
            }
            // The generation is consumed in place: releasing each parent chunk
            // as it finishes keeps peak memory near one frontier, not two.
            ctx.cur->chunks[ci].reset();
            ctx.ctl->live_bytes.fetch_sub(chunk_bytes(d));
        }
    } catch (...) {
        out.error = std::current_exception();
    }
}

struct FastBuildResult {
    GenFold fold;
    FrontierGen next;
};

FastBuildResult build_fast_generation(const Problem& p, const Bounder& bounder, FrontierGen& cur,
                                      double ub_frozen, const SearchConfig& cfg,
                                      const std::optional<Clock::time_point>& deadline,
                                      BuildControl& ctl) {
    const int d = p.dim;
    const GenGeometry parent_geom = geometry_for(p.domain, cur.splits);
    std::vector<int> child_splits = cur.splits;
    ++child_splits[static_cast<std::size_t>(parent_geom.split_axis)];
    if (child_splits[static_cast<std::size_t>(parent_geom.split_axis)] > 32) {
        throw DomainError(
            "solve: grid frontier supports at most 32 splits per axis; "
            "use a looser epsilon or the rule-function engine");
    }
    const GenGeometry child_geom = geometry_for(p.domain, child_splits);

    FastBuildCtx ctx;
    ctx.p = &p;
    ctx.bounder = &bounder;
    ctx.parent_geom = &parent_geom;
    ctx.child_geom = &child_geom;
    ctx.split_axis = parent_geom.split_axis;
    ctx.ub_frozen = ub_frozen;
    ctx.cur = &cur;
    ctx.instrument = !cfg.reference_point.empty();
    ctx.ref = cfg.reference_point.data();
    ctx.deadline = deadline;
    ctx.mem_cap = cfg.max_frontier_bytes;
    ctx.ctl = &ctl;

    const std::size_t nchunks = cur.chunks.size();
    const int workers = static_cast<int>(std::min<std::size_t>(
        static_cast<std::size_t>(effective_parallelism(cfg)), std::max<std::size_t>(nchunks, 1)));
    std::vector<FastWorkerOut> outs(static_cast<std::size_t>(workers));

    if (workers <= 1) {
        fast_worker(ctx, 0, nchunks, outs[0]);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            const std::size_t b = nchunks * static_cast<std::size_t>(w) /
                                  static_cast<std::size_t>(workers);
            const std::size_t e = nchunks * (static_cast<std::size_t>(w) + 1) /
                                  static_cast<std::size_t>(workers);
            threads.emplace_back(fast_worker, std::cref(ctx), b, e,
                                 std::ref(outs[static_cast<std::size_t>(w)]));
        }
        for (auto& t : threads) t.join();
    }

    for (auto& o : outs) {
        if (o.error) std::rethrow_exception(o.error);
    }

    FastBuildResult result;
    result.next.depth = cur.depth + 1;
    result.next.splits = std::move(child_splits);
    for (auto& o : outs) {
        result.fold.merge(std::move(o.fold));
        for (auto& c : o.chunks) result.next.chunks.push_back(std::move(c));
    }
    result.next.total = result.fold.stored;
    // A cooperative stop in any worker voids the whole build.
    if (ctl.abort_time.load()) result.fold.time_abort = true;
    if (ctl.abort_mem.load()) result.fold.mem_abort = true;
    return result;
}

SolveResult solve_fast(const Problem& p, Algorithm algo, const SearchConfig& cfg) {
    const auto t0 = Clock::now();
    const auto deadline = make_deadline(t0, cfg.time_limit_seconds);
    const int d = p.dim;

    SolveResult res;
    res.retention.enabled = !cfg.reference_point.empty();
    DriverState st;
    BuildControl ctl;
    Bounder bounder{&p, algo, cfg.epsilon, ConvexMinimizerConfig{cfg.epsilon, 10000}};

    // Generation 0: the domain box itself.
    FrontierGen cur;
    cur.depth = 0;
    cur.splits.assign(static_cast<std::size_t>(d), 0);
    const GenGeometry g0 = geometry_for(p.domain, cur.splits);
    std::vector<double> center(d), sample(d);
    std::vector<std::uint32_t> idx0(static_cast<std::size_t>(d), 0);
    center_of(p.domain, g0, idx0.data(), center.data(), d);

    GenFold root;
    const detail::CoreOutcome co =
        bounder(center.data(), g0.half.data(), g0.r, sample.data(), root.work);
    root.processed = 1;
    root.lb = co.qlb;
    root.best.offer(co.f_sample, sample.data(), d);
    const double root_ub = root.best.f;
    const bool root_kept = survives(co.qlb, root_ub);
    if (res.retention.enabled) {
        const bool contains =
            point_in_cube_raw(center.data(), g0.half.data(), cfg.reference_point.data(), d);
        if (root_kept) {
            root.retention_present = contains;
        } else if (contains) {
            root.retention_violated = true;
        }
    }
    if (root_kept) {
        FastBuildCtx root_ctx;
        root_ctx.ctl = &ctl;
        root_ctx.mem_cap = cfg.max_frontier_bytes;
        FastWorkerOut tmp;
        root.mem_abort = !append_child(tmp, d, idx0.data(), co.qlb, root_ctx);
        cur.chunks = std::move(tmp.chunks);
        cur.total = tmp.fold.stored;
    } else {
        root.prefiltered = 1;
    }
    root.stored = cur.total;

    if (auto stop = fold_and_check(st, res, cfg, 0, std::move(root), t0, deadline)) {
        finalize(res, st, *stop, t0);
        return res;
    }

    while (true) {
        FastBuildResult br = build_fast_generation(p, bounder, cur, st.ub, cfg, deadline, ctl);
        const long long depth = br.next.depth;
        cur = std::move(br.next);
        if (auto stop = fold_and_check(st, res, cfg, depth, std::move(br.fold), t0, deadline)) {
            finalize(res, st, *stop, t0);
            return res;
        }
    }
}

// ---------------------------------------------------------------------------
// Boxed engine: materialized Cube objects driven by an arbitrary rule.
// ---------------------------------------------------------------------------

struct BoxedEntry {
    Cube cube;
    double q = 0.0;
};

struct BoxedCtx {
    const Problem* p = nullptr;
    const RuleFn* rule = nullptr;
    double ub_frozen = kInf;
    const std::vector<BoxedEntry>* cur = nullptr;
    bool instrument = false;
    const std::vector<double>* ref = nullptr;
    std::optional<Clock::time_point> deadline;
    BuildControl* ctl = nullptr;
    const std::function<void(const Cube&, const RuleOutcome&)>* observer = nullptr;
    std::mutex* observer_mu = nullptr;
};

struct BoxedWorkerOut {
    GenFold fold;
    std::vector<BoxedEntry> next;
    std::exception_ptr error;
};

void boxed_worker(const BoxedCtx& ctx, std::size_t begin, std::size_t end,
                  BoxedWorkerOut& out) noexcept {
    try {
        const int d = ctx.p->dim;
        int since_check = 0;
        for (std::size_t k = begin; k < end; ++k) {
            if (++since_check >= 16) {
                since_check = 0;
                if (ctx.ctl->abort_time.load(std::memory_order_relaxed)) return;
                if (ctx.deadline && Clock::now() >= *ctx.deadline) {
                    ctx.ctl->abort_time.store(true, std::memory_order_relaxed);
                    out.fold.time_abort = true;
                    return;
                }
            }
            const BoxedEntry& entry = (*ctx.cur)[k];
            if (!survives(entry.q, ctx.ub_frozen)) {
                ++out.fold.parents_eliminated;
                if (ctx.instrument && cube_contains(entry.cube, *ctx.ref)) {
                    out.fold.retention_violated = true;
                }
                continue;
            }
            if (entry.cube.path.depth() >= PathId::kMaxDepth) {
                throw DomainError("solve: bisection depth exceeds the 256-level path capacity");
            }
            auto [lo, hi] = bisect_longest(entry.cube);
            for (Cube* childp : {&lo, &hi}) {
                Cube& child = *childp;
                RuleOutcome outcome = (*ctx.rule)(*ctx.p, child);
                ++out.fold.processed;
                out.fold.work += outcome.work;
                if (ctx.observer && *ctx.observer) {
                    std::lock_guard<std::mutex> lock(*ctx.observer_mu);
                    (*ctx.observer)(child, outcome);
                }
                if (outcome.qlb < out.fold.lb) out.fold.lb = outcome.qlb;
                if (!outcome.sample.empty()) {
                    out.fold.best.offer(outcome.f_sample, outcome.sample.data(), d);
                }
                if (survives(outcome.qlb, ctx.ub_frozen)) {
                    if (ctx.instrument && cube_contains(child, *ctx.ref)) {
                        out.fold.retention_present = true;
                    }
                    out.next.push_back(BoxedEntry{std::move(child), outcome.qlb});
                    ++out.fold.stored;
                } else {
                    ++out.fold.prefiltered;
                    if (ctx.instrument && cube_contains(child, *ctx.ref)) {
                        out.fold.retention_violated = true;
                    }
                }
            }
        }
    } catch (...) {
        out.error = std::current_exception();
    }
}

std::size_t boxed_entry_bytes(int dim) {
    return sizeof(BoxedEntry) + 2 * static_cast<std::size_t>(dim) * sizeof(double) + 32;
}

SolveResult solve_boxed(const Problem& p, const RuleFn& rule, const SearchConfig& cfg) {
    const auto t0 = Clock::now();
    const auto deadline = make_deadline(t0, cfg.time_limit_seconds);
    const int d = p.dim;

    SolveResult res;
    res.retention.enabled = !cfg.reference_point.empty();
    DriverState st;
    BuildControl ctl;

    std::vector<BoxedEntry> cur;
    long long depth = 0;

    // Generation 0.
    {
        Cube rootc = Cube::from_box(p.domain);
        RuleOutcome outcome = rule(p, rootc);
        GenFold root;
        root.processed = 1;
        root.lb = outcome.qlb;
        root.work = outcome.work;
        if (!outcome.sample.empty()) {
            root.best.offer(outcome.f_sample, outcome.sample.data(), d);
        }
        if (cfg.cube_observer) cfg.cube_observer(rootc, outcome);
        const bool kept = survives(outcome.qlb, root.best.f);
        if (res.retention.enabled) {
            const bool contains = cube_contains(rootc, cfg.reference_point);
            if (kept) {
                root.retention_present = contains;
            } else if (contains) {
                root.retention_violated = true;
            }
        }
        if (kept) {
            cur.push_back(BoxedEntry{std::move(rootc), outcome.qlb});
        } else {
            root.prefiltered = 1;
        }
        root.stored = cur.size();
        if (auto stop = fold_and_check(st, res, cfg, 0, std::move(root), t0, deadline)) {
            finalize(res, st, *stop, t0);
            return res;
        }
    }

    std::mutex observer_mu;
    while (true) {
        BoxedCtx ctx;
        ctx.p = &p;
        ctx.rule = &rule;
        ctx.ub_frozen = st.ub;
        ctx.cur = &cur;
        ctx.instrument = res.retention.enabled;
        ctx.ref = &cfg.reference_point;
        ctx.deadline = deadline;
        ctx.ctl = &ctl;
        ctx.observer = &cfg.cube_observer;
        ctx.observer_mu = &observer_mu;
        ctl.abort_time.store(false);

        const std::size_t n = cur.size();
        const int workers = static_cast<int>(std::min<std::size_t>(
            static_cast<std::size_t>(effective_parallelism(cfg)), std::max<std::size_t>(n, 1)));
        std::vector<BoxedWorkerOut> outs(static_cast<std::size_t>(workers));
        if (workers <= 1) {
            boxed_worker(ctx, 0, n, outs[0]);
        } else {
            std::vector<std::thread> threads;
            threads.reserve(static_cast<std::size_t>(workers));
            for (int w = 0; w < workers; ++w) {
                const std::size_t b =
                    n * static_cast<std::size_t>(w) / static_cast<std::size_t>(workers);
                const std::size_t e =
                    n * (static_cast<std::size_t>(w) + 1) / static_cast<std::size_t>(workers);
                threads.emplace_back(boxed_worker, std::cref(ctx), b, e,
                                     std::ref(outs[static_cast<std::size_t>(w)]));
            }
            for (auto& t : threads) t.join();
        }
        for (auto& o : outs) {
            if (o.error) std::rethrow_exception(o.error);
        }

        GenFold fold;
        std::vector<BoxedEntry> next;
        std::size_t total = 0;
        for (auto& o : outs) total += o.next.size();
        next.reserve(total);
        for (auto& o : outs) {
            fold.merge(std::move(o.fold));
            std::move(o.next.begin(), o.next.end(), std::back_inserter(next));
        }
        if (ctl.abort_time.load()) fold.time_abort = true;
        if (cfg.max_frontier_bytes != 0 &&
            next.size() * boxed_entry_bytes(d) > cfg.max_frontier_bytes) {
            fold.mem_abort = true;
        }

        ++depth;
        cur = std::move(next);
        if (auto stop = fold_and_check(st, res, cfg, depth, std::move(fold), t0, deadline)) {
            finalize(res, st, *stop, t0);
            return res;
        }
    }
}

RuleFn rule_for_algorithm(Algorithm algo, double epsilon) {
    switch (algo) {
        case Algorithm::Lipschitz:
            return [](const Problem& p, const Cube& c) { return rule_lipschitz(p, c); };
        case Algorithm::LipschitzGradient:
            return [](const Problem& p, const Cube& c) { return rule_lipschitz_gradient(p, c); };
        case Algorithm::AlphaBB:
            return [epsilon](const Problem& p, const Cube& c) {
                return rule_alphabb(p, c, ConvexMinimizerConfig{epsilon, 10000});
            };
        case Algorithm::Qbnb2:
            return [](const Problem& p, const Cube& c) { return rule_qbnb2(p, c); };
        case Algorithm::ConstrainedQbnb2:
            return [](const Problem& p, const Cube& c) { return rule_constrained_qbnb2(p, c); };
        case Algorithm::Qbnb3:
            return [epsilon](const Problem& p, const Cube& c) { return rule_qbnb3(p, c, epsilon); };
        case Algorithm::Qbnb23:
            return
                [epsilon](const Problem& p, const Cube& c) { return rule_qbnb23(p, c, epsilon); };
    }
    throw DomainError("solve: unknown algorithm");
}

}  // namespace

const char* algorithm_name(Algorithm algo) {
    switch (algo) {
        case Algorithm::Lipschitz: return "lipschitz";
        case Algorithm::LipschitzGradient: return "lipgrad";
        case Algorithm::AlphaBB: return "alphabb";
        case Algorithm::Qbnb2: return "qbnb2";
        case Algorithm::ConstrainedQbnb2: return "cqbnb2";
        case Algorithm::Qbnb3: return "qbnb3";
        case Algorithm::Qbnb23: return "qbnb23";
    }
    return "unknown";
}

std::optional<Algorithm> algorithm_from_name(std::string_view name) {
    for (Algorithm a : {Algorithm::Lipschitz, Algorithm::LipschitzGradient, Algorithm::AlphaBB,
                        Algorithm::Qbnb2, Algorithm::ConstrainedQbnb2, Algorithm::Qbnb3,
                        Algorithm::Qbnb23}) {
        if (name == algorithm_name(a)) return a;
    }
    return std::nullopt;
}

const char* status_name(SolveStatus status) {
    switch (status) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::TimeLimit: return "time_limit";
        case SolveStatus::GenerationLimit: return "generation_limit";
        case SolveStatus::MemoryLimit: return "memory_limit";
    }
    return "unknown";
}

double radius_contraction_factor(int dim) {
    if (dim < 1) throw DomainError("radius_contraction_factor: dimension must be at least 1");
    const double d = static_cast<double>(dim);
    return std::sqrt((d - 0.75) / d);
}

SolveResult solve(const Problem& problem, Algorithm algorithm, const SearchConfig& config) {
    validate_problem(problem);
    validate_algorithm(problem, algorithm);
    validate_config(problem, config);
    if (config.cube_observer) {
        return solve_boxed(problem, rule_for_algorithm(algorithm, config.epsilon), config);
    }
    return solve_fast(problem, algorithm, config);
}

SolveResult solve(const Problem& problem, const RuleFn& rule, const SearchConfig& config) {
    validate_problem(problem);
    validate_config(problem, config);
    if (!rule) throw DomainError("solve: rule function is empty");
    return solve_boxed(problem, rule, config);
}

}  // namespace qbnb
