#include "budgetwise/acquisition.hpp"

#include "budgetwise/error.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numbers>

namespace budgetwise {

double expected_improvement(double mean, double variance, double incumbent) {
    const double diff = mean - incumbent;
    const double sd = std::sqrt(std::max(variance, 0.0));
    if (sd == 0.0) return std::max(diff, 0.0);
    const double z = diff / sd;
    const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return std::max(diff * cdf + sd * pdf, 0.0);
}

void AcquisitionContext::validate() const {
    cost_model.validate();
    if (total_steps < 1) throw InvalidArgument("total_steps must be >= 1", "total_steps");
    if (step < 0 || step >= total_steps) throw InvalidArgument("step must satisfy 0 <= step < total_steps", "step");
    if (!is_feasible(current, cost_model))
        throw InvalidArgument("no feasible strategy contains the current annotations", "current");
}

namespace {

struct Lattice {
    std::vector<std::int64_t> c_values;
    std::vector<LatticeRow> rows;
};

Lattice build_lattice(const AcquisitionContext& ctx, Strides strides) {
    ctx.validate();
    if (strides.c < 1) throw InvalidArgument("stride_c must be >= 1", "stride_c");
    if (strides.s < 1) throw InvalidArgument("stride_s must be >= 1", "stride_s");
    Lattice l;
    for (Strategy p = ctx.current; is_feasible(p, ctx.cost_model); p.c += strides.c) l.c_values.push_back(p.c);
    for (Strategy start = ctx.current; is_feasible(start, ctx.cost_model); start.s += strides.s) {
        std::size_t count = 0;
        while (count < l.c_values.size() && is_feasible({l.c_values[count], start.s}, ctx.cost_model)) ++count;
        l.rows.push_back({start.s, count});
    }
    return l;
}

std::vector<ScoredPoint> score_points(const AcquisitionContext& ctx, std::span<const Strategy> points) {
    std::vector<ScoredPoint> out;
    out.reserve(points.size());
    if (points.empty()) return out;
    const auto post = ctx.gp.posterior_grid(points);
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.push_back({points[i], cost(points[i], ctx.cost_model),
                       expected_improvement(post[i].mean, post[i].variance, ctx.incumbent)});
    }
    return out;
}

// Evaluates EI over the lattice in batches of whole segmentation rows; `sink`
// receives each row's points in ascending c.
template <typename Sink>
void scan_rows(const AcquisitionContext& ctx, Strides strides, Sink&& sink) {
    const Lattice lattice = build_lattice(ctx, strides);
    constexpr std::size_t kBatch = std::size_t{1} << 20;
    std::vector<ScoredPoint> scored;
    std::size_t row_begin = 0;
    while (row_begin < lattice.rows.size()) {
        std::size_t row_end = row_begin, pending = 0;
        while (row_end < lattice.rows.size() && (pending == 0 || pending + lattice.rows[row_end].count <= kBatch))
            pending += lattice.rows[row_end++].count;
        const std::span<const LatticeRow> rows(lattice.rows.data() + row_begin, row_end - row_begin);
        const auto post = ctx.gp.posterior_rows(lattice.c_values, rows);
        std::size_t i = 0;
        for (const auto& row : rows) {
            scored.clear();
            for (std::size_t k = 0; k < row.count; ++k, ++i) {
                const Strategy x{lattice.c_values[k], row.s};
                scored.push_back({x, cost(x, ctx.cost_model),
                                  expected_improvement(post[i].mean, post[i].variance, ctx.incumbent)});
            }
            sink(scored);
        }
        row_begin = row_end;
    }
}

} // namespace

std::vector<ScoredPoint> score_candidates(const AcquisitionContext& ctx, Strides strides) {
    std::vector<ScoredPoint> out;
    scan_rows(ctx, strides, [&](const std::vector<ScoredPoint>& row) { out.insert(out.end(), row.begin(), row.end()); });
    return out;
}

std::vector<ScoredPoint> candidate_front(const AcquisitionContext& ctx, Strides strides) {
    const Lattice lattice = build_lattice(ctx, strides);
    const FittedGP& gp = ctx.gp;
    const double sigma2 = gp.hyperparams().sigma * gp.hyperparams().sigma;

    // Exact EI on a skeleton: every kSkeleton-th point of each row plus the row end.
    constexpr std::size_t kSkeleton = 16;
    std::vector<Strategy> skeleton;
    for (const auto& row : lattice.rows) {
        for (std::size_t k = 0; k < row.count; ++k) {
            if (k % kSkeleton == 0 || k + 1 == row.count) skeleton.push_back({lattice.c_values[k], row.s});
        }
    }
    std::vector<ScoredPoint> candidates = score_points(ctx, skeleton);
    const std::vector<ScoredPoint> staircase = pareto_front(candidates);

    // Posterior variance never exceeds sigma^2 and EI grows with variance, so
    // EI(mean, sigma^2) bounds a point from above. A point whose bound stays
    // strictly below a cheaper (or equally cheap) skeleton value is dominated.
    constexpr double kRelSlack = 1e-9, kAbsSlack = 1e-15;
    const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    const double sd = std::sqrt(sigma2);
    constexpr std::size_t kBatch = std::size_t{1} << 20;
    std::vector<Strategy> survivors;
    std::size_t row_begin = 0;
    while (row_begin < lattice.rows.size()) {
        std::size_t row_end = row_begin, pending = 0;
        while (row_end < lattice.rows.size() && (pending == 0 || pending + lattice.rows[row_end].count <= kBatch))
            pending += lattice.rows[row_end++].count;
        const std::span<const LatticeRow> rows(lattice.rows.data() + row_begin, row_end - row_begin);
        const auto means = gp.posterior_mean_rows(lattice.c_values, rows);
        std::size_t i = 0;
        for (const auto& row : rows) {
            // Staircase points with cost <= the current point's cost lie before `above`;
            // cost grows along the row, so the cursor only moves forward.
            auto above = staircase.begin();
            for (std::size_t k = 0; k < row.count; ++k, ++i) {
                if (k % kSkeleton == 0 || k + 1 == row.count) continue;
                const Strategy x{lattice.c_values[k], row.s};
                const double cx = cost(x, ctx.cost_model);
                while (above != staircase.end() && above->cost <= cx) ++above;
                if (above != staircase.begin()) {
                    const double floor = std::prev(above)->value;
                    // EI <= max(mean - incumbent, 0) + sd * phi(0) is cheaper to test first.
                    const double coarse = std::max(means[i] - ctx.incumbent, 0.0) + sd * kInvSqrt2Pi;
                    if (coarse * (1.0 + kRelSlack) + kAbsSlack < floor) continue;
                    const double bound = expected_improvement(means[i], sigma2, ctx.incumbent);
                    if (bound * (1.0 + kRelSlack) + kAbsSlack < floor) continue;
                }
                survivors.push_back(x);
            }
        }
        row_begin = row_end;
    }
    const auto exact = score_points(ctx, survivors);
    candidates.insert(candidates.end(), exact.begin(), exact.end());
    return pareto_front(candidates);
}

BestImprovement best_expected_improvement(const AcquisitionContext& ctx, Strides strides) {
    const auto front = candidate_front(ctx, strides);
    return {front.back().strategy, front.back().value};
}

FrontSelection select_from_front(const std::vector<ScoredPoint>& front, double threshold) {
    if (front.empty()) throw InvalidArgument("empty Pareto front", "front");
    for (std::size_t i = 0; i < front.size(); ++i) {
        if (front[i].value >= threshold) return {i, false};
    }
    return {front.size() - 1, true};
}

InstallmentDecision decide_installment(const AcquisitionContext& ctx, Strides strides) {
    InstallmentDecision d;
    d.front = candidate_front(ctx, strides);
    const auto& best = d.front.back();
    d.best_strategy = best.strategy;
    d.best_ei = best.value;
    d.threshold = d.best_ei / static_cast<double>(ctx.total_steps - ctx.step);
    const auto pick = select_from_front(d.front, d.threshold);
    d.fallback = pick.fallback;
    d.next = d.front[pick.index].strategy;
    d.delta = d.next - ctx.current;
    return d;
}

Strategy next_installment(const AcquisitionContext& ctx, Strides strides) {
    return decide_installment(ctx, strides).delta;
}

} // namespace budgetwise
