#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace budgetwise {

// An allocation strategy: how many classification (weak) and segmentation
// (strong) annotations are bought.
struct Strategy {
    std::int64_t c = 0;
    std::int64_t s = 0;

    friend constexpr Strategy operator+(Strategy a, Strategy b) { return {a.c + b.c, a.s + b.s}; }
    friend constexpr Strategy operator-(Strategy a, Strategy b) { return {a.c - b.c, a.s - b.s}; }
    friend constexpr bool operator==(Strategy, Strategy) = default;
    friend constexpr auto operator<=>(Strategy, Strategy) = default;
};

// Per-annotation costs in class-label equivalents and the total budget.
// alpha_s >> alpha_c in every realistic configuration; that is not enforced.
struct CostModel {
    double alpha_c = 1.0;
    double alpha_s = 12.0;
    double budget = 0.0;

    void validate() const;
};

struct ScoredPoint {
    Strategy strategy;
    double cost = 0.0;
    double value = 0.0;
};

// Lattice spacing for candidate enumeration.
struct Strides {
    std::int64_t c = 1;
    std::int64_t s = 1;
};

double cost(Strategy strategy, const CostModel& model);
bool is_feasible(Strategy strategy, const CostModel& model);

// Every feasible point origin + (i*stride_c, j*stride_s), i, j >= 0, ordered by
// s then c. Throws InvalidArgument when origin is infeasible or a stride < 1.
std::vector<Strategy> enumerate_feasible(const CostModel& model, Strides strides, Strategy origin = {});

// Non-dominated points in the (cost, value) plane as a strict staircase:
// ascending cost, strictly ascending value. A point is dropped if another has
// lower cost and value >= its value, or equal cost and a greater value. Among
// exact (cost, value) ties the lexicographically smallest strategy survives.
std::vector<ScoredPoint> pareto_front(std::span<const ScoredPoint> points);

// Ordering used by pareto_front: cost ascending, then value descending, then strategy.
bool front_order(const ScoredPoint& a, const ScoredPoint& b);
// Staircase of points already sorted by front_order.
std::vector<ScoredPoint> sweep_front(std::span<const ScoredPoint> sorted);

} // namespace budgetwise
