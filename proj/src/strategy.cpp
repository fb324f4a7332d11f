#include "budgetwise/strategy.hpp"

#include "budgetwise/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace budgetwise {

void CostModel::validate() const {
    if (!(alpha_c > 0.0) || !std::isfinite(alpha_c))
        throw InvalidArgument("alpha_c must be a positive finite number", "alpha_c");
    if (!(alpha_s > 0.0) || !std::isfinite(alpha_s))
        throw InvalidArgument("alpha_s must be a positive finite number", "alpha_s");
    if (!(budget > 0.0) || !std::isfinite(budget))
        throw InvalidArgument("budget must be a positive finite number", "budget");
}

double cost(Strategy strategy, const CostModel& model) {
    return model.alpha_c * static_cast<double>(strategy.c) + model.alpha_s * static_cast<double>(strategy.s);
}

bool is_feasible(Strategy strategy, const CostModel& model) {
    return strategy.c >= 0 && strategy.s >= 0 && cost(strategy, model) <= model.budget;
}

std::vector<Strategy> enumerate_feasible(const CostModel& model, Strides strides, Strategy origin) {
    if (strides.c < 1) throw InvalidArgument("stride_c must be >= 1", "stride_c");
    if (strides.s < 1) throw InvalidArgument("stride_s must be >= 1", "stride_s");
    if (!is_feasible(origin, model)) throw InvalidArgument("origin strategy is infeasible under the budget", "origin");

    std::vector<Strategy> out;
    for (Strategy row = origin; is_feasible(row, model); row.s += strides.s) {
        for (Strategy p = row; is_feasible(p, model); p.c += strides.c) out.push_back(p);
    }
    return out;
}

bool front_order(const ScoredPoint& a, const ScoredPoint& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.value != b.value) return a.value > b.value;
    return a.strategy < b.strategy;
}

std::vector<ScoredPoint> sweep_front(std::span<const ScoredPoint> sorted) {
    std::vector<ScoredPoint> front;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : sorted) {
        if (front.empty() || p.value > best) {
            front.push_back(p);
            best = p.value;
        }
    }
    return front;
}

std::vector<ScoredPoint> pareto_front(std::span<const ScoredPoint> points) {
    if (points.empty()) throw InvalidArgument("pareto_front needs at least one point", "points");
    std::vector<ScoredPoint> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(), front_order);
    return sweep_front(sorted);
}

} // namespace budgetwise
