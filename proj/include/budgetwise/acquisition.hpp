#pragma once

#include "budgetwise/gp.hpp"
#include "budgetwise/strategy.hpp"

#include <vector>

namespace budgetwise {

// E[max(u - incumbent, 0)] for u ~ N(mean, variance). At zero variance this is
// the continuity limit max(mean - incumbent, 0).
double expected_improvement(double mean, double variance, double incumbent);

struct AcquisitionContext {
    const FittedGP& gp;
    double incumbent = 0.0;   // best score so far (score with all annotated data)
    CostModel cost_model;
    Strategy current;         // annotation counts already bought
    int total_steps = 1;
    int step = 0;

    void validate() const;
};

// Every feasible candidate c >= current.c, s >= current.s on the stride
// lattice anchored at `current`, scored by expected improvement.
std::vector<ScoredPoint> score_candidates(const AcquisitionContext& ctx, Strides strides);

// Pareto front of the scored candidates. Equal to pareto_front(score_candidates())
// up to rounding, but points that are provably dominated are never given a
// full posterior evaluation.
std::vector<ScoredPoint> candidate_front(const AcquisitionContext& ctx, Strides strides);

struct BestImprovement {
    Strategy strategy;
    double ei = 0.0;
};

BestImprovement best_expected_improvement(const AcquisitionContext& ctx, Strides strides);

// First point of an ascending-cost front whose value reaches `threshold`;
// falls back to the maximum-value point. Returns the index into `front`.
struct FrontSelection {
    std::size_t index = 0;
    bool fallback = false;
};
FrontSelection select_from_front(const std::vector<ScoredPoint>& front, double threshold);

struct InstallmentDecision {
    Strategy next;            // C_{t+1}, S_{t+1}
    Strategy delta;           // next - current
    Strategy best_strategy;   // argmax EI under the full budget
    double best_ei = 0.0;
    double threshold = 0.0;
    bool fallback = false;
    std::vector<ScoredPoint> front;
};

// Cheapest candidate whose EI reaches best_ei / (total_steps - step).
InstallmentDecision decide_installment(const AcquisitionContext& ctx, Strides strides);

Strategy next_installment(const AcquisitionContext& ctx, Strides strides);

} // namespace budgetwise
