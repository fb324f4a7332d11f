#pragma once

#include "budgetwise/acquisition.hpp"
#include "budgetwise/gp.hpp"
#include "budgetwise/oracle.hpp"
#include "budgetwise/sampler.hpp"
#include "budgetwise/strategy.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace budgetwise {

struct CampaignConfig {
    CostModel cost_model{1.0, 12.0, 5000.0};
    int total_steps = 8;
    Strategy initial{100, 10};
    int m_count = 20;
    FitOptions gp;
    std::optional<GPHyperparams> gp_init;  // first fit only; later fits warm-start
    double noise_std = 0.005;              // simulated evaluation noise
    Strides strides;
    std::uint64_t seed = 0;
    bool spend_remainder = false;
    SamplingMode sampling = SamplingMode::uniform;
    std::optional<Strategy> pool_limit;    // images available per modality

    void validate() const;
};

struct IterationRecord {
    int t = 0;
    Strategy strategy;        // annotated counts during this iteration
    double spent = 0.0;
    double incumbent = 0.0;   // score with all annotated data
    double best_ei = 0.0;
    double threshold = 0.0;
    Strategy best_strategy;
    Strategy delta;
    GPHyperparams hyperparams;
    std::size_t sample_count = 0;
    bool fallback = false;
    bool truncated = false;
};

struct CampaignTrajectory {
    std::string method;
    std::vector<IterationRecord> iterations;
    Strategy final_strategy;
    double final_score = 0.0;
    double spent = 0.0;
    bool truncated = false;
    std::optional<double> split;  // segmentation share, fixed baselines only
};

class CampaignError : public Error {
public:
    CampaignError(const std::string& message, CampaignTrajectory partial)
        : Error(message), partial_(std::move(partial)) {}
    const CampaignTrajectory& partial() const noexcept { return partial_; }

private:
    CampaignTrajectory partial_;
};

// Mutable state of an adaptive campaign between steps. Plain data so it can
// be persisted and resumed.
struct EngineState {
    int t = 0;
    Strategy target;              // (C_t, S_t)
    AnnotatedPool pool;
    bool annotated = false;       // pool has been grown to `target` for step t
    std::vector<UtilitySample> samples;
    std::optional<GPHyperparams> hyperparams;
    std::vector<IterationRecord> records;
    bool truncated = false;
};

// The adaptive loop as an explicit state machine: annotate the installment,
// plan the utility subsets, feed back their scores, receive the next strategy.
// run_adaptive drives it with an oracle; the advisor service with a human.
class AdaptiveEngine {
public:
    explicit AdaptiveEngine(CampaignConfig config);
    AdaptiveEngine(CampaignConfig config, EngineState state);

    const CampaignConfig& config() const noexcept { return config_; }
    const EngineState& state() const noexcept { return state_; }
    bool finished() const noexcept { return state_.t >= config_.total_steps; }

    // Annotations still to be bought for the current target.
    Strategy installment() const { return state_.target - state_.pool.size(); }

    void annotate();
    std::vector<SubsetDraw> plan() const;

    struct StepResult {
        InstallmentDecision decision;
        IterationRecord record;
    };
    // `scores[i]` is the observed score of plan()[i].
    StepResult complete(std::span<const double> scores);

    CampaignTrajectory trajectory(std::string method = "adaptive") const;

private:
    CampaignConfig config_;
    EngineState state_;
};

CampaignTrajectory run_adaptive(const CampaignConfig& config, const PerformanceSurface& oracle);

// Largest (C, S) spending `split` of the budget on segmentation, rest on classification.
Strategy fixed_split_strategy(double split, const CostModel& model);

CampaignTrajectory run_fixed(double split, const CampaignConfig& config, const PerformanceSurface& oracle);

// Evaluates the ten fixed splits at B_0 = cost(C_0, S_0), keeps the best (ties
// to the higher segmentation share) and spends the full budget with it.
CampaignTrajectory run_estimated_best_fixed(const CampaignConfig& config, const PerformanceSurface& oracle);

const std::vector<double>& fixed_splits();  // 0.50, 0.55, ..., 0.95

double relative_performance(double score, double full_supervision_score);

// ---- sweeps

struct MethodSpec {
    enum class Kind { adaptive, fixed, estimated_best_fixed };
    Kind kind = Kind::adaptive;
    double split = 0.0;

    std::string label() const;
    static MethodSpec parse(const std::string& label);
    static MethodSpec adaptive() { return {}; }
    static MethodSpec fixed(double split) { return {Kind::fixed, split}; }
    static MethodSpec estimated_best_fixed() { return {Kind::estimated_best_fixed, 0.0}; }
};

struct SweepJob {
    MethodSpec method;
    CampaignConfig config;
    SurfacePtr surface;
    std::vector<std::uint64_t> seeds;
};

struct ResultRow {
    std::string method;
    std::string surface;
    double alpha_c = 0.0;
    double alpha_s = 0.0;
    double budget = 0.0;
    int steps = 0;
    std::uint64_t seed = 0;
    std::int64_t final_c = 0;
    std::int64_t final_s = 0;
    double spent = 0.0;
    double final_score = 0.0;
    double relative_score = 0.0;
    bool truncated = false;
    std::string error;
};

struct SummaryRow {
    std::string method;
    std::string surface;
    double alpha_c = 0.0;
    double alpha_s = 0.0;
    double budget = 0.0;
    int steps = 0;
    std::size_t runs = 0;
    std::size_t errors = 0;
    double mean_score = 0.0;
    double std_score = 0.0;  // population standard deviation
    double mean_spent = 0.0;
};

struct SweepResult {
    std::vector<ResultRow> rows;                     // ordered by job, then seed
    std::vector<CampaignTrajectory> trajectories;    // parallel to rows
    std::vector<SummaryRow> summary;                 // one per job
};

CampaignTrajectory run_method(const MethodSpec& method, const CampaignConfig& config, const PerformanceSurface& oracle);

// Runs every (job, seed) pair; failures become rows with `error` set. `jobs`
// worker threads; output order does not depend on scheduling.
SweepResult sweep(std::span<const SweepJob> jobs, int workers = 1);

std::string results_csv(std::span<const ResultRow> rows);
std::string summary_csv(std::span<const SummaryRow> rows);

} // namespace budgetwise
