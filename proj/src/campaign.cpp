#include "budgetwise/campaign.hpp"

#include "budgetwise/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <sstream>
#include <thread>

namespace budgetwise {

void CampaignConfig::validate() const {
    cost_model.validate();
    if (total_steps < 1) throw InvalidArgument("steps must be >= 1", "steps");
    if (initial.c < 0 || initial.s < 0) throw InvalidArgument("initial strategy must be non-negative", "initial");
    if (initial.c == 0 && initial.s == 0) throw InvalidArgument("initial strategy must annotate something", "initial");
    if (!is_feasible(initial, cost_model)) throw InvalidArgument("initial strategy exceeds the budget", "initial");
    // A single utility sample per round leaves the first GP fit with one point.
    if (m_count < 2) throw InvalidArgument("m_count must be >= 2", "m_count");
    if (gp.iterations < 0) throw InvalidArgument("gp iterations must be >= 0", "gp_iterations");
    if (!(gp.learning_rate > 0.0)) throw InvalidArgument("gp learning rate must be positive", "gp_learning_rate");
    if (gp_init) gp_init->validate();
    if (!(noise_std >= 0.0)) throw InvalidArgument("noise_std must be >= 0", "noise_std");
    if (strides.c < 1) throw InvalidArgument("stride_c must be >= 1", "strides");
    if (strides.s < 1) throw InvalidArgument("stride_s must be >= 1", "strides");
    if (pool_limit && (pool_limit->c < 0 || pool_limit->s < 0))
        throw InvalidArgument("pool limits must be non-negative", "pool_limit");
}

namespace {

Strategy cap_to_pool(Strategy x, const std::optional<Strategy>& limit, bool& truncated) {
    if (!limit) return x;
    Strategy out{std::min(x.c, limit->c), std::min(x.s, limit->s)};
    if (out != x) truncated = true;
    return out;
}

} // namespace

AdaptiveEngine::AdaptiveEngine(CampaignConfig config) : config_(std::move(config)) {
    config_.validate();
    state_.target = cap_to_pool(config_.initial, config_.pool_limit, state_.truncated);
}

AdaptiveEngine::AdaptiveEngine(CampaignConfig config, EngineState state)
    : config_(std::move(config)), state_(std::move(state)) {
    config_.validate();
    if (state_.t < 0 || state_.t > config_.total_steps) throw InvalidArgument("engine step out of range", "t");
    if (!is_feasible(state_.target, config_.cost_model)) throw InvalidArgument("engine target exceeds budget", "target");
}

void AdaptiveEngine::annotate() {
    if (finished()) throw Error("campaign already finished");
    if (state_.annotated) return;
    state_.pool.grow(installment());
    state_.annotated = true;
}

std::vector<SubsetDraw> AdaptiveEngine::plan() const {
    if (!state_.annotated) throw Error("annotate the current installment before planning evaluations");
    return plan_utility_draws(state_.pool, config_.m_count,
                              derive_seed(config_.seed, {stream::sampler, static_cast<std::uint64_t>(state_.t)}),
                              config_.sampling);
}

AdaptiveEngine::StepResult AdaptiveEngine::complete(std::span<const double> scores) {
    const auto draws = plan();
    if (scores.size() != draws.size())
        throw InvalidArgument("expected " + std::to_string(draws.size()) + " scores", "scores");

    std::vector<UtilitySample> fresh;
    fresh.reserve(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
        if (!(scores[i] >= 0.0 && scores[i] <= 1.0)) throw InvalidArgument("scores must lie in [0, 1]", "score");
        fresh.push_back({draws[i].strategy, scores[i]});
    }
    auto samples = merge_samples(state_.samples, fresh);

    // Refits start from the previous hyperparameters and, independently, from the
    // data-driven default; the higher marginal likelihood wins.
    const GPHyperparams fresh_init = config_.gp_init ? *config_.gp_init : initial_hyperparams(samples);
    const std::uint64_t gp_seed = derive_seed(config_.seed, {stream::gp, static_cast<std::uint64_t>(state_.t)});
    FittedGP gp = fit(samples, state_.hyperparams ? *state_.hyperparams : fresh_init, config_.gp, gp_seed);
    if (state_.hyperparams) {
        FittedGP alt = fit(samples, fresh_init, config_.gp, gp_seed);
        if (alt.log_marginal_likelihood() > gp.log_marginal_likelihood()) gp = std::move(alt);
    }

    const double incumbent = scores[0];
    const AcquisitionContext ctx{gp, incumbent, config_.cost_model, state_.target, config_.total_steps, state_.t};
    StepResult out;
    out.decision = decide_installment(ctx, config_.strides);
    Strategy next = out.decision.next;
    if (config_.spend_remainder && state_.t == config_.total_steps - 1) next = out.decision.best_strategy;
    bool truncated = false;
    next = cap_to_pool(next, config_.pool_limit, truncated);
    out.decision.next = next;
    out.decision.delta = next - state_.target;

    IterationRecord& rec = out.record;
    rec.t = state_.t;
    rec.strategy = state_.target;
    rec.spent = cost(state_.target, config_.cost_model);
    rec.incumbent = incumbent;
    rec.best_ei = out.decision.best_ei;
    rec.threshold = out.decision.threshold;
    rec.best_strategy = out.decision.best_strategy;
    rec.delta = out.decision.delta;
    rec.hyperparams = gp.hyperparams();
    rec.sample_count = samples.size();
    rec.fallback = out.decision.fallback;
    rec.truncated = truncated;

    // Invariants every step must keep.
    if (next.c < state_.target.c || next.s < state_.target.s) throw Error("internal: strategy decreased");
    if (!is_feasible(next, config_.cost_model)) throw Error("internal: strategy exceeds budget");

    state_.samples = std::move(samples);
    state_.hyperparams = gp.hyperparams();
    state_.records.push_back(rec);
    state_.truncated = state_.truncated || truncated;
    state_.target = next;
    state_.annotated = false;
    ++state_.t;
    return out;
}

CampaignTrajectory AdaptiveEngine::trajectory(std::string method) const {
    CampaignTrajectory tr;
    tr.method = std::move(method);
    tr.iterations = state_.records;
    tr.final_strategy = state_.target;
    tr.spent = cost(state_.target, config_.cost_model);
    tr.truncated = state_.truncated;
    return tr;
}

CampaignTrajectory run_adaptive(const CampaignConfig& config, const PerformanceSurface& oracle) {
    CampaignConfig cfg = config;
    const Strategy available{oracle.max_c(), oracle.max_s()};
    cfg.pool_limit = cfg.pool_limit ? Strategy{std::min(cfg.pool_limit->c, available.c), std::min(cfg.pool_limit->s, available.s)}
                                    : available;
    AdaptiveEngine engine(cfg);
    while (!engine.finished()) {
        engine.annotate();
        const auto draws = engine.plan();
        std::vector<double> scores;
        scores.reserve(draws.size());
        for (const auto& d : draws) {
            scores.push_back(noisy_evaluate(oracle, d.strategy.c, d.strategy.s, cfg.noise_std, d.eval_seed));
        }
        try {
            engine.complete(scores);
        } catch (const DecompositionError& e) {
            throw CampaignError(e.what(), engine.trajectory());
        }
    }
    auto tr = engine.trajectory();
    tr.final_score = oracle.evaluate(static_cast<double>(tr.final_strategy.c), static_cast<double>(tr.final_strategy.s));
    return tr;
}

Strategy fixed_split_strategy(double split, const CostModel& model) {
    model.validate();
    if (!(split >= 0.0 && split <= 1.0)) throw InvalidArgument("split must lie in [0, 1]", "split");
    // The 1e-9 guard keeps exact products such as 0.95 * 1200 / 12 from flooring to 94.
    Strategy x;
    x.s = static_cast<std::int64_t>(std::floor(split * model.budget / model.alpha_s + 1e-9));
    while (x.s > 0 && cost(x, model) > model.budget) --x.s;
    x.c = static_cast<std::int64_t>(std::floor((model.budget - model.alpha_s * static_cast<double>(x.s)) / model.alpha_c + 1e-9));
    while (x.c > 0 && cost(x, model) > model.budget) --x.c;
    return x;
}

namespace {

std::string percent_label(double split) {
    return std::to_string(static_cast<int>(std::lround(split * 100.0)));
}

CampaignTrajectory single_shot(std::string method, Strategy x, const CampaignConfig& config,
                               const PerformanceSurface& oracle) {
    CampaignTrajectory tr;
    tr.method = std::move(method);
    const Strategy capped{std::min(x.c, oracle.max_c()), std::min(x.s, oracle.max_s())};
    tr.truncated = capped != x;
    if (config.pool_limit && (capped.c > config.pool_limit->c || capped.s > config.pool_limit->s)) tr.truncated = true;
    Strategy final = capped;
    if (config.pool_limit) final = {std::min(final.c, config.pool_limit->c), std::min(final.s, config.pool_limit->s)};
    tr.final_strategy = final;
    tr.spent = cost(final, config.cost_model);
    tr.final_score = oracle.evaluate(static_cast<double>(final.c), static_cast<double>(final.s));
    IterationRecord rec;
    rec.strategy = final;
    rec.spent = tr.spent;
    rec.incumbent = tr.final_score;
    rec.delta = final;
    rec.truncated = tr.truncated;
    tr.iterations.push_back(rec);
    return tr;
}

} // namespace

const std::vector<double>& fixed_splits() {
    static const std::vector<double> splits{0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};
    return splits;
}

CampaignTrajectory run_fixed(double split, const CampaignConfig& config, const PerformanceSurface& oracle) {
    config.cost_model.validate();
    auto tr = single_shot("fixed-" + percent_label(split), fixed_split_strategy(split, config.cost_model), config, oracle);
    tr.split = split;
    return tr;
}

CampaignTrajectory run_estimated_best_fixed(const CampaignConfig& config, const PerformanceSurface& oracle) {
    config.validate();
    const CostModel initial_budget{config.cost_model.alpha_c, config.cost_model.alpha_s,
                                   cost(config.initial, config.cost_model)};
    double best_split = fixed_splits().front();
    double best_score = -1.0;
    for (double split : fixed_splits()) {
        Strategy x = fixed_split_strategy(split, initial_budget);
        x = {std::min(x.c, oracle.max_c()), std::min(x.s, oracle.max_s())};
        const double score = noisy_evaluate(oracle, x.c, x.s, config.noise_std,
                                            derive_seed(config.seed, {stream::baseline}));
        // Splits ascend, so >= hands ties to the higher segmentation share.
        if (score >= best_score) {
            best_score = score;
            best_split = split;
        }
    }
    auto tr = single_shot("estimated-best-fixed", fixed_split_strategy(best_split, config.cost_model), config, oracle);
    tr.split = best_split;
    return tr;
}

double relative_performance(double score, double full_supervision_score) {
    if (full_supervision_score == 0.0) throw InvalidArgument("full-supervision score must be non-zero", "full_supervision_score");
    return 100.0 * score / full_supervision_score;
}

std::string MethodSpec::label() const {
    switch (kind) {
    case Kind::adaptive: return "adaptive";
    case Kind::fixed: return "fixed-" + percent_label(split);
    case Kind::estimated_best_fixed: return "estimated-best-fixed";
    }
    return {};
}

MethodSpec MethodSpec::parse(const std::string& label) {
    if (label == "adaptive") return adaptive();
    if (label == "estimated-best-fixed") return estimated_best_fixed();
    if (label.rfind("fixed-", 0) == 0) {
        int pct = 0;
        const char* first = label.data() + 6;
        const char* last = label.data() + label.size();
        auto [ptr, ec] = std::from_chars(first, last, pct);
        if (ec == std::errc{} && ptr == last && pct >= 0 && pct <= 100) return fixed(pct / 100.0);
    }
    throw InvalidArgument("unknown method '" + label + "'", "method");
}

CampaignTrajectory run_method(const MethodSpec& method, const CampaignConfig& config, const PerformanceSurface& oracle) {
    switch (method.kind) {
    case MethodSpec::Kind::adaptive: return run_adaptive(config, oracle);
    case MethodSpec::Kind::fixed: return run_fixed(method.split, config, oracle);
    case MethodSpec::Kind::estimated_best_fixed: return run_estimated_best_fixed(config, oracle);
    }
    throw InvalidArgument("unknown method", "method");
}

SweepResult sweep(std::span<const SweepJob> jobs, int workers) {
    struct Task {
        std::size_t job;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        for (auto seed : jobs[j].seeds) tasks.push_back({j, seed});
    }

    SweepResult result;
    result.rows.resize(tasks.size());
    result.trajectories.resize(tasks.size());

    auto run_task = [&](std::size_t i) {
        const auto& job = jobs[tasks[i].job];
        CampaignConfig cfg = job.config;
        cfg.seed = tasks[i].seed;
        ResultRow& row = result.rows[i];
        row.method = job.method.label();
        row.surface = job.surface ? job.surface->name() : "";
        row.alpha_c = cfg.cost_model.alpha_c;
        row.alpha_s = cfg.cost_model.alpha_s;
        row.budget = cfg.cost_model.budget;
        row.steps = cfg.total_steps;
        row.seed = cfg.seed;
        try {
            if (!job.surface) throw InvalidArgument("sweep job without a surface", "surface");
            auto tr = run_method(job.method, cfg, *job.surface);
            row.final_c = tr.final_strategy.c;
            row.final_s = tr.final_strategy.s;
            row.spent = tr.spent;
            row.final_score = tr.final_score;
            row.relative_score = relative_performance(
                tr.final_score, job.surface->evaluate(static_cast<double>(job.surface->max_c()),
                                                      static_cast<double>(job.surface->max_s())));
            row.truncated = tr.truncated;
            result.trajectories[i] = std::move(tr);
        } catch (const CampaignError& e) {
            row.error = e.what();
            result.trajectories[i] = e.partial();
        } catch (const std::exception& e) {
            row.error = e.what();
            result.trajectories[i].method = row.method;
        }
    };

    const auto n_workers = static_cast<std::size_t>(std::max(1, workers));
    if (n_workers == 1 || tasks.size() <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::min(n_workers, tasks.size()); ++w) {
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) run_task(i);
            });
        }
    }

    std::size_t i = 0;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        SummaryRow s;
        const std::size_t begin = i;
        for (; i < tasks.size() && tasks[i].job == j; ++i) {
        }
        if (begin == i) continue;
        const auto& first = result.rows[begin];
        s.method = first.method;
        s.surface = first.surface;
        s.alpha_c = first.alpha_c;
        s.alpha_s = first.alpha_s;
        s.budget = first.budget;
        s.steps = first.steps;
        std::vector<double> scores;
        double spent = 0.0;
        for (std::size_t k = begin; k < i; ++k) {
            ++s.runs;
            if (!result.rows[k].error.empty()) {
                ++s.errors;
                continue;
            }
            scores.push_back(result.rows[k].final_score);
            spent += result.rows[k].spent;
        }
        if (!scores.empty()) {
            const double n = static_cast<double>(scores.size());
            for (double v : scores) s.mean_score += v;
            s.mean_score /= n;
            double var = 0.0;
            for (double v : scores) var += (v - s.mean_score) * (v - s.mean_score);
            s.std_score = std::sqrt(var / n);
            s.mean_spent = spent / n;
        }
        result.summary.push_back(s);
    }
    return result;
}

namespace {

std::string num(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

} // namespace

std::string results_csv(std::span<const ResultRow> rows) {
    std::ostringstream out;
    out << "method,surface,alpha_c,alpha_s,budget,steps,seed,final_c,final_s,spent,final_score,relative_score,truncated,error\n";
    for (const auto& r : rows) {
        out << csv_field(r.method) << ',' << csv_field(r.surface) << ',' << num(r.alpha_c) << ',' << num(r.alpha_s) << ','
            << num(r.budget) << ',' << r.steps << ',' << r.seed << ',' << r.final_c << ',' << r.final_s << ','
            << num(r.spent) << ',' << num(r.final_score) << ',' << num(r.relative_score) << ','
            << (r.truncated ? "true" : "false") << ',' << csv_field(r.error) << '\n';
    }
    return out.str();
}

std::string summary_csv(std::span<const SummaryRow> rows) {
    std::ostringstream out;
    out << "method,surface,alpha_c,alpha_s,budget,steps,runs,errors,mean_score,std_score,mean_spent\n";
    for (const auto& r : rows) {
        out << csv_field(r.method) << ',' << csv_field(r.surface) << ',' << num(r.alpha_c) << ',' << num(r.alpha_s) << ','
            << num(r.budget) << ',' << r.steps << ',' << r.runs << ',' << r.errors << ',' << num(r.mean_score) << ','
            << num(r.std_score) << ',' << num(r.mean_spent) << '\n';
    }
    return out.str();
}

} // namespace budgetwise
