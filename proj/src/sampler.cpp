#include "budgetwise/sampler.hpp"

#include "budgetwise/error.hpp"
#include "budgetwise/rng.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <unordered_set>

namespace budgetwise {

void AnnotatedPool::grow(Strategy delta) {
    if (delta.c < 0 || delta.s < 0) throw InvalidArgument("annotations cannot be removed from a pool", "delta");
    const SampleId next_c = classification_ids.empty() ? 0 : classification_ids.back() + 1;
    const SampleId next_s = segmentation_ids.empty() ? 0 : segmentation_ids.back() + 1;
    for (std::int64_t i = 0; i < delta.c; ++i) classification_ids.push_back(next_c + i);
    for (std::int64_t i = 0; i < delta.s; ++i) segmentation_ids.push_back(next_s + i);
}

void AnnotatedPool::validate() const {
    auto unique = [](const std::vector<SampleId>& ids) {
        std::unordered_set<SampleId> seen(ids.begin(), ids.end());
        return seen.size() == ids.size();
    };
    if (!unique(classification_ids)) throw InvalidArgument("duplicate classification id", "classification_ids");
    if (!unique(segmentation_ids)) throw InvalidArgument("duplicate segmentation id", "segmentation_ids");
}

namespace {

// k elements of `ids` chosen uniformly without replacement (partial Fisher-Yates),
// returned in pool order.
std::vector<SampleId> draw_subset(const std::vector<SampleId>& ids, std::int64_t k, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(ids.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const auto kk = static_cast<std::size_t>(k);
    for (std::size_t i = 0; i < kk; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(kk);
    std::sort(idx.begin(), idx.end());
    std::vector<SampleId> out;
    out.reserve(kk);
    for (std::size_t i : idx) out.push_back(ids[i]);
    return out;
}

class NormWeightedSampler {
public:
    NormWeightedSampler(std::int64_t max_c, std::int64_t max_s) : max_c_(max_c), max_s_(max_s) {
        std::vector<double> marginal(static_cast<std::size_t>(max_c + 1));
        for (std::int64_t c = 0; c <= max_c; ++c) {
            double w = 0.0;
            for (std::int64_t s = 0; s <= max_s; ++s) w += std::hypot(double(c), double(s));
            marginal[static_cast<std::size_t>(c)] = w;
        }
        degenerate_ = max_c == 0 && max_s == 0;
        if (!degenerate_) c_dist_ = std::discrete_distribution<std::int64_t>(marginal.begin(), marginal.end());
    }

    Strategy operator()(std::mt19937_64& rng) {
        if (degenerate_) return {0, 0};
        const std::int64_t c = c_dist_(rng);
        std::vector<double> w(static_cast<std::size_t>(max_s_ + 1));
        for (std::int64_t s = 0; s <= max_s_; ++s) w[static_cast<std::size_t>(s)] = std::hypot(double(c), double(s));
        std::discrete_distribution<std::int64_t> s_dist(w.begin(), w.end());
        return {c, s_dist(rng)};
    }

private:
    std::int64_t max_c_, max_s_;
    bool degenerate_ = false;
    std::discrete_distribution<std::int64_t> c_dist_;
};

} // namespace

std::vector<SubsetDraw> plan_utility_draws(const AnnotatedPool& pool, int m_count, std::uint64_t rng_seed,
                                           SamplingMode mode) {
    if (m_count < 1) throw InvalidArgument("m_count must be >= 1", "m_count");
    const Strategy full = pool.size();
    if (full.c == 0 && full.s == 0) throw InvalidArgument("the annotated pool is empty", "pool");

    std::vector<SubsetDraw> draws;
    draws.reserve(static_cast<std::size_t>(m_count));
    draws.push_back({full, pool.classification_ids, pool.segmentation_ids, derive_seed(rng_seed, {stream::evaluation, 0})});

    std::mt19937_64 rng(derive_seed(rng_seed, {stream::sampler}));
    std::uniform_int_distribution<std::int64_t> c_dist(0, full.c);
    std::uniform_int_distribution<std::int64_t> s_dist(0, full.s);
    std::optional<NormWeightedSampler> weighted;
    if (mode == SamplingMode::norm_weighted) weighted.emplace(full.c, full.s);

    for (int i = 1; i < m_count; ++i) {
        Strategy sub;
        if (weighted) {
            sub = (*weighted)(rng);
        } else {
            sub.c = c_dist(rng);
            sub.s = s_dist(rng);
        }
        SubsetDraw d;
        d.strategy = sub;
        d.classification = draw_subset(pool.classification_ids, sub.c, rng);
        d.segmentation = draw_subset(pool.segmentation_ids, sub.s, rng);
        d.eval_seed = derive_seed(rng_seed, {stream::evaluation, static_cast<std::uint64_t>(i)});
        draws.push_back(std::move(d));
    }
    return draws;
}

std::vector<UtilitySample> build_utility_samples(const AnnotatedPool& pool, const SubsetEvaluator& evaluator,
                                                 int m_count, std::uint64_t rng_seed, SamplingMode mode) {
    const auto draws = plan_utility_draws(pool, m_count, rng_seed, mode);
    std::vector<UtilitySample> out;
    out.reserve(draws.size());
    for (const auto& d : draws) {
        const double score = evaluator(d.classification, d.segmentation, d.eval_seed);
        if (!(score >= 0.0 && score <= 1.0)) throw InvalidArgument("evaluator returned a score outside [0, 1]", "score");
        out.push_back({d.strategy, score});
    }
    return out;
}

std::vector<UtilitySample> merge_samples(std::span<const UtilitySample> existing, std::span<const UtilitySample> added) {
    std::vector<UtilitySample> out(existing.begin(), existing.end());
    out.insert(out.end(), added.begin(), added.end());
    return out;
}

} // namespace budgetwise
