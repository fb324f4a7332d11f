#pragma once

#include "budgetwise/gp.hpp"
#include "budgetwise/strategy.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace budgetwise {

using SampleId = std::int64_t;

// Identifiers of the images annotated so far, in annotation order.
struct AnnotatedPool {
    std::vector<SampleId> classification_ids;
    std::vector<SampleId> segmentation_ids;

    Strategy size() const {
        return {static_cast<std::int64_t>(classification_ids.size()), static_cast<std::int64_t>(segmentation_ids.size())};
    }
    // Appends `delta` fresh identifiers per modality, continuing the sequence.
    void grow(Strategy delta);
    void validate() const;
};

// Scores a model trained on the given subsets. Must be deterministic in
// (subset identities, eval_seed).
using SubsetEvaluator =
    std::function<double(std::span<const SampleId> classification, std::span<const SampleId> segmentation,
                         std::uint64_t eval_seed)>;

enum class SamplingMode {
    uniform,        // (C', S') uniform on [0, C] x [0, S]
    norm_weighted,  // P(C', S') proportional to ||(C', S')||_2
};

// One training subset to evaluate.
struct SubsetDraw {
    Strategy strategy;
    std::vector<SampleId> classification;
    std::vector<SampleId> segmentation;
    std::uint64_t eval_seed = 0;
};

// The subsets BuildUtilitySamples would train on: the full pool first, then
// m_count - 1 random sub-strategies with uniformly drawn subsets.
std::vector<SubsetDraw> plan_utility_draws(const AnnotatedPool& pool, int m_count, std::uint64_t rng_seed,
                                           SamplingMode mode = SamplingMode::uniform);

std::vector<UtilitySample> build_utility_samples(const AnnotatedPool& pool, const SubsetEvaluator& evaluator,
                                                 int m_count, std::uint64_t rng_seed,
                                                 SamplingMode mode = SamplingMode::uniform);

std::vector<UtilitySample> merge_samples(std::span<const UtilitySample> existing, std::span<const UtilitySample> added);

} // namespace budgetwise
