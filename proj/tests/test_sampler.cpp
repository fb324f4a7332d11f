#include "budgetwise/oracle.hpp"
#include "budgetwise/sampler.hpp"

#include <doctest.h>

#include <set>

using namespace budgetwise;

namespace {

AnnotatedPool pool_of(Strategy size) {
    AnnotatedPool p;
    p.grow(size);
    return p;
}

double count_score(std::span<const SampleId> c, std::span<const SampleId> s, std::uint64_t) {
    return std::min(1.0, 0.01 * static_cast<double>(c.size()) + 0.02 * static_cast<double>(s.size()));
}

} // namespace

TEST_SUITE("sampler") {

TEST_CASE("pool growth continues identifiers") {
    AnnotatedPool p;
    p.grow({3, 2});
    p.grow({2, 1});
    CHECK(p.size() == Strategy{5, 3});
    CHECK(std::set<SampleId>(p.classification_ids.begin(), p.classification_ids.end()).size() == 5);
    CHECK_THROWS_AS(p.grow({-1, 0}), InvalidArgument);
    p.segmentation_ids.push_back(p.segmentation_ids.front());
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("single sample is the full pool") {
    const auto pool = pool_of({10, 4});
    const auto xs = build_utility_samples(pool, count_score, 1, 5);
    REQUIRE(xs.size() == 1);
    CHECK(xs[0].strategy == Strategy{10, 4});
    CHECK(xs[0].score == doctest::Approx(0.18));
    CHECK_THROWS_AS(build_utility_samples(pool, count_score, 0, 5), InvalidArgument);
}

TEST_CASE("empty classification pool gives zero c everywhere") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        for (const auto& x : build_utility_samples(pool_of({0, 5}), count_score, 20, seed)) CHECK(x.strategy.c == 0);
    }
}

TEST_CASE("oracle scores pass through") {
    const auto surface = synthetic_log_surface({0.05, 0.01, 0.12, 0.02, 0.95});
    const SubsetEvaluator eval = [&](std::span<const SampleId> c, std::span<const SampleId> s, std::uint64_t seed) {
        return noisy_evaluate(*surface, static_cast<std::int64_t>(c.size()), static_cast<std::int64_t>(s.size()), 0.0, seed);
    };
    const auto xs = build_utility_samples(pool_of({10, 10}), eval, 50, 3);
    REQUIRE(xs.size() == 50);
    for (const auto& x : xs)
        CHECK(x.score == surface->evaluate(static_cast<double>(x.strategy.c), static_cast<double>(x.strategy.s)));
}

TEST_CASE("draws stay inside the pool and are deterministic") {
    const auto pool = pool_of({40, 12});
    const auto a = plan_utility_draws(pool, 30, 99);
    const auto b = plan_utility_draws(pool, 30, 99);
    REQUIRE(a.size() == 30);
    CHECK(a[0].strategy == pool.size());
    CHECK(a[0].classification == pool.classification_ids);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].strategy == b[i].strategy);
        CHECK(a[i].classification == b[i].classification);
        CHECK(a[i].segmentation == b[i].segmentation);
        CHECK(a[i].eval_seed == b[i].eval_seed);
        CHECK(a[i].strategy.c <= 40);
        CHECK(a[i].strategy.s <= 12);
        CHECK(static_cast<std::int64_t>(a[i].classification.size()) == a[i].strategy.c);
        CHECK(static_cast<std::int64_t>(a[i].segmentation.size()) == a[i].strategy.s);
        const std::set<SampleId> uc(a[i].classification.begin(), a[i].classification.end());
        CHECK(uc.size() == a[i].classification.size());
        for (auto id : uc)
            CHECK(std::find(pool.classification_ids.begin(), pool.classification_ids.end(), id) !=
                  pool.classification_ids.end());
    }
    const auto c = plan_utility_draws(pool, 30, 100);
    bool differs = false;
    for (std::size_t i = 1; i < a.size(); ++i) differs = differs || a[i].strategy != c[i].strategy;
    CHECK(differs);
}

TEST_CASE("sub-strategy counts are uniform") {
    const std::int64_t C = 9;
    const auto draws = plan_utility_draws(pool_of({C, 3}), 10000, 7);
    std::vector<double> counts(C + 1, 0.0);
    for (std::size_t i = 1; i < draws.size(); ++i) counts[static_cast<std::size_t>(draws[i].strategy.c)] += 1.0;
    const double expected = static_cast<double>(draws.size() - 1) / (C + 1);
    double chi2 = 0.0;
    for (double k : counts) chi2 += (k - expected) * (k - expected) / expected;
    // 9 degrees of freedom, 99.9th percentile.
    CHECK(chi2 < 27.88);
}

TEST_CASE("norm weighted mode favours larger sub-strategies") {
    const auto pool = pool_of({20, 20});
    double uniform = 0.0, weighted = 0.0;
    const auto u = plan_utility_draws(pool, 4000, 1, SamplingMode::uniform);
    const auto w = plan_utility_draws(pool, 4000, 1, SamplingMode::norm_weighted);
    for (std::size_t i = 1; i < u.size(); ++i) {
        uniform += static_cast<double>(u[i].strategy.c + u[i].strategy.s);
        weighted += static_cast<double>(w[i].strategy.c + w[i].strategy.s);
    }
    CHECK(weighted > uniform * 1.05);
}

TEST_CASE("merge keeps order and duplicates") {
    const std::vector<UtilitySample> a{{{1, 1}, 0.1}, {{2, 2}, 0.2}, {{1, 1}, 0.1}};
    const std::vector<UtilitySample> b{{{3, 3}, 0.3}, {{4, 4}, 0.4}, {{1, 1}, 0.1}, {{5, 5}, 0.5}};
    const std::vector<UtilitySample> none;
    CHECK(merge_samples(none, a).size() == 3);
    CHECK(merge_samples(a, none).size() == 3);
    const auto m = merge_samples(a, b);
    REQUIRE(m.size() == 7);
    CHECK(m[3].strategy == Strategy{3, 3});
    CHECK(m[6].strategy == Strategy{5, 5});
    CHECK(a.size() == 3);
    CHECK(b.size() == 4);
}

}
