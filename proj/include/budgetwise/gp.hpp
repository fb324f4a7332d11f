#pragma once

#include "budgetwise/error.hpp"
#include "budgetwise/strategy.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace budgetwise {

// Mean prior  gamma_c*log(beta_c*C + 1) + gamma_s*log(beta_s*S + 1)  and the
// separable RBF kernel  sigma^2 * exp(-dC^2 / 2ell_c^2) * exp(-dS^2 / 2ell_s^2),
// plus an observation-noise variance on the training diagonal.
struct GPHyperparams {
    double gamma_c = 0.1;
    double beta_c = 0.01;
    double gamma_s = 0.1;
    double beta_s = 0.01;
    double ell_c = 1.0;
    double ell_s = 1.0;
    double sigma = 1.0;
    double noise = 1e-4;

    void validate() const;
    friend bool operator==(const GPHyperparams&, const GPHyperparams&) = default;
};

struct UtilitySample {
    Strategy strategy;
    double score = 0.0;
};

struct PosteriorPoint {
    double mean = 0.0;
    double variance = 0.0;
};

class DecompositionError : public Error {
public:
    using Error::Error;
};

inline constexpr double kNoiseFloor = 1e-8;

double mean_prior(const GPHyperparams& h, Strategy x);
double kernel(const GPHyperparams& h, Strategy x1, Strategy x2);

// Number of trainable coordinates. Order: gamma_c, log beta_c, gamma_s,
// log beta_s, log ell_c, log ell_s, log sigma, log noise.
inline constexpr std::size_t kNumParams = 8;
using ParamVector = std::array<double, kNumParams>;

ParamVector to_unconstrained(const GPHyperparams& h);
GPHyperparams from_unconstrained(const ParamVector& theta);

struct LikelihoodEval {
    double value = 0.0;       // total log marginal likelihood
    ParamVector gradient{};   // d value / d unconstrained coordinates
};

// Log marginal likelihood of the samples and its gradient with respect to the
// unconstrained coordinates. Throws DecompositionError if the Gram matrix
// cannot be factored even with jitter.
LikelihoodEval log_marginal_likelihood(std::span<const UtilitySample> samples, const GPHyperparams& h);

enum class GPOptimizer { gradient_ascent, adam };

struct FitOptions {
    double learning_rate = 0.1;
    int iterations = 200;
    GPOptimizer optimizer = GPOptimizer::adam;
};

struct LatticeRow {
    std::int64_t s = 0;
    std::size_t count = 0;
};

// A GP conditioned on a fixed training set. Immutable; queries are const and
// safe to call concurrently.
class FittedGP {
public:
    // Conditions the prior given by `h` on `samples` without optimizing.
    FittedGP(std::vector<UtilitySample> samples, const GPHyperparams& h);

    const GPHyperparams& hyperparams() const noexcept { return h_; }
    const std::vector<UtilitySample>& training_samples() const noexcept { return samples_; }
    // Diagonal jitter that was needed on top of `noise` to factor the Gram matrix.
    double jitter() const noexcept { return jitter_; }
    double log_marginal_likelihood() const noexcept { return lml_; }
    // Objective trace of the optimizer, one entry per iteration (empty when not fitted).
    const std::vector<double>& lml_trace() const noexcept { return trace_; }

    PosteriorPoint posterior(Strategy query) const;
    std::vector<PosteriorPoint> posterior_grid(std::span<const Strategy> queries) const;
    // Posterior over a row-structured lattice: row j holds the points
    // (c_values[k], rows[j].s) for k < rows[j].count, emitted row by row.
    std::vector<PosteriorPoint> posterior_rows(std::span<const std::int64_t> c_values,
                                               std::span<const LatticeRow> rows) const;
    // Posterior means only, same layout as posterior_rows.
    std::vector<double> posterior_mean_rows(std::span<const std::int64_t> c_values,
                                            std::span<const LatticeRow> rows) const;

private:
    Eigen::MatrixXd axis_table(std::span<const std::int64_t> values, bool c_axis) const;
    template <typename Locate>
    void fill_posterior(const Eigen::MatrixXd& ec, const Eigen::MatrixXd& es, std::size_t count, Locate&& locate,
                        PosteriorPoint* out) const;

    friend FittedGP fit(std::vector<UtilitySample>, const GPHyperparams&, const FitOptions&, std::uint64_t);

    GPHyperparams h_;
    std::vector<UtilitySample> samples_;
    Eigen::MatrixXd chol_;   // lower Cholesky factor of K + (noise + jitter) I
    Eigen::VectorXd alpha_;  // (K + noise I)^-1 (y - mu)
    double jitter_ = 0.0;
    double lml_ = 0.0;
    std::vector<double> trace_;
};

// Default starting point from the observed data: gamma = 0.1, beta = 0.01,
// length scales a quarter of each axis range, sigma the score standard
// deviation, noise 1e-4.
GPHyperparams initial_hyperparams(std::span<const UtilitySample> samples);

// Maximizes the log marginal likelihood from `init` by first-order ascent in
// the unconstrained coordinates and returns the best iterate visited (the
// trace still records every step). Deterministic in its inputs; the seed is
// accepted for interface stability and does not influence the optimizer.
FittedGP fit(std::vector<UtilitySample> samples, const GPHyperparams& init, const FitOptions& options = {},
             std::uint64_t seed = 0);

} // namespace budgetwise
