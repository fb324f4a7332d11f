#include "budgetwise/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

namespace budgetwise {

namespace {

constexpr double kLogCoordBound = 25.0;
constexpr double kGammaBound = 1e3;

double sq(double x) { return x * x; }

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be positive and finite", name);
}

Eigen::MatrixXd gram(std::span<const UtilitySample> samples, const GPHyperparams& h) {
    const auto n = static_cast<Eigen::Index>(samples.size());
    Eigen::MatrixXd k(n, n);
    const double sigma2 = h.sigma * h.sigma;
    const double inv_c = 1.0 / (2.0 * h.ell_c * h.ell_c), inv_s = 1.0 / (2.0 * h.ell_s * h.ell_s);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = sigma2;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double dc = static_cast<double>(samples[i].strategy.c - samples[j].strategy.c);
            const double ds = static_cast<double>(samples[i].strategy.s - samples[j].strategy.s);
            k(i, j) = sigma2 * std::exp(-dc * dc * inv_c - ds * ds * inv_s);
            k(j, i) = k(i, j);
        }
    }
    return k;
}

Eigen::VectorXd residuals(std::span<const UtilitySample> samples, const GPHyperparams& h) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i)
        r(static_cast<Eigen::Index>(i)) = samples[i].score - mean_prior(h, samples[i].strategy);
    return r;
}

struct Factor {
    Eigen::MatrixXd lower;
    double jitter = 0.0;
};

// Cholesky of gram + noise*I, escalating a relative diagonal jitter until the
// factor has a healthy pivot.
Factor factor(const Eigen::MatrixXd& k_f, double noise) {
    const auto n = k_f.rows();
    const double scale = std::max(k_f.diagonal().maxCoeff(), 1e-300);
    double jitter = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::MatrixXd k = k_f;
        k.diagonal().array() += noise + jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(k);
        if (llt.info() == Eigen::Success) {
            Eigen::MatrixXd l = llt.matrixL();
            const double min_pivot = l.diagonal().minCoeff();
            if (std::isfinite(min_pivot) && sq(min_pivot) > 1e-13 * scale) return {std::move(l), jitter};
        }
        jitter = (jitter == 0.0) ? 1e-10 * scale : jitter * 10.0;
    }
    throw DecompositionError("Gram matrix of " + std::to_string(n) +
                             " samples is not positive definite even after jitter escalation");
}

} // namespace

void GPHyperparams::validate() const {
    if (!std::isfinite(gamma_c)) throw InvalidArgument("gamma_c must be finite", "gamma_c");
    if (!std::isfinite(gamma_s)) throw InvalidArgument("gamma_s must be finite", "gamma_s");
    require_positive(beta_c, "beta_c");
    require_positive(beta_s, "beta_s");
    require_positive(ell_c, "ell_c");
    require_positive(ell_s, "ell_s");
    require_positive(sigma, "sigma");
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw InvalidArgument("noise must be non-negative", "noise");
}

double mean_prior(const GPHyperparams& h, Strategy x) {
    return h.gamma_c * std::log1p(h.beta_c * static_cast<double>(x.c)) +
           h.gamma_s * std::log1p(h.beta_s * static_cast<double>(x.s));
}

double kernel(const GPHyperparams& h, Strategy x1, Strategy x2) {
    const double dc = static_cast<double>(x1.c - x2.c);
    const double ds = static_cast<double>(x1.s - x2.s);
    return h.sigma * h.sigma * std::exp(-dc * dc / (2.0 * h.ell_c * h.ell_c)) *
           std::exp(-ds * ds / (2.0 * h.ell_s * h.ell_s));
}

ParamVector to_unconstrained(const GPHyperparams& h) {
    return {h.gamma_c,         std::log(h.beta_c), h.gamma_s,
            std::log(h.beta_s), std::log(h.ell_c), std::log(h.ell_s),
            std::log(h.sigma),  std::log(std::max(h.noise, kNoiseFloor))};
}

GPHyperparams from_unconstrained(const ParamVector& t) {
    return {t[0],
            std::exp(t[1]),
            t[2],
            std::exp(t[3]),
            std::exp(t[4]),
            std::exp(t[5]),
            std::exp(t[6]),
            std::exp(t[7])};
}

LikelihoodEval log_marginal_likelihood(std::span<const UtilitySample> samples, const GPHyperparams& h) {
    const auto n = static_cast<Eigen::Index>(samples.size());
    const Eigen::MatrixXd k_f = gram(samples, h);
    const Factor f = factor(k_f, h.noise);
    const auto chol = f.lower.triangularView<Eigen::Lower>();

    const Eigen::VectorXd r = residuals(samples, h);
    Eigen::VectorXd alpha = chol.solve(r);
    chol.adjoint().solveInPlace(alpha);

    LikelihoodEval out;
    out.value = -0.5 * r.dot(alpha) - f.lower.diagonal().array().log().sum() -
                0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

    // K^-1 = L^-T L^-1; only the lower triangle is formed.
    Eigen::MatrixXd l_inv = Eigen::MatrixXd::Identity(n, n);
    chol.solveInPlace(l_inv);
    Eigen::MatrixXd k_inv = Eigen::MatrixXd::Zero(n, n);
    k_inv.selfadjointView<Eigen::Lower>().rankUpdate(l_inv.adjoint());

    double g_gc = 0, g_bc = 0, g_gs = 0, g_bs = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double c = static_cast<double>(samples[i].strategy.c);
        const double s = static_cast<double>(samples[i].strategy.s);
        g_gc += alpha(i) * std::log1p(h.beta_c * c);
        g_bc += alpha(i) * h.gamma_c * h.beta_c * c / (h.beta_c * c + 1.0);
        g_gs += alpha(i) * std::log1p(h.beta_s * s);
        g_bs += alpha(i) * h.gamma_s * h.beta_s * s / (h.beta_s * s + 1.0);
    }

    // 0.5 * tr(W dK) for each kernel coordinate with W = alpha alpha^T - K^-1;
    // both factors are symmetric, so off-diagonal terms count twice.
    double g_lc = 0, g_ls = 0, g_sig = 0, tr_w = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double wjj = alpha(j) * alpha(j) - k_inv(j, j);
        tr_w += wjj;
        g_sig += wjj * k_f(j, j);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double wk = 2.0 * (alpha(i) * alpha(j) - k_inv(i, j)) * k_f(i, j);
            const double dc = static_cast<double>(samples[i].strategy.c - samples[j].strategy.c);
            const double ds = static_cast<double>(samples[i].strategy.s - samples[j].strategy.s);
            g_lc += wk * dc * dc;
            g_ls += wk * ds * ds;
            g_sig += wk;
        }
    }
    g_lc *= 0.5 / (h.ell_c * h.ell_c);
    g_ls *= 0.5 / (h.ell_s * h.ell_s);
    const double g_noise = 0.5 * tr_w * h.noise;

    out.gradient = {g_gc, g_bc, g_gs, g_bs, g_lc, g_ls, g_sig, g_noise};
    return out;
}

FittedGP::FittedGP(std::vector<UtilitySample> samples, const GPHyperparams& h) : h_(h), samples_(std::move(samples)) {
    h_.validate();
    if (samples_.empty()) throw InvalidArgument("a GP needs at least one training sample", "samples");
    const Eigen::MatrixXd k_f = gram(samples_, h_);
    Factor f = factor(k_f, h_.noise);
    chol_ = std::move(f.lower);
    jitter_ = f.jitter;
    const auto chol = chol_.triangularView<Eigen::Lower>();
    const Eigen::VectorXd r = residuals(samples_, h_);
    alpha_ = chol.solve(r);
    const Eigen::VectorXd half = alpha_;
    chol.adjoint().solveInPlace(alpha_);
    lml_ = -0.5 * half.squaredNorm() - chol_.diagonal().array().log().sum() -
           0.5 * static_cast<double>(samples_.size()) * std::log(2.0 * std::numbers::pi);
}

PosteriorPoint FittedGP::posterior(Strategy query) const {
    const auto n = static_cast<Eigen::Index>(samples_.size());
    Eigen::VectorXd k_star(n);
    for (Eigen::Index i = 0; i < n; ++i) k_star(i) = kernel(h_, samples_[i].strategy, query);
    const double mean = mean_prior(h_, query) + k_star.dot(alpha_);
    chol_.triangularView<Eigen::Lower>().solveInPlace(k_star);
    const double var = h_.sigma * h_.sigma - k_star.squaredNorm();
    return {mean, std::max(var, 0.0)};
}

Eigen::MatrixXd FittedGP::axis_table(std::span<const std::int64_t> values, bool c_axis) const {
    const auto n = static_cast<Eigen::Index>(samples_.size());
    const double ell = c_axis ? h_.ell_c : h_.ell_s;
    Eigen::MatrixXd t(n, static_cast<Eigen::Index>(values.size()));
    for (Eigen::Index k = 0; k < t.cols(); ++k) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& x = samples_[static_cast<std::size_t>(i)].strategy;
            const double d = static_cast<double>((c_axis ? x.c : x.s) - values[static_cast<std::size_t>(k)]);
            // Negligible factors are flushed to zero: subnormal products slow the solve severalfold.
            const double v = std::exp(-d * d / (2.0 * ell * ell));
            t(i, k) = v < 1e-150 ? 0.0 : v;
        }
    }
    return t;
}

template <typename Locate>
void FittedGP::fill_posterior(const Eigen::MatrixXd& ec, const Eigen::MatrixXd& es, std::size_t count,
                              Locate&& locate, PosteriorPoint* out) const {
    // Columns of 256 keep the right-hand side of the triangular solve in cache.
    constexpr std::size_t kChunk = 256;
    const auto n = static_cast<Eigen::Index>(samples_.size());
    const double sigma2 = h_.sigma * h_.sigma;
    const auto chol = chol_.triangularView<Eigen::Lower>();
    Eigen::MatrixXd k_star;
    std::vector<double> prior(kChunk);
    for (std::size_t begin = 0; begin < count; begin += kChunk) {
        const std::size_t len = std::min(kChunk, count - begin);
        k_star.resize(n, static_cast<Eigen::Index>(len));
        for (std::size_t p = 0; p < len; ++p) {
            const auto [ci, si, mu] = locate(begin + p);
            k_star.col(static_cast<Eigen::Index>(p)) = sigma2 * ec.col(ci).cwiseProduct(es.col(si));
            prior[p] = mu;
        }
        const Eigen::VectorXd means = k_star.transpose() * alpha_;
        chol.solveInPlace(k_star);
        const Eigen::VectorXd reduction = k_star.colwise().squaredNorm().transpose();
        for (std::size_t p = 0; p < len; ++p) {
            const auto idx = static_cast<Eigen::Index>(p);
            out[begin + p] = {prior[p] + means(idx), std::max(sigma2 - reduction(idx), 0.0)};
        }
    }
}

std::vector<PosteriorPoint> FittedGP::posterior_grid(std::span<const Strategy> queries) const {
    std::vector<PosteriorPoint> out(queries.size());
    if (queries.empty()) return out;

    // The kernel factorizes over axes, so one exp table per distinct coordinate suffices.
    std::vector<std::int64_t> cs, ss;
    cs.reserve(queries.size());
    ss.reserve(queries.size());
    for (const auto& q : queries) {
        cs.push_back(q.c);
        ss.push_back(q.s);
    }
    auto unique_sorted = [](std::vector<std::int64_t>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    unique_sorted(cs);
    unique_sorted(ss);
    const Eigen::MatrixXd ec = axis_table(cs, true);
    const Eigen::MatrixXd es = axis_table(ss, false);
    auto index_of = [](const std::vector<std::int64_t>& v, std::int64_t x) {
        return static_cast<Eigen::Index>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
    };
    fill_posterior(ec, es, queries.size(),
                   [&](std::size_t p) {
                       const auto& q = queries[p];
                       return std::tuple{index_of(cs, q.c), index_of(ss, q.s), mean_prior(h_, q)};
                   },
                   out.data());
    return out;
}

std::vector<PosteriorPoint> FittedGP::posterior_rows(std::span<const std::int64_t> c_values,
                                                     std::span<const LatticeRow> rows) const {
    std::size_t total = 0;
    std::vector<std::int64_t> ss;
    ss.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.count > c_values.size()) throw InvalidArgument("lattice row is longer than the c axis", "rows");
        total += r.count;
        ss.push_back(r.s);
    }
    std::vector<PosteriorPoint> out(total);
    if (total == 0) return out;

    const Eigen::MatrixXd ec = axis_table(c_values, true);
    const Eigen::MatrixXd es = axis_table(ss, false);
    std::vector<double> prior_c(c_values.size());
    for (std::size_t k = 0; k < c_values.size(); ++k)
        prior_c[k] = h_.gamma_c * std::log1p(h_.beta_c * static_cast<double>(c_values[k]));

    PosteriorPoint* dst = out.data();
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const double prior_s = h_.gamma_s * std::log1p(h_.beta_s * static_cast<double>(rows[j].s));
        const auto sj = static_cast<Eigen::Index>(j);
        fill_posterior(ec, es, rows[j].count,
                       [&](std::size_t p) { return std::tuple{static_cast<Eigen::Index>(p), sj, prior_c[p] + prior_s}; },
                       dst);
        dst += rows[j].count;
    }
    return out;
}

std::vector<double> FittedGP::posterior_mean_rows(std::span<const std::int64_t> c_values,
                                                 std::span<const LatticeRow> rows) const {
    std::size_t total = 0;
    std::vector<std::int64_t> ss;
    ss.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.count > c_values.size()) throw InvalidArgument("lattice row is longer than the c axis", "rows");
        total += r.count;
        ss.push_back(r.s);
    }
    std::vector<double> out(total);
    if (total == 0) return out;

    const Eigen::MatrixXd ec = axis_table(c_values, true);
    const Eigen::MatrixXd es = axis_table(ss, false);
    const double sigma2 = h_.sigma * h_.sigma;
    std::vector<double> prior_c(c_values.size());
    for (std::size_t k = 0; k < c_values.size(); ++k)
        prior_c[k] = h_.gamma_c * std::log1p(h_.beta_c * static_cast<double>(c_values[k]));

    double* dst = out.data();
    Eigen::VectorXd weights;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const double prior_s = h_.gamma_s * std::log1p(h_.beta_s * static_cast<double>(rows[j].s));
        weights = sigma2 * alpha_.cwiseProduct(es.col(static_cast<Eigen::Index>(j)));
        const auto count = static_cast<Eigen::Index>(rows[j].count);
        Eigen::Map<Eigen::VectorXd> row(dst, count);
        row.noalias() = ec.leftCols(count).transpose() * weights;
        for (Eigen::Index k = 0; k < count; ++k) row(k) += prior_c[static_cast<std::size_t>(k)] + prior_s;
        dst += count;
    }
    return out;
}

GPHyperparams initial_hyperparams(std::span<const UtilitySample> samples) {
    GPHyperparams h;
    if (samples.empty()) return h;
    auto [cmin, cmax] = std::minmax_element(samples.begin(), samples.end(),
                                            [](const auto& a, const auto& b) { return a.strategy.c < b.strategy.c; });
    auto [smin, smax] = std::minmax_element(samples.begin(), samples.end(),
                                            [](const auto& a, const auto& b) { return a.strategy.s < b.strategy.s; });
    h.ell_c = std::max(static_cast<double>(cmax->strategy.c - cmin->strategy.c) / 4.0, 1.0);
    h.ell_s = std::max(static_cast<double>(smax->strategy.s - smin->strategy.s) / 4.0, 1.0);

    double mean = 0.0;
    for (const auto& x : samples) mean += x.score;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (const auto& x : samples) var += sq(x.score - mean);
    var /= static_cast<double>(samples.size());
    h.sigma = std::max(std::sqrt(var), 1e-3);
    h.noise = 1e-4;
    return h;
}

FittedGP fit(std::vector<UtilitySample> samples, const GPHyperparams& init, const FitOptions& options,
             std::uint64_t /*seed*/) {
    if (samples.size() < 2) throw InvalidArgument("fitting a GP needs at least 2 samples", "samples");
    if (options.iterations < 0) throw InvalidArgument("iterations must be non-negative", "iterations");
    if (!(options.learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive", "learning_rate");
    init.validate();

    auto project = [](ParamVector& t) {
        t[0] = std::clamp(t[0], -kGammaBound, kGammaBound);
        t[2] = std::clamp(t[2], -kGammaBound, kGammaBound);
        for (std::size_t k : {1u, 3u, 4u, 5u, 6u}) t[k] = std::clamp(t[k], -kLogCoordBound, kLogCoordBound);
        t[7] = std::clamp(t[7], std::log(kNoiseFloor), kLogCoordBound);
    };

    ParamVector theta = to_unconstrained(init);
    project(theta);
    const double n = static_cast<double>(samples.size());

    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(options.iterations) + 1);
    LikelihoodEval current = log_marginal_likelihood(samples, from_unconstrained(theta));
    trace.push_back(current.value);

    ParamVector m{}, v{};
    // A fixed step overshoots near the optimum, so the best iterate is kept.
    ParamVector best_theta = theta;
    double best_value = current.value;
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    for (int it = 1; it <= options.iterations; ++it) {
        ParamVector next = theta;
        for (std::size_t k = 0; k < kNumParams; ++k) {
            // Ascend the per-sample objective so the step size does not scale with |M|.
            const double g = current.gradient[k] / n;
            if (options.optimizer == GPOptimizer::adam) {
                m[k] = b1 * m[k] + (1 - b1) * g;
                v[k] = b2 * v[k] + (1 - b2) * g * g;
                const double mh = m[k] / (1 - std::pow(b1, it));
                const double vh = v[k] / (1 - std::pow(b2, it));
                next[k] += options.learning_rate * mh / (std::sqrt(vh) + eps);
            } else {
                next[k] += options.learning_rate * g;
            }
        }
        project(next);
        LikelihoodEval candidate;
        try {
            candidate = log_marginal_likelihood(samples, from_unconstrained(next));
        } catch (const DecompositionError&) {
            break;
        }
        if (!std::isfinite(candidate.value)) break;
        theta = next;
        current = candidate;
        trace.push_back(current.value);
        if (current.value > best_value) {
            best_value = current.value;
            best_theta = theta;
        }
    }

    FittedGP out(std::move(samples), from_unconstrained(best_theta));
    out.trace_ = std::move(trace);
    return out;
}

} // namespace budgetwise
