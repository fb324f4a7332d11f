#include "budgetwise/oracle.hpp"

#include "budgetwise/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace budgetwise {

using nlohmann::json;

void LogSurfaceParams::validate() const {
    if (!std::isfinite(gamma_c) || !std::isfinite(gamma_s)) throw InvalidArgument("gamma must be finite", "gamma");
    if (!(beta_c > 0.0)) throw InvalidArgument("beta_c must be positive", "beta_c");
    if (!(beta_s > 0.0)) throw InvalidArgument("beta_s must be positive", "beta_s");
    if (!(ceiling > 0.0 && ceiling <= 1.0)) throw InvalidArgument("ceiling must lie in (0, 1]", "ceiling");
}

namespace {

class LogSurface final : public PerformanceSurface {
public:
    LogSurface(const LogSurfaceParams& p, std::string name, std::int64_t max_c, std::int64_t max_s)
        : PerformanceSurface(std::move(name), max_c, max_s), p_(p) {
        p_.validate();
    }

    double evaluate(double c, double s) const override {
        const double v = p_.gamma_c * std::log1p(p_.beta_c * std::max(c, 0.0)) +
                         p_.gamma_s * std::log1p(p_.beta_s * std::max(s, 0.0));
        return std::clamp(std::min(p_.ceiling, v), 0.0, 1.0);
    }

private:
    LogSurfaceParams p_;
};

class FunctionSurface final : public PerformanceSurface {
public:
    FunctionSurface(std::string name, std::function<double(double, double)> fn, std::int64_t max_c, std::int64_t max_s)
        : PerformanceSurface(std::move(name), max_c, max_s), fn_(std::move(fn)) {}

    double evaluate(double c, double s) const override { return std::clamp(fn_(c, s), 0.0, 1.0); }

private:
    std::function<double(double, double)> fn_;
};

std::vector<double> to_doubles(const std::vector<std::int64_t>& v) {
    return {v.begin(), v.end()};
}

// Index i of the knot interval [x_i, x_{i+1}] containing xq (clamped).
std::size_t interval(const std::vector<double>& x, double xq) {
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - x.begin() - 1, 0));
    return std::min(i, x.size() - 2);
}

class SplineGridSurface final : public PerformanceSurface {
public:
    explicit SplineGridSurface(const SurfaceGrid& g)
        : PerformanceSurface(g.name, g.c_knots.back(), g.s_knots.back()),
          c_(to_doubles(g.c_knots)),
          s_(to_doubles(g.s_knots)),
          scores_(g.scores) {
        bilinear_ = c_.size() < 4 || s_.size() < 4;
        if (bilinear_) {
            std::clog << "warning: surface '" << g.name << "' has fewer than 4 knots on an axis; using bilinear interpolation\n";
            return;
        }
        rows_.reserve(s_.size());
        for (const auto& row : scores_) rows_.emplace_back(c_, row);
    }

    double evaluate(double c, double s) const override {
        c = std::clamp(c, c_.front(), c_.back());
        s = std::clamp(s, s_.front(), s_.back());
        double v;
        if (bilinear_) {
            const std::size_t i = interval(c_, c), j = interval(s_, s);
            const double tc = (c - c_[i]) / (c_[i + 1] - c_[i]);
            const double ts = (s - s_[j]) / (s_[j + 1] - s_[j]);
            const double lo = scores_[j][i] * (1 - tc) + scores_[j][i + 1] * tc;
            const double hi = scores_[j + 1][i] * (1 - tc) + scores_[j + 1][i + 1] * tc;
            v = lo * (1 - ts) + hi * ts;
        } else {
            std::vector<double> column(s_.size());
            for (std::size_t j = 0; j < s_.size(); ++j) column[j] = rows_[j](c);
            v = NaturalCubicSpline(s_, std::move(column))(s);
        }
        return std::clamp(v, 0.0, 1.0);
    }

private:
    std::vector<double> c_, s_;
    std::vector<std::vector<double>> scores_;
    std::vector<NaturalCubicSpline> rows_;
    bool bilinear_ = false;
};

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
    throw SurfaceFileError(SurfaceFileError::Kind::schema_violation, "surface schema violation in '" + field + "': " + what,
                           field);
}

[[noreturn]] void invariant_error(const std::string& field, const std::string& what) {
    throw SurfaceFileError(SurfaceFileError::Kind::invariant_violation, "invalid surface '" + field + "': " + what, field);
}

} // namespace

SurfacePtr synthetic_log_surface(const LogSurfaceParams& params, std::string name, std::int64_t max_c,
                                 std::int64_t max_s) {
    return std::make_shared<LogSurface>(params, std::move(name), max_c, max_s);
}

SurfacePtr constant_surface(double value, std::string name, std::int64_t max_c, std::int64_t max_s) {
    return function_surface(std::move(name), [value](double, double) { return value; }, max_c, max_s);
}

SurfacePtr function_surface(std::string name, std::function<double(double, double)> fn, std::int64_t max_c,
                            std::int64_t max_s) {
    return std::make_shared<FunctionSurface>(std::move(name), std::move(fn), max_c, max_s);
}

void SurfaceGrid::validate() const {
    auto check_knots = [](const std::vector<std::int64_t>& k, const char* field) {
        if (k.size() < 2) invariant_error(field, "needs at least 2 knots");
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (k[i] < 0) invariant_error(field, "knots must be non-negative");
            if (i > 0 && k[i] <= k[i - 1]) invariant_error(field, "knots must be strictly ascending");
        }
    };
    check_knots(c_knots, "c_knots");
    check_knots(s_knots, "s_knots");
    if (scores.size() != s_knots.size()) invariant_error("scores", "expected one row per s knot");
    for (const auto& row : scores) {
        if (row.size() != c_knots.size()) invariant_error("scores", "expected one column per c knot");
        for (double v : row) {
            if (!(v >= 0.0 && v <= 1.0)) invariant_error("scores", "scores must lie in [0, 1]");
        }
    }
}

NaturalCubicSpline::NaturalCubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)), m_(x_.size(), 0.0) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw InvalidArgument("spline needs >= 2 matching knots", "knots");
    if (n == 2) return;
    // Tridiagonal system for interior second derivatives (Thomas algorithm).
    std::vector<double> diag(n - 2), upper(n - 2), rhs(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        diag[i - 1] = 2.0 * (h0 + h1);
        upper[i - 1] = h1;
        rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (std::size_t k = 1; k < n - 2; ++k) {
        const double lower = x_[k + 1] - x_[k];  // h_k, sub-diagonal entry of row k
        const double w = lower / diag[k - 1];
        diag[k] -= w * upper[k - 1];
        rhs[k] -= w * rhs[k - 1];
    }
    for (std::size_t k = n - 2; k-- > 0;) {
        const double next = (k + 1 < n - 2) ? m_[k + 2] : 0.0;
        m_[k + 1] = (rhs[k] - upper[k] * next) / diag[k];
    }
}

double NaturalCubicSpline::operator()(double xq) const {
    xq = std::clamp(xq, x_.front(), x_.back());
    const std::size_t i = interval(x_, xq);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - xq) / h;
    const double b = (xq - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

SurfacePtr spline_surface(const SurfaceGrid& grid) {
    grid.validate();
    return std::make_shared<SplineGridSurface>(grid);
}

SurfaceGrid parse_surface(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SurfaceFileError(SurfaceFileError::Kind::malformed_json, std::string("malformed surface JSON: ") + e.what());
    }
    if (!doc.is_object()) schema_error("<root>", "expected a JSON object");

    SurfaceGrid g;
    if (!doc.contains("name") || !doc["name"].is_string()) schema_error("name", "expected a string");
    g.name = doc["name"].get<std::string>();

    auto knots = [&](const char* field) {
        if (!doc.contains(field) || !doc[field].is_array()) schema_error(field, "expected an array of integers");
        std::vector<std::int64_t> out;
        for (const auto& v : doc[field]) {
            if (!v.is_number_integer()) schema_error(field, "expected an array of integers");
            out.push_back(v.get<std::int64_t>());
        }
        for (std::size_t i = 1; i < out.size(); ++i) {
            if (out[i] <= out[i - 1]) schema_error(field, "knots must be strictly ascending");
        }
        return out;
    };
    g.c_knots = knots("c_knots");
    g.s_knots = knots("s_knots");

    if (!doc.contains("scores") || !doc["scores"].is_array()) schema_error("scores", "expected an array of arrays");
    for (const auto& row : doc["scores"]) {
        if (!row.is_array()) schema_error("scores", "expected an array of arrays");
        std::vector<double> r;
        for (const auto& v : row) {
            if (!v.is_number()) schema_error("scores", "expected numbers");
            r.push_back(v.get<double>());
        }
        g.scores.push_back(std::move(r));
    }
    g.validate();
    return g;
}

SurfaceGrid load_surface(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw SurfaceFileError(SurfaceFileError::Kind::missing_file, "cannot open surface file " + path.string(), "path");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_surface(buf.str());
}

std::string surface_to_json(const SurfaceGrid& grid) {
    json doc;
    doc["name"] = grid.name;
    doc["c_knots"] = grid.c_knots;
    doc["s_knots"] = grid.s_knots;
    doc["scores"] = grid.scores;
    return doc.dump(2) + "\n";
}

void save_surface(const SurfaceGrid& grid, const std::filesystem::path& path) {
    grid.validate();
    std::ofstream out(path);
    if (!out) throw Error("cannot write surface file " + path.string(), "path");
    out << surface_to_json(grid);
}

double noisy_evaluate(const PerformanceSurface& surface, std::int64_t c, std::int64_t s, double noise_std,
                      std::uint64_t seed) {
    const double clean = surface.evaluate(static_cast<double>(c), static_cast<double>(s));
    if (noise_std <= 0.0) return clean;
    std::mt19937_64 rng(derive_seed(seed, {static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(s)}));
    std::normal_distribution<double> eps(0.0, noise_std);
    return std::clamp(clean + eps(rng), 0.0, 1.0);
}

const std::vector<double>& grid_proportions() {
    static const std::vector<double> p{0.02, 0.04, 0.06, 0.08, 0.10, 0.20, 0.30, 0.40, 0.60, 0.80, 1.00};
    return p;
}

SurfaceGrid proportion_grid(std::string name, std::int64_t pool_c, std::int64_t pool_s,
                            const std::function<double(double, double)>& fn) {
    SurfaceGrid g;
    g.name = std::move(name);
    auto knots = [](std::int64_t pool) {
        std::vector<std::int64_t> k;
        for (double p : grid_proportions()) {
            const auto v = static_cast<std::int64_t>(std::floor(p * static_cast<double>(pool)));
            if (k.empty() || v > k.back()) k.push_back(v);
        }
        return k;
    };
    g.c_knots = knots(pool_c);
    g.s_knots = knots(pool_s);
    for (auto s : g.s_knots) {
        std::vector<double> row;
        for (auto c : g.c_knots) row.push_back(std::clamp(fn(static_cast<double>(c), static_cast<double>(s)), 0.0, 1.0));
        g.scores.push_back(std::move(row));
    }
    return g;
}

} // namespace budgetwise
