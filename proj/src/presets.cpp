#include "budgetwise/oracle.hpp"

#include <cmath>

namespace budgetwise {

namespace {

// Table of per-dataset pool sizes (classification, segmentation).
constexpr Strategy kOctPool{22723, 902};
constexpr Strategy kVocPool{5717, 10582};
constexpr Strategy kSuimPool{1525, 1525};
constexpr Strategy kCityscapesPool{2975, 2975};

std::int64_t percent_of(std::int64_t pool, int pct) { return pool * pct / 100; }

std::function<double(double, double)> log_fn(LogSurfaceParams p) {
    return [p](double c, double s) {
        return std::min(p.ceiling, p.gamma_c * std::log1p(p.beta_c * c) + p.gamma_s * std::log1p(p.beta_s * s));
    };
}

} // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"log-default", "oct", "voc", "suim-like", "cityscapes-like"};
    return names;
}

SurfacePreset make_preset(const std::string& name) {
    if (name == "log-default") {
        const LogSurfaceParams p{0.05, 0.01, 0.12, 0.02, 0.95};
        return {synthetic_log_surface(p, name, 20000, 2000), {100, 10},
                "closed-form logarithmic surface, interior optimum near 65-70% segmentation"};
    }
    if (name == "oct") {
        const LogSurfaceParams p{0.02, 0.002, 0.16, 0.05, 0.95};
        auto grid = proportion_grid(name, kOctPool.c, kOctPool.s, log_fn(p));
        return {spline_surface(grid), {percent_of(kOctPool.c, 4), percent_of(kOctPool.s, 8)},
                "spline over an 11x11 proportion grid, segmentation-dominated logarithmic growth"};
    }
    if (name == "voc") {
        const LogSurfaceParams p{0.05, 0.004, 0.07, 0.003, 0.95};
        auto grid = proportion_grid(name, kVocPool.c, kVocPool.s, log_fn(p));
        return {spline_surface(grid), {percent_of(kVocPool.c, 8), percent_of(kVocPool.s, 6)},
                "spline over an 11x11 proportion grid, logarithmic growth in both axes"};
    }
    if (name == "cityscapes-like") {
        const LogSurfaceParams p{0.04, 0.01, 0.11, 0.02, 0.95};
        auto grid = proportion_grid(name, kCityscapesPool.c, kCityscapesPool.s, log_fn(p));
        return {spline_surface(grid), {percent_of(kCityscapesPool.c, 8), percent_of(kCityscapesPool.s, 8)},
                "spline over an 11x11 proportion grid, logarithmic growth in both axes"};
    }
    if (name == "suim-like") {
        // Classification gains follow a logistic plateau rather than a logarithm.
        auto fn = [](double c, double s) {
            const double weak = 0.22 / (1.0 + std::exp(-(c - 250.0) / 60.0)) - 0.22 / (1.0 + std::exp(250.0 / 60.0));
            return weak + 0.09 * std::log1p(0.02 * s);
        };
        auto grid = proportion_grid(name, kSuimPool.c, kSuimPool.s, fn);
        return {spline_surface(grid), {percent_of(kSuimPool.c, 8), percent_of(kSuimPool.s, 8)},
                "spline over an 11x11 proportion grid, non-logarithmic plateau in classification"};
    }
    throw InvalidArgument("unknown surface preset '" + name + "'", "surface");
}

SurfacePreset resolve_surface(const std::string& source) {
    constexpr std::string_view prefix = "preset:";
    if (source.rfind(prefix, 0) == 0) return make_preset(source.substr(prefix.size()));
    SurfaceGrid grid = load_surface(source);
    const Strategy pool{grid.c_knots.back(), grid.s_knots.back()};
    return {spline_surface(grid), {std::max<std::int64_t>(pool.c * 8 / 100, 1), std::max<std::int64_t>(pool.s * 8 / 100, 1)},
            "surface file " + source};
}

} // namespace budgetwise
