#pragma once

#include "budgetwise/error.hpp"
#include "budgetwise/strategy.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace budgetwise {

// Stand-in for "train a segmentation model on (c, s) annotations and measure
// its score". Implementations are immutable and evaluate() is thread-safe.
class PerformanceSurface {
public:
    PerformanceSurface(std::string name, std::int64_t max_c, std::int64_t max_s)
        : name_(std::move(name)), max_c_(max_c), max_s_(max_s) {}
    virtual ~PerformanceSurface() = default;

    // Score in [0, 1].
    virtual double evaluate(double c, double s) const = 0;

    const std::string& name() const noexcept { return name_; }
    // Number of images available per modality; strategies beyond this are truncated.
    std::int64_t max_c() const noexcept { return max_c_; }
    std::int64_t max_s() const noexcept { return max_s_; }

private:
    std::string name_;
    std::int64_t max_c_;
    std::int64_t max_s_;
};

using SurfacePtr = std::shared_ptr<const PerformanceSurface>;

struct LogSurfaceParams {
    double gamma_c = 0.0;
    double beta_c = 0.01;
    double gamma_s = 0.0;
    double beta_s = 0.01;
    double ceiling = 1.0;

    void validate() const;
};

inline constexpr std::int64_t kUnboundedPool = std::int64_t{1} << 40;

// min(ceiling, gamma_c*log(beta_c*c + 1) + gamma_s*log(beta_s*s + 1)), clamped to [0, 1].
SurfacePtr synthetic_log_surface(const LogSurfaceParams& params, std::string name = "log",
                                 std::int64_t max_c = kUnboundedPool, std::int64_t max_s = kUnboundedPool);

SurfacePtr constant_surface(double value, std::string name = "constant", std::int64_t max_c = kUnboundedPool,
                            std::int64_t max_s = kUnboundedPool);

SurfacePtr function_surface(std::string name, std::function<double(double, double)> fn,
                            std::int64_t max_c = kUnboundedPool, std::int64_t max_s = kUnboundedPool);

// Scores measured on a (c_knots x s_knots) grid; scores[j][i] is the score at
// (c_knots[i], s_knots[j]).
struct SurfaceGrid {
    std::string name;
    std::vector<std::int64_t> c_knots;
    std::vector<std::int64_t> s_knots;
    std::vector<std::vector<double>> scores;

    void validate() const;
    friend bool operator==(const SurfaceGrid&, const SurfaceGrid&) = default;
};

// Natural cubic spline through (x, y); evaluation clamps x into the knot hull.
class NaturalCubicSpline {
public:
    NaturalCubicSpline() = default;
    NaturalCubicSpline(std::vector<double> x, std::vector<double> y);
    double operator()(double xq) const;

private:
    std::vector<double> x_, y_, m_;
};

// Tensor-product natural cubic spline over the grid (rows along c, then across
// s), clamped to [0, 1]. Grids with fewer than 4 knots on an axis use bilinear
// interpolation instead.
SurfacePtr spline_surface(const SurfaceGrid& grid);

class SurfaceFileError : public Error {
public:
    enum class Kind { missing_file, malformed_json, schema_violation, invariant_violation };
    SurfaceFileError(Kind kind, const std::string& message, std::string field = {})
        : Error(message, std::move(field)), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

SurfaceGrid load_surface(const std::filesystem::path& path);
SurfaceGrid parse_surface(const std::string& json_text);
std::string surface_to_json(const SurfaceGrid& grid);
void save_surface(const SurfaceGrid& grid, const std::filesystem::path& path);

// surface(c, s) + N(0, noise_std^2) noise keyed by (seed, c, s), clamped to [0, 1].
double noisy_evaluate(const PerformanceSurface& surface, std::int64_t c, std::int64_t s, double noise_std,
                      std::uint64_t seed);

// Proportions used to sample measured grids: 2, 4, 6, 8, 10, 20, 30, 40, 60, 80, 100 percent.
const std::vector<double>& grid_proportions();

// Grid knots at grid_proportions() of the pool sizes with scores taken from `fn`.
SurfaceGrid proportion_grid(std::string name, std::int64_t pool_c, std::int64_t pool_s,
                            const std::function<double(double, double)>& fn);

struct SurfacePreset {
    SurfacePtr surface;
    Strategy initial;   // default starting strategy (C_0, S_0)
    std::string description;
};

// Presets: log-default, oct, voc, suim-like, cityscapes-like.
SurfacePreset make_preset(const std::string& name);
const std::vector<std::string>& preset_names();

// Accepts "preset:<name>" or a path to a surface JSON file.
SurfacePreset resolve_surface(const std::string& source);

} // namespace budgetwise
