#include "budgetwise/oracle.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace budgetwise;

namespace {

// Natural cubic spline in piecewise-polynomial form, solved with a dense system.
struct ReferenceSpline {
    std::vector<double> x, a, b, c, d;

    ReferenceSpline(std::vector<double> xs, const std::vector<double>& ys) : x(std::move(xs)) {
        const auto n = static_cast<Eigen::Index>(x.size());
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
        m(0, 0) = 1.0;
        m(n - 1, n - 1) = 1.0;
        for (Eigen::Index i = 1; i + 1 < n; ++i) {
            const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
            m(i, i - 1) = h0;
            m(i, i) = 2.0 * (h0 + h1);
            m(i, i + 1) = h1;
            r(i) = 3.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
        }
        const Eigen::VectorXd cc = m.fullPivLu().solve(r);
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            const double h = x[i + 1] - x[i];
            a.push_back(ys[i]);
            c.push_back(cc(i));
            b.push_back((ys[i + 1] - ys[i]) / h - h * (2.0 * cc(i) + cc(i + 1)) / 3.0);
            d.push_back((cc(i + 1) - cc(i)) / (3.0 * h));
        }
    }

    double operator()(double q) const {
        q = std::clamp(q, x.front(), x.back());
        std::size_t i = 0;
        while (i + 2 < x.size() && q > x[i + 1]) ++i;
        const double t = q - x[i];
        return a[i] + t * (b[i] + t * (c[i] + t * d[i]));
    }
};

double reference_tensor(const SurfaceGrid& g, double c, double s) {
    std::vector<double> cs(g.c_knots.begin(), g.c_knots.end()), ss(g.s_knots.begin(), g.s_knots.end());
    std::vector<double> across;
    for (const auto& row : g.scores) across.push_back(ReferenceSpline(cs, row)(c));
    return ReferenceSpline(ss, across)(s);
}

SurfaceGrid random_grid(std::mt19937_64& rng, std::size_t nc, std::size_t ns) {
    SurfaceGrid g;
    g.name = "random";
    std::int64_t x = 0;
    for (std::size_t i = 0; i < nc; ++i) g.c_knots.push_back(x += 1 + static_cast<std::int64_t>(rng() % 50));
    x = 0;
    for (std::size_t j = 0; j < ns; ++j) g.s_knots.push_back(x += 1 + static_cast<std::int64_t>(rng() % 20));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t j = 0; j < ns; ++j) {
        std::vector<double> row;
        for (std::size_t i = 0; i < nc; ++i) row.push_back(u(rng));
        g.scores.push_back(std::move(row));
    }
    return g;
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
    const auto dir = std::filesystem::temp_directory_path() / "budgetwise-oracle-tests";
    std::filesystem::create_directories(dir);
    const auto p = dir / name;
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST_SUITE("oracle") {

TEST_CASE("synthetic log surface") {
    const auto f = synthetic_log_surface({0.05, 0.01, 0.12, 0.02, 0.95});
    CHECK(f->evaluate(0, 0) == 0.0);
    CHECK(f->evaluate(1000, 500) == doctest::Approx(0.17 * std::log(11.0)).epsilon(1e-12));
    CHECK(f->evaluate(1000, 500) == doctest::Approx(0.4077).epsilon(1e-4));
    CHECK(f->evaluate(1e9, 1e9) == 0.95);
    const auto flat_c = synthetic_log_surface({0.0, 0.01, 0.12, 0.02, 0.95});
    CHECK(flat_c->evaluate(10, 40) == flat_c->evaluate(5000, 40));
    for (double c = 0; c < 5000; c += 250) {
        CHECK(f->evaluate(c + 1, 30) >= f->evaluate(c, 30));
        CHECK(f->evaluate(30, c + 1) >= f->evaluate(30, c));
    }
}

TEST_CASE("log surface parameter validation") {
    CHECK_THROWS_AS(LogSurfaceParams({0.1, 0.0, 0.1, 0.01, 0.9}).validate(), InvalidArgument);
    CHECK_THROWS_AS(LogSurfaceParams({0.1, 0.01, 0.1, 0.01, 1.5}).validate(), InvalidArgument);
}

TEST_CASE("spline reproduces knots on random grids") {
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto g = random_grid(rng, 4 + rng() % 8, 4 + rng() % 8);
        const auto f = spline_surface(g);
        for (std::size_t j = 0; j < g.s_knots.size(); ++j)
            for (std::size_t i = 0; i < g.c_knots.size(); ++i)
                worst = std::max(worst, std::abs(f->evaluate(static_cast<double>(g.c_knots[i]), static_cast<double>(g.s_knots[j])) -
                                                 g.scores[j][i]));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("spline reproduces affine surfaces") {
    SurfaceGrid g{"affine", {0, 10, 25, 40, 80}, {0, 5, 9, 20}, {}};
    auto fn = [](double c, double s) { return 0.1 + 0.004 * c + 0.01 * s; };
    for (auto s : g.s_knots) {
        std::vector<double> row;
        for (auto c : g.c_knots) row.push_back(fn(static_cast<double>(c), static_cast<double>(s)));
        g.scores.push_back(row);
    }
    const auto f = spline_surface(g);
    for (double c : {3.3, 17.0, 55.5, 79.0})
        for (double s : {1.0, 7.7, 15.2}) CHECK(std::abs(f->evaluate(c, s) - fn(c, s)) <= 1e-9);
}

TEST_CASE("spline agrees with an independent implementation off knots") {
    std::mt19937_64 rng(8);
    SurfaceGrid g{"smooth", {0, 20, 50, 90, 140}, {0, 10, 25, 45, 70}, {}};
    for (auto s : g.s_knots) {
        std::vector<double> row;
        for (auto c : g.c_knots) row.push_back(0.5 + 0.3 * std::sin(0.02 * c) * std::cos(0.03 * s));
        g.scores.push_back(row);
    }
    const auto f = spline_surface(g);
    std::uniform_real_distribution<double> uc(0, 140), us(0, 70);
    for (int i = 0; i < 200; ++i) {
        const double c = uc(rng), s = us(rng);
        CHECK(std::abs(f->evaluate(c, s) - std::clamp(reference_tensor(g, c, s), 0.0, 1.0)) <= 1e-9);
    }
    for (int trial = 0; trial < 100; ++trial) {
        const auto r = random_grid(rng, 4 + rng() % 5, 4 + rng() % 5);
        const auto fr = spline_surface(r);
        const double c = std::uniform_real_distribution<double>(0, static_cast<double>(r.c_knots.back()))(rng);
        const double s = std::uniform_real_distribution<double>(0, static_cast<double>(r.s_knots.back()))(rng);
        CHECK(std::abs(fr->evaluate(c, s) - std::clamp(reference_tensor(r, c, s), 0.0, 1.0)) <= 1e-9);
    }
}

TEST_CASE("spline clamps queries and outputs") {
    SurfaceGrid g{"edge", {0, 10, 20, 30}, {0, 10, 20, 30}, {}};
    for (int j = 0; j < 4; ++j) g.scores.push_back({0.0, 1.0, 0.0, 1.0});
    const auto f = spline_surface(g);
    CHECK(f->evaluate(-50, 5) == f->evaluate(0, 5));
    CHECK(f->evaluate(500, 5) == f->evaluate(30, 5));
    for (double c = 0; c <= 30; c += 0.5) {
        CHECK(f->evaluate(c, 3) >= 0.0);
        CHECK(f->evaluate(c, 3) <= 1.0);
    }
}

TEST_CASE("small grids fall back to bilinear") {
    const SurfaceGrid g{"tiny", {0, 10}, {0, 4}, {{0.0, 0.2}, {0.4, 0.6}}};
    const auto f = spline_surface(g);
    CHECK(f->evaluate(5, 2) == doctest::Approx(0.3));
}

TEST_CASE("grid validation") {
    SurfaceGrid g{"bad", {0, 10, 5}, {0, 1}, {{0, 0, 0}, {0, 0, 0}}};
    CHECK_THROWS_AS(g.validate(), SurfaceFileError);
    g = {"bad", {0, 10}, {0, 1}, {{0, 0}, {0, 1.5}}};
    CHECK_THROWS_AS(g.validate(), SurfaceFileError);
    g = {"bad", {0, 10}, {0, 1}, {{0, 0}}};
    CHECK_THROWS_AS(g.validate(), SurfaceFileError);
}

TEST_CASE("surface files") {
    const std::string valid =
        R"({"name":"four","c_knots":[0,10,20,30],"s_knots":[0,5,10,15],"scores":[[0,0.1,0.2,0.3],[0.1,0.2,0.3,0.4],[0.2,0.3,0.4,0.5],[0.3,0.4,0.5,0.6]]})";
    const auto g = load_surface(temp_file("valid.json", valid));
    CHECK(g.scores.size() * g.scores[0].size() == 16);

    auto kind_of = [](const std::string& text, std::string& field) {
        try {
            parse_surface(text);
        } catch (const SurfaceFileError& e) {
            field = e.field();
            return e.kind();
        }
        FAIL("expected a surface error");
        return SurfaceFileError::Kind::missing_file;
    };
    std::string field;
    CHECK(kind_of(R"({"name":"x","c_knots":[10,0],"s_knots":[0,1],"scores":[[0,0],[0,0]]})", field) ==
          SurfaceFileError::Kind::schema_violation);
    CHECK(field == "c_knots");
    CHECK(kind_of("{not json", field) == SurfaceFileError::Kind::malformed_json);
    CHECK(kind_of(R"({"name":"x","c_knots":[0,1],"s_knots":[0,1],"scores":[[0,0],[0,2]]})", field) ==
          SurfaceFileError::Kind::invariant_violation);
    CHECK(field == "scores");
    CHECK(kind_of(R"({"c_knots":[0,1],"s_knots":[0,1],"scores":[[0,0],[0,0]]})", field) ==
          SurfaceFileError::Kind::schema_violation);
    CHECK(field == "name");
    try {
        load_surface("/nonexistent/surface.json");
        FAIL("expected a missing file error");
    } catch (const SurfaceFileError& e) {
        CHECK(e.kind() == SurfaceFileError::Kind::missing_file);
    }
}

TEST_CASE("save and load round trip") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 10; ++i) {
        const auto g = random_grid(rng, 4 + rng() % 4, 4 + rng() % 4);
        const auto p = std::filesystem::temp_directory_path() / "budgetwise-oracle-tests" / "round.json";
        save_surface(g, p);
        CHECK(load_surface(p) == g);
        CHECK(surface_to_json(parse_surface(surface_to_json(g))) == surface_to_json(g));
    }
}

TEST_CASE("noisy evaluation") {
    const auto f = synthetic_log_surface({0.05, 0.01, 0.12, 0.02, 0.95});
    CHECK(noisy_evaluate(*f, 300, 40, 0.0, 1) == f->evaluate(300, 40));
    CHECK(noisy_evaluate(*f, 300, 40, 0.01, 9) == noisy_evaluate(*f, 300, 40, 0.01, 9));
    const double sigma = 0.01;
    double sum = 0.0;
    const int n = 10000;
    for (int seed = 0; seed < n; ++seed) sum += noisy_evaluate(*f, 300, 40, sigma, static_cast<std::uint64_t>(seed));
    CHECK(std::abs(sum / n - f->evaluate(300, 40)) <= 4.0 * sigma / 100.0);
    const auto top = constant_surface(1.0);
    for (int seed = 0; seed < 100; ++seed) CHECK(noisy_evaluate(*top, 1, 1, 0.5, static_cast<std::uint64_t>(seed)) <= 1.0);
}

TEST_CASE("presets") {
    for (const auto& name : preset_names()) {
        const auto p = make_preset(name);
        CHECK(p.surface->name() == name);
        CHECK(p.initial.c >= 0);
        for (double c : {0.0, 100.0, 1000.0})
            for (double s : {0.0, 50.0, 500.0}) {
                const double v = p.surface->evaluate(c, s);
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
    }
    CHECK_THROWS_AS(make_preset("nope"), InvalidArgument);
    CHECK(resolve_surface("preset:oct").surface->name() == "oct");
    const auto grid = proportion_grid("g", 1000, 500, [](double c, double s) { return (c + s) / 3000.0; });
    CHECK(grid.c_knots.size() == 11);
    CHECK(grid.c_knots.front() == 20);
    CHECK(grid.s_knots.back() == 500);
}

}
