#include "budgetwise/cli.hpp"

#include "budgetwise/advisor.hpp"
#include "budgetwise/serialization.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <atomic>
#include <charconv>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <thread>

namespace budgetwise {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{
        "surface",   "budget",       "steps",          "alpha-c",          "alpha-s",       "seeds",
        "baselines", "m-count",      "noise-std",      "strides",          "spend-remainder", "jobs",
        "out",       "trajectories-dir", "initial-c",  "initial-s",        "gp-learning-rate", "gp-iterations",
        "gp-optimizer", "sampling"};
    return keys;
}

[[noreturn]] void bad_value(const std::string& key, const SettingValue& v, const std::string& why) {
    throw InvalidArgument(v.origin + ": invalid " + key + " '" + v.value + "': " + why, key);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) parts.push_back(trim(cur));
    return parts;
}

template <typename T>
T parse_number(const std::string& key, const SettingValue& v, const std::string& text) {
    T out{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (text.empty() || ec != std::errc() || ptr != last) bad_value(key, v, "expected a number");
    return out;
}

template <typename T>
std::vector<T> parse_number_list(const std::string& key, const SettingValue& v) {
    std::vector<T> out;
    for (const auto& part : split_list(v.value)) out.push_back(parse_number<T>(key, v, part));
    if (out.empty()) bad_value(key, v, "expected at least one value");
    return out;
}

bool parse_bool(const std::string& key, const SettingValue& v) {
    if (v.value == "true" || v.value == "1" || v.value == "yes" || v.value == "on") return true;
    if (v.value == "false" || v.value == "0" || v.value == "no" || v.value == "off") return false;
    bad_value(key, v, "expected true or false");
}

std::vector<std::uint64_t> parse_seeds(const SettingValue& v) {
    const std::string key = "seeds";
    const auto range = v.value.find("..");
    if (range != std::string::npos) {
        const auto lo = parse_number<std::uint64_t>(key, v, trim(v.value.substr(0, range)));
        const auto hi = parse_number<std::uint64_t>(key, v, trim(v.value.substr(range + 2)));
        if (hi < lo) bad_value(key, v, "empty range");
        std::vector<std::uint64_t> out;
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
        return out;
    }
    if (v.value.find(',') != std::string::npos) return parse_number_list<std::uint64_t>(key, v);
    // A single number is a count: seeds 0..N-1.
    const auto n = parse_number<std::uint64_t>(key, v, trim(v.value));
    if (n < 1) bad_value(key, v, "need at least one seed");
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = 0; s < n; ++s) out.push_back(s);
    return out;
}

std::vector<MethodSpec> parse_methods(const SettingValue& v) {
    std::vector<MethodSpec> out{MethodSpec::adaptive()};
    auto add = [&](const MethodSpec& m) {
        const auto label = m.label();
        if (std::none_of(out.begin(), out.end(), [&](const MethodSpec& x) { return x.label() == label; })) out.push_back(m);
    };
    for (const auto& part : split_list(v.value)) {
        if (part == "none") continue;
        if (part == "all" || part == "fixed") {
            for (double split : fixed_splits()) add(MethodSpec::fixed(split));
            if (part == "all") add(MethodSpec::estimated_best_fixed());
            continue;
        }
        try {
            add(MethodSpec::parse(part));
        } catch (const InvalidArgument&) {
            bad_value("baselines", v, "expected all, none, fixed, estimated-best-fixed or fixed-<percent>");
        }
    }
    return out;
}

std::string format_number(double x) {
    std::ostringstream s;
    s << std::setprecision(6) << x;
    return s.str();
}

std::string file_stem_part(std::string s) {
    for (auto& ch : s)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '.') ch = '_';
    return s;
}

void print_summary_table(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << std::left << std::setw(22) << "method" << std::right << std::setw(9) << "alpha_s" << std::setw(10) << "budget"
        << std::setw(7) << "steps" << std::setw(6) << "runs" << std::setw(7) << "errors" << std::setw(12) << "mean"
        << std::setw(12) << "std" << std::setw(12) << "spent" << "\n";
    for (const auto& r : rows) {
        out << std::left << std::setw(22) << r.method << std::right << std::setw(9) << format_number(r.alpha_s)
            << std::setw(10) << format_number(r.budget) << std::setw(7) << r.steps << std::setw(6) << r.runs
            << std::setw(7) << r.errors << std::fixed << std::setprecision(5) << std::setw(12) << r.mean_score
            << std::setw(12) << r.std_score << std::setprecision(1) << std::setw(12) << r.mean_spent
            << std::defaultfloat << "\n";
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << text;
    if (!f) throw Error("cannot write " + path.string());
}

int cmd_simulate(const SettingMap& settings, std::ostream& out, std::ostream& err) {
    SimulateSettings s;
    std::vector<SweepJob> jobs;
    try {
        s = parse_simulate_settings(settings);
        jobs = build_sweep_jobs(s);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    const SweepResult result = sweep(jobs, s.jobs);
    try {
        write_text(s.out, results_csv(result.rows));
        write_text(summary_path(s.out), summary_csv(result.summary));
        if (!s.trajectories_dir.empty()) {
            for (std::size_t i = 0; i < result.rows.size(); ++i) {
                const auto& row = result.rows[i];
                std::ostringstream name;
                name << std::setw(4) << std::setfill('0') << i << '_' << file_stem_part(row.method) << "_B"
                     << format_number(row.budget) << "_as" << format_number(row.alpha_s) << "_T" << row.steps << "_seed"
                     << row.seed << ".json";
                Json doc = to_json(result.trajectories[i]);
                doc["surface"] = row.surface;
                doc["seed"] = row.seed;
                doc["budget"] = row.budget;
                doc["alpha_c"] = row.alpha_c;
                doc["alpha_s"] = row.alpha_s;
                doc["steps"] = row.steps;
                doc["error"] = row.error;
                write_text(std::filesystem::path(s.trajectories_dir) / name.str(), doc.dump(2) + "\n");
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    print_summary_table(out, result.summary);
    std::size_t failed = 0;
    for (const auto& row : result.rows) {
        if (!row.error.empty()) {
            ++failed;
            err << "run failed: " << row.method << " seed " << row.seed << ": " << row.error << "\n";
        }
    }
    out << result.rows.size() << " rows written to " << s.out << "\n";
    return failed ? 2 : 0;
}

struct SampleShape {
    int nc = 0;
    int ns = 0;
};

SampleShape parse_shape(const std::string& text) {
    const auto x = text.find('x');
    SampleShape shape;
    if (x == std::string::npos) throw InvalidArgument("--sample expects NxM, got '" + text + "'", "sample");
    const SettingValue v{text, "--sample"};
    shape.nc = parse_number<int>("sample", v, text.substr(0, x));
    shape.ns = parse_number<int>("sample", v, text.substr(x + 1));
    if (shape.nc < 2 || shape.ns < 2) throw InvalidArgument("--sample needs at least 2 points per axis", "sample");
    return shape;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
    return v;
}

int cmd_surface(const std::string& source, const std::string& sample, const std::string& out_path,
                std::optional<double> c_max, std::optional<double> s_max, std::ostream& out, std::ostream& err) {
    try {
        SurfacePtr surface;
        std::optional<SurfaceGrid> grid;
        std::ostringstream stats;
        if (source.rfind("preset:", 0) == 0) {
            const auto preset = make_preset(source.substr(7));
            surface = preset.surface;
            stats << "preset " << surface->name() << ": " << preset.description << "\n"
                  << "initial strategy (" << preset.initial.c << ", " << preset.initial.s << ")\n";
            if (surface->max_c() < kUnboundedPool) stats << "pool " << surface->max_c() << " x " << surface->max_s() << "\n";
        } else {
            grid = load_surface(source);
            surface = spline_surface(*grid);
            double lo = 1.0, hi = 0.0;
            for (const auto& row : grid->scores)
                for (double v : row) lo = std::min(lo, v), hi = std::max(hi, v);
            stats << "surface " << grid->name << "\n"
                  << "c knots " << grid->c_knots.size() << " in [" << grid->c_knots.front() << ", " << grid->c_knots.back() << "]\n"
                  << "s knots " << grid->s_knots.size() << " in [" << grid->s_knots.front() << ", " << grid->s_knots.back() << "]\n"
                  << "scores in [" << lo << ", " << hi << "]\n";
        }

        if (sample.empty()) {
            out << stats.str();
            return 0;
        }
        const auto shape = parse_shape(sample);
        double c_lo = 0.0, s_lo = 0.0;
        double c_hi = surface->max_c() < kUnboundedPool ? static_cast<double>(surface->max_c()) : 10000.0;
        double s_hi = surface->max_s() < kUnboundedPool ? static_cast<double>(surface->max_s()) : 1000.0;
        if (grid) {
            c_lo = static_cast<double>(grid->c_knots.front());
            c_hi = static_cast<double>(grid->c_knots.back());
            s_lo = static_cast<double>(grid->s_knots.front());
            s_hi = static_cast<double>(grid->s_knots.back());
        }
        if (c_max) c_hi = *c_max;
        if (s_max) s_hi = *s_max;
        const auto cs = linspace(c_lo, c_hi, shape.nc);
        const auto ss = linspace(s_lo, s_hi, shape.ns);
        Json scores = Json::array();
        for (double s : ss) {
            Json row = Json::array();
            for (double c : cs) row.push_back(surface->evaluate(c, s));
            scores.push_back(std::move(row));
        }
        Json doc{{"name", surface->name()}, {"c_values", cs}, {"s_values", ss}, {"scores", std::move(scores)}};
        if (grid) {
            double worst = 0.0;
            for (std::size_t j = 0; j < grid->s_knots.size(); ++j)
                for (std::size_t i = 0; i < grid->c_knots.size(); ++i) {
                    const double v = surface->evaluate(static_cast<double>(grid->c_knots[i]), static_cast<double>(grid->s_knots[j]));
                    worst = std::max(worst, std::abs(v - grid->scores[j][i]));
                }
            doc["knots"] = {{"c_knots", grid->c_knots}, {"s_knots", grid->s_knots}, {"scores", grid->scores},
                            {"max_knot_error", worst}};
        }
        if (out_path.empty()) {
            err << stats.str();
            out << doc.dump() << "\n";
        } else {
            write_text(out_path, doc.dump() + "\n");
            out << stats.str() << cs.size() * ss.size() << " points written to " << out_path << "\n";
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what();
        if (!e.field().empty()) err << " (field: " << e.field() << ")";
        err << "\n";
        return 1;
    }
}

int cmd_serve(const std::string& host, int port, const std::string& session_dir, const std::string& ui_dir,
              int grid_size, std::ostream& out, std::ostream& err) {
    std::unique_ptr<AdvisorService> service;
    try {
        service = std::make_unique<AdvisorService>(AdvisorOptions{session_dir, grid_size});
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    httplib::Server server;
    // httplib defaults to SO_REUSEPORT, which lets a second advisor share the port silently.
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    mount_routes(server, *service);
    if (!ui_dir.empty() && !server.set_mount_point("/ui", ui_dir)) {
        err << "error: cannot serve UI directory " << ui_dir << "\n";
        return 1;
    }

    // Signals are handled by a dedicated thread so shutdown can call stop().
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    int bound = -1;
    if (port == 0) bound = server.bind_to_any_port(host);
    else if (server.bind_to_port(host, port)) bound = port;
    if (bound < 0) {
        err << "error: cannot bind " << host << ":" << port << "\n";
        return 1;
    }
    out << "advisor listening on http://" << host << ":" << bound << " (sessions in " << session_dir << ")" << std::endl;

    std::atomic<bool> done{false};
    std::thread watcher([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        if (!done.exchange(true)) {
            server.stop();
        }
    });
    server.listen_after_bind();
    if (!done.exchange(true)) pthread_kill(watcher.native_handle(), SIGTERM);
    watcher.join();
    // Every mutation is already on disk; nothing left to flush.
    out << "advisor stopped" << std::endl;
    return 0;
}

} // namespace

SettingMap read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read config file " + path, "config");
    SettingMap out;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string where = path + ":" + std::to_string(number);
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw InvalidArgument(where + ": expected key = value", "config");
        const std::string key = normalize_key(trim(body.substr(0, eq)));
        std::string value = trim(body.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
            throw InvalidArgument(where + ": unknown key '" + key + "'", key);
        out[key] = {value, where};
    }
    return out;
}

SimulateSettings parse_simulate_settings(const SettingMap& settings) {
    SimulateSettings s;
    s.methods = parse_methods({"all", "default"});
    for (const auto& [key, v] : settings) {
        if (key == "surface") s.surface = v.value;
        else if (key == "budget") s.budgets = parse_number_list<double>(key, v);
        else if (key == "steps") s.steps = parse_number_list<int>(key, v);
        else if (key == "alpha-c") s.alpha_c = parse_number<double>(key, v, v.value);
        else if (key == "alpha-s") s.alpha_s = parse_number_list<double>(key, v);
        else if (key == "seeds") s.seeds = parse_seeds(v);
        else if (key == "baselines") s.methods = parse_methods(v);
        else if (key == "m-count") s.m_count = parse_number<int>(key, v, v.value);
        else if (key == "noise-std") s.noise_std = parse_number<double>(key, v, v.value);
        else if (key == "strides") {
            const auto parts = parse_number_list<std::int64_t>(key, v);
            if (parts.size() > 2) bad_value(key, v, "expected N or C,S");
            s.strides = {parts.front(), parts.back()};
        } else if (key == "spend-remainder") s.spend_remainder = parse_bool(key, v);
        else if (key == "jobs") {
            s.jobs = parse_number<int>(key, v, v.value);
            if (s.jobs < 1) bad_value(key, v, "must be >= 1");
        } else if (key == "out") s.out = v.value;
        else if (key == "trajectories-dir") s.trajectories_dir = v.value;
        else if (key == "initial-c" || key == "initial-s") {
            if (!s.initial) s.initial = Strategy{-1, -1};
            (key == "initial-c" ? s.initial->c : s.initial->s) = parse_number<std::int64_t>(key, v, v.value);
        } else if (key == "gp-learning-rate") s.gp_learning_rate = parse_number<double>(key, v, v.value);
        else if (key == "gp-iterations") s.gp_iterations = parse_number<int>(key, v, v.value);
        else if (key == "gp-optimizer") {
            if (v.value == "adam") s.gp_optimizer = GPOptimizer::adam;
            else if (v.value == "gradient-ascent" || v.value == "gradient_ascent") s.gp_optimizer = GPOptimizer::gradient_ascent;
            else bad_value(key, v, "expected adam or gradient-ascent");
        } else if (key == "sampling") {
            if (v.value == "uniform") s.sampling = SamplingMode::uniform;
            else if (v.value == "norm-weighted" || v.value == "norm_weighted") s.sampling = SamplingMode::norm_weighted;
            else bad_value(key, v, "expected uniform or norm-weighted");
        } else throw InvalidArgument(v.origin + ": unknown setting '" + key + "'", key);
    }
    if (s.initial && (s.initial->c < 0 || s.initial->s < 0))
        throw InvalidArgument("initial-c and initial-s must be given together and be non-negative", "initial");
    if (s.out.empty()) throw InvalidArgument("out must not be empty", "out");
    return s;
}

std::vector<SweepJob> build_sweep_jobs(const SimulateSettings& s) {
    const SurfacePreset preset = resolve_surface(s.surface);
    std::vector<SweepJob> jobs;
    for (double alpha_s : s.alpha_s) {
        for (double budget : s.budgets) {
            for (int steps : s.steps) {
                CampaignConfig cfg;
                cfg.cost_model = {s.alpha_c, alpha_s, budget};
                cfg.total_steps = steps;
                cfg.initial = s.initial ? *s.initial : preset.initial;
                cfg.m_count = s.m_count;
                cfg.noise_std = s.noise_std;
                cfg.strides = s.strides;
                cfg.spend_remainder = s.spend_remainder;
                cfg.sampling = s.sampling;
                cfg.gp.learning_rate = s.gp_learning_rate;
                cfg.gp.iterations = s.gp_iterations;
                cfg.gp.optimizer = s.gp_optimizer;
                try {
                    cfg.validate();
                } catch (const InvalidArgument& e) {
                    throw InvalidArgument(std::string(e.what()) + " (budget " + format_number(budget) + ", alpha-s " +
                                              format_number(alpha_s) + ", steps " + std::to_string(steps) + ")",
                                          e.field());
                }
                for (const auto& m : s.methods) jobs.push_back({m, cfg, preset.surface, s.seeds});
            }
        }
    }
    return jobs;
}

std::string summary_path(const std::string& out) {
    std::filesystem::path p(out);
    const std::string stem = p.extension() == ".csv" ? p.stem().string() : p.filename().string();
    return (p.parent_path() / (stem + ".summary.csv")).string();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adaptive annotation budget allocation: simulations and advisor service", "budgetwise"};
    app.require_subcommand(1);

    // simulate: every flag is kept as text so the config file and flags share one parser.
    auto* simulate = app.add_subcommand("simulate", "Run adaptive and baseline campaigns on a surface");
    struct FlagSpec {
        const char* flag;
        const char* key;
        const char* help;
    };
    const std::vector<FlagSpec> flags{
        {"--surface", "surface", "preset:<name> or surface JSON file (default preset:log-default)"},
        {"--budget", "budget", "budget B, comma list for a sweep (default 5000)"},
        {"--steps", "steps", "number of steps T, comma list allowed (default 8)"},
        {"--alpha-c", "alpha-c", "classification annotation cost (default 1)"},
        {"--alpha-s", "alpha-s", "segmentation annotation cost, comma list allowed (default 12)"},
        {"--seeds", "seeds", "seed count N (seeds 0..N-1), list a,b,c or range a..b (default 1)"},
        {"--baselines", "baselines", "all, none, fixed, estimated-best-fixed or fixed-<percent> list (default all)"},
        {"--m-count", "m-count", "utility samples per step (default 20)"},
        {"--noise-std", "noise-std", "simulated evaluation noise (default 0.005)"},
        {"--strides", "strides", "lattice stride N or C,S (default 1)"},
        {"--jobs", "jobs", "worker threads (default 1)"},
        {"--out", "out", "results CSV path (default results.csv)"},
        {"--trajectories-dir", "trajectories-dir", "write one trajectory JSON per run here"},
    };
    std::map<std::string, std::string> flag_values;
    std::vector<std::pair<std::string, CLI::Option*>> flag_options;
    for (const auto& f : flags) flag_options.emplace_back(f.key, simulate->add_option(f.flag, flag_values[f.key], f.help));
    bool spend_remainder = false;
    auto* spend_opt = simulate->add_flag("--spend-remainder", spend_remainder, "spend leftover budget at the last step");
    std::string config_path;
    simulate->add_option("--config", config_path, "flat key = value config file; flags override it");

    auto* surface_cmd = app.add_subcommand("surface", "Validate a surface and optionally sample it densely");
    std::string surface_source, sample, surface_out;
    std::optional<double> c_max, s_max;
    surface_cmd->add_option("source", surface_source, "preset:<name> or surface JSON file");
    surface_cmd->add_option("--surface", surface_source, "same as the positional source");
    surface_cmd->add_option("--sample", sample, "emit an NxM sampled grid as JSON");
    surface_cmd->add_option("--out", surface_out, "write the sampled grid here instead of stdout");
    surface_cmd->add_option("--c-max", c_max, "upper end of the sampled c range");
    surface_cmd->add_option("--s-max", s_max, "upper end of the sampled s range");

    auto* serve = app.add_subcommand("serve", "Run the advisor HTTP service");
    std::string host = "127.0.0.1";
    int port = 8787;
    std::string session_dir;
    std::string ui_dir;
    int grid_size = 21;
    serve->add_option("--host", host, "bind address")->capture_default_str();
    serve->add_option("--port", port, "port, 0 picks a free one")->capture_default_str();
    serve->add_option("--session-dir", session_dir,
                      "session directory (default $BUDGETWISE_SESSION_DIR, else ./sessions)");
    serve->add_option("--ui-dir", ui_dir, "static dashboard files served under /ui");
    serve->add_option("--grid-size", grid_size, "posterior grid points per axis in recommendations")->capture_default_str();

    std::vector<std::string> args(argv + 1, argv + argc);
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    if (simulate->parsed()) {
        SettingMap settings;
        if (!config_path.empty()) {
            try {
                settings = read_config_file(config_path);
            } catch (const Error& e) {
                err << "error: " << e.what() << "\n";
                return 1;
            }
        }
        for (const auto& [key, opt] : flag_options) {
            if (opt->count() > 0) settings[key] = {flag_values[key], opt->get_name()};
        }
        if (spend_opt->count() > 0) settings["spend-remainder"] = {spend_remainder ? "true" : "false", "--spend-remainder"};
        return cmd_simulate(settings, out, err);
    }
    if (surface_cmd->parsed()) {
        if (surface_source.empty()) {
            err << "error: surface source required\n";
            return 1;
        }
        return cmd_surface(surface_source, sample, surface_out, c_max, s_max, out, err);
    }
    if (serve->parsed()) {
        if (session_dir.empty()) {
            const char* env = std::getenv("BUDGETWISE_SESSION_DIR");
            session_dir = env && *env ? env : "sessions";
        }
        return cmd_serve(host, port, session_dir, ui_dir, grid_size, out, err);
    }
    return 1;
}

} // namespace budgetwise
