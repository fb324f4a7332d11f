#include "budgetwise/advisor.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace budgetwise {

namespace {

// Errors that carry their HTTP status.
class ApiError : public Error {
public:
    ApiError(int status, std::string code, const std::string& message, std::string field = {})
        : Error(message, std::move(field)), status_(status), code_(std::move(code)) {}
    int status() const noexcept { return status_; }
    const std::string& code() const noexcept { return code_; }

private:
    int status_;
    std::string code_;
};

ApiResponse error_response(int status, const std::string& code, const std::string& message,
                           const std::string& field = {}) {
    Json body{{"code", code}, {"message", message}};
    if (!field.empty()) body["field"] = field;
    return {status, std::move(body)};
}

std::string now_rfc3339() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t secs = std::chrono::system_clock::to_time_t(now);
    const auto millis =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(millis));
    return out;
}

std::string new_session_id() {
    static std::mutex m;
    static std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lock(m);
    char buf[20];
    std::snprintf(buf, sizeof buf, "s%012llx", static_cast<unsigned long long>(rng() & 0xffffffffffffULL));
    return buf;
}

bool valid_session_id(const std::string& id) {
    return !id.empty() && id.size() <= 64 &&
           std::all_of(id.begin(), id.end(), [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_'; });
}

std::string request_id(const std::string& session, int t, std::size_t i) {
    return session + "-t" + std::to_string(t) + "-r" + std::to_string(i);
}

} // namespace

const char* to_string(Phase p) {
    switch (p) {
    case Phase::awaiting_annotation: return "awaiting_annotation";
    case Phase::awaiting_evaluations: return "awaiting_evaluations";
    case Phase::recommendation_ready: return "recommendation_ready";
    case Phase::finished: return "finished";
    }
    return "unknown";
}

std::optional<Phase> phase_from_string(const std::string& s) {
    for (Phase p : {Phase::awaiting_annotation, Phase::awaiting_evaluations, Phase::recommendation_ready, Phase::finished})
        if (s == to_string(p)) return p;
    return std::nullopt;
}

struct AdvisorService::Session {
    mutable std::shared_mutex mutex;
    std::string id;
    std::string created_at;
    std::string updated_at;
    Phase phase = Phase::awaiting_annotation;
    CampaignConfig config;
    EngineState engine;
    // Evaluation requests of the current round, in plan order.
    std::vector<std::string> request_ids;
    std::vector<std::optional<double>> scores;
    std::optional<int> accepted_t;
    Json recommendation;  // null until the first round completes

    Strategy committed() const {
        return phase == Phase::recommendation_ready ? engine.pool.size() : engine.target;
    }

    Json to_document() const {
        Json requests = Json::array();
        for (std::size_t i = 0; i < request_ids.size(); ++i) {
            requests.push_back({{"request_id", request_ids[i]}, {"score", scores[i] ? Json(*scores[i]) : Json(nullptr)}});
        }
        return {{"id", id},
                {"created_at", created_at},
                {"updated_at", updated_at},
                {"phase", to_string(phase)},
                {"config", to_json(config)},
                {"engine", to_json(engine)},
                {"requests", std::move(requests)},
                {"accepted_t", accepted_t ? Json(*accepted_t) : Json(nullptr)},
                {"recommendation", recommendation}};
    }

    static std::shared_ptr<Session> from_document(const Json& j) {
        auto s = std::make_shared<Session>();
        s->id = j.at("id").get<std::string>();
        s->created_at = j.at("created_at").get<std::string>();
        s->updated_at = j.at("updated_at").get<std::string>();
        const auto phase = phase_from_string(j.at("phase").get<std::string>());
        if (!phase) throw InvalidArgument("unknown phase", "phase");
        s->phase = *phase;
        s->config = config_from_json(j.at("config"));
        s->engine = engine_state_from_json(j.at("engine"));
        for (const auto& r : j.at("requests")) {
            s->request_ids.push_back(r.at("request_id").get<std::string>());
            s->scores.push_back(r.at("score").is_null() ? std::nullopt : std::optional<double>(r.at("score").get<double>()));
        }
        if (!j.at("accepted_t").is_null()) s->accepted_t = j.at("accepted_t").get<int>();
        s->recommendation = j.at("recommendation");
        return s;
    }

    Json snapshot() const {
        const Strategy current = committed();
        const double spent = cost(current, config.cost_model);
        Json requests = Json::array();
        if (phase == Phase::awaiting_evaluations) {
            const auto draws = AdaptiveEngine(config, engine).plan();
            for (std::size_t i = 0; i < request_ids.size(); ++i) {
                requests.push_back({{"request_id", request_ids[i]},
                                    {"c", draws[i].strategy.c},
                                    {"s", draws[i].strategy.s},
                                    {"eval_seed", draws[i].eval_seed},
                                    {"score", scores[i] ? Json(*scores[i]) : Json(nullptr)}});
            }
        }
        Json history = Json::array();
        for (const auto& r : engine.records) history.push_back(to_json(r));
        Json j{{"id", id},
               {"phase", to_string(phase)},
               {"created_at", created_at},
               {"updated_at", updated_at},
               {"config", to_json(config)},
               {"t", engine.t},
               {"total_steps", config.total_steps},
               {"current", to_json(current)},
               {"annotated", to_json(engine.pool.size())},
               {"budget", config.cost_model.budget},
               {"spent", spent},
               {"remaining_budget", config.cost_model.budget - spent},
               {"requests", std::move(requests)},
               {"sample_count", engine.samples.size()},
               {"trajectory", std::move(history)}};
        j["installment"] = phase == Phase::awaiting_annotation ? to_json(engine.target - engine.pool.size()) : Json(nullptr);
        j["hyperparams"] = engine.hyperparams ? to_json(*engine.hyperparams) : Json(nullptr);
        return j;
    }

    Json summary() const {
        const double spent = cost(committed(), config.cost_model);
        return {{"id", id},
                {"phase", to_string(phase)},
                {"t", engine.t},
                {"total_steps", config.total_steps},
                {"budget", config.cost_model.budget},
                {"spent", spent},
                {"created_at", created_at},
                {"updated_at", updated_at}};
    }

    void check_budget() const {
        if (cost(committed(), config.cost_model) > config.cost_model.budget || !is_feasible(engine.target, config.cost_model))
            throw ApiError(500, "internal", "session spend exceeds the budget");
    }
};

AdvisorService::AdvisorService(AdvisorOptions options) : options_(std::move(options)) {
    if (options_.grid_size < 2) throw InvalidArgument("grid_size must be >= 2", "grid_size");
    std::error_code ec;
    std::filesystem::create_directories(options_.session_dir, ec);
    if (ec) throw Error("cannot create session directory " + options_.session_dir.string() + ": " + ec.message());
    const auto probe = options_.session_dir / ".write-probe";
    {
        std::ofstream f(probe);
        if (!f || !(f << "ok")) throw Error("session directory " + options_.session_dir.string() + " is not writable");
    }
    std::filesystem::remove(probe, ec);
    load_all();
}

void AdvisorService::load_all() {
    for (const auto& entry : std::filesystem::directory_iterator(options_.session_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        try {
            std::ifstream in(entry.path());
            auto s = Session::from_document(Json::parse(in));
            const std::string id = s->id;
            sessions_.emplace(id, std::move(s));
        } catch (const std::exception& e) {
            std::clog << "warning: skipping session file " << entry.path().string() << ": " << e.what() << "\n";
        }
    }
}

void AdvisorService::persist(const Session& s) const {
    const auto path = options_.session_dir / (s.id + ".json");
    const auto tmp = options_.session_dir / (s.id + ".json.tmp");
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << s.to_document().dump() << "\n";
        out.flush();
        if (!out) throw ApiError(500, "storage", "failed to write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw ApiError(500, "storage", "failed to replace " + path.string() + ": " + ec.message());
}

std::shared_ptr<AdvisorService::Session> AdvisorService::find(const std::string& id) const {
    if (!valid_session_id(id)) throw ApiError(404, "not_found", "unknown session '" + id + "'", "id");
    std::lock_guard lock(registry_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ApiError(404, "not_found", "unknown session '" + id + "'", "id");
    return it->second;
}

namespace {

template <typename F>
ApiResponse guarded(F&& f) {
    try {
        return f();
    } catch (const ApiError& e) {
        return error_response(e.status(), e.code(), e.what(), e.field());
    } catch (const DecompositionError& e) {
        return error_response(500, "gp_failure", e.what());
    } catch (const InvalidArgument& e) {
        return error_response(422, "invalid_argument", e.what(), e.field());
    } catch (const Json::exception& e) {
        return error_response(422, "invalid_argument", e.what());
    } catch (const std::exception& e) {
        return error_response(500, "internal", e.what());
    }
}

void require_phase(Phase actual, Phase expected, const char* action) {
    if (actual != expected) {
        throw ApiError(409, "conflict",
                       std::string(action) + " requires phase " + to_string(expected) + ", session is " + to_string(actual),
                       "phase");
    }
}

Json requests_payload(const std::string& id, const EngineState& st, const std::vector<SubsetDraw>& draws) {
    Json out = Json::array();
    for (std::size_t i = 0; i < draws.size(); ++i) {
        out.push_back({{"request_id", request_id(id, st.t, i)},
                       {"c", draws[i].strategy.c},
                       {"s", draws[i].strategy.s},
                       {"eval_seed", draws[i].eval_seed},
                       {"classification_ids", draws[i].classification},
                       {"segmentation_ids", draws[i].segmentation}});
    }
    return out;
}

std::vector<std::int64_t> axis(std::int64_t max, int points) {
    std::vector<std::int64_t> v;
    for (int k = 0; k < points; ++k) {
        const auto x = static_cast<std::int64_t>(std::llround(static_cast<double>(max) * k / (points - 1)));
        if (v.empty() || x != v.back()) v.push_back(x);
    }
    return v;
}

Json build_recommendation(const CampaignConfig& config, const EngineState& st, const AdaptiveEngine::StepResult& step,
                          int grid_size) {
    const auto& d = step.decision;
    const auto& rec = step.record;
    Json front = Json::array();
    for (const auto& p : d.front) front.push_back(to_json(p));

    // Visualization grid over the whole budget rectangle.
    const FittedGP gp(st.samples, *st.hyperparams);
    const auto& cm = config.cost_model;
    const auto cs = axis(static_cast<std::int64_t>(std::floor(cm.budget / cm.alpha_c)), grid_size);
    const auto ss = axis(static_cast<std::int64_t>(std::floor(cm.budget / cm.alpha_s)), grid_size);
    std::vector<Strategy> cells;
    for (auto s : ss)
        for (auto c : cs) cells.push_back({c, s});
    const auto post = gp.posterior_grid(cells);
    Json mean = Json::array(), var = Json::array();
    for (std::size_t j = 0; j < ss.size(); ++j) {
        Json mrow = Json::array(), vrow = Json::array();
        for (std::size_t i = 0; i < cs.size(); ++i) {
            mrow.push_back(post[j * cs.size() + i].mean);
            vrow.push_back(post[j * cs.size() + i].variance);
        }
        mean.push_back(std::move(mrow));
        var.push_back(std::move(vrow));
    }

    return {{"t", rec.t},
            {"current", to_json(rec.strategy)},
            {"delta", to_json(d.delta)},
            {"next", to_json(d.next)},
            {"next_cost", cost(d.next, cm)},
            {"remaining_budget", cm.budget - cost(d.next, cm)},
            {"incumbent", rec.incumbent},
            {"best_ei", d.best_ei},
            {"best_strategy", to_json(d.best_strategy)},
            {"threshold", d.threshold},
            {"fallback", d.fallback},
            {"truncated", rec.truncated},
            {"hyperparams", to_json(rec.hyperparams)},
            {"pareto_front", std::move(front)},
            {"posterior_grid", {{"c_values", cs}, {"s_values", ss}, {"mean", std::move(mean)}, {"variance", std::move(var)}}}};
}

} // namespace

ApiResponse AdvisorService::create_session(const Json& body) {
    return guarded([&]() -> ApiResponse {
        const Json& cfg_json = body.is_object() && body.contains("config") ? body["config"] : body;
        if (!cfg_json.is_object()) throw InvalidArgument("request body must be a JSON object", "config");
        auto s = std::make_shared<Session>();
        s->config = config_from_json(cfg_json);
        const AdaptiveEngine engine(s->config);
        s->engine = engine.state();
        s->created_at = s->updated_at = now_rfc3339();
        s->phase = Phase::awaiting_annotation;
        s->check_budget();
        {
            std::lock_guard lock(registry_mutex_);
            do {
                s->id = new_session_id();
            } while (sessions_.count(s->id));
            persist(*s);
            sessions_.emplace(s->id, s);
        }
        Json out = s->snapshot();
        return {201, std::move(out)};
    });
}

ApiResponse AdvisorService::list_sessions(const std::optional<std::string>& phase) const {
    return guarded([&]() -> ApiResponse {
        std::optional<Phase> filter;
        if (phase) {
            filter = phase_from_string(*phase);
            if (!filter) throw InvalidArgument("unknown phase '" + *phase + "'", "phase");
        }
        std::vector<std::shared_ptr<Session>> all;
        {
            std::lock_guard lock(registry_mutex_);
            for (const auto& [id, s] : sessions_) all.push_back(s);
        }
        Json items = Json::array();
        for (const auto& s : all) {
            std::shared_lock lock(s->mutex);
            if (filter && s->phase != *filter) continue;
            items.push_back(s->summary());
        }
        std::stable_sort(items.begin(), items.end(), [](const Json& a, const Json& b) {
            return std::pair(a["created_at"].get<std::string>(), a["id"].get<std::string>()) <
                   std::pair(b["created_at"].get<std::string>(), b["id"].get<std::string>());
        });
        return {200, {{"sessions", std::move(items)}}};
    });
}

ApiResponse AdvisorService::get_session(const std::string& id) const {
    return guarded([&]() -> ApiResponse {
        const auto s = find(id);
        std::shared_lock lock(s->mutex);
        return {200, s->snapshot()};
    });
}

ApiResponse AdvisorService::confirm_annotation(const std::string& id) {
    return guarded([&]() -> ApiResponse {
        const auto s = find(id);
        std::unique_lock lock(s->mutex);
        if (s->phase == Phase::awaiting_annotation) {
            AdaptiveEngine engine(s->config, s->engine);
            engine.annotate();
            const auto draws = engine.plan();
            s->engine = engine.state();
            s->request_ids.clear();
            for (std::size_t i = 0; i < draws.size(); ++i) s->request_ids.push_back(request_id(s->id, s->engine.t, i));
            s->scores.assign(draws.size(), std::nullopt);
            s->phase = Phase::awaiting_evaluations;
            s->updated_at = now_rfc3339();
            s->check_budget();
            persist(*s);
        } else if (s->phase != Phase::awaiting_evaluations) {
            require_phase(s->phase, Phase::awaiting_annotation, "confirm-annotation");
        }
        // Retrying in awaiting_evaluations repeats the same requests.
        const auto draws = AdaptiveEngine(s->config, s->engine).plan();
        return {200,
                {{"id", s->id},
                 {"t", s->engine.t},
                 {"phase", to_string(s->phase)},
                 {"annotated", to_json(s->engine.pool.size())},
                 {"requests", requests_payload(s->id, s->engine, draws)}}};
    });
}

ApiResponse AdvisorService::submit_observation(const std::string& id, const Json& body) {
    return guarded([&]() -> ApiResponse {
        const auto s = find(id);
        std::unique_lock lock(s->mutex);
        require_phase(s->phase, Phase::awaiting_evaluations, "observations");
        if (!body.is_object()) throw InvalidArgument("request body must be a JSON object", "request_id");
        if (!body.contains("request_id") || !body["request_id"].is_string())
            throw InvalidArgument("request_id must be a string", "request_id");
        const auto rid = body["request_id"].get<std::string>();
        const auto it = std::find(s->request_ids.begin(), s->request_ids.end(), rid);
        if (it == s->request_ids.end()) throw ApiError(404, "not_found", "unknown request '" + rid + "'", "request_id");
        if (!body.contains("score") || !body["score"].is_number()) throw InvalidArgument("score must be a number", "score");
        const double score = body["score"].get<double>();
        if (!(score >= 0.0 && score <= 1.0)) throw InvalidArgument("score must lie in [0, 1]", "score");
        const auto idx = static_cast<std::size_t>(it - s->request_ids.begin());
        if (s->scores[idx]) throw ApiError(409, "duplicate", "request '" + rid + "' already has an observation", "request_id");

        s->scores[idx] = score;
        const auto remaining = static_cast<std::size_t>(
            std::count_if(s->scores.begin(), s->scores.end(), [](const auto& x) { return !x.has_value(); }));
        Json out{{"id", s->id}, {"request_id", rid}, {"remaining", remaining}};
        if (remaining == 0) {
            std::vector<double> scores;
            for (const auto& x : s->scores) scores.push_back(*x);
            AdaptiveEngine engine(s->config, s->engine);
            AdaptiveEngine::StepResult step;
            try {
                step = engine.complete(scores);
            } catch (...) {
                s->scores[idx].reset();
                throw;
            }
            s->engine = engine.state();
            s->recommendation = build_recommendation(s->config, s->engine, step, options_.grid_size);
            s->phase = engine.finished() ? Phase::finished : Phase::recommendation_ready;
            s->request_ids.clear();
            s->scores.clear();
        }
        s->updated_at = now_rfc3339();
        s->check_budget();
        persist(*s);
        out["phase"] = to_string(s->phase);
        return {200, std::move(out)};
    });
}

ApiResponse AdvisorService::get_recommendation(const std::string& id) const {
    return guarded([&]() -> ApiResponse {
        const auto s = find(id);
        std::shared_lock lock(s->mutex);
        if (s->phase != Phase::recommendation_ready && s->phase != Phase::finished)
            require_phase(s->phase, Phase::recommendation_ready, "recommendation");
        Json out = s->recommendation;
        out["id"] = s->id;
        out["phase"] = to_string(s->phase);
        if (s->phase == Phase::finished) {
            // The campaign ends at (C_T, S_T); nothing further to buy after it.
            out["final"] = true;
            out["installment_to_final"] = out["delta"];
            out["delta"] = to_json(Strategy{0, 0});
            out["final_strategy"] = to_json(s->engine.target);
        } else {
            out["final"] = false;
        }
        return {200, std::move(out)};
    });
}

ApiResponse AdvisorService::accept(const std::string& id) {
    return guarded([&]() -> ApiResponse {
        const auto s = find(id);
        std::unique_lock lock(s->mutex);
        const bool repeat = s->phase == Phase::awaiting_annotation && s->accepted_t && *s->accepted_t == s->engine.t;
        if (!repeat) {
            require_phase(s->phase, Phase::recommendation_ready, "accept");
            s->phase = Phase::awaiting_annotation;
            s->accepted_t = s->engine.t;
            s->updated_at = now_rfc3339();
            s->check_budget();
            persist(*s);
        }
        return {200, s->snapshot()};
    });
}

void mount_routes(httplib::Server& server, AdvisorService& service) {
    auto reply = [](httplib::Response& res, const ApiResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    auto parse = [](const httplib::Request& req, Json& out) {
        if (req.body.empty()) {
            out = Json::object();
            return true;
        }
        out = Json::parse(req.body, nullptr, false);
        return !out.is_discarded();
    };
    auto bad_json = [reply](httplib::Response& res) {
        reply(res, error_response(400, "invalid_json", "request body is not valid JSON"));
    };

    server.Post("/v1/sessions", [&service, reply, parse, bad_json](const httplib::Request& req, httplib::Response& res) {
        Json body;
        if (!parse(req, body)) return bad_json(res);
        reply(res, service.create_session(body));
    });
    server.Get("/v1/sessions", [&service, reply](const httplib::Request& req, httplib::Response& res) {
        std::optional<std::string> phase;
        if (req.has_param("phase")) phase = req.get_param_value("phase");
        reply(res, service.list_sessions(phase));
    });
    server.Get(R"(/v1/sessions/([^/]+))", [&service, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.get_session(req.matches[1]));
    });
    server.Post(R"(/v1/sessions/([^/]+)/confirm-annotation)",
                [&service, reply](const httplib::Request& req, httplib::Response& res) {
                    reply(res, service.confirm_annotation(req.matches[1]));
                });
    server.Post(R"(/v1/sessions/([^/]+)/observations)",
                [&service, reply, parse, bad_json](const httplib::Request& req, httplib::Response& res) {
                    Json body;
                    if (!parse(req, body)) return bad_json(res);
                    reply(res, service.submit_observation(req.matches[1], body));
                });
    server.Get(R"(/v1/sessions/([^/]+)/recommendation)",
               [&service, reply](const httplib::Request& req, httplib::Response& res) {
                   reply(res, service.get_recommendation(req.matches[1]));
               });
    server.Post(R"(/v1/sessions/([^/]+)/accept)", [&service, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.accept(req.matches[1]));
    });
}

} // namespace budgetwise
