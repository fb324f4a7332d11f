#include "budgetwise/serialization.hpp"

namespace budgetwise {

namespace {

template <typename T>
T get_field(const Json& j, const char* key, const T& fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    try {
        return j[key].get<T>();
    } catch (const Json::exception&) {
        throw InvalidArgument(std::string("field '") + key + "' has the wrong type", key);
    }
}

template <typename T>
T require_field(const Json& j, const char* key) {
    if (!j.contains(key)) throw InvalidArgument(std::string("missing field '") + key + "'", key);
    return get_field<T>(j, key, T{});
}

const char* to_string(SamplingMode m) { return m == SamplingMode::uniform ? "uniform" : "norm_weighted"; }
const char* to_string(GPOptimizer o) { return o == GPOptimizer::adam ? "adam" : "gradient_ascent"; }

} // namespace

Json to_json(Strategy x) { return {{"c", x.c}, {"s", x.s}}; }

Json to_json(const GPHyperparams& h) {
    return {{"gamma_c", h.gamma_c}, {"beta_c", h.beta_c}, {"gamma_s", h.gamma_s}, {"beta_s", h.beta_s},
            {"ell_c", h.ell_c},     {"ell_s", h.ell_s},   {"sigma", h.sigma},     {"noise", h.noise}};
}

Json to_json(const CampaignConfig& c) {
    Json j{{"budget", c.cost_model.budget},
           {"alpha_c", c.cost_model.alpha_c},
           {"alpha_s", c.cost_model.alpha_s},
           {"total_steps", c.total_steps},
           {"initial_c", c.initial.c},
           {"initial_s", c.initial.s},
           {"m_count", c.m_count},
           {"gp_learning_rate", c.gp.learning_rate},
           {"gp_iterations", c.gp.iterations},
           {"gp_optimizer", to_string(c.gp.optimizer)},
           {"noise_std", c.noise_std},
           {"stride_c", c.strides.c},
           {"stride_s", c.strides.s},
           {"seed", c.seed},
           {"spend_remainder", c.spend_remainder},
           {"sampling", to_string(c.sampling)}};
    j["gp_init"] = c.gp_init ? to_json(*c.gp_init) : Json(nullptr);
    j["pool_limit"] = c.pool_limit ? to_json(*c.pool_limit) : Json(nullptr);
    return j;
}

Json to_json(const IterationRecord& r) {
    return {{"t", r.t},
            {"strategy", to_json(r.strategy)},
            {"spent", r.spent},
            {"incumbent", r.incumbent},
            {"best_ei", r.best_ei},
            {"threshold", r.threshold},
            {"best_strategy", to_json(r.best_strategy)},
            {"delta", to_json(r.delta)},
            {"hyperparams", to_json(r.hyperparams)},
            {"sample_count", r.sample_count},
            {"fallback", r.fallback},
            {"truncated", r.truncated}};
}

Json to_json(const CampaignTrajectory& tr) {
    Json iterations = Json::array();
    for (const auto& r : tr.iterations) iterations.push_back(to_json(r));
    Json j{{"method", tr.method},
           {"iterations", std::move(iterations)},
           {"final_strategy", to_json(tr.final_strategy)},
           {"final_score", tr.final_score},
           {"spent", tr.spent},
           {"truncated", tr.truncated}};
    j["split"] = tr.split ? Json(*tr.split) : Json(nullptr);
    return j;
}

Json to_json(const ScoredPoint& p) {
    return {{"c", p.strategy.c}, {"s", p.strategy.s}, {"cost", p.cost}, {"ei", p.value}};
}

Json to_json(const EngineState& st) {
    Json samples = Json::array();
    for (const auto& x : st.samples) samples.push_back({{"c", x.strategy.c}, {"s", x.strategy.s}, {"score", x.score}});
    Json records = Json::array();
    for (const auto& r : st.records) records.push_back(to_json(r));
    Json j{{"t", st.t},
           {"target", to_json(st.target)},
           {"classification_ids", st.pool.classification_ids},
           {"segmentation_ids", st.pool.segmentation_ids},
           {"annotated", st.annotated},
           {"samples", std::move(samples)},
           {"records", std::move(records)},
           {"truncated", st.truncated}};
    j["hyperparams"] = st.hyperparams ? to_json(*st.hyperparams) : Json(nullptr);
    return j;
}

Strategy strategy_from_json(const Json& j) {
    if (!j.is_object()) throw InvalidArgument("expected a strategy object", "strategy");
    return {require_field<std::int64_t>(j, "c"), require_field<std::int64_t>(j, "s")};
}

GPHyperparams hyperparams_from_json(const Json& j) {
    if (!j.is_object()) throw InvalidArgument("expected a hyperparameter object", "hyperparams");
    GPHyperparams h;
    h.gamma_c = require_field<double>(j, "gamma_c");
    h.beta_c = require_field<double>(j, "beta_c");
    h.gamma_s = require_field<double>(j, "gamma_s");
    h.beta_s = require_field<double>(j, "beta_s");
    h.ell_c = require_field<double>(j, "ell_c");
    h.ell_s = require_field<double>(j, "ell_s");
    h.sigma = require_field<double>(j, "sigma");
    h.noise = require_field<double>(j, "noise");
    h.validate();
    return h;
}

CampaignConfig config_from_json(const Json& j) {
    if (!j.is_object()) throw InvalidArgument("expected a config object", "config");
    CampaignConfig c;
    c.cost_model.budget = get_field<double>(j, "budget", c.cost_model.budget);
    c.cost_model.alpha_c = get_field<double>(j, "alpha_c", c.cost_model.alpha_c);
    c.cost_model.alpha_s = get_field<double>(j, "alpha_s", c.cost_model.alpha_s);
    c.total_steps = get_field<int>(j, "total_steps", c.total_steps);
    c.initial.c = get_field<std::int64_t>(j, "initial_c", c.initial.c);
    c.initial.s = get_field<std::int64_t>(j, "initial_s", c.initial.s);
    c.m_count = get_field<int>(j, "m_count", c.m_count);
    c.gp.learning_rate = get_field<double>(j, "gp_learning_rate", c.gp.learning_rate);
    c.gp.iterations = get_field<int>(j, "gp_iterations", c.gp.iterations);
    const auto opt = get_field<std::string>(j, "gp_optimizer", to_string(c.gp.optimizer));
    if (opt == "adam") c.gp.optimizer = GPOptimizer::adam;
    else if (opt == "gradient_ascent") c.gp.optimizer = GPOptimizer::gradient_ascent;
    else throw InvalidArgument("gp_optimizer must be 'adam' or 'gradient_ascent'", "gp_optimizer");
    c.noise_std = get_field<double>(j, "noise_std", c.noise_std);
    c.strides.c = get_field<std::int64_t>(j, "stride_c", c.strides.c);
    c.strides.s = get_field<std::int64_t>(j, "stride_s", c.strides.s);
    c.seed = get_field<std::uint64_t>(j, "seed", c.seed);
    c.spend_remainder = get_field<bool>(j, "spend_remainder", c.spend_remainder);
    const auto mode = get_field<std::string>(j, "sampling", to_string(c.sampling));
    if (mode == "uniform") c.sampling = SamplingMode::uniform;
    else if (mode == "norm_weighted") c.sampling = SamplingMode::norm_weighted;
    else throw InvalidArgument("sampling must be 'uniform' or 'norm_weighted'", "sampling");
    if (j.contains("gp_init") && !j["gp_init"].is_null()) c.gp_init = hyperparams_from_json(j["gp_init"]);
    if (j.contains("pool_limit") && !j["pool_limit"].is_null()) c.pool_limit = strategy_from_json(j["pool_limit"]);

    try {
        c.validate();
    } catch (const InvalidArgument& e) {
        // Map engine field names onto the JSON keys.
        std::string field = e.field();
        if (field == "steps") field = "total_steps";
        else if (field == "initial") field = "initial_c";
        else if (field == "strides") field = "stride_c";
        throw InvalidArgument(e.what(), field);
    }
    return c;
}

IterationRecord record_from_json(const Json& j) {
    IterationRecord r;
    r.t = require_field<int>(j, "t");
    r.strategy = strategy_from_json(j.at("strategy"));
    r.spent = require_field<double>(j, "spent");
    r.incumbent = require_field<double>(j, "incumbent");
    r.best_ei = require_field<double>(j, "best_ei");
    r.threshold = require_field<double>(j, "threshold");
    r.best_strategy = strategy_from_json(j.at("best_strategy"));
    r.delta = strategy_from_json(j.at("delta"));
    r.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    r.sample_count = require_field<std::size_t>(j, "sample_count");
    r.fallback = require_field<bool>(j, "fallback");
    r.truncated = require_field<bool>(j, "truncated");
    return r;
}

EngineState engine_state_from_json(const Json& j) {
    EngineState st;
    st.t = require_field<int>(j, "t");
    st.target = strategy_from_json(j.at("target"));
    st.pool.classification_ids = require_field<std::vector<SampleId>>(j, "classification_ids");
    st.pool.segmentation_ids = require_field<std::vector<SampleId>>(j, "segmentation_ids");
    st.pool.validate();
    st.annotated = require_field<bool>(j, "annotated");
    for (const auto& x : j.at("samples")) {
        st.samples.push_back({{require_field<std::int64_t>(x, "c"), require_field<std::int64_t>(x, "s")},
                              require_field<double>(x, "score")});
    }
    for (const auto& r : j.at("records")) st.records.push_back(record_from_json(r));
    st.truncated = require_field<bool>(j, "truncated");
    if (j.contains("hyperparams") && !j["hyperparams"].is_null()) st.hyperparams = hyperparams_from_json(j["hyperparams"]);
    return st;
}

} // namespace budgetwise
