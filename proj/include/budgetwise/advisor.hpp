#pragma once

#include "budgetwise/campaign.hpp"
#include "budgetwise/serialization.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

namespace httplib {
class Server;
}

namespace budgetwise {

enum class Phase { awaiting_annotation, awaiting_evaluations, recommendation_ready, finished };

const char* to_string(Phase p);
std::optional<Phase> phase_from_string(const std::string& s);

struct AdvisorOptions {
    std::filesystem::path session_dir = "sessions";
    int grid_size = 21;  // posterior grid per axis in recommendations
};

// Result of one API call: HTTP status and JSON body.
struct ApiResponse {
    int status = 200;
    Json body;
};

// Session bookkeeping behind the /v1 API. Holds every session in memory and
// mirrors each mutation to `<session_dir>/<id>.json` before returning.
class AdvisorService {
public:
    explicit AdvisorService(AdvisorOptions options);

    ApiResponse create_session(const Json& body);
    ApiResponse list_sessions(const std::optional<std::string>& phase) const;
    ApiResponse get_session(const std::string& id) const;
    ApiResponse confirm_annotation(const std::string& id);
    ApiResponse submit_observation(const std::string& id, const Json& body);
    ApiResponse get_recommendation(const std::string& id) const;
    ApiResponse accept(const std::string& id);

    const AdvisorOptions& options() const noexcept { return options_; }

private:
    struct Session;
    std::shared_ptr<Session> find(const std::string& id) const;
    void persist(const Session& s) const;
    void load_all();

    AdvisorOptions options_;
    mutable std::mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
};

// Registers the /v1 routes on `server`.
void mount_routes(httplib::Server& server, AdvisorService& service);

} // namespace budgetwise
