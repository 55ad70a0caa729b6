#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>

#include "recapit/error.hpp"
#include "recapit/pipeline.hpp"

namespace recapit {

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

int http_status(ErrorCode code);
nlohmann::json error_json(const Error& e);

// One project, held in memory and persisted through the manifest. Reads run
// concurrently; writes are serialized and acknowledged only after the
// manifest has been replaced on disk.
class Service {
public:
    explicit Service(const std::filesystem::path& project);

    Response handle(const std::string& method, const std::string& path,
                    const std::map<std::string, std::string>& query, const std::string& body);

    WorkshopProject snapshot() const;

private:
    Response get(const std::string& path, const std::map<std::string, std::string>& query);
    Response post(const std::string& path, const nlohmann::json& body);
    const HeatGrid& heatmap(SignalKind kind, TimeSpan span);

    std::filesystem::path manifest_;
    std::filesystem::path root_;
    mutable std::shared_mutex mutex_;
    WorkshopProject project_;
    Session session_;
    MultivariateSeries attention_;
    std::optional<MultivariateSeries> activity_;

    std::mutex cache_mutex_;
    std::map<std::tuple<int, double, double>, HeatGrid> heat_cache_;
};

// Blocks serving HTTP until the process ends. `on_listen` receives the bound
// port (useful with port 0).
void serve(Service& service, const std::string& host, int port, const std::function<void(int)>& on_listen);

}  // namespace recapit
