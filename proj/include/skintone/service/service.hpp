#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>

#include <json.hpp>

#include "skintone/consensus/platform.hpp"
#include "skintone/core/error.hpp"
#include "skintone/service/config.hpp"

namespace httplib {
class Server;
}

namespace skintone::service {

struct Request {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
    /// Raw Authorization header.
    std::string authorization;
};

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;

    nlohmann::json json() const { return nlohmann::json::parse(body); }
};

/// HTTP status for a domain error code.
int http_status(ErrorCode code) noexcept;

/// The annotation service. State lives in `<data_dir>/events.jsonl`; the
/// protocol config it was written under is pinned in `<data_dir>/protocol.json`.
/// `handle` is safe to call from several threads: mutations take an
/// exclusive lock and go through the event log one at a time.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    Response handle(const Request& request);

    consensus::PlatformState snapshot() const;
    const ServiceConfig& config() const noexcept { return config_; }

    /// Blocks serving HTTP on the configured address until stop().
    void serve();
    /// Binds to `host` on any free port and returns it; follow with serve_bound().
    int bind_any_port(const std::string& host);
    void serve_bound();
    void stop();

private:
    Response dispatch(const Request& request);
    void install_handlers();

    Response post_dataset(const Principal& who, const Request& request);
    Response next_task(const Principal& who, const Request& request);
    Response post_annotation(const Principal& who, const Request& request);
    Response post_flag(const Principal& who, const Request& request);
    Response get_image(const Principal& who, const std::string& image_id);
    Response get_image_file(const std::string& image_id);
    Response get_annotator(const Principal& who, const std::string& annotator_id);
    Response review_queue(const Request& request);
    Response adjudicate(const Principal& who, const std::string& image_id, const Request& request);
    Response report_irr(const Request& request);
    Response report_confusion(const Request& request);
    Response report_crowd_curve(const Request& request);
    Response report_ita(const Request& request);
    Response export_file(const std::string& name);

    stats::LabelMap method_labels(const std::string& name);
    std::vector<std::string> default_methods() const;
    std::vector<std::string> default_experts() const;
    void refresh_ita();

    ServiceConfig config_;
    mutable std::shared_mutex mutex_;
    std::unique_ptr<consensus::Platform> platform_;
    std::mt19937_64 routing_rng_;

    std::mutex ita_mutex_;
    std::map<std::string, ita::ItaResult> ita_cache_;
    std::map<std::string, std::string> ita_errors_;

    std::unique_ptr<httplib::Server> server_;
};

}  // namespace skintone::service
