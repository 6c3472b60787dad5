#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "skintone/consensus/protocol.hpp"
#include "skintone/core/records.hpp"
#include "skintone/ita/ita.hpp"
#include "skintone/ita/skin_mask.hpp"
#include "skintone/stats/bootstrap.hpp"
#include "skintone/stats/correlation.hpp"

namespace skintone::service {

struct Principal {
    std::string id;
    Role role = Role::Annotator;
};

struct ServiceConfig {
    consensus::ProtocolConfig protocol;
    double gold_probe_rate = 0.1;
    std::uint64_t routing_seed = 0;

    ita::SkinRule skin_rule;
    ita::ItaThresholds thresholds;
    ita::Aggregation aggregation = ita::Aggregation::Mean;

    /// Bearer token -> principal.
    std::map<std::string, Principal> tokens;
    /// Extra label sets for reports: name -> CSV with image_id,label columns.
    std::map<std::string, std::filesystem::path> methods;
    /// Report methods treated as experts; empty means the manifest's expert columns.
    std::vector<std::string> experts;
    stats::CrowdCurveOptions crowd_curve;

    std::filesystem::path data_dir = "data";
    std::string listen_host = "127.0.0.1";
    int listen_port = 8080;
};

/// Relative paths inside the document resolve against `base_dir`.
ServiceConfig service_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ServiceConfig load_service_config(const std::filesystem::path& path);

/// Overrides from SKINTONE_DATA_DIR and SKINTONE_LISTEN (host:port).
void apply_environment(ServiceConfig& config);

/// Environment variable naming the config file.
inline constexpr const char* kConfigEnv = "SKINTONE_CONFIG";

/// Parses "host:port" (or just ":port").
std::pair<std::string, int> parse_listen(const std::string& text);

/// Reads an `image_id,label` CSV (extra columns ignored).
stats::LabelMap read_label_csv(const std::filesystem::path& path);

}  // namespace skintone::service
