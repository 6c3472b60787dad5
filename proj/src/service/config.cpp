#include "skintone/service/config.hpp"

#include <cstdlib>
#include <fstream>

#include "skintone/core/csv.hpp"
#include "skintone/core/error.hpp"

namespace skintone::service {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

std::pair<std::string, int> parse_listen(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos) throw Error(ErrorCode::InvalidInput, "listen address needs host:port: " + text);
    std::string host = text.substr(0, colon);
    if (host.empty()) host = "127.0.0.1";
    int port = 0;
    try {
        std::size_t used = 0;
        port = std::stoi(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidInput, "bad port in listen address: " + text);
    }
    if (port < 0 || port > 65535) throw Error(ErrorCode::InvalidInput, "port out of range: " + text);
    return {host, port};
}

ServiceConfig service_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    ServiceConfig c;
    try {
        if (doc.contains("protocol")) c.protocol = consensus::protocol_config_from_json(doc.at("protocol"));
        if (doc.contains("routing")) {
            const auto& r = doc.at("routing");
            c.gold_probe_rate = r.value("gold_probe_rate", c.gold_probe_rate);
            c.routing_seed = r.value("seed", c.routing_seed);
        }
        if (doc.contains("skin_rule")) c.skin_rule = ita::skin_rule_from_json(doc.at("skin_rule"));
        if (doc.contains("ita")) {
            const auto& i = doc.at("ita");
            if (i.contains("thresholds")) c.thresholds = ita::thresholds_from_json(i.at("thresholds"));
            const auto agg = i.value("aggregation", std::string("mean"));
            if (agg == "mean") {
                c.aggregation = ita::Aggregation::Mean;
            } else if (agg == "median") {
                c.aggregation = ita::Aggregation::Median;
            } else {
                throw Error(ErrorCode::InvalidInput, "ita.aggregation must be mean or median");
            }
        }
        if (doc.contains("tokens")) {
            for (const auto& [token, entry] : doc.at("tokens").items()) {
                Principal p;
                p.id = entry.at("principal").get<std::string>();
                const auto role = parse_role(entry.at("role").get<std::string>());
                if (!role) throw Error(ErrorCode::InvalidInput, "unknown role for principal " + p.id);
                p.role = *role;
                c.tokens[token] = p;
            }
        }
        if (doc.contains("methods")) {
            for (const auto& [name, path] : doc.at("methods").items()) {
                c.methods[name] = resolve(base_dir, path.get<std::string>());
            }
        }
        c.experts = doc.value("experts", c.experts);
        if (doc.contains("crowd_curve")) {
            const auto& cc = doc.at("crowd_curve");
            c.crowd_curve.sizes = cc.value("sizes", c.crowd_curve.sizes);
            c.crowd_curve.draws = cc.value("draws", c.crowd_curve.draws);
            c.crowd_curve.seed = cc.value("seed", c.crowd_curve.seed);
            c.crowd_curve.with_replacement = cc.value("with_replacement", c.crowd_curve.with_replacement);
        }
        if (doc.contains("data_dir")) c.data_dir = resolve(base_dir, doc.at("data_dir").get<std::string>());
        if (doc.contains("listen")) std::tie(c.listen_host, c.listen_port) = parse_listen(doc.at("listen").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidInput, std::string("service config: ") + e.what());
    }
    c.protocol.validate();
    if (!(c.gold_probe_rate >= 0.0 && c.gold_probe_rate <= 1.0)) {
        throw Error(ErrorCode::InvalidInput, "routing.gold_probe_rate must be in [0, 1]");
    }
    return c;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot read config " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidInput, "config " + path.string() + ": " + e.what());
    }
    return service_config_from_json(doc, path.parent_path());
}

void apply_environment(ServiceConfig& config) {
    if (const char* dir = std::getenv("SKINTONE_DATA_DIR"); dir && *dir) config.data_dir = dir;
    if (const char* listen = std::getenv("SKINTONE_LISTEN"); listen && *listen) {
        std::tie(config.listen_host, config.listen_port) = parse_listen(listen);
    }
}

stats::LabelMap read_label_csv(const std::filesystem::path& path) {
    const auto table = csv::read_file(path);
    const auto id_col = table.column("image_id");
    const auto label_col = table.column("label");
    if (id_col == std::string::npos || label_col == std::string::npos) {
        throw Error(ErrorCode::InvalidInput, path.string() + ": needs image_id and label columns");
    }
    stats::LabelMap labels;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto label = parse_label(row.at(label_col));
        if (!label) {
            throw Error(ErrorCode::InvalidInput,
                        path.string() + " line " + std::to_string(table.line_numbers[r]) + ": bad label '" +
                            row.at(label_col) + "'");
        }
        labels[row.at(id_col)] = *label;
    }
    return labels;
}

}  // namespace skintone::service
