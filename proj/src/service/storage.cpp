#include "skintone/service/storage.hpp"

#include <fstream>

#include "skintone/core/error.hpp"

namespace skintone::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kProtocolName = "protocol.json";

void pin_protocol(const fs::path& data_dir, const consensus::ProtocolConfig& protocol, bool log_empty) {
    const auto path = data_dir / kProtocolName;
    if (!log_empty && fs::exists(path)) {
        std::ifstream in(path);
        json stored;
        try {
            stored = json::parse(in);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::CorruptLog, path.string() + ": " + e.what());
        }
        if (consensus::protocol_config_from_json(stored) != protocol) {
            throw Error(ErrorCode::InvalidInput,
                        "protocol settings differ from those the event log was written with (" + path.string() + ")");
        }
        return;
    }
    std::ofstream out(path, std::ios::trunc);
    out << consensus::to_json(protocol).dump(2) << '\n';
    if (!out) throw Error(ErrorCode::Storage, "cannot write " + path.string());
}

}  // namespace

fs::path event_log_path(const fs::path& data_dir) { return data_dir / "events.jsonl"; }

std::unique_ptr<consensus::Platform> open_platform(const fs::path& data_dir, const consensus::ProtocolConfig& protocol) {
    fs::create_directories(data_dir);
    auto log = EventLog::open(event_log_path(data_dir));
    pin_protocol(data_dir, protocol, log.events().empty());
    return std::make_unique<consensus::Platform>(protocol, std::move(log));
}

}  // namespace skintone::service
