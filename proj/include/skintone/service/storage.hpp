#pragma once

#include <filesystem>
#include <memory>

#include "skintone/consensus/platform.hpp"

namespace skintone::service {

/// Opens (creating if needed) the event log in `data_dir` and replays it.
/// The protocol settings are pinned next to the log on first use; opening a
/// non-empty log under different settings throws InvalidInput.
std::unique_ptr<consensus::Platform> open_platform(const std::filesystem::path& data_dir,
                                                   const consensus::ProtocolConfig& protocol);

std::filesystem::path event_log_path(const std::filesystem::path& data_dir);

}  // namespace skintone::service
