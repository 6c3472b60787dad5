#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "skintone/consensus/platform.hpp"
#include "skintone/core/error.hpp"

namespace skintone::service {

class MissingFilesError : public Error {
public:
    explicit MissingFilesError(std::vector<std::string> missing);
    const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
    std::vector<std::string> missing_;
};

/// Parses a manifest, checks every file exists under `image_root` and
/// ingests the rows with their paths resolved against that root. Nothing is
/// written when a check fails.
consensus::DatasetSummary ingest_manifest(consensus::Platform& platform, std::string_view manifest_text,
                                          const std::filesystem::path& image_root);

}  // namespace skintone::service
