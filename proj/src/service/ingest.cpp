#include "skintone/service/ingest.hpp"

#include "skintone/core/manifest.hpp"

namespace skintone::service {

namespace {

std::string describe(const std::vector<std::string>& missing) {
    std::string text = std::to_string(missing.size()) + " image file(s) missing:";
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) text += " " + missing[i];
    if (missing.size() > 10) text += " ...";
    return text;
}

}  // namespace

MissingFilesError::MissingFilesError(std::vector<std::string> missing)
    : Error(ErrorCode::MissingImageFile, describe(missing)), missing_(std::move(missing)) {}

consensus::DatasetSummary ingest_manifest(consensus::Platform& platform, std::string_view manifest_text,
                                          const std::filesystem::path& image_root) {
    auto images = parse_manifest(manifest_text);
    if (auto missing = missing_image_files(images, image_root); !missing.empty()) {
        throw MissingFilesError(std::move(missing));
    }
    const auto root = std::filesystem::absolute(image_root.empty() ? std::filesystem::path(".") : image_root);
    for (auto& image : images) image.file_path = (root / image.file_path).lexically_normal().string();
    return platform.ingest(std::move(images));
}

}  // namespace skintone::service
