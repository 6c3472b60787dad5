#include "skintone/core/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "skintone/core/csv.hpp"
#include "skintone/core/error.hpp"

namespace skintone {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& message) {
    throw Error(ErrorCode::ManifestParse, "manifest line " + std::to_string(line) + ": " + message);
}

}  // namespace

std::vector<ImageRecord> parse_manifest(std::string_view text) {
    const auto table = csv::parse(text);
    std::vector<ImageRecord> images;
    if (table.header.empty()) return images;

    const auto& header = table.header;
    if (header.size() < 3 || header[0] != "image_id" || header[1] != "file_path" || header[2] != "source") {
        fail(1, "header must start with image_id,file_path,source");
    }

    std::set<std::string> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto line = table.line_numbers[r];
        if (row.size() != header.size()) {
            fail(line, "expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(row.size()));
        }
        ImageRecord image;
        image.image_id = row[0];
        image.file_path = row[1];
        image.source = row[2];
        if (image.image_id.empty()) fail(line, "empty image_id");
        if (!seen.insert(image.image_id).second) fail(line, "duplicate image_id '" + image.image_id + "'");

        for (std::size_t c = 3; c < header.size(); ++c) {
            const auto& cell = row[c];
            if (cell.empty()) continue;
            std::optional<FstLabel> label;
            if (cell == "NA") {
                label = FstLabel::NotApplicable;
            } else if (cell.size() == 1 && cell[0] >= '1' && cell[0] <= '6') {
                label = from_numeric(cell[0] - '0');
            }
            if (!label) fail(line, "invalid FST value '" + cell + "' for " + header[c]);
            image.gold_labels.emplace_back(header[c], *label);
        }
        image.is_gold_seed = !image.gold_labels.empty();
        images.push_back(std::move(image));
    }
    return images;
}

std::vector<ImageRecord> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ManifestParse, "cannot read manifest " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_manifest(buffer.str());
}

std::vector<std::string> missing_image_files(const std::vector<ImageRecord>& images,
                                             const std::filesystem::path& image_root) {
    std::vector<std::string> missing;
    for (const auto& image : images) {
        if (!std::filesystem::exists(image_root / image.file_path)) missing.push_back(image.file_path);
    }
    return missing;
}

}  // namespace skintone
