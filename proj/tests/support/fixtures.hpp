#pragma once

#include <string>
#include <vector>

#include "skintone/consensus/platform.hpp"

namespace skintone::testing {

inline ImageRecord plain_image(const std::string& id) {
    ImageRecord r;
    r.image_id = id;
    r.file_path = id + ".png";
    r.source = "test";
    return r;
}

inline ImageRecord gold_image(const std::string& id, FstLabel label, const std::string& expert = "expert1") {
    auto r = plain_image(id);
    r.gold_labels.emplace_back(expert, label);
    r.is_gold_seed = true;
    return r;
}

/// Ingests `count` gold images labeled I and has every annotator label them
/// all correctly, leaving each annotator Qualified under the defaults.
inline void qualify(consensus::Platform& platform, const std::vector<std::string>& annotators,
                    int count = 25, const std::string& prefix = "gold-") {
    std::vector<ImageRecord> images;
    for (int i = 0; i < count; ++i) images.push_back(gold_image(prefix + std::to_string(i), FstLabel::I));
    platform.ingest(images);
    for (const auto& annotator : annotators) {
        for (const auto& image : images) {
            if (platform.state().image(image.image_id).consensus.status != ImageStatus::Open) continue;
            platform.submit_annotation(annotator, image.image_id, FstLabel::I);
        }
    }
}

}  // namespace skintone::testing
