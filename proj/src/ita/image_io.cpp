#include "skintone/ita/image_io.hpp"

#include <opencv2/imgcodecs.hpp>

#include "skintone/core/error.hpp"

namespace skintone::ita {

Raster load_image(const std::filesystem::path& path) {
    const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) throw Error(ErrorCode::InvalidInput, "cannot decode image " + path.string());
    Raster raster(static_cast<std::size_t>(bgr.cols), static_cast<std::size_t>(bgr.rows));
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            raster.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = {row[x][2], row[x][1], row[x][0]};
        }
    }
    return raster;
}

void save_image(const Raster& raster, const std::filesystem::path& path) {
    cv::Mat bgr(static_cast<int>(raster.height()), static_cast<int>(raster.width()), CV_8UC3);
    for (int y = 0; y < bgr.rows; ++y) {
        auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            const auto& p = raster.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
            row[x] = cv::Vec3b(p.b, p.g, p.r);
        }
    }
    if (!cv::imwrite(path.string(), bgr)) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
}

}  // namespace skintone::ita
