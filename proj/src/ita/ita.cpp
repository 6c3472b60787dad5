#include "skintone/ita/ita.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "skintone/core/csv.hpp"
#include "skintone/core/error.hpp"

namespace skintone::ita {

double ita_degrees(const LabColor& lab) noexcept {
    return std::atan2(lab.L - 50.0, lab.b) * 180.0 / std::numbers::pi;
}

ItaResult compute_ita(const LabImage& image, const SkinMask& mask, Aggregation aggregation) {
    if (mask.width != image.width || mask.height != image.height || mask.bits.size() != image.pixels.size()) {
        throw Error(ErrorCode::InvalidInput, "mask dimensions do not match the image");
    }
    std::vector<double> angles;
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        if (mask.bits[i]) angles.push_back(ita_degrees(image.pixels[i]));
    }
    if (angles.empty()) throw Error(ErrorCode::NoSkinDetected, "no skin pixels in mask");

    ItaResult result;
    result.masked_pixel_count = angles.size();
    if (aggregation == Aggregation::Mean) {
        double sum = 0.0;
        for (double a : angles) sum += a;
        result.mean_ita_deg = sum / static_cast<double>(angles.size());
    } else {
        const auto mid = angles.size() / 2;
        std::nth_element(angles.begin(), angles.begin() + static_cast<std::ptrdiff_t>(mid), angles.end());
        double median = angles[mid];
        if (angles.size() % 2 == 0) {
            median = (median + *std::max_element(angles.begin(), angles.begin() + static_cast<std::ptrdiff_t>(mid))) / 2.0;
        }
        result.mean_ita_deg = median;
    }
    return result;
}

ItaResult compute_ita(const Raster& image, const SkinMask& mask, Aggregation aggregation) {
    return compute_ita(to_lab(image), mask, aggregation);
}

ItaThresholds ItaThresholds::from_values(const std::array<double, 5>& v) noexcept {
    return {v[0], v[1], v[2], v[3], v[4]};
}

bool ItaThresholds::ordered() const noexcept { return t12 > t23 && t23 > t34 && t34 > t45 && t45 > t56; }

FstLabel ita_to_fst(double ita_deg, const ItaThresholds& t) {
    if (ita_deg > t.t12) return FstLabel::I;
    if (ita_deg > t.t23) return FstLabel::II;
    if (ita_deg > t.t34) return FstLabel::III;
    if (ita_deg > t.t45) return FstLabel::IV;
    if (ita_deg > t.t56) return FstLabel::V;
    return FstLabel::VI;
}

nlohmann::json to_json(const ItaThresholds& t) {
    return {{"t12", t.t12}, {"t23", t.t23}, {"t34", t.t34}, {"t45", t.t45}, {"t56", t.t56}};
}

ItaThresholds thresholds_from_json(const nlohmann::json& doc) {
    ItaThresholds t;
    try {
        t = {doc.at("t12").get<double>(), doc.at("t23").get<double>(), doc.at("t34").get<double>(),
             doc.at("t45").get<double>(), doc.at("t56").get<double>()};
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidInput, std::string("threshold document: ") + e.what());
    }
    if (!t.ordered()) throw Error(ErrorCode::InvalidInput, "thresholds must be strictly decreasing");
    return t;
}

ItaResult annotate(const Raster& image, const ItaThresholds& thresholds, const SkinRule& rule,
                   Aggregation aggregation) {
    const auto mask = skin_mask(image, rule);
    try {
        auto result = compute_ita(image, mask, aggregation);
        result.fst = ita_to_fst(result.mean_ita_deg, thresholds);
        return result;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoSkinDetected) throw;
        ItaResult none;
        none.mean_ita_deg = std::nan("");
        none.fst = FstLabel::NotApplicable;
        return none;
    }
}

std::string ita_results_csv(const std::vector<ItaRow>& rows) {
    std::string out = "image_id,mean_ita_deg,masked_pixel_count,fst\n";
    for (const auto& row : rows) {
        std::string mean;
        if (row.result.masked_pixel_count > 0) {
            char buffer[32];
            std::snprintf(buffer, sizeof buffer, "%.6f", row.result.mean_ita_deg);
            mean = buffer;
        }
        const auto fst = row.result.fst.value_or(FstLabel::NotApplicable);
        out += csv::join({row.image_id, mean, std::to_string(row.result.masked_pixel_count),
                          std::string(to_string(fst))});
        out += '\n';
    }
    return out;
}

std::vector<ItaRow> parse_ita_results_csv(std::string_view text) {
    const auto table = csv::parse(text);
    const auto id = table.column("image_id");
    const auto mean = table.column("mean_ita_deg");
    const auto count = table.column("masked_pixel_count");
    const auto fst = table.column("fst");
    if (id == std::string::npos || mean == std::string::npos || count == std::string::npos ||
        fst == std::string::npos) {
        throw Error(ErrorCode::InvalidInput, "ITA results need image_id,mean_ita_deg,masked_pixel_count,fst");
    }
    std::vector<ItaRow> rows;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& cells = table.rows[r];
        if (cells.size() != table.header.size()) {
            throw Error(ErrorCode::InvalidInput, "ITA results line " + std::to_string(table.line_numbers[r]) +
                                                     ": wrong field count");
        }
        ItaRow row;
        row.image_id = cells[id];
        try {
            row.result.mean_ita_deg = cells[mean].empty() ? std::nan("") : std::stod(cells[mean]);
            row.result.masked_pixel_count = std::stoul(cells[count]);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidInput,
                        "ITA results line " + std::to_string(table.line_numbers[r]) + ": bad number");
        }
        row.result.fst = parse_label(cells[fst]);
        if (!row.result.fst) {
            throw Error(ErrorCode::InvalidInput, "ITA results line " + std::to_string(table.line_numbers[r]) +
                                                     ": bad label");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace skintone::ita
