#include "skintone/core/fst_label.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace skintone {

std::string_view to_string(FstLabel label) noexcept {
    static constexpr std::array<std::string_view, kLabelCount> names{
        "NA", "I", "II", "III", "IV", "V", "VI"};
    return names[index_of(label)];
}

std::optional<FstLabel> parse_label(std::string_view text) noexcept {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "NA" || upper == "N/A") return FstLabel::NotApplicable;
    if (upper.size() == 1 && upper[0] >= '1' && upper[0] <= '6') {
        return from_numeric(upper[0] - '0');
    }
    for (FstLabel label : kAllLabels) {
        if (is_applicable(label) && upper == to_string(label)) return label;
    }
    return std::nullopt;
}

}  // namespace skintone
