#include "skintone/stats/correlation.hpp"

#include <algorithm>
#include <cmath>

#include "skintone/core/error.hpp"

namespace skintone::stats {

std::size_t LabelVectorPair::n_effective() const noexcept {
    std::size_t n = 0;
    for (const auto& [a, b] : pairs) n += (is_applicable(a) && is_applicable(b)) ? 1 : 0;
    return n;
}

LabelVectorPair pair_labels(const LabelMap& a, const LabelMap& b) {
    LabelVectorPair out;
    for (const auto& [image_id, label] : a) {
        auto it = b.find(image_id);
        if (it != b.end()) out.pairs.emplace_back(label, it->second);
    }
    return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorCode::InvalidInput, "pearson: length mismatch");
    const auto n = x.size();
    if (n < 3) throw Error(ErrorCode::DegenerateInput, "pearson needs at least 3 pairs");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::DegenerateInput, "pearson of a constant vector");
    const double r = sxy / std::sqrt(sxx * syy);
    return std::max(-1.0, std::min(1.0, r));
}

double pearson(const LabelVectorPair& pairs) {
    std::vector<double> x, y;
    for (const auto& [a, b] : pairs.pairs) {
        const auto na = numeric(a);
        const auto nb = numeric(b);
        if (!na || !nb) continue;
        x.push_back(*na);
        y.push_back(*nb);
    }
    return pearson(x, y);
}

}  // namespace skintone::stats
