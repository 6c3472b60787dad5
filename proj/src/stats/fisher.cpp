#include "skintone/stats/fisher.hpp"

#include <algorithm>
#include <cmath>

#include "skintone/core/error.hpp"

namespace skintone::stats {

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

FisherZResult fisher_z_compare(double rho_1, double rho_2, std::size_t n) {
    for (double rho : {rho_1, rho_2}) {
        if (!(std::abs(rho) < 1.0)) throw Error(ErrorCode::InvalidRho, "correlation must satisfy |rho| < 1");
    }
    if (n < 4) throw Error(ErrorCode::SampleTooSmall, "Fisher comparison needs n >= 4");
    const double se = std::sqrt(2.0 / static_cast<double>(n - 3));
    const double z = std::abs(std::atanh(rho_1) - std::atanh(rho_2)) / se;
    return {z, std::min(1.0, normal_two_sided_p(z))};
}

double min_pairwise_pvalue(std::span<const double> expert_pair_rhos, double method_rho, std::size_t n) {
    if (expert_pair_rhos.empty()) throw Error(ErrorCode::EmptyInput, "no expert pairs to compare against");
    double best = 1.0;
    for (double rho : expert_pair_rhos) best = std::min(best, fisher_z_compare(method_rho, rho, n).p_two_sided);
    return best;
}

}  // namespace skintone::stats
