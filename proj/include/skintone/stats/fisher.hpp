#pragma once

#include <cstddef>
#include <span>

namespace skintone::stats {

struct FisherZResult {
    double z = 0.0;
    double p_two_sided = 1.0;
};

/// Two-sided standard-normal tail probability P(|N(0,1)| >= z).
double normal_two_sided_p(double z);

/// Compares two correlations on samples of size n through the Fisher
/// transform: Z = |atanh(r1) - atanh(r2)| / sqrt(2 / (n - 3)).
/// Throws InvalidRho for |r| >= 1 and SampleTooSmall for n < 4.
FisherZResult fisher_z_compare(double rho_1, double rho_2, std::size_t n);

/// Smallest p-value comparing a method's correlation with an expert against
/// each expert-pair correlation.
double min_pairwise_pvalue(std::span<const double> expert_pair_rhos, double method_rho, std::size_t n);

}  // namespace skintone::stats
