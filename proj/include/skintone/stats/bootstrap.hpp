#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "skintone/stats/correlation.hpp"

namespace skintone::stats {

/// Every label collected for each image.
using AnnotationPool = std::map<std::string, std::vector<FstLabel>>;

struct CrowdCurvePoint {
    int sample_size = 0;
    double mean_rho = 0.0;
    double sd_rho = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    /// Fewest images entering any draw's correlation.
    std::size_t n_effective = 0;
};

struct CrowdCurveOptions {
    std::vector<int> sizes{3, 6, 12, 24, 48, 96};
    int draws = 25;
    std::uint64_t seed = 0;
    bool with_replacement = false;
};

/// Correlation between a reference labeling and the crowd mean as a function
/// of crowd size.
///
/// For each size and draw, `size` labels are sampled from every image's pool
/// (without replacement unless configured), averaged over their numeric
/// values (NA excluded; an all-NA sample drops the image), and the mean
/// vector is correlated with the reference. Points report the mean and
/// sample SD over draws with a normal 95% interval (mean +/- 1.96 SD).
///
/// Images whose reference is NA or that lack a pool are skipped. Throws
/// PoolTooSmall when sampling without replacement and an image has fewer
/// labels than the largest size.
std::vector<CrowdCurvePoint> bootstrap_crowd_curve(const AnnotationPool& pool, const LabelMap& reference,
                                                   const CrowdCurveOptions& options);

}  // namespace skintone::stats
