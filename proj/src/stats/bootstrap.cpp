#include "skintone/stats/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "skintone/core/error.hpp"

namespace skintone::stats {

namespace {

// Independent stream per (size, draw) so draws can run in any order.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t size_index, std::uint64_t draw) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(size_index), static_cast<std::uint32_t>(draw)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

std::vector<CrowdCurvePoint> bootstrap_crowd_curve(const AnnotationPool& pool, const LabelMap& reference,
                                                   const CrowdCurveOptions& options) {
    if (options.sizes.empty()) throw Error(ErrorCode::InvalidInput, "no sample sizes requested");
    if (options.draws < 1) throw Error(ErrorCode::InvalidInput, "draws must be positive");
    const int largest = *std::max_element(options.sizes.begin(), options.sizes.end());
    if (*std::min_element(options.sizes.begin(), options.sizes.end()) < 1) {
        throw Error(ErrorCode::InvalidInput, "sample sizes must be positive");
    }

    struct Item {
        const std::vector<FstLabel>* labels;
        double reference;
    };
    std::vector<Item> items;
    for (const auto& [image_id, ref] : reference) {
        const auto value = numeric(ref);
        auto it = pool.find(image_id);
        if (!value || it == pool.end()) continue;
        if (it->second.empty() || (!options.with_replacement && it->second.size() < static_cast<std::size_t>(largest))) {
            throw Error(ErrorCode::PoolTooSmall, "image '" + image_id + "' has " + std::to_string(it->second.size()) +
                                                     " labels, need " + std::to_string(largest));
        }
        items.push_back({&it->second, static_cast<double>(*value)});
    }

    std::vector<CrowdCurvePoint> curve;
    std::vector<std::size_t> order;
    for (std::size_t s = 0; s < options.sizes.size(); ++s) {
        const auto size = static_cast<std::size_t>(options.sizes[s]);
        std::vector<double> rhos;
        std::size_t fewest = items.size();
        for (int d = 0; d < options.draws; ++d) {
            std::mt19937_64 rng(stream_seed(options.seed, s, static_cast<std::uint64_t>(d)));
            std::vector<double> means;
            std::vector<double> refs;
            for (const auto& item : items) {
                const auto& labels = *item.labels;
                double sum = 0.0;
                int applicable = 0;
                auto take = [&](FstLabel label) {
                    if (auto v = numeric(label)) {
                        sum += *v;
                        ++applicable;
                    }
                };
                if (options.with_replacement) {
                    std::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);
                    for (std::size_t k = 0; k < size; ++k) take(labels[pick(rng)]);
                } else {
                    order.resize(labels.size());
                    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
                    for (std::size_t k = 0; k < size; ++k) {
                        std::uniform_int_distribution<std::size_t> pick(k, order.size() - 1);
                        std::swap(order[k], order[pick(rng)]);
                        take(labels[order[k]]);
                    }
                }
                if (applicable == 0) continue;
                means.push_back(sum / applicable);
                refs.push_back(item.reference);
            }
            fewest = std::min(fewest, means.size());
            rhos.push_back(pearson(means, refs));
        }

        CrowdCurvePoint point;
        point.sample_size = options.sizes[s];
        point.n_effective = fewest;
        double total = 0.0;
        for (double r : rhos) total += r;
        point.mean_rho = total / static_cast<double>(rhos.size());
        double ss = 0.0;
        for (double r : rhos) ss += (r - point.mean_rho) * (r - point.mean_rho);
        point.sd_rho = rhos.size() > 1 ? std::sqrt(ss / static_cast<double>(rhos.size() - 1)) : 0.0;
        point.ci_low = point.mean_rho - 1.96 * point.sd_rho;
        point.ci_high = point.mean_rho + 1.96 * point.sd_rho;
        curve.push_back(point);
    }
    return curve;
}

}  // namespace skintone::stats
