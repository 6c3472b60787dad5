#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "skintone/consensus/platform.hpp"
#include "skintone/stats/bootstrap.hpp"

namespace skintone::sim {

/// kernel[t][e]: probability of emitting label index e when the truth has
/// index t (both in NA, I..VI order).
using ConfusionKernel = std::array<std::array<double, kLabelCount>, kLabelCount>;

/// Truth with probability p, the rest split over the neighbouring types.
/// Edge types put all of it on their single neighbour; an NA truth spreads
/// the rest evenly over I..VI.
ConfusionKernel off_by_one_kernel(double p);
ConfusionKernel identity_kernel();

struct AnnotatorSpec {
    std::string annotator_id;
    ConfusionKernel kernel = off_by_one_kernel(0.6);
    double arrival_rate = 1.0;

    /// Throws InvalidInput for a negative entry, a row not summing to 1, or
    /// a non-positive arrival rate.
    void validate() const;
};

struct SimConfig {
    /// Used when `truth` is empty: images img0000.. get uniform I..VI truth.
    int n_images = 0;
    std::map<std::string, FstLabel> truth;
    std::vector<AnnotatorSpec> population;
    consensus::ProtocolConfig protocol;
    double gold_fraction = 0.0;
    std::uint64_t seed = 0;
    /// Maximum submissions; 0 means 50 per image.
    std::size_t max_submissions = 0;
    double gold_probe_rate = 0.1;

    void validate() const;
};

nlohmann::json to_json(const SimConfig& config);
/// Annotators accept either "kernel" (7x7 rows) or "match_probability"
/// (off-by-one model).
SimConfig sim_config_from_json(const nlohmann::json& doc);

struct QualificationCounts {
    int non_qualified = 0;
    int qualified = 0;
    int disqualified = 0;
    bool operator==(const QualificationCounts&) const = default;
};

struct SimSummary {
    std::size_t n_images = 0;
    std::size_t submissions = 0;
    std::size_t settled = 0;
    std::size_t escalated = 0;
    std::size_t halted = 0;
    double settlement_rate = 0.0;
    /// Mean submissions an image received before it settled; nullopt when none settled.
    std::optional<double> mean_annotations_to_settle;
    /// Fraction of settled images whose label equals the truth.
    std::optional<double> truth_agreement;
    QualificationCounts qualification;
    bool budget_exhausted = false;
    bool operator==(const SimSummary&) const = default;
};

nlohmann::json to_json(const SimSummary& summary);

struct Transcript {
    std::vector<Event> events;
    consensus::PlatformState state;
    std::map<std::string, FstLabel> truth;
    std::vector<std::string> population;
    bool budget_exhausted = false;
    SimSummary summary;
};

/// Runs the protocol with synthetic annotators until every image leaves
/// Open, nobody has work left, or the submission budget runs out.
/// Deterministic for a fixed config.
Transcript run_simulation(const SimConfig& config);

/// Aggregates computed from the transcript's event log.
SimSummary summarize(const Transcript& transcript);

/// Draws `per_image` labels for every image, each from an annotator chosen
/// in proportion to arrival rate. Feeds the crowd-size analysis.
stats::AnnotationPool simulate_pool(const std::map<std::string, FstLabel>& truth,
                                    const std::vector<AnnotatorSpec>& population, int per_image, std::uint64_t seed);

/// Uniform I..VI truth for ids img0000, img0001, ...
std::map<std::string, FstLabel> random_truth(int n_images, std::uint64_t seed);

}  // namespace skintone::sim
