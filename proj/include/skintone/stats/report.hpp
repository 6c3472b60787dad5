#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "skintone/stats/agreement.hpp"
#include "skintone/stats/bootstrap.hpp"
#include "skintone/stats/correlation.hpp"

namespace skintone::stats {

/// Named label sets compared by the reports, in display order.
using MethodLabels = std::vector<std::pair<std::string, LabelMap>>;

/// Pairwise inter-rater reliability across methods.
struct IrrReport {
    std::vector<std::string> methods;
    std::vector<std::string> experts;
    /// rho[i][j]; nullopt when undefined (degenerate or too few pairs).
    std::vector<std::vector<std::optional<double>>> rho;
    /// NA-free pair counts behind each rho.
    std::vector<std::vector<std::size_t>> n;
    /// (expert, method) -> smallest Fisher-Z p-value against any expert pair.
    std::map<std::pair<std::string, std::string>, double> min_p;

    std::optional<double> rho_of(const std::string& a, const std::string& b) const;
};

/// `experts` names the entries of `methods` that are experts. Minimum
/// p-values are reported for every (expert, non-expert method) pair once at
/// least two experts are present, using that pair's effective n.
IrrReport build_irr_report(const MethodLabels& methods, const std::vector<std::string>& experts);

nlohmann::json to_json(const IrrReport& report);
std::string to_text(const IrrReport& report);

nlohmann::json to_json(const ConfusionMatrix& matrix);
std::string to_text(const ConfusionMatrix& matrix);

nlohmann::json to_json(const std::vector<CrowdCurvePoint>& curve);
std::string to_text(const std::vector<CrowdCurvePoint>& curve);

}  // namespace skintone::stats
