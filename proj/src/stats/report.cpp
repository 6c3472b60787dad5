#include "skintone/stats/report.hpp"

#include <algorithm>
#include <cstdio>

#include "skintone/core/error.hpp"
#include "skintone/stats/fisher.hpp"

namespace skintone::stats {

namespace {

std::string format(const char* pattern, double value) {
    char buffer[48];
    std::snprintf(buffer, sizeof buffer, pattern, value);
    return buffer;
}

std::string pad(std::string text, std::size_t width) {
    if (text.size() < width) text.insert(0, width - text.size(), ' ');
    return text;
}

std::string p_text(double p) { return p < 0.001 ? "<0.001" : format("%.3f", p); }

}  // namespace

std::optional<double> IrrReport::rho_of(const std::string& a, const std::string& b) const {
    const auto ia = std::find(methods.begin(), methods.end(), a);
    const auto ib = std::find(methods.begin(), methods.end(), b);
    if (ia == methods.end() || ib == methods.end()) return std::nullopt;
    return rho[static_cast<std::size_t>(ia - methods.begin())][static_cast<std::size_t>(ib - methods.begin())];
}

IrrReport build_irr_report(const MethodLabels& methods, const std::vector<std::string>& experts) {
    IrrReport report;
    for (const auto& [name, labels] : methods) report.methods.push_back(name);
    for (const auto& expert : experts) {
        if (std::find(report.methods.begin(), report.methods.end(), expert) == report.methods.end()) {
            throw Error(ErrorCode::UnknownMethod, "expert '" + expert + "' is not among the methods");
        }
    }
    report.experts = experts;

    const auto m = methods.size();
    report.rho.assign(m, std::vector<std::optional<double>>(m));
    report.n.assign(m, std::vector<std::size_t>(m, 0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            const auto pairs = pair_labels(methods[i].second, methods[j].second);
            const auto n = pairs.n_effective();
            report.n[i][j] = report.n[j][i] = n;
            std::optional<double> rho;
            if (i == j) {
                rho = 1.0;
            } else {
                try {
                    rho = pearson(pairs);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::DegenerateInput) throw;
                }
            }
            report.rho[i][j] = report.rho[j][i] = rho;
        }
    }

    if (experts.size() < 2) return report;
    std::vector<double> expert_pairs;
    for (std::size_t a = 0; a < experts.size(); ++a) {
        for (std::size_t b = a + 1; b < experts.size(); ++b) {
            if (auto r = report.rho_of(experts[a], experts[b]); r && std::abs(*r) < 1.0) expert_pairs.push_back(*r);
        }
    }
    if (expert_pairs.empty()) return report;

    for (std::size_t e = 0; e < m; ++e) {
        const auto& expert = report.methods[e];
        if (std::find(experts.begin(), experts.end(), expert) == experts.end()) continue;
        for (std::size_t k = 0; k < m; ++k) {
            const auto& method = report.methods[k];
            if (std::find(experts.begin(), experts.end(), method) != experts.end()) continue;
            const auto rho = report.rho[e][k];
            if (!rho || std::abs(*rho) >= 1.0 || report.n[e][k] < 4) continue;
            report.min_p[{expert, method}] = min_pairwise_pvalue(expert_pairs, *rho, report.n[e][k]);
        }
    }
    return report;
}

nlohmann::json to_json(const IrrReport& report) {
    nlohmann::json rho = nlohmann::json::array();
    for (const auto& row : report.rho) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& v : row) out.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
        rho.push_back(out);
    }
    nlohmann::json min_p = nlohmann::json::array();
    for (const auto& [key, p] : report.min_p) {
        const auto ie = std::find(report.methods.begin(), report.methods.end(), key.first) - report.methods.begin();
        const auto im = std::find(report.methods.begin(), report.methods.end(), key.second) - report.methods.begin();
        min_p.push_back({{"expert", key.first},
                         {"method", key.second},
                         {"rho", *report.rho[static_cast<std::size_t>(ie)][static_cast<std::size_t>(im)]},
                         {"n_effective", report.n[static_cast<std::size_t>(ie)][static_cast<std::size_t>(im)]},
                         {"min_p", p}});
    }
    return {{"methods", report.methods},
            {"experts", report.experts},
            {"rho", rho},
            {"n_effective", report.n},
            {"min_p", min_p}};
}

std::string to_text(const IrrReport& report) {
    std::size_t width = 8;
    for (const auto& m : report.methods) width = std::max(width, m.size() + 2);

    std::string out = pad("rho", width);
    for (const auto& m : report.methods) out += pad(m, width);
    out += '\n';
    for (std::size_t i = 0; i < report.methods.size(); ++i) {
        out += pad(report.methods[i], width);
        for (const auto& v : report.rho[i]) out += pad(v ? format("%.3f", *v) : "-", width);
        out += '\n';
    }
    if (!report.min_p.empty()) {
        out += '\n' + pad("expert", width) + pad("method", width) + pad("rho", width) + pad("n", width) +
               pad("min p", width) + '\n';
        for (const auto& [key, p] : report.min_p) {
            const auto rho = report.rho_of(key.first, key.second);
            const auto ie = static_cast<std::size_t>(
                std::find(report.methods.begin(), report.methods.end(), key.first) - report.methods.begin());
            const auto im = static_cast<std::size_t>(
                std::find(report.methods.begin(), report.methods.end(), key.second) - report.methods.begin());
            out += pad(key.first, width) + pad(key.second, width) + pad(format("%.3f", rho.value_or(0.0)), width) +
                   pad(std::to_string(report.n[ie][im]), width) + pad(p_text(p), width) + '\n';
        }
    }
    return out;
}

nlohmann::json to_json(const ConfusionMatrix& matrix) {
    nlohmann::json labels = nlohmann::json::array();
    for (auto label : kAllLabels) labels.push_back(to_string(label));
    nlohmann::json counts = nlohmann::json::array();
    nlohmann::json col_pct = nlohmann::json::array();
    nlohmann::json row_pct = nlohmann::json::array();
    for (std::size_t r = 0; r < kLabelCount; ++r) {
        nlohmann::json c = nlohmann::json::array(), cp = nlohmann::json::array(), rp = nlohmann::json::array();
        for (std::size_t k = 0; k < kLabelCount; ++k) {
            c.push_back(matrix.counts[r][k]);
            cp.push_back(matrix.column_percent(r, k));
            rp.push_back(matrix.row_percent(r, k));
        }
        counts.push_back(c);
        col_pct.push_back(cp);
        row_pct.push_back(rp);
    }
    return {{"labels", labels},
            {"counts", counts},
            {"column_percent", col_pct},
            {"row_percent", row_pct},
            {"total", matrix.total}};
}

std::string to_text(const ConfusionMatrix& matrix) {
    constexpr std::size_t width = 12;
    std::string out = pad("a\\b", 5);
    for (auto label : kAllLabels) out += pad(std::string(to_string(label)), width);
    out += '\n';
    for (std::size_t r = 0; r < kLabelCount; ++r) {
        out += pad(std::string(to_string(label_at(r))), 5);
        for (std::size_t c = 0; c < kLabelCount; ++c) {
            out += pad(std::to_string(matrix.counts[r][c]) + " (" + format("%.0f", matrix.column_percent(r, c)) + "%)",
                       width);
        }
        out += '\n';
    }
    out += "total " + std::to_string(matrix.total) + ", column percentages\n";
    return out;
}

nlohmann::json to_json(const std::vector<CrowdCurvePoint>& curve) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : curve) {
        points.push_back({{"sample_size", p.sample_size},
                          {"mean_rho", p.mean_rho},
                          {"sd_rho", p.sd_rho},
                          {"ci_low", p.ci_low},
                          {"ci_high", p.ci_high},
                          {"n_effective", p.n_effective}});
    }
    return points;
}

std::string to_text(const std::vector<CrowdCurvePoint>& curve) {
    std::string out = pad("size", 6) + pad("mean rho", 10) + pad("sd", 10) + pad("95% CI", 20) + pad("n", 6) + '\n';
    for (const auto& p : curve) {
        out += pad(std::to_string(p.sample_size), 6) + pad(format("%.4f", p.mean_rho), 10) +
               pad(format("%.4f", p.sd_rho), 10) +
               pad("[" + format("%.4f", p.ci_low) + ", " + format("%.4f", p.ci_high) + "]", 20) +
               pad(std::to_string(p.n_effective), 6) + '\n';
    }
    return out;
}

}  // namespace skintone::stats
