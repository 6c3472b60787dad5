// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <csignal>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "../support/fixtures.hpp"
#include "../support/lab_panel.hpp"
#include "../support/stream_gen.hpp"
#include "../support/temp_dir.hpp"
#include "skintone/consensus/export.hpp"
#include "skintone/consensus/review.hpp"
#include "skintone/core/error.hpp"
#include "skintone/ita/calibration.hpp"
#include "skintone/ita/color.hpp"
#include "skintone/ita/ita.hpp"
#include "skintone/sim/simulation.hpp"
#include "skintone/stats/agreement.hpp"
#include "skintone/stats/bootstrap.hpp"
#include "skintone/stats/fisher.hpp"

using namespace skintone;
using consensus::Platform;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    std::string failures;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            failures += (pass ? "" : "; ") + what;
            pass = false;
        }
    }
};

using Criterion = std::function<void(Outcome&)>;

// ---------------------------------------------------------------- Fisher-Z

void fisher_reproduction(Outcome& out) {
    const auto r = stats::fisher_z_compare(0.84, 0.57, 320);
    out.require(r.p_two_sided < 1e-8, "expert vs ITA p not below 1e-8");
    const std::vector<double> experts{0.84, 0.85, 0.86};
    for (double ita_rho : {0.57, 0.52, 0.55}) {
        const double p = stats::min_pairwise_pvalue(experts, ita_rho, 296);
        out.require(p < 0.001, "min p for ITA rho " + std::to_string(ita_rho) + " not below 0.001");
    }
    if (out.pass) out.detail << "p(0.84 vs 0.57, n=320) = " << r.p_two_sided;
}

// ---------------------------------------------------------------- consensus

void oracle_equivalence(Outcome& out) {
    constexpr std::uint64_t kStreams = 10000;
    const auto start = std::chrono::steady_clock::now();
    std::size_t commands = 0;
    std::set<QualificationState> seen_states;
    for (std::uint64_t seed = 0; seed < kStreams && out.pass; ++seed) {
        auto scenario = testing::random_scenario(seed);
        Platform platform(scenario.config);
        platform.ingest(scenario.images);
        testing::ProtocolOracle oracle(scenario.config, scenario.images);
        for (const auto& cmd : scenario.commands) {
            ++commands;
            const auto engine_error = testing::run_command(platform, cmd);
            const auto oracle_error = oracle.apply(cmd);
            if (engine_error != oracle_error) {
                out.require(false, "seed " + std::to_string(seed) + ": rejection differs");
                break;
            }
            const auto mismatch = testing::compare_outcomes(platform.state(), oracle);
            if (!mismatch.empty()) {
                out.require(false, "seed " + std::to_string(seed) + ": " + mismatch);
                break;
            }
        }
        for (const auto& [id, profile] : platform.state().annotators) seen_states.insert(profile.state);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.require(seconds < 60.0, "took " + std::to_string(seconds) + " s");
    out.require(seen_states.size() == 3, "streams did not reach all qualification states");
    out.detail << kStreams << " streams, " << commands << " commands, 100% agreement, " << seconds << " s";
}

void protocol_constants(Outcome& out) {
    const consensus::ProtocolConfig defaults;
    out.require(defaults.lead_margin == 3 && defaults.max_annotations == 20 && defaults.incorrect_halt == 2 &&
                    defaults.inappropriate_halt == 1 && defaults.qual_min_scored == 25 && defaults.qual_window == 50 &&
                    defaults.qual_min_agreement == 0.40,
                "default parameters differ");

    {  // lead of 3 at exactly the third unanimous qualified annotation
        Platform p;
        testing::qualify(p, {"w0", "w1", "w2"});
        p.ingest({testing::plain_image("x")});
        const auto s1 = p.submit_annotation("w0", "x", FstLabel::III).new_status;
        const auto s2 = p.submit_annotation("w1", "x", FstLabel::III).new_status;
        const auto s3 = p.submit_annotation("w2", "x", FstLabel::III).new_status;
        out.require(s1 == ImageStatus::Open && s2 == ImageStatus::Open && s3 == ImageStatus::Settled,
                    "lead-by-3 settlement not at the third annotation");
    }
    {  // majority at exactly 20, tie at 20 escalates
        std::vector<std::string> crowd;
        for (int i = 0; i < 20; ++i) crowd.push_back("w" + std::to_string(i));
        auto run = [&](bool tie) {
            Platform p;
            testing::qualify(p, crowd);
            p.ingest({testing::plain_image("x")});
            std::vector<ImageStatus> statuses;
            for (int i = 0; i < 20; ++i) {
                FstLabel label = i % 2 == 0 ? FstLabel::II : FstLabel::III;
                if (!tie && i == 19) label = FstLabel::II;
                statuses.push_back(p.submit_annotation(crowd[static_cast<std::size_t>(i)], "x", label).new_status);
            }
            return std::pair{statuses, p.state().image("x").consensus};
        };
        auto [statuses, c] = run(false);
        bool open_before = std::all_of(statuses.begin(), statuses.end() - 1, [](auto s) { return s == ImageStatus::Open; });
        out.require(open_before && statuses.back() == ImageStatus::Settled && c.settled_label == FstLabel::II &&
                        c.tally.total_qualified == 20,
                    "majority settlement not at exactly 20");
        auto [tie_statuses, tie_c] = run(true);
        out.require(tie_statuses.back() == ImageStatus::Escalated && tie_statuses[18] == ImageStatus::Open,
                    "tie at the cap did not escalate");
    }
    {  // halting
        Platform p;
        p.ingest({testing::plain_image("a"), testing::plain_image("b")});
        out.require(p.file_failure_report({"a", "u", FailureKind::InappropriateOrIrrelevant, ""}) == ImageStatus::Halted,
                    "one inappropriate flag did not halt");
        out.require(p.file_failure_report({"b", "u", FailureKind::IncorrectLabel, ""}) == ImageStatus::Open,
                    "one incorrect flag halted");
        out.require(p.file_failure_report({"b", "v", FailureKind::IncorrectLabel, ""}) == ImageStatus::Halted,
                    "two incorrect flags did not halt");
    }
    {  // qualification flips at 10/25 and disqualifies below 0.40 over 50
        auto run = [](int matches, int total, std::vector<bool> tail) {
            Platform p;
            std::vector<ImageRecord> gold;
            const int n = total + static_cast<int>(tail.size());
            for (int i = 0; i < n; ++i) gold.push_back(testing::gold_image("g" + std::to_string(1000 + i), FstLabel::I));
            p.ingest(gold);
            std::vector<QualificationState> states;
            for (int i = 0; i < n; ++i) {
                const bool match = i < total ? i < matches : static_cast<bool>(tail[static_cast<std::size_t>(i - total)]);
                states.push_back(
                    p.submit_annotation("u", gold[static_cast<std::size_t>(i)].image_id, match ? FstLabel::I : FstLabel::II)
                        .qualification_state);
            }
            return states;
        };
        const auto ten = run(10, 25, {});
        out.require(ten[23] == QualificationState::NonQualified && ten[24] == QualificationState::Qualified,
                    "10/25 did not qualify at the 25th scoring");
        const auto nine = run(9, 25, {});
        out.require(nine.back() == QualificationState::NonQualified, "9/25 qualified");

        // 10 of the first 25 match, then 10 of 25 more: 20/50 keeps the badge.
        // One more miss drops the oldest match: 19/50 = 0.38.
        std::vector<bool> tail;
        for (int i = 0; i < 25; ++i) tail.push_back(i < 10);
        tail.push_back(false);
        const auto window = run(10, 25, tail);
        out.require(window[49] == QualificationState::Qualified, "20/50 disqualified");
        out.require(window[50] == QualificationState::Disqualified, "19/50 did not disqualify");
    }
    if (out.pass) out.detail << "lead 3, cap 20, halts 1/2, qualify 10/25, disqualify 19/50";
}

void qualification_dynamics(Outcome& out) {
    auto qualified_share = [](double p, std::uint64_t base) {
        int qualified = 0;
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            sim::SimConfig config;
            config.n_images = 75;
            config.gold_fraction = 1.0;
            config.seed = base + seed;
            config.population = {{"solo", sim::off_by_one_kernel(p), 1.0}};
            const auto t = sim::run_simulation(config);
            qualified += t.state.qualification("solo") == QualificationState::Qualified;
        }
        return qualified;
    };
    const int strong = qualified_share(0.6, 0);
    const int weak = qualified_share(0.2, 1'000'000);
    out.require(strong >= 950, "match rate 0.6 qualified in only " + std::to_string(strong) + "/1000");
    out.require(weak <= 50, "match rate 0.2 qualified in " + std::to_string(weak) + "/1000");
    out.detail << "0.6 -> " << strong << "/1000 qualified, 0.2 -> " << weak << "/1000";
}

// ---------------------------------------------------------------- ITA

void ita_correctness(Outcome& out) {
    auto uniform_ita = [](ita::LabColor c) {
        return ita::compute_ita(ita::LabImage::uniform(4, 4, c), ita::SkinMask::full(4, 4)).mean_ita_deg;
    };
    out.require(uniform_ita({50, 0, 10}) == 0.0, "L=50,b=10 is not 0");
    out.require(std::abs(uniform_ita({70, 0, 10}) - std::atan(2.0) * 180.0 / std::numbers::pi) < 1e-9,
                "L=70,b=10 is not 63.435");
    out.require(uniform_ita({100, 0, 0}) == 90.0, "L=100,b=0 is not 90");
    const auto white = ita::compute_ita(ita::Raster(4, 4, {255, 255, 255}), ita::SkinMask::full(4, 4));
    out.require(std::abs(white.mean_ita_deg - 90.0) < 0.02, "sRGB white is not 90");

    std::mt19937_64 rng(2024);
    double worst_rel = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const ita::Rgb8 px{static_cast<std::uint8_t>(rng() % 256), static_cast<std::uint8_t>(rng() % 256),
                           static_cast<std::uint8_t>(rng() % 256)};
        const auto lab = ita::srgb_to_lab(px);
        const double expected = std::atan2(lab.L - 50.0, lab.b) * 180.0 / std::numbers::pi;
        const double got = ita::compute_ita(ita::Raster(1, 1, px), ita::SkinMask::full(1, 1)).mean_ita_deg;
        worst_rel = std::max(worst_rel, std::abs(got - expected) / std::max(1e-12, std::abs(expected)));
    }
    out.require(worst_rel <= 1e-9, "per-pixel ITA relative error " + std::to_string(worst_rel));

    double worst_lab = 0.0;
    for (const auto& ref : testing::kLabPanel) {
        const auto lab = ita::srgb_to_lab({static_cast<std::uint8_t>(ref.r), static_cast<std::uint8_t>(ref.g), static_cast<std::uint8_t>(ref.b)});
        worst_lab = std::max({worst_lab, std::abs(lab.L - ref.L), std::abs(lab.a - ref.a), std::abs(lab.b - ref.bb)});
    }
    out.require(worst_lab <= 1e-3, "Lab panel error " + std::to_string(worst_lab));
    out.detail << "panel max |dLab| " << worst_lab << ", per-pixel max rel err " << worst_rel;
}

void calibration(Outcome& out) {
    // Bands are dense enough that the gap around each true cut is narrow;
    // sparse bands leave a wide flat concordance region around the cut.
    const std::array<double, 5> truth{55, 41, 28, 10, -30};
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        std::mt19937_64 rng(seed);
        const std::array<double, 7> edges{85.0, truth[0], truth[1], truth[2], truth[3], truth[4], -70.0};
        std::map<std::string, double> values;
        std::map<std::string, FstLabel> gold;
        for (int k = 1; k <= 6; ++k) {
            std::uniform_real_distribution<double> draw(edges[static_cast<std::size_t>(k)] + 1e-6,
                                                        edges[static_cast<std::size_t>(k - 1)] - 1e-6);
            for (int i = 0; i < 100; ++i) {
                const auto id = "t" + std::to_string(k) + "_" + std::to_string(i);
                values[id] = draw(rng);
                gold[id] = *from_numeric(k);
            }
        }
        const auto result = ita::calibrate_thresholds(values, gold, gold);
        const auto got = result.calibrated.values();
        for (std::size_t i = 0; i < 5; ++i) worst = std::max(worst, std::abs(got[i] - truth[i]));
        out.require(result.final_concordance >= result.initial_concordance,
                    "concordance decreased on seed " + std::to_string(seed));
    }
    out.require(worst <= 5.0, "cut error " + std::to_string(worst) + " degrees");

    // Overlapping bands and noisy experts.
    std::mt19937_64 rng(77);
    const std::array<double, 6> centres{65, 48, 34, 19, -10, -45};
    std::map<std::string, double> values;
    std::map<std::string, FstLabel> e1, e2;
    std::bernoulli_distribution flip(0.35), up(0.5);
    auto noisy = [&](int t) {
        if (!flip(rng)) return *from_numeric(t);
        return *from_numeric(std::clamp(t + (up(rng) ? 1 : -1), 1, 6));
    };
    for (int t = 1; t <= 6; ++t) {
        std::normal_distribution<double> draw(centres[static_cast<std::size_t>(t - 1)], 9.0);
        for (int i = 0; i < 60; ++i) {
            const auto id = "p" + std::to_string(t) + "_" + std::to_string(i);
            values[id] = draw(rng);
            e1[id] = noisy(t);
            e2[id] = noisy(t);
        }
    }
    const auto result = ita::calibrate_thresholds(values, e1, e2);
    stats::LabelMap predicted;
    for (const auto& [id, v] : values) predicted[id] = ita::ita_to_fst(v, result.calibrated);
    const auto pairs = stats::pair_labels(predicted, e1);
    const double exact = stats::within_k_agreement(pairs, 0);
    const double within1 = stats::within_k_agreement(pairs, 1);
    out.require(within1 > exact, "within-one agreement not above exact match");
    out.require(result.final_concordance >= result.initial_concordance, "overlapping-band concordance decreased");
    out.detail << "max cut error " << worst << " deg; overlapping-band exact " << exact << ", within-1 " << within1;
}

// ---------------------------------------------------------------- crowd curve

void crowd_curve(Outcome& out) {
    std::vector<sim::AnnotatorSpec> crowd;
    for (int i = 0; i < 30; ++i) crowd.push_back({"c" + std::to_string(i), sim::off_by_one_kernel(0.35 + 0.01 * i), 1.0});

    const auto truth = sim::random_truth(120, 1);
    stats::CrowdCurveOptions options;
    options.seed = 11;
    const auto curve = stats::bootstrap_crowd_curve(sim::simulate_pool(truth, crowd, 96, 5), truth, options);
    const double rise = curve[2].mean_rho - curve[0].mean_rho;
    const double tail = std::abs(curve[5].mean_rho - curve[4].mean_rho);
    out.require(rise > 0, "rho(12) not above rho(3)");
    out.require(tail < std::abs(rise), "no plateau");

    // CI width: averaged over a batch of 10 seeds, widths must not grow with
    // size; required in at least 95% of 20 batches.
    int good_batches = 0;
    constexpr int kBatches = 20;
    for (int batch = 0; batch < kBatches; ++batch) {
        std::vector<double> width(options.sizes.size(), 0.0);
        for (int s = 0; s < 10; ++s) {
            const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(batch * 10 + s);
            const auto t = sim::random_truth(60, seed);
            stats::CrowdCurveOptions o;
            o.seed = seed;
            const auto c = stats::bootstrap_crowd_curve(sim::simulate_pool(t, crowd, 96, seed + 7), t, o);
            for (std::size_t i = 0; i < c.size(); ++i) width[i] += c[i].ci_high - c[i].ci_low;
        }
        bool ok = true;
        for (std::size_t i = 1; i < width.size(); ++i) ok = ok && width[i] <= width[i - 1];
        good_batches += ok;
    }
    out.require(good_batches * 100 >= 95 * kBatches,
                "CI width shrank in only " + std::to_string(good_batches) + "/" + std::to_string(kBatches) + " batches");

    out.detail << "rho(3)=" << curve[0].mean_rho << " rho(12)=" << curve[2].mean_rho << " rho(48)=" << curve[4].mean_rho
               << " rho(96)=" << curve[5].mean_rho << "; CI shrinking in " << good_batches << "/" << kBatches
               << " batches";
}

// ---------------------------------------------------------------- review set

void review_sizing(Outcome& out) {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> label(1, 6);
    std::map<std::string, FstLabel> a, b;
    std::set<std::string> engineered;
    constexpr int kImages = 1000;
    for (int i = 0; i < kImages; ++i) {
        char id[16];
        std::snprintf(id, sizeof id, "r%04d", i);
        const int x = label(rng);
        int y = x;
        if (i % 100 < 9) {  // 9%: two or more units apart
            y = x <= 3 ? x + 2 + static_cast<int>(rng() % static_cast<unsigned>(4 - x + 1)) : x - 2;
            engineered.insert(id);
        } else {
            const int step = static_cast<int>(rng() % 3) - 1;
            y = std::clamp(x + step, 1, 6);
        }
        a[id] = *from_numeric(x);
        b[id] = *from_numeric(y);
    }
    const auto selection = consensus::select_review_set(a, b, 10, 1, 42);
    const std::set<std::string> flagged(selection.discrepant.begin(), selection.discrepant.end());
    out.require(flagged == engineered, "flagged set differs from the engineered 9%");
    const double share = static_cast<double>(flagged.size()) / kImages;
    out.require(std::abs(share - 0.09) < 1e-12, "share " + std::to_string(share));
    out.detail << flagged.size() << "/" << kImages << " flagged (" << share * 100 << "%)";
}

// ---------------------------------------------------------------- crash consistency

std::string exports(const consensus::PlatformState& s) {
    return consensus::consensus_csv(s) + "\x1e" + consensus::annotations_csv(s);
}

void crash_consistency(Outcome& out) {
    testing::TempDir dir("skintone-acceptance-crash");
    std::size_t checked_writes = 0;

    // Every acknowledged write: a reader replaying the file sees exactly the writer's state.
    for (std::uint64_t seed = 0; seed < 40 && out.pass; ++seed) {
        const auto scenario = testing::random_scenario(seed);
        const auto path = dir / ("live-" + std::to_string(seed) + ".jsonl");
        Platform platform(scenario.config, EventLog::open(path));
        platform.ingest(scenario.images);
        for (const auto& cmd : scenario.commands) {
            if (testing::run_command(platform, cmd)) continue;
            ++checked_writes;
            const auto events = read_event_file(path);
            const auto replayed = consensus::replay(events, scenario.config);
            if (!(replayed == platform.state()) || exports(replayed) != exports(platform.state())) {
                out.require(false, "replay differs after a write, seed " + std::to_string(seed));
                break;
            }
        }
    }

    // SIGKILL a writer process at random points; no acknowledged write may be lost.
    std::size_t kills = 0;
    std::mt19937_64 rng(5);
    for (std::uint64_t seed = 100; seed < 160 && out.pass; ++seed) {
        const auto scenario = testing::random_scenario(seed);
        const auto path = dir / ("killed-" + std::to_string(seed) + ".jsonl");
        int fds[2];
        if (::pipe(fds) != 0) {
            out.require(false, "pipe failed");
            break;
        }
        const pid_t child = ::fork();
        if (child == 0) {
            ::close(fds[0]);
            Platform platform(scenario.config, EventLog::open(path));
            platform.ingest(scenario.images);
            for (const auto& cmd : scenario.commands) {
                if (testing::run_command(platform, cmd)) continue;
                const char ack = 1;
                if (::write(fds[1], &ack, 1) != 1) ::_exit(3);
            }
            ::_exit(0);
        }
        ::close(fds[1]);
        const std::size_t kill_after = std::uniform_int_distribution<std::size_t>(0, 12)(rng);
        std::size_t acked = 0;
        char ack;
        while (acked < kill_after && ::read(fds[0], &ack, 1) == 1) ++acked;
        ::kill(child, SIGKILL);
        ::waitpid(child, nullptr, 0);
        while (::read(fds[0], &ack, 1) == 1) ++acked;  // acks written before the kill landed
        ::close(fds[0]);
        ++kills;

        // Recover: reopen (truncating a torn tail and completing derived events).
        consensus::PlatformState recovered;
        try {
            Platform reopened(scenario.config, EventLog::open(path));
            recovered = reopened.state();
        } catch (const Error& e) {
            out.require(false, "recovery failed for seed " + std::to_string(seed) + ": " + e.what());
            break;
        }
        const auto inputs = recovered.annotations.size() + recovered.flags.size() +
                            std::count_if(recovered.images.begin(), recovered.images.end(),
                                          [](const auto& kv) { return kv.second.adjudicated_by.has_value(); });
        // Reference: the same command stream, stopped after the same number of accepted writes.
        Platform reference(scenario.config);
        if (recovered.last_seq > 0) reference.ingest(scenario.images);
        std::size_t accepted = 0;
        for (const auto& cmd : scenario.commands) {
            if (accepted == inputs) break;
            if (!testing::run_command(reference, cmd)) ++accepted;
        }
        out.require(accepted >= acked, "lost acknowledged writes for seed " + std::to_string(seed));
        out.require(recovered == reference.state() && exports(recovered) == exports(reference.state()),
                    "recovered state differs for seed " + std::to_string(seed));
    }
    out.detail << checked_writes << " writes replayed, " << kills << " SIGKILL recoveries, exports bit-exact";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, Criterion>> criteria{
        {"Fisher-Z reproduction", fisher_reproduction},
        {"Consensus oracle equivalence", oracle_equivalence},
        {"Protocol constants", protocol_constants},
        {"Qualification dynamics", qualification_dynamics},
        {"ITA correctness", ita_correctness},
        {"Threshold calibration", calibration},
        {"Crowd-size curve", crowd_curve},
        {"Review-set sizing", review_sizing},
        {"Crash consistency", crash_consistency},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Outcome outcome;
        try {
            run(outcome);
        } catch (const std::exception& e) {
            outcome.require(false, std::string("threw: ") + e.what());
        }
        std::cout << (outcome.pass ? "PASS " : "FAIL ") << name << ": "
                  << (outcome.pass ? "" : outcome.failures + " | ") << outcome.detail.str() << std::endl;
        failures += !outcome.pass;
    }
    std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
