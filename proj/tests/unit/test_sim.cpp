#include <doctest.h>

#include <cmath>

#include "skintone/core/error.hpp"
#include "skintone/service/routing.hpp"
#include "skintone/sim/simulation.hpp"
#include "skintone/stats/bootstrap.hpp"
#include "../support/fixtures.hpp"

using namespace skintone;
using namespace skintone::sim;

namespace {

std::vector<AnnotatorSpec> population(int n, double p, const std::string& prefix = "sim") {
    std::vector<AnnotatorSpec> out;
    for (int i = 0; i < n; ++i) out.push_back({prefix + std::to_string(i), off_by_one_kernel(p), 1.0});
    return out;
}

// Recount from the final state rather than the log.
SimSummary recount(const Transcript& t) {
    SimSummary s;
    s.n_images = t.state.images.size();
    s.submissions = t.state.annotations.size();
    s.budget_exhausted = t.budget_exhausted;
    double to_settle = 0.0;
    std::size_t correct = 0;
    for (const auto& [id, image] : t.state.images) {
        switch (image.consensus.status) {
            case ImageStatus::Settled:
                ++s.settled;
                to_settle += static_cast<double>(image.annotations.size());
                correct += *image.consensus.settled_label == t.truth.at(id);
                break;
            case ImageStatus::Escalated: ++s.escalated; break;
            case ImageStatus::Halted: ++s.halted; break;
            default: break;
        }
    }
    if (s.n_images) s.settlement_rate = static_cast<double>(s.settled) / static_cast<double>(s.n_images);
    if (s.settled) {
        s.mean_annotations_to_settle = to_settle / static_cast<double>(s.settled);
        s.truth_agreement = static_cast<double>(correct) / static_cast<double>(s.settled);
    }
    for (const auto& id : t.population) {
        switch (t.state.qualification(id)) {
            case QualificationState::NonQualified: ++s.qualification.non_qualified; break;
            case QualificationState::Qualified: ++s.qualification.qualified; break;
            case QualificationState::Disqualified: ++s.qualification.disqualified; break;
        }
    }
    return s;
}

bool qualifies(double p, std::uint64_t seed) {
    SimConfig config;
    config.n_images = 75;
    config.gold_fraction = 1.0;
    config.population = population(1, p);
    config.seed = seed;
    const auto t = run_simulation(config);
    REQUIRE(t.state.annotations.size() == 75);
    return t.state.qualification("sim0") == QualificationState::Qualified;
}

}  // namespace

TEST_CASE("routing picks the least annotated eligible image") {
    consensus::ProtocolConfig raw;
    raw.raw_mode = true;
    consensus::Platform platform(raw);
    platform.ingest({testing::plain_image("x"), testing::plain_image("y")});
    platform.submit_annotation("a1", "x", FstLabel::II);
    const FstLabel alternating[] = {FstLabel::II, FstLabel::III, FstLabel::II, FstLabel::III};
    for (int i = 0; i < 4; ++i) platform.submit_annotation("b" + std::to_string(i), "y", alternating[i]);
    REQUIRE(platform.state().image("y").consensus.tally.total_qualified == 4);

    std::mt19937_64 rng(1);
    auto task = service::next_task(platform.state(), "fresh", 0.0, rng);
    REQUIRE(task);
    CHECK(task->image_id == "x");
    CHECK(task->assigned_to == "fresh");
    CHECK(task->reason == service::AssignmentReason::LeastAnnotated);

    // a1 already labeled x, so only y remains for them.
    task = service::next_task(platform.state(), "a1", 0.0, rng);
    REQUIRE(task);
    CHECK(task->image_id == "y");
}

TEST_CASE("routing ties, NoWork and non-open images") {
    consensus::Platform platform;
    platform.ingest({testing::plain_image("b"), testing::plain_image("a"), testing::plain_image("c")});
    std::mt19937_64 rng(2);
    CHECK(service::next_task(platform.state(), "u", 0.0, rng)->image_id == "a");

    platform.file_failure_report({"a", "u", FailureKind::InappropriateOrIrrelevant, "not skin"});
    CHECK(service::next_task(platform.state(), "v", 0.0, rng)->image_id == "b");

    platform.submit_annotation("u", "b", FstLabel::I);
    platform.submit_annotation("u", "c", FstLabel::I);
    CHECK_FALSE(service::next_task(platform.state(), "u", 0.0, rng).has_value());

    consensus::Platform single;
    single.ingest({testing::plain_image("only")});
    CHECK(service::next_task(single.state(), "w", 0.5, rng)->image_id == "only");
}

TEST_CASE("routing gold probes") {
    consensus::Platform platform;
    platform.ingest({testing::plain_image("a"), testing::gold_image("z-gold", FstLabel::III)});
    std::mt19937_64 rng(3);
    auto task = service::next_task(platform.state(), "u", 1.0, rng);
    REQUIRE(task);
    CHECK(task->image_id == "z-gold");
    CHECK(task->reason == service::AssignmentReason::GoldProbe);

    int probes = 0;
    for (int i = 0; i < 2000; ++i) probes += service::next_task(platform.state(), "u", 0.1, rng)->reason ==
                                             service::AssignmentReason::GoldProbe;
    CHECK(probes > 140);
    CHECK(probes < 260);

    platform.submit_annotation("u", "z-gold", FstLabel::III);
    task = service::next_task(platform.state(), "u", 1.0, rng);
    CHECK(task->image_id == "a");
    CHECK(task->reason == service::AssignmentReason::LeastAnnotated);
}

TEST_CASE("kernels") {
    for (double p : {0.0, 0.2, 0.6, 1.0}) {
        AnnotatorSpec spec{"k", off_by_one_kernel(p), 1.0};
        CHECK_NOTHROW(spec.validate());
        for (std::size_t t = 1; t < kLabelCount; ++t) CHECK(spec.kernel[t][t] == p);
    }
    AnnotatorSpec bad{"k", identity_kernel(), 1.0};
    bad.kernel[3][4] = 0.1;
    CHECK_THROWS_AS(bad.validate(), Error);
    AnnotatorSpec slow{"k", identity_kernel(), 0.0};
    CHECK_THROWS_AS(slow.validate(), Error);
    CHECK_THROWS_AS(off_by_one_kernel(1.5), Error);
}

TEST_CASE("perfect population settles every image on the truth") {
    SimConfig config;
    config.n_images = 40;
    config.gold_fraction = 0.5;
    config.population = population(6, 1.0);
    config.seed = 17;
    config.protocol.qual_min_scored = 5;
    const auto t = run_simulation(config);
    CHECK(t.summary.truth_agreement == 1.0);
    CHECK(t.summary.settled > 0);
    for (const auto& [id, image] : t.state.images) {
        if (image.consensus.status == ImageStatus::Settled) CHECK(*image.consensus.settled_label == t.truth.at(id));
    }
}

TEST_CASE("empty population settles nothing") {
    SimConfig config;
    config.n_images = 10;
    const auto t = run_simulation(config);
    CHECK(t.summary.settlement_rate == 0.0);
    CHECK(t.summary.submissions == 0);
    CHECK_FALSE(t.summary.truth_agreement.has_value());
    CHECK(t.summary.n_images == 10);
}

TEST_CASE("summary equals a recount of the final state") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        SimConfig config;
        config.n_images = 30;
        config.gold_fraction = 0.3;
        config.seed = seed;
        config.protocol.qual_min_scored = 6;
        config.protocol.qual_window = 12;
        config.max_submissions = seed % 3 == 0 ? 120 : 0;
        for (int i = 0; i < 8; ++i)
            config.population.push_back({"m" + std::to_string(i), off_by_one_kernel(0.3 + 0.08 * i), 0.5 + 0.25 * (i % 3)});
        const auto t = run_simulation(config);
        const auto expected = recount(t);
        CHECK(t.summary == expected);
        CHECK(summarize(t) == t.summary);
        if (config.max_submissions == 120) CHECK(t.summary.submissions <= 120);
    }
}

TEST_CASE("simulation is deterministic and its log replays") {
    SimConfig config;
    config.n_images = 25;
    config.gold_fraction = 0.4;
    config.seed = 5;
    config.population = population(7, 0.7);
    config.protocol.qual_min_scored = 5;
    const auto a = run_simulation(config);
    const auto b = run_simulation(config);
    CHECK(a.events == b.events);
    CHECK(consensus::replay(a.events, config.protocol) == a.state);
    config.seed = 6;
    CHECK(run_simulation(config).events != a.events);
}

TEST_CASE("arrival rates shape the schedule") {
    SimConfig config;
    config.n_images = 400;
    config.seed = 2;
    config.max_submissions = 300;
    config.population = {{"fast", off_by_one_kernel(0.5), 3.0}, {"slow", off_by_one_kernel(0.5), 1.0}};
    const auto t = run_simulation(config);
    std::map<std::string, int> per;
    for (const auto& a : t.state.annotations) ++per[a.annotator_id];
    CHECK(per["fast"] == 225);
    CHECK(per["slow"] == 75);
    CHECK(t.summary.budget_exhausted);
}

TEST_CASE("slow annotators keep working after fast ones run out") {
    SimConfig config;
    config.n_images = 10;
    config.seed = 4;
    config.population = {{"fast", off_by_one_kernel(0.5), 4.0}, {"slow", off_by_one_kernel(0.5), 1.0}};
    const auto t = run_simulation(config);
    CHECK(t.summary.submissions == 20);
    CHECK_FALSE(t.summary.budget_exhausted);
}

TEST_CASE("qualification dynamics over 1000 seeds") {
    int strong = 0, weak = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        strong += qualifies(0.6, seed);
        weak += qualifies(0.2, seed + 100000);
    }
    MESSAGE("p=0.6 qualified " << strong << "/1000, p=0.2 qualified " << weak << "/1000");
    CHECK(strong >= 950);
    CHECK(weak <= 50);
}

TEST_CASE("better annotators never lower expected truth agreement") {
    double previous = 0.0;
    for (double p : {0.45, 0.6, 0.75, 0.9}) {
        double total = 0.0;
        int counted = 0;
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            SimConfig config;
            config.n_images = 40;
            config.gold_fraction = 0.5;
            config.seed = seed;
            config.population = population(8, p);
            config.protocol.qual_min_scored = 8;
            const auto t = run_simulation(config);
            if (t.summary.truth_agreement) {
                total += *t.summary.truth_agreement;
                ++counted;
            }
        }
        REQUIRE(counted > 0);
        const double mean = total / counted;
        MESSAGE("p=" << p << " mean truth agreement " << mean);
        CHECK(mean >= previous);
        previous = mean;
    }
}

TEST_CASE("simulated pools echo the crowd-size plateau") {
    const auto truth = random_truth(80, 4);
    std::vector<AnnotatorSpec> crowd;
    for (int i = 0; i < 20; ++i) crowd.push_back({"c" + std::to_string(i), off_by_one_kernel(0.3 + 0.02 * i), 1.0});
    const auto pool = simulate_pool(truth, crowd, 96, 9);
    stats::CrowdCurveOptions options;
    options.seed = 3;
    const auto curve = stats::bootstrap_crowd_curve(pool, truth, options);
    REQUIRE(curve.size() == 6);
    CHECK(curve[2].mean_rho > curve[0].mean_rho);
    CHECK(std::abs(curve[5].mean_rho - curve[4].mean_rho) < std::abs(curve[2].mean_rho - curve[0].mean_rho));
}

TEST_CASE("simulation config json") {
    const auto doc = nlohmann::json::parse(R"({
        "n_images": 12, "gold_fraction": 0.25, "seed": 8,
        "population": [{"annotator_id": "a", "match_probability": 0.7},
                       {"annotator_id": "b", "arrival_rate": 2.0}],
        "protocol": {"lead_margin": 2}
    })");
    const auto config = sim_config_from_json(doc);
    CHECK(config.n_images == 12);
    CHECK(config.population.size() == 2);
    CHECK(config.population[0].kernel[2][2] == 0.7);
    CHECK(config.population[1].arrival_rate == 2.0);
    CHECK(config.protocol.lead_margin == 2);
    const auto round = sim_config_from_json(to_json(config));
    CHECK(round.population[0].kernel == config.population[0].kernel);
    CHECK(round.seed == 8);
    CHECK_THROWS_AS(sim_config_from_json(nlohmann::json::parse(R"({"gold_fraction": 1.5})")), Error);
    CHECK_THROWS_AS(sim_config_from_json(nlohmann::json::parse(
                        R"({"population": [{"annotator_id": "a", "kernel": [[1,0,0,0,0,0,0]]}]})")),
                    Error);
}
