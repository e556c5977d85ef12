#include "doctest.h"

#include <atomic>
#include <filesystem>
#include <sstream>

#include "biconf/config.hpp"
#include "biconf/errors.hpp"
#include "biconf/parallel.hpp"
#include "biconf/report.hpp"
#include "biconf/sampling.hpp"
#include "biconf/verifier.hpp"
#include "support.hpp"

using namespace biconf;
using namespace biconf::testing;
using nlohmann::json;

namespace {

json inversion_doc(int m, const std::string& target = "flat") {
    json zeros = json::array();
    for (int i = 0; i < m; ++i) {
        zeros.push_back("0");
    }
    return json{{"name", "inv"},
                {"domain", {{"model", "flat"}, {"dim", m}}},
                {"target", {{"model", target}, {"dim", m}}},
                {"map", {{"a", zeros}, {"b", zeros}, {"k", "1"}, {"epsilon", 2}}},
                {"sample", {{"seed", 3}, {"count", 6}}}};
}

std::size_t count_lines(const std::string& s) {
    return static_cast<std::size_t>(std::ranges::count(s, '\n'));
}

}  // namespace

TEST_CASE("biharmonic verdict rules") {
    CHECK(biharmonic_verdict(20, 0, 20, 20) == "harmonic");
    CHECK(biharmonic_verdict(20, 0, 20, 3) == "proper-biharmonic");
    CHECK(biharmonic_verdict(20, 0, 0, 0) == "not-biharmonic");
    CHECK(biharmonic_verdict(20, 0, 1, 0) == "not-biharmonic");   // 19 >= ceil(0.95 * 20)
    CHECK(biharmonic_verdict(20, 0, 2, 0) == "indeterminate");    // 18 < 19
    CHECK(biharmonic_verdict(20, 1, 20, 0) == "inconsistent");
    CHECK(biharmonic_verdict(0, 0, 0, 0) == "indeterminate");
}

TEST_CASE("polyharmonic verdict rules") {
    CHECK(polyharmonic_verdict(5, {5, 5, 5}) == "harmonic");
    CHECK(polyharmonic_verdict(5, {0, 5, 5}) == "proper-2-polyharmonic");
    CHECK(polyharmonic_verdict(5, {0, 0, 5}) == "proper-3-polyharmonic");
    CHECK(polyharmonic_verdict(5, {0, 0, 0}) == "not-3-polyharmonic");
    CHECK(polyharmonic_verdict(20, {0, 0, 2}) == "indeterminate");
}

TEST_CASE("expected classification") {
    CHECK(expected_biharmonic_verdict(4, 0, 0, 2) == "proper-biharmonic");
    CHECK(expected_biharmonic_verdict(4, 0, 0, 0) == "harmonic");
    CHECK(expected_biharmonic_verdict(5, 0, 0, 0) == "harmonic");
    CHECK(expected_biharmonic_verdict(5, 0, 0, 2) == "not-biharmonic");
    CHECK(expected_biharmonic_verdict(4, 0, 1, 0) == "proper-biharmonic");
    CHECK(expected_biharmonic_verdict(4, 0, -1, 2) == "proper-biharmonic");
    CHECK(expected_biharmonic_verdict(4, 1, 0, 2) == "not-biharmonic");
    CHECK(expected_biharmonic_verdict(4, -1, -1, 0) == "not-biharmonic");
    CHECK(expected_biharmonic_verdict(3, 0, 1, 2) == "not-biharmonic");
    for (int m = 3; m <= 12; ++m) {
        for (int k = 1; k <= 5; ++k) {
            CHECK(expected_polyharmonic_zero(m, k) == (m % 2 == 0 && m <= 2 * k));
            CHECK(expected_polyharmonic_proper(m, k) == (m == 2 * k));
        }
    }
}

TEST_CASE("config parsing") {
    const auto cfgs = parse_config(inversion_doc(4));
    REQUIRE(cfgs.size() == 1);
    CHECK(cfgs[0].name == "inv");
    CHECK(cfgs[0].plan.seed == 3);
    CHECK(cfgs[0].plan.count == 6);
    CHECK(cfgs[0].instance.map.epsilon == 2);
    CHECK(json_rational(json("-3/6"), "x") == q(-1, 2));
    CHECK(json_rational(json(7), "x") == 7);

    auto bad = inversion_doc(4);
    bad["map"]["epsilon"] = 1;
    CHECK_THROWS_AS(parse_config(bad), ConfigError);

    bad = inversion_doc(4, "hyperbolic");
    bad["map"]["b"] = json::array({"1", "0", "0", "0"});
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad["map"]["epsilon"] = 0;
    CHECK_NOTHROW(parse_config(bad));

    bad = inversion_doc(4);
    bad["colour"] = "blue";
    CHECK_THROWS_AS(parse_config(bad), ConfigError);

    for (const auto* text : {"1/0", "a/b", "1.5", "", "2/-3x"}) {
        bad = inversion_doc(4);
        bad["map"]["k"] = text;
        CHECK_THROWS_AS(parse_config(bad), ConfigError);
    }
    bad = inversion_doc(4);
    bad["map"]["k"] = "0";
    CHECK_THROWS_AS(parse_config(bad), ConfigError);

    bad = inversion_doc(4);
    bad["map"]["a"] = json::array({"0", "0", "0"});
    CHECK_THROWS_AS(parse_config(bad), ConfigError);

    bad = inversion_doc(4);
    bad["target"]["dim"] = 5;
    CHECK_THROWS_AS(parse_config(bad), ConfigError);

    // Cayley data must be skew.
    bad = inversion_doc(2);
    bad["map"]["A"] = {{"kind", "cayley"}, {"data", json::array({json::array({"0", "1"}), json::array({"1", "0"})})}};
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad["map"]["A"] = {{"kind", "cayley"}, {"data", json::array({json::array({"0", "1"}), json::array({"-1", "0"})})}};
    CHECK_NOTHROW(parse_config(bad));

    CHECK(parse_orthogonal(json{{"kind", "permutation"}, {"data", {{"perm", {1, 0}}, {"signs", {1, -1}}}}}, 2)
              .is_orthogonal());
    CHECK_THROWS_AS(parse_orthogonal(json{{"kind", "permutation"}, {"data", {{"perm", {0, 0}}, {"signs", {1, 1}}}}}, 2),
                    ConfigError);

    bad = inversion_doc(4);
    bad["check"] = {{"kind", "polyharmonic"}, {"order", 2}};
    CHECK(parse_config(bad)[0].check == CheckKind::polyharmonic);
    bad = inversion_doc(4, "sphere");
    bad["check"] = {{"kind", "polyharmonic"}, {"order", 2}};
    CHECK_THROWS_AS(parse_config(bad), ConfigError);

    CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("shipped configs parse") {
    const std::filesystem::path root = BICONF_SOURCE_DIR;
    CHECK(load_config(root / "configs" / "flat_inversion_m4.json").size() == 1);
    CHECK(load_config(root / "configs" / "classification_examples.json").size() == 5);
}

TEST_CASE("sampling") {
    const auto inst = parse_config(inversion_doc(3))[0].instance;
    SamplePlan plan;
    plan.seed = 99;
    plan.count = 30;
    const auto a = sample_points(plan, inst);
    const auto b = sample_points(plan, inst);
    CHECK(a == b);
    CHECK(a.size() == 30);
    for (const auto& x : a) {
        CHECK(squared(x) >= plan.exclusion * plan.exclusion);
        CHECK(squared(x) < plan.radius * plan.radius);
        CHECK(admissible(inst, x, plan.exclusion));
    }
    plan.seed = 100;
    CHECK(sample_points(plan, inst) != a);

    // The exclusion ball swallows the sampling ball.
    plan.radius = q(1, 8);
    CHECK_THROWS_AS(sample_points(plan, inst), SamplingError);

    Rng r1(5);
    Rng r2(5);
    for (int i = 0; i < 50; ++i) {
        CHECK(r1.between(-3, 3) == r2.between(-3, 3));
    }
    Rng r3(8);
    for (int i = 0; i < 50; ++i) {
        const auto v = r3.positive_rational(q(1, 2), 9);
        CHECK(sgn(v) > 0);
        CHECK(v <= q(1, 2));
    }
    CHECK(mix_seed(1, {2, 3}) != mix_seed(1, {3, 2}));
}

TEST_CASE("explicit points, skipped points and verdicts") {
    auto doc = inversion_doc(4);
    doc["sample"] = {{"points", {{"1", "0", "0", "0"}, {"0", "0", "0", "0"}, {"1/2", "1/3", "0", "-1"}}}};
    doc["expect"] = "proper-biharmonic";
    const auto cfgs = parse_config(doc);
    const auto rep = run_instance(cfgs[0], RunOptions{});
    CHECK(rep.points.size() == 2);
    REQUIRE(rep.skipped.size() == 1);
    CHECK(rep.skipped[0].index == 1);
    CHECK(rep.verdict == "proper-biharmonic");
    CHECK(rep.match);
    for (const auto& p : rep.points) {
        CHECK(p.nd_equals_sdl);
        CHECK(p.nd2_equals_minus_sdl);
        CHECK(p.sdl.zero);
    }
}

TEST_CASE("classification examples in both modes") {
    const auto cfgs = load_config(std::filesystem::path(BICONF_SOURCE_DIR) / "configs" / "classification_examples.json");
    for (auto mode : {Mode::exact, Mode::floating}) {
        const auto rep = run_check(cfgs, RunOptions{mode, 1e-9});
        CHECK(rep.all_match());
        for (const auto& inst : rep.instances) {
            CHECK(inst.skipped.empty());
        }
    }
}

TEST_CASE("reports are byte-stable and well-formed") {
    const auto cfgs = parse_config(inversion_doc(5, "sphere"));
    const auto r1 = run_check(cfgs, RunOptions{});
    const auto r2 = run_check(cfgs, RunOptions{});
    for (auto fmt : {ReportFormat::json, ReportFormat::csv, ReportFormat::table}) {
        CHECK(render(r1, fmt) == render(r2, fmt));
    }
    const auto j = json::parse(render(r1, ReportFormat::json));
    CHECK(j["command"] == "check");
    CHECK(j["mode"] == "exact");
    CHECK(j["method"] == kMethodNote);
    CHECK_FALSE(j.contains("seconds"));
    CHECK(j["instances"][0]["verdict"] == "not-biharmonic");
    CHECK(count_lines(render(r1, ReportFormat::csv)) == 1 + r1.instances[0].points.size());

    BiharmonicSweepOptions sweep;
    sweep.m_min = 4;
    sweep.m_max = 4;
    sweep.trials = 1;
    sweep.points = 3;
    const auto s1 = sweep_biharmonic(sweep, RunOptions{});
    const auto s2 = sweep_biharmonic(sweep, RunOptions{});
    CHECK(render(s1, ReportFormat::json) == render(s2, ReportFormat::json));
    CHECK(s1.cells.size() == 18);
    CHECK(s1.all_match());
    CHECK(count_lines(render(s1, ReportFormat::csv)) == 19);

    PolySweepOptions poly;
    poly.k_max = 2;
    poly.m_min = 3;
    poly.m_max = 6;
    const auto p = sweep_polyharmonic(poly, RunOptions{});
    CHECK(p.cells.size() == 8);
    CHECK(p.all_match());
    CHECK(render(p, ReportFormat::csv) == render(sweep_polyharmonic(poly, RunOptions{}), ReportFormat::csv));

    CHECK(parse_format("csv") == ReportFormat::csv);
    CHECK(format_extension(ReportFormat::table) == "txt");
    CHECK_THROWS(parse_format("xml"));
}

TEST_CASE("selftest passes and rejects a tolerance at the roundoff floor") {
    CHECK(selftest(RunOptions{}).passed());
    CHECK(selftest(RunOptions{Mode::floating, 1e-9}).passed());
    CHECK_FALSE(selftest(RunOptions{Mode::floating, 1e-15}).passed());
}

TEST_CASE("parallel_for covers every index and rethrows the first failure") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
    CHECK(std::ranges::all_of(hits, [](int h) { return h == 1; }));

    std::atomic<int> ran{0};
    try {
        parallel_for(
            100,
            [&](std::size_t i) {
                ++ran;
                if (i == 17 || i == 60) {
                    throw std::runtime_error("fail " + std::to_string(i));
                }
            },
            3);
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "fail 17");
    }
    CHECK(ran == 100);
}
