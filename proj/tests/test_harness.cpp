#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "qxtalk/harness.hpp"

using namespace qxtalk;

namespace {

ExperimentConfig small_config(int scenario, Mitigation m = Mitigation::None) {
    ExperimentConfig cfg;
    cfg.scenario = scenario;
    cfg.mitigation = m;
    cfg.n_cnot_max = 4;
    cfg.shots = 64;
    cfg.batches = 3;
    cfg.seed = 5;
    return cfg;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentRecord rec(int scenario, const std::string& mitigation, int n, int batch, double f) {
    ExperimentRecord r;
    r.scenario = scenario;
    r.layout = "a";
    r.mitigation = mitigation;
    r.control_init = "0";
    r.n_cnot = n;
    r.batch = batch;
    r.seed = 100 + static_cast<std::uint64_t>(batch);
    r.shots = 1024;
    r.p_marked = f * 0.9;
    r.fidelity = f;
    return r;
}

}  // namespace

TEST(Config, Validation) {
    EXPECT_NO_THROW(small_config(1).validate());
    EXPECT_THROW(small_config(1, Mitigation::DDXX).validate(), ConfigError);
    EXPECT_THROW(small_config(2, Mitigation::Buffer).validate(), ConfigError);
    EXPECT_THROW(small_config(3).validate(), ConfigError);
    auto cfg = small_config(4);
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = small_config(1);
    cfg.shots = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = small_config(1);
    cfg.layout = "q";
    EXPECT_THROW(cfg.validate(), ConfigError);
    EXPECT_EQ(mitigation_from_string("dd-xyxy"), Mitigation::DDXYXY);
    EXPECT_THROW(mitigation_from_string("dd"), ConfigError);
}

TEST(AttackWindow, CoversVictimAndLongestTrail) {
    ExperimentConfig cfg;
    EXPECT_EQ(attack_window(cfg, 40000), 40000);
    EXPECT_EQ(attack_window(cfg, 1000), 60 + 45 * 660);
    cfg.window_ns = 50000;
    EXPECT_EQ(attack_window(cfg, 1000), 50000);
    cfg.window_ns = 1000;
    EXPECT_THROW(attack_window(cfg, 1000), ConfigError);
}

TEST(BuildCell, ShapesPerScenario) {
    const Cell plain = build_cell(small_config(1), 3);
    const Cell attack = build_cell(small_config(2), 3);
    const Cell dd = build_cell(small_config(3, Mitigation::DDXYXY), 3);
    const Cell buffer = build_cell(small_config(3, Mitigation::Buffer), 3);
    auto count = [](const Cell& c, GateKind k) {
        int n = 0;
        for (const auto& ti : c.circuit.timed()) n += ti.inst.gate.kind == k;
        return n;
    };
    EXPECT_EQ(count(plain, GateKind::CX), 24);
    EXPECT_EQ(count(attack, GateKind::CX), 27);
    EXPECT_EQ(count(buffer, GateKind::CX), 27);
    EXPECT_GT(count(dd, GateKind::Y), 0);
    EXPECT_EQ(count(attack, GateKind::Y), 0);
    EXPECT_FALSE(attack.preset.layout.buffered());
    EXPECT_TRUE(buffer.preset.layout.buffered());
    for (const Cell* c : {&plain, &attack, &dd, &buffer}) EXPECT_NO_THROW(c->circuit.check_disjoint());
}

TEST(RunScenario, RecordsAndDeterminism) {
    const auto cfg = small_config(2);
    const auto one = run_scenario(cfg, {1, {}});
    ASSERT_EQ(one.size(), 15u);
    for (std::size_t i = 0; i < one.size(); ++i) {
        EXPECT_EQ(one[i].n_cnot, static_cast<int>(i / 3));
        EXPECT_EQ(one[i].batch, static_cast<int>(i % 3));
        EXPECT_EQ(one[i].seed, one[i % 3].seed);
        EXPECT_GE(one[i].fidelity, 0.0);
        EXPECT_LE(one[i].fidelity, 1.0 + 1e-12);
    }
    EXPECT_EQ(records_to_csv(run_scenario(cfg, {3, {}})), records_to_csv(one));
    const auto some = run_scenario(cfg, {1, {4, 0}});
    ASSERT_EQ(some.size(), 6u);
    EXPECT_EQ(some[0].n_cnot, 4);
    EXPECT_EQ(records_to_csv({some[3], some[4], some[5]}), records_to_csv({one[0], one[1], one[2]}));
    EXPECT_THROW(run_scenario(cfg, {1, {5}}), ConfigError);
}

TEST(RunScenario, NoAttackIgnoresControlInit) {
    auto cfg = small_config(1);
    const auto zero = run_scenario(cfg, {1, {0, 4}});
    cfg.control_init = ControlInit::Plus;
    auto plus = run_scenario(cfg, {1, {0, 4}});
    ASSERT_EQ(plus.size(), zero.size());
    for (std::size_t i = 0; i < plus.size(); ++i) {
        EXPECT_EQ(plus[i].control_init, "+");
        EXPECT_EQ(plus[i].fidelity, zero[i].fidelity);
    }
}

TEST(Aggregate, MeanAndSampleStd) {
    const std::vector<ExperimentRecord> rs{rec(2, "none", 0, 0, 0.5), rec(2, "none", 0, 1, 0.7), rec(2, "none", 0, 2, 0.9),
                                           rec(2, "none", 1, 0, 0.4)};
    const auto rows = aggregate(rs);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].count, 3);
    EXPECT_NEAR(rows[0].mean_fidelity, 0.7, 1e-12);
    EXPECT_NEAR(rows[0].std_fidelity, 0.2, 1e-12);
    EXPECT_NEAR(rows[0].mean_p_marked, 0.63, 1e-12);
    EXPECT_EQ(rows[1].count, 1);
    EXPECT_EQ(rows[1].std_fidelity, 0.0);
}

TEST(Csv, HeaderAndRoundTrip) {
    EXPECT_EQ(csv_header(), "scenario,layout,mitigation,control_init,n_cnot,batch,seed,shots,p_marked,fidelity");
    const std::vector<ExperimentRecord> rs{rec(1, "none", 0, 0, 0.61), rec(3, "dd-xx", 45, 1, 0.123456789)};
    const std::string text = records_to_csv(rs);
    EXPECT_EQ(text.substr(0, text.find('\n')), csv_header());
    const auto back = records_from_csv(text);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].mitigation, "dd-xx");
    EXPECT_EQ(back[1].n_cnot, 45);
    EXPECT_EQ(back[1].seed, 101u);
    EXPECT_EQ(back[1].fidelity, 0.123456789);
    EXPECT_EQ(records_to_csv(back), text);
    EXPECT_THROW(records_from_csv("a,b\n1,2\n"), ConfigError);
    EXPECT_THROW(records_from_csv(csv_header() + "\n1,a,none,0,x,0,1,1,0.5,0.5\n"), ConfigError);
}

TEST(Svg, MatchesGolden) {
    std::vector<ExperimentRecord> rs;
    for (int n = 0; n <= 4; ++n) {
        for (int b = 0; b < 2; ++b) {
            rs.push_back(rec(1, "none", n, b, 0.66 + 0.01 * b));
            rs.push_back(rec(2, "none", n, b, 0.66 - 0.05 * n + 0.02 * b));
            rs.push_back(rec(3, "dd-xyxy", n, b, 0.7 - 0.005 * n));
            rs.push_back(rec(3, "buffer", n, b, 0.64 - 0.01 * n - 0.03 * b));
        }
    }
    const std::string svg = render_svg(aggregate(rs));
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_EQ(svg, read_text(std::string(QXTALK_TEST_DATA) + "/golden.svg"));
}

TEST(JsonConfig, ExperimentsMergeOverBase) {
    const auto cfgs = experiments_from_json(R"({
        "layout": "d", "batches": 2, "shots": 100, "seed": 9,
        "noise": {"zz_hz": 1000, "kappa": 2},
        "durations": {"cx": 500},
        "experiments": [
            {"scenario": 1},
            {"scenario": 3, "mitigation": "buffer", "control_init": "+", "layout": "e", "noise": {"p2": 0.01}}
        ]})",
                                            ".");
    ASSERT_EQ(cfgs.size(), 2u);
    EXPECT_EQ(cfgs[0].layout, "d");
    EXPECT_EQ(cfgs[0].batches, 2);
    EXPECT_EQ(cfgs[0].noise.zz_hz, 1000.0);
    EXPECT_EQ(cfgs[0].noise.noise.kappa, 2.0);
    EXPECT_EQ(cfgs[0].durations.duration(Gate{GateKind::CX}), 500);
    EXPECT_EQ(cfgs[1].layout, "e");
    EXPECT_EQ(cfgs[1].mitigation, Mitigation::Buffer);
    EXPECT_EQ(cfgs[1].control_init, ControlInit::Plus);
    EXPECT_EQ(cfgs[1].noise.noise.p2, 0.01);
    EXPECT_EQ(cfgs[1].noise.zz_hz, default_noise_config().zz_hz);
    EXPECT_EQ(cfgs[1].seed, 9u);
}

TEST(JsonConfig, NoiseFileIsRelative) {
    const auto cfgs = experiments_from_json(R"({"noise_file": "noise.json"})", QXTALK_TEST_DATA);
    ASSERT_EQ(cfgs.size(), 1u);
    EXPECT_EQ(cfgs[0].noise.zz_hz, 20000.0);
    EXPECT_THROW(experiments_from_json(R"({"noise_file": "missing.json"})", QXTALK_TEST_DATA), ConfigError);
}

TEST(JsonConfig, Errors) {
    EXPECT_THROW(experiments_from_json("{", "."), ConfigError);
    EXPECT_THROW(experiments_from_json(R"({"shots": 10, "colour": 1})", "."), ConfigError);
    EXPECT_THROW(experiments_from_json(R"({"scenario": 2, "mitigation": "dd-xx"})", "."), ConfigError);
    EXPECT_THROW(experiments_from_json(R"({"control_init": "2"})", "."), ConfigError);
    EXPECT_THROW(experiments_from_json(R"({"durations": {"ccx": 5}})", "."), ConfigError);
    EXPECT_THROW(experiments_from_json(R"({"experiments": []})", "."), ConfigError);
    EXPECT_THROW(experiments_from_json(R"({"noise": {"kappa": 0}})", "."), ConfigError);
    EXPECT_THROW(experiments_from_json(R"({"shots": "many"})", "."), ConfigError);
}
