#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "qxtalk/attack.hpp"
#include "qxtalk/grover.hpp"
#include "qxtalk/sim.hpp"

using namespace qxtalk;

namespace {

const DurationTable kDur = DurationTable::defaults();

std::vector<const TimedInstruction*> of_kind(const ScheduledCircuit& s, GateKind k) {
    std::vector<const TimedInstruction*> out;
    for (const auto& ti : s.timed())
        if (ti.inst.gate.kind == k) out.push_back(&ti);
    return out;
}

// Time covered on q by instructions of any kind.
Nanos covered(const ScheduledCircuit& s, int q) {
    Nanos t = 0;
    for (const auto& ti : s.timed())
        if (std::count(ti.inst.qubits.begin(), ti.inst.qubits.end(), q)) t += ti.duration;
    return t;
}

}  // namespace

TEST(TrailSlots, CentresFollowArithmetic) {
    for (int n : {1, 2, 7, 45}) {
        const Nanos width = 29700 + 37 * n;
        const auto starts = trail_slot_starts(n, 60, width, 660);
        ASSERT_EQ(starts.size(), static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double centre = 60 + static_cast<double>(width) * (2 * i + 1) / (2.0 * n);
            EXPECT_LE(std::abs(static_cast<double>(starts[static_cast<std::size_t>(i)]) + 330 - centre), 0.5);
        }
    }
    EXPECT_TRUE(trail_slot_starts(0, 0, 100, 660).empty());
    EXPECT_THROW(trail_slot_starts(2, 0, 1000, 660), std::invalid_argument);
}

TEST(AttackTrail, ZeroGatesIsOneDelay) {
    const auto s = build_attack_trail({0, ControlInit::Zero, {0, 1}}, 5000, kDur);
    ASSERT_EQ(s.timed().size(), 2u);
    for (const auto& ti : s.timed()) {
        EXPECT_EQ(ti.inst.gate, Gate::delay_for(5000));
        EXPECT_EQ(ti.start, 0);
    }
}

TEST(AttackTrail, SingleGateAtMidpoint) {
    const auto s = build_attack_trail({1, ControlInit::Zero, {0, 1}}, 10000, kDur);
    const auto cx = of_kind(s, GateKind::CX);
    ASSERT_EQ(cx.size(), 1u);
    EXPECT_EQ(cx[0]->start + cx[0]->duration / 2, 5000);
}

TEST(AttackTrail, FullTrailSpacingAndSymmetry) {
    const Nanos window = 45 * 660 + 60 + 1800;
    for (ControlInit init : {ControlInit::Zero, ControlInit::One, ControlInit::Plus}) {
        const auto s = build_attack_trail({45, init, {2, 1}}, window, kDur);
        EXPECT_NO_THROW(s.check_disjoint());
        EXPECT_EQ(s.total_duration(), window);
        const Nanos prep = init == ControlInit::Zero ? 0 : 60;
        const auto cx = of_kind(s, GateKind::CX);
        ASSERT_EQ(cx.size(), 45u);
        const double spacing = static_cast<double>(window - prep) / 45.0;
        const double mid = prep + (window - prep) / 2.0;
        for (std::size_t i = 0; i < cx.size(); ++i) {
            EXPECT_EQ(cx[i]->inst.qubits, (std::vector<int>{2, 1}));
            const double c = cx[i]->start + 330.0;
            if (i > 0) {
                EXPECT_GT(cx[i]->start, cx[i - 1]->start);
                EXPECT_LE(std::abs(c - (cx[i - 1]->start + 330.0) - spacing), 1.0);
            }
            const double mirror = cx[cx.size() - 1 - i]->start + 330.0;
            EXPECT_LE(std::abs((c - mid) + (mirror - mid)), 1.0);
        }
        // Every nanosecond of the window is accounted for on both qubits.
        EXPECT_EQ(covered(s, 1), window);
        EXPECT_EQ(covered(s, 2), window);
        const auto preps = of_kind(s, init == ControlInit::Plus ? GateKind::H : GateKind::X);
        EXPECT_EQ(preps.size(), init == ControlInit::Zero ? 0u : 1u);
    }
    EXPECT_THROW(build_attack_trail({45, ControlInit::Zero, {0, 1}}, 45 * 660 - 1, kDur), std::invalid_argument);
}

TEST(Placebo, SameSupportAsTrail) {
    for (int n : {0, 1, 13, 45}) {
        const Nanos window = 31000;
        const auto trail = build_attack_trail({n, ControlInit::Zero, {0, 1}}, window, kDur);
        const auto placebo = build_placebo({n, ControlInit::Zero, {0, 1}}, window, kDur);
        EXPECT_TRUE(of_kind(placebo, GateKind::CX).empty());
        std::vector<std::pair<Nanos, Nanos>> a, b;
        for (const auto* t : of_kind(trail, GateKind::CX)) a.emplace_back(t->start, t->end());
        for (const auto& t : placebo.timed())
            if (t.inst.qubits[0] == 0 && t.duration == 660) b.emplace_back(t.start, t.end());
        if (n > 0) EXPECT_EQ(a, b);
        EXPECT_EQ(covered(placebo, 0), window);
        EXPECT_EQ(covered(placebo, 1), window);
    }
}

TEST(Compose, CountsAndCollisions) {
    const Preset e = layout_preset("e", false);
    const auto victim = schedule(build_grover(GroverSpec{}), kDur);
    std::vector<ScheduledCircuit> frags;
    std::size_t parts = victim.timed().size();
    for (const auto& pair : e.layout.attackers) {
        frags.push_back(build_attack_trail({5, ControlInit::Plus, pair}, 30000, kDur));
        parts += frags.back().timed().size();
    }
    const auto all = compose(victim, frags, e.layout);
    EXPECT_EQ(all.timed().size(), parts);
    EXPECT_EQ(all.total_duration(), 30000);
    EXPECT_NO_THROW(all.check_disjoint());

    const auto alone = compose(victim, {}, e.layout);
    EXPECT_EQ(alone.timed().size(), victim.timed().size());
    EXPECT_EQ(alone.total_duration(), victim.total_duration());
    for (std::size_t i = 0; i < victim.timed().size(); ++i) {
        EXPECT_EQ(alone.timed()[i].inst.qubits[0], e.layout.victim[static_cast<std::size_t>(victim.timed()[i].inst.qubits[0])]);
    }

    std::vector<ScheduledCircuit> clash{build_attack_trail({1, ControlInit::Zero, {e.layout.victim[0], e.layout.attackers[0].control}}, 30000, kDur)};
    EXPECT_THROW(compose(victim, clash, e.layout), std::invalid_argument);
    std::vector<ScheduledCircuit> twice{frags[0], frags[0]};
    EXPECT_THROW(compose(victim, twice, e.layout), std::invalid_argument);
}

TEST(Compose, PlaceboIsLogicalIdentity) {
    const Preset a = layout_preset("a", false);
    const auto victim = schedule(build_grover(GroverSpec{}), kDur);
    const auto want = exact_distribution(victim);
    for (int n : {0, 1, 20, 45}) {
        const auto placebo = build_placebo({n, ControlInit::Zero, a.layout.attackers[0]}, 30000, kDur);
        EXPECT_LE(total_variation(exact_distribution(compose(victim, {placebo}, a.layout)), want), 1e-12);
    }
}

TEST(Compose, AttackOnlyActsThroughNoise) {
    // kappa = 1 and no other noise: static ZZ is the same with and without
    // the trail, and a |0> control leaves the target alone.
    const Preset a = layout_preset("a", false, 30e3, 0.05);
    const auto victim = schedule(build_grover(GroverSpec{}), kDur);
    NoiseModel noise;
    noise.kappa = 1.0;
    for (int n : {0, 10, 45}) {
        const AttackSpec spec{n, ControlInit::Zero, a.layout.attackers[0]};
        const auto placebo = compose(victim, {build_placebo(spec, 30000, kDur)}, a.layout);
        const auto trail = compose(victim, {build_attack_trail(spec, 30000, kDur)}, a.layout);
        const Counts c1 = simulate(placebo, a.map, noise, 4000, 77, {1});
        const Counts c2 = simulate(trail, a.map, noise, 4000, 77, {1});
        EXPECT_EQ(c1.histogram, c2.histogram) << n;
    }
}
