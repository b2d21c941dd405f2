#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "oracle.hpp"
#include "qxtalk/grover.hpp"
#include "qxtalk/qasm.hpp"
#include "qxtalk/sim.hpp"

using namespace qxtalk;

namespace {

const DurationTable kDur = DurationTable::defaults();

CouplingMap chain(int n, double zz_hz) {
    CouplingMap m(n, 0.05);
    for (int q = 0; q + 1 < n; ++q) m.add_edge(q, q + 1, zz_hz);
    return m;
}

double three_sigma(double p, double shots) { return 3.0 * std::sqrt(p * (1 - p) / shots); }

}  // namespace

TEST(Statevector, BasicGates) {
    Statevector psi(2);
    psi.apply_gate(Gate{GateKind::H}, std::vector<int>{0});
    psi.apply_cx(0, 1);
    const auto p = psi.probabilities();
    EXPECT_NEAR(p[0], 0.5, 1e-15);
    EXPECT_NEAR(p[3], 0.5, 1e-15);
    EXPECT_NEAR(psi.probability_one(1), 0.5, 1e-15);
    psi.collapse(1, 1, 0.5);
    EXPECT_NEAR(psi.probabilities()[3], 1.0, 1e-15);
    EXPECT_NEAR(psi.norm_squared(), 1.0, 1e-15);
    EXPECT_THROW(Statevector(27), SimulationError);
}

TEST(Simulate, NoiselessGrover) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = schedule(build_grover(GroverSpec{}), kDur);
    const Counts c = simulate(s, chain(3, 0.0), NoiseModel{}, 100000, 2024);
    const double p = 121.0 / 128.0;
    EXPECT_EQ(c.shots, 100000u);
    EXPECT_NEAR(marked_probability(c, "111"), p, three_sigma(p, 1e5));
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 5.0);
}

TEST(Simulate, EmptyCircuit) {
    const Counts c = simulate(ScheduledCircuit(2, 2, {}), chain(2, 0.0), NoiseModel{}, 10, 1);
    EXPECT_EQ(c.count("00"), 10u);
    EXPECT_EQ(c.to_map().size(), 1u);
}

TEST(Simulate, StaticZzQuarterCycle) {
    // |+> next to a |1> spectator for nu*T = 0.25 comes back to |+> half the time.
    Circuit c(2, 1);
    c.h(0).x(1).delay(4940, 0).h(0).measure(0, 0);
    const auto s = schedule(c, kDur);
    const Counts counts = simulate(s, chain(2, 50e3), NoiseModel{}, 40000, 5);
    EXPECT_NEAR(counts.distribution()[0], 0.5, three_sigma(0.5, 40000));

    Circuit zero(2, 1);
    zero.h(0).delay(4940, 0).h(0).measure(0, 0);
    const Counts none = simulate(schedule(zero, kDur), chain(2, 50e3), NoiseModel{}, 1000, 5);
    // Spectator in |0>: phase -pi/2 on |1> only, so the outcome is still 50/50
    // but from the opposite sign of the field.
    EXPECT_NEAR(none.distribution()[0], 0.5, three_sigma(0.5, 1000));
}

TEST(Simulate, NormPreservedUnderNoise) {
    NoiseModel noise;
    noise.detuning_sigma_hz = 20e3;
    noise.p1 = 0.05;
    noise.p2 = 0.1;
    noise.kappa = 5.0;
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = schedule(oracle::random_circuit(rng, 4, 40), kDur);
        EXPECT_NO_THROW(simulate(s, chain(4, 80e3), noise, 50, trial, {1, true}));
    }
}

TEST(Simulate, ThreadCountDoesNotMatter) {
    NoiseModel noise;
    noise.detuning_sigma_hz = 10e3;
    noise.p1 = 0.01;
    noise.p2 = 0.05;
    noise.kappa = 3.0;
    const auto s = schedule(build_grover(GroverSpec{}), kDur);
    const Counts one = simulate(s, chain(3, 40e3), noise, 3000, 99, {1});
    for (int threads : {2, 3, 8}) {
        const Counts many = simulate(s, chain(3, 40e3), noise, 3000, 99, {threads});
        EXPECT_EQ(many.histogram, one.histogram) << threads;
    }
    const Counts other = simulate(s, chain(3, 40e3), noise, 3000, 100, {1});
    EXPECT_NE(other.histogram, one.histogram);
}

TEST(Simulate, NoiselessMatchesDenseOracle) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 4;
        const Circuit c = oracle::random_circuit(rng, n, 25);
        const auto want = oracle::basis_distribution(c);
        const Counts counts = simulate(schedule(c, kDur), chain(n, 0.0), NoiseModel{}, 20000, trial);
        EXPECT_LE(total_variation(counts.distribution(), want), 0.03) << emit_qasm(c);
        EXPECT_LE(total_variation(exact_distribution(c), want), 1e-12);
    }
}

TEST(Simulate, DiagonalGatesCommuteWithCrosstalk) {
    NoiseModel noise;
    noise.detuning_sigma_hz = 15e3;
    noise.kappa = 4.0;
    auto build = [](Nanos rz_at) {
        Circuit c(3, 3);
        c.h(0).h(1).x(2);
        c.delay(rz_at, 0).rz(0.7, 0).t(0).delay(3000 - rz_at, 0);
        c.delay(1000, 1).z(1).delay(2000, 1);
        c.barrier({0, 1, 2}).h(0).h(1).measure(0, 0).measure(1, 1).measure(2, 2);
        return schedule(c, kDur);
    };
    const Counts ref = simulate(build(0), chain(3, 60e3), noise, 4000, 3, {1});
    for (Nanos at : {500, 1500, 3000}) EXPECT_EQ(simulate(build(at), chain(3, 60e3), noise, 4000, 3, {1}).histogram, ref.histogram);
}

TEST(Simulate, RejectsBadInput) {
    EXPECT_THROW(simulate(ScheduledCircuit(kMaxSimQubits + 1, 0, {}), CouplingMap(kMaxSimQubits + 1), NoiseModel{}, 1, 1),
                 SimulationError);
    NoiseModel bad;
    bad.kappa = 0.5;
    EXPECT_ANY_THROW(simulate(ScheduledCircuit(1, 0, {}), CouplingMap(1), bad, 1, 1));
}

TEST(Metrics, Fidelity) {
    const std::vector<double> a{1, 0}, b{0.31640625, 0.68359375};
    EXPECT_DOUBLE_EQ(classical_fidelity(a, b), 0.31640625);
    EXPECT_DOUBLE_EQ(classical_fidelity(b, b), 1.0);
    EXPECT_DOUBLE_EQ(classical_fidelity(a, std::vector<double>{0.0, 1.0}), 0.0);
    // Ideal Grover against uniform: sqrt(121/1024) + 7 sqrt(1/1024) = 18/32.
    const auto ideal = ideal_distribution(GroverSpec{});
    const std::vector<double> uniform(8, 0.125);
    EXPECT_NEAR(classical_fidelity(ideal, uniform), 81.0 / 256.0, 1e-12);
    EXPECT_THROW(classical_fidelity(a, uniform), SimulationError);
}

TEST(Metrics, TotalVariationAndCounts) {
    EXPECT_DOUBLE_EQ(total_variation(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0}), 0.5);
    Counts c;
    c.num_clbits = 2;
    c.shots = 4;
    c.histogram = {1, 0, 3, 0};
    EXPECT_EQ(c.count("10"), 3u);
    EXPECT_DOUBLE_EQ(marked_probability(c, "10"), 0.75);
    EXPECT_EQ(c.to_map().size(), 2u);
    EXPECT_THROW(c.count("1"), SimulationError);
    EXPECT_EQ(bitstring(5, 4), "0101");
    EXPECT_NE(mix_seed(1, 2), mix_seed(2, 1));
}
