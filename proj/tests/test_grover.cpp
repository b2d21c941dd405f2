#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracle.hpp"
#include "qxtalk/grover.hpp"
#include "qxtalk/sim.hpp"

using namespace qxtalk;

namespace {

// Grover by explicit reflections on the amplitude vector.
std::vector<double> reflect_oracle(int n, std::size_t marked, int k) {
    const std::size_t dim = std::size_t{1} << n;
    std::vector<double> a(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    for (int it = 0; it < k; ++it) {
        a[marked] = -a[marked];
        const double mean = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(dim);
        for (double& x : a) x = 2 * mean - x;
    }
    for (double& x : a) x *= x;
    return a;
}

std::string bits_of(std::size_t v, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int i = 0; i < n; ++i)
        if ((v >> i) & 1u) s[static_cast<std::size_t>(n - 1 - i)] = '1';
    return s;
}

}  // namespace

TEST(Grover, SpecValidation) {
    EXPECT_THROW(GroverSpec({3, "11", 2}).validate(), std::invalid_argument);
    EXPECT_THROW(GroverSpec({3, "1x1", 2}).validate(), std::invalid_argument);
    EXPECT_THROW(GroverSpec({0, "", 2}).validate(), std::invalid_argument);
    EXPECT_THROW(GroverSpec({2, "11", -1}).validate(), std::invalid_argument);
    EXPECT_EQ(GroverSpec({3, "011", 1}).marked_index(), 3u);
    EXPECT_EQ(GroverSpec({3, "100", 1}).marked_index(), 4u);
}

TEST(Grover, ClosedFormAnchors) {
    EXPECT_NEAR(ideal_distribution({3, "111", 2})[7], 121.0 / 128.0, 1e-12);
    EXPECT_NEAR(ideal_distribution({3, "111", 1})[7], 25.0 / 32.0, 1e-12);
    for (double p : ideal_distribution({3, "101", 0})) EXPECT_NEAR(p, 1.0 / 8.0, 1e-12);
    const auto d = ideal_distribution({3, "111", 2});
    EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0), 1.0, 1e-12);
    for (int x = 0; x < 7; ++x) EXPECT_NEAR(d[static_cast<std::size_t>(x)], (1 - 121.0 / 128.0) / 7, 1e-12);
}

TEST(Grover, ClosedFormMatchesReflections) {
    for (int n = 1; n <= 6; ++n) {
        for (int k = 0; k <= 4; ++k) {
            const std::size_t m = (std::size_t{1} << n) - 1 - static_cast<std::size_t>(n % 2);
            const auto got = ideal_distribution({n, bits_of(m, n), k});
            const auto want = reflect_oracle(n, m, k);
            for (std::size_t x = 0; x < want.size(); ++x) EXPECT_NEAR(got[x], want[x], 1e-12) << n << " " << k;
        }
    }
}

TEST(Grover, CircuitMatchesDenseOracle) {
    for (int n = 1; n <= 4; ++n) {
        for (int k = 0; k <= 3; ++k) {
            for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
                const GroverSpec spec{n, bits_of(m, n), k};
                const auto want = ideal_distribution(spec);
                const auto got = oracle::basis_distribution(build_grover(spec));
                EXPECT_LE(total_variation(got, want), 1e-9) << n << " " << spec.marked << " " << k;
            }
        }
    }
}

TEST(Grover, MczIsDiagonalSignFlip) {
    for (int n = 1; n <= 5; ++n) {
        Circuit c(n);
        std::vector<int> qs(static_cast<std::size_t>(n));
        std::iota(qs.begin(), qs.end(), 0);
        append_mcz(c, qs);
        const auto u = oracle::circuit_unitary(c);
        // Global phase from the gate decomposition is allowed.
        const auto phase = u(0, 0);
        for (std::size_t r = 0; r < u.dim; ++r) {
            for (std::size_t col = 0; col < u.dim; ++col) {
                const oracle::C want = r == col ? (r == u.dim - 1 ? -phase : phase) : oracle::C{};
                EXPECT_LT(std::abs(u(r, col) - want), 1e-12) << n << " " << r << " " << col;
            }
        }
    }
}

TEST(Grover, ThreeQubitShape) {
    const Circuit g = build_grover(GroverSpec{});
    int cx = 0, measures = 0, barriers = 0;
    for (const auto& inst : g.instructions()) {
        cx += inst.gate.kind == GateKind::CX;
        barriers += inst.gate.kind == GateKind::Barrier;
        if (inst.gate.kind == GateKind::Measure) {
            EXPECT_EQ(inst.clbit, inst.qubits[0]);
            ++measures;
        }
    }
    EXPECT_EQ(cx, 24);
    EXPECT_EQ(measures, 3);
    EXPECT_EQ(barriers, 1);
    EXPECT_EQ(g.num_clbits(), 3);
}
