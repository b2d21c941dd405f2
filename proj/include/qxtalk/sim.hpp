#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qxtalk/circuit.hpp"
#include "qxtalk/topology.hpp"

namespace qxtalk {

class SimulationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using Amplitude = std::complex<double>;

/// Dense state of n qubits; bit q of an index is qubit q.
class Statevector {
  public:
    explicit Statevector(int num_qubits);

    int num_qubits() const { return num_qubits_; }
    std::span<Amplitude> amplitudes() { return amps_; }
    std::span<const Amplitude> amplitudes() const { return amps_; }

    void reset();
    /// Row-major 2x2 matrix on qubit q.
    void apply_1q(int q, const std::array<Amplitude, 4>& m);
    void apply_cx(int control, int target);
    void apply_gate(const Gate& gate, std::span<const int> qubits);
    /// Multiplies amplitude x by exp(i * angles[x]).
    void apply_phases(std::span<const double> angles);
    double probability_one(int q) const;
    /// Projects qubit q onto `outcome` and renormalises.
    void collapse(int q, int outcome, double p_outcome);
    double norm_squared() const;
    std::vector<double> probabilities() const;

  private:
    int num_qubits_;
    std::vector<Amplitude> amps_;
};

/// Matrix of a single-qubit unitary kind, row-major.
std::array<Amplitude, 4> gate_matrix(const Gate& gate);

/// Histogram over classical registers; index bit c is clbit c.
struct Counts {
    int num_clbits = 0;
    std::uint64_t shots = 0;
    std::vector<std::uint64_t> histogram;

    /// Bitstrings with clbit 0 as the rightmost character, zero entries
    /// omitted.
    std::map<std::string, std::uint64_t> to_map() const;
    std::vector<double> distribution() const;
    std::uint64_t count(const std::string& bitstring) const;
};

std::string bitstring(std::size_t value, int width);

struct SimOptions {
    /// Worker threads; 0 picks the hardware concurrency.
    int threads = 0;
    /// Verify unit norm (1e-9) after every event; throws on violation.
    bool check_norm = false;
};

/// Monte-Carlo trajectories: each shot draws per-qubit detunings, evolves
/// under the diagonal ZZ/detuning propagator between events, applies each
/// gate's unitary at its end time followed by a depolarizing draw, and
/// records the measured classical bits. Results depend only on the inputs
/// and seed, not on threading.
Counts simulate(const ScheduledCircuit& s, const CouplingMap& map, const NoiseModel& noise, std::uint64_t shots,
                std::uint64_t seed, const SimOptions& options = {});

/// Exact output distribution of an ideal run, indexed like Counts. Every
/// qubit's Measure must be its last instruction.
std::vector<double> exact_distribution(const ScheduledCircuit& s);
std::vector<double> exact_distribution(const Circuit& c);

/// Squared Bhattacharyya coefficient (sum_x sqrt(p q))^2.
double classical_fidelity(std::span<const double> p, std::span<const double> q);

double marked_probability(const Counts& counts, const std::string& marked);

/// Total variation distance, 0.5 * sum |p - q|.
double total_variation(std::span<const double> p, std::span<const double> q);

/// Stateless 64-bit mixer used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

inline constexpr int kMaxSimQubits = 14;

}  // namespace qxtalk
