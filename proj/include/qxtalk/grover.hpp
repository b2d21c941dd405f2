#pragma once

#include <string>
#include <vector>

#include "qxtalk/circuit.hpp"

namespace qxtalk {

/// Grover search over n qubits for one marked bitstring. The string is
/// written most-significant first: character 0 is qubit n-1, so "011"
/// marks qubits 0 and 1 set.
struct GroverSpec {
    int n = 3;
    std::string marked = "111";
    int iterations = 2;

    /// Throws std::invalid_argument when n < 1, iterations < 0 or the
    /// marked string is not n binary digits.
    void validate() const;
    /// Computational-basis index of the marked string.
    std::size_t marked_index() const;
};

/// H on every qubit, `iterations` rounds of (oracle, diffusion), then a
/// barrier and measure q[i] -> c[i]. The three-qubit controlled-Z uses the 6-CX, T-layer
/// construction; two qubits use H-CX-H, larger registers a CX/RZ phase
/// polynomial.
Circuit build_grover(const GroverSpec& spec);

/// Closed form: the marked outcome has probability sin^2((2k+1) theta),
/// theta = asin(2^(-n/2)), and the rest share the remainder evenly.
/// Indexed by basis state (bit q of the index is qubit q).
std::vector<double> ideal_distribution(const GroverSpec& spec);

/// Appends a multi-controlled Z on `qubits` (phase -1 on |1...1>).
void append_mcz(Circuit& c, const std::vector<int>& qubits);

}  // namespace qxtalk
