#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qxtalk/circuit.hpp"
#include "qxtalk/topology.hpp"

namespace qxtalk {

/// Pauli pulse train for padding idle windows. Pulses are X or Y and
/// multiply to the identity up to a global phase.
class DDSequence {
  public:
    /// Throws std::invalid_argument for an empty train, a pulse other than
    /// X/Y, or a product that is not proportional to the identity.
    DDSequence(std::string name, std::vector<GateKind> pulses);

    static DDSequence xx();
    static DDSequence xyxy();
    /// "xx", "xyxy", or a comma-separated pulse list such as "x,y,x,y".
    static DDSequence parse(const std::string& spec);

    const std::string& name() const { return name_; }
    const std::vector<GateKind>& pulses() const { return pulses_; }
    int size() const { return static_cast<int>(pulses_.size()); }

  private:
    std::string name_;
    std::vector<GateKind> pulses_;
};

/// Symmetric spacing for m pulses in a window with `slack` ns left over:
/// slack/(2m) before the first and after the last pulse, slack/m between,
/// with integer rounding residue going to the final gap. Returns m+1 gaps.
std::vector<Nanos> dd_gaps(Nanos slack, int m);

/// Inserts the sequence into every idle window on the listed qubits that is
/// at least as long as the pulses. Gaps between pulses are filled with
/// Delay so padded windows stop being idle. Shorter windows are left alone.
ScheduledCircuit pad_dd(const ScheduledCircuit& s, const std::vector<int>& qubits, const DDSequence& seq,
                        const DurationTable& d);

/// Moves every attacker pair so no attacker qubit is adjacent to the
/// victim, keeping control/target orientation and the smallest
/// displacement. The victim-neighbours that now separate the two are
/// recorded as buffer. Returns the layout unchanged when it is already
/// separated. Throws TopologyError when no placement exists.
Layout apply_buffer(const Layout& layout, const CouplingMap& map);

/// Return probability of a protected |+> next to a spectator held in |1>
/// under H = pi * nu * Z(x)Z for `window_ns`, optionally decoupled with
/// instantaneous pulses at dd_gaps spacing.
double refocusing_check(double nu_hz, double window_ns, const std::optional<DDSequence>& seq);

}  // namespace qxtalk
