#pragma once

#include <string>
#include <vector>

#include "qxtalk/circuit.hpp"
#include "qxtalk/topology.hpp"

namespace qxtalk {

enum class ControlInit { Zero, One, Plus };

std::string to_string(ControlInit init);
/// Accepts "0", "1", "+" (and "plus").
ControlInit control_init_from_string(const std::string& s);

/// One attacker pair running a CX trail. The target always starts in |0>.
struct AttackSpec {
    int n_cnot = 0;
    ControlInit control_init = ControlInit::Zero;
    AttackPair pair;
};

/// Start times (ns) for `count` slots of width `slot` centred at
/// window_start + width * (2i + 1) / (2 count), rounded to the nearest ns.
std::vector<Nanos> trail_slot_starts(int count, Nanos window_start, Nanos width, Nanos slot);

/// State preparation on the control at t = 0 (X for |1>, H for |+>), then
/// n_cnot CX gates at evenly spaced centres across the rest of
/// [0, total_duration), with every gap filled by Delay. Throws
/// std::invalid_argument when the CX gates do not fit.
ScheduledCircuit build_attack_trail(const AttackSpec& spec, Nanos total_duration, const DurationTable& d);

/// The delay-only counterpart: no preparation, and a CX-length Delay on
/// both qubits wherever the trail would place a CX. n = 0 gives one Delay
/// spanning the whole window.
ScheduledCircuit build_placebo(const AttackSpec& spec, Nanos total_duration, const DurationTable& d);

/// Places the victim on layout.victim (logical qubit i -> victim[i]) and
/// merges fragments already expressed on global qubits. Throws
/// std::invalid_argument on any qubit claimed twice.
ScheduledCircuit compose(const ScheduledCircuit& victim, const std::vector<ScheduledCircuit>& fragments,
                         const Layout& layout);

}  // namespace qxtalk
