#include "qxtalk/circuit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <utility>

namespace qxtalk {

namespace {

struct NameEntry {
    GateKind kind;
    std::string_view name;
};

constexpr std::array<NameEntry, 14> kNames{{
    {GateKind::H, "h"},
    {GateKind::X, "x"},
    {GateKind::Y, "y"},
    {GateKind::Z, "z"},
    {GateKind::S, "s"},
    {GateKind::Sdg, "sdg"},
    {GateKind::T, "t"},
    {GateKind::Tdg, "tdg"},
    {GateKind::SX, "sx"},
    {GateKind::RZ, "rz"},
    {GateKind::CX, "cx"},
    {GateKind::Delay, "delay"},
    {GateKind::Measure, "measure"},
    {GateKind::Barrier, "barrier"},
}};

}  // namespace

std::string_view gate_name(GateKind kind) {
    for (const auto& e : kNames) {
        if (e.kind == kind) return e.name;
    }
    return "?";
}

std::optional<GateKind> gate_from_name(std::string_view name) {
    for (const auto& e : kNames) {
        if (e.name == name) return e.kind;
    }
    return std::nullopt;
}

bool is_single_qubit_unitary(GateKind kind) {
    switch (kind) {
        case GateKind::H:
        case GateKind::X:
        case GateKind::Y:
        case GateKind::Z:
        case GateKind::S:
        case GateKind::Sdg:
        case GateKind::T:
        case GateKind::Tdg:
        case GateKind::SX:
        case GateKind::RZ:
            return true;
        default:
            return false;
    }
}

bool is_diagonal(GateKind kind) {
    switch (kind) {
        case GateKind::Z:
        case GateKind::S:
        case GateKind::Sdg:
        case GateKind::T:
        case GateKind::Tdg:
        case GateKind::RZ:
        case GateKind::Delay:
        case GateKind::Barrier:
            return true;
        default:
            return false;
    }
}

Gate Gate::rz(double theta) { return Gate{GateKind::RZ, theta, 0}; }

Gate Gate::delay_for(Nanos ns) { return Gate{GateKind::Delay, 0.0, ns}; }

Circuit::Circuit(int num_qubits, int num_clbits) : num_qubits_(num_qubits), num_clbits_(num_clbits) {
    if (num_qubits < 0 || num_clbits < 0) throw CircuitError("register sizes must be non-negative");
}

Circuit& Circuit::append(Gate gate, std::vector<int> qubits, int clbit) {
    return append(Instruction{gate, std::move(qubits), clbit});
}

Circuit& Circuit::append(Instruction inst) {
    const GateKind kind = inst.gate.kind;
    const std::size_t arity = inst.qubits.size();
    if (kind == GateKind::CX) {
        if (arity != 2) throw CircuitError("cx takes exactly two qubits");
    } else if (kind == GateKind::Barrier) {
        if (arity == 0) throw CircuitError("barrier needs at least one qubit");
    } else if (arity != 1) {
        throw CircuitError(std::string(gate_name(kind)) + " takes exactly one qubit");
    }
    for (std::size_t i = 0; i < arity; ++i) {
        const int q = inst.qubits[i];
        if (q < 0 || q >= num_qubits_) {
            throw CircuitError("qubit index " + std::to_string(q) + " out of range for " +
                               std::to_string(num_qubits_) + " qubits");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (inst.qubits[j] == q) throw CircuitError("duplicate qubit " + std::to_string(q) + " in one instruction");
        }
    }
    if (kind == GateKind::RZ && !std::isfinite(inst.gate.angle)) throw CircuitError("rz angle must be finite");
    if (kind == GateKind::Delay && inst.gate.delay < 0) throw CircuitError("delay must be non-negative");
    if (kind == GateKind::Measure) {
        if (inst.clbit < 0 || inst.clbit >= num_clbits_) {
            throw CircuitError("classical bit " + std::to_string(inst.clbit) + " out of range");
        }
    } else {
        inst.clbit = -1;
    }
    if (kind != GateKind::RZ) inst.gate.angle = 0.0;
    if (kind != GateKind::Delay) inst.gate.delay = 0;
    instructions_.push_back(std::move(inst));
    return *this;
}

DurationTable DurationTable::defaults() {
    DurationTable d;
    for (GateKind k : {GateKind::H, GateKind::X, GateKind::Y, GateKind::Z, GateKind::S, GateKind::Sdg, GateKind::T,
                       GateKind::Tdg, GateKind::SX}) {
        d.set(k, 60);
    }
    d.set(GateKind::RZ, 0);
    d.set(GateKind::CX, 660);
    d.set(GateKind::Measure, 1400);
    d.set(GateKind::Barrier, 0);
    return d;
}

void DurationTable::set(GateKind kind, Nanos ns) {
    if (ns < 0) throw CircuitError("durations must be non-negative");
    if (kind == GateKind::Delay) throw CircuitError("delay carries its own duration");
    table_[kind] = ns;
}

std::optional<Nanos> DurationTable::find(GateKind kind) const {
    auto it = table_.find(kind);
    if (it == table_.end()) return std::nullopt;
    return it->second;
}

Nanos DurationTable::duration(const Gate& gate) const {
    if (gate.kind == GateKind::Delay) return gate.delay;
    auto d = find(gate.kind);
    if (!d) throw CircuitError("no duration entry for gate '" + std::string(gate_name(gate.kind)) + "'");
    return *d;
}

ScheduledCircuit::ScheduledCircuit(int num_qubits, int num_clbits, std::vector<TimedInstruction> timed)
    : num_qubits_(num_qubits), num_clbits_(num_clbits), timed_(std::move(timed)) {
    for (const auto& ti : timed_) {
        if (ti.start < 0 || ti.duration < 0) throw CircuitError("negative start or duration");
        for (int q : ti.inst.qubits) {
            if (q < 0 || q >= num_qubits_) throw CircuitError("timed instruction qubit out of range");
        }
        total_duration_ = std::max(total_duration_, ti.end());
    }
    std::stable_sort(timed_.begin(), timed_.end(),
                     [](const TimedInstruction& a, const TimedInstruction& b) { return a.start < b.start; });
}

void ScheduledCircuit::check_disjoint() const {
    std::vector<std::vector<std::pair<Nanos, Nanos>>> per_qubit(static_cast<std::size_t>(num_qubits_));
    for (const auto& ti : timed_) {
        for (int q : ti.inst.qubits) per_qubit[static_cast<std::size_t>(q)].emplace_back(ti.start, ti.end());
    }
    for (std::size_t q = 0; q < per_qubit.size(); ++q) {
        auto& iv = per_qubit[q];
        std::stable_sort(iv.begin(), iv.end());
        for (std::size_t i = 1; i < iv.size(); ++i) {
            if (iv[i].first < iv[i - 1].second) {
                throw CircuitError("overlapping instructions on qubit " + std::to_string(q));
            }
        }
    }
}

ScheduledCircuit schedule(const Circuit& c, const DurationTable& d) {
    std::vector<Nanos> busy_until(static_cast<std::size_t>(c.num_qubits()), 0);
    std::vector<TimedInstruction> timed;
    timed.reserve(c.instructions().size());
    for (const auto& inst : c.instructions()) {
        const Nanos dur = d.duration(inst.gate);
        Nanos start = 0;
        for (int q : inst.qubits) start = std::max(start, busy_until[static_cast<std::size_t>(q)]);
        for (int q : inst.qubits) busy_until[static_cast<std::size_t>(q)] = start + dur;
        timed.push_back(TimedInstruction{inst, start, dur});
    }
    return ScheduledCircuit(c.num_qubits(), c.num_clbits(), std::move(timed));
}

std::vector<Window> idle_windows(const ScheduledCircuit& s, int q) {
    if (q < 0 || q >= s.num_qubits()) throw CircuitError("qubit out of range");
    std::vector<Window> out;
    std::optional<Nanos> last_end;
    for (const auto& ti : s.timed()) {
        const auto& qs = ti.inst.qubits;
        if (std::find(qs.begin(), qs.end(), q) == qs.end()) continue;
        if (last_end && ti.start > *last_end) out.push_back(Window{*last_end, ti.start});
        last_end = last_end ? std::max(*last_end, ti.end()) : ti.end();
    }
    return out;
}

Circuit to_circuit(const ScheduledCircuit& s) {
    Circuit c(s.num_qubits(), s.num_clbits());
    std::vector<Nanos> busy_until(static_cast<std::size_t>(s.num_qubits()), 0);
    for (const auto& ti : s.timed()) {
        const auto& qs = ti.inst.qubits;
        int latest = qs.front();
        for (int q : qs) {
            if (busy_until[static_cast<std::size_t>(q)] > busy_until[static_cast<std::size_t>(latest)]) latest = q;
        }
        const Nanos asap = busy_until[static_cast<std::size_t>(latest)];
        if (asap < ti.start) c.delay(ti.start - asap, latest);
        c.append(ti.inst);
        for (int q : qs) busy_until[static_cast<std::size_t>(q)] = ti.end();
    }
    return c;
}

}  // namespace qxtalk
