#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qxtalk {

/// Time in integer nanoseconds.
using Nanos = std::int64_t;

enum class GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    SX,
    RZ,
    CX,
    Delay,
    Measure,
    Barrier,
};

/// Lower-case mnemonic used by the text format ("h", "cx", "delay", ...).
std::string_view gate_name(GateKind kind);
std::optional<GateKind> gate_from_name(std::string_view name);

/// True for every kind that acts as a unitary on exactly one qubit.
bool is_single_qubit_unitary(GateKind kind);
/// True for gates whose unitary is diagonal in the computational basis.
bool is_diagonal(GateKind kind);

/// A gate kind plus its parameter. Only RZ (angle, radians) and Delay
/// (duration, ns) carry one.
struct Gate {
    GateKind kind = GateKind::H;
    double angle = 0.0;
    Nanos delay = 0;

    static Gate rz(double theta);
    static Gate delay_for(Nanos ns);

    friend bool operator==(const Gate&, const Gate&) = default;
};

struct Instruction {
    Gate gate;
    std::vector<int> qubits;
    /// Classical destination for Measure, -1 otherwise.
    int clbit = -1;

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

class CircuitError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Gate-level program in source order.
class Circuit {
  public:
    explicit Circuit(int num_qubits = 0, int num_clbits = 0);

    int num_qubits() const { return num_qubits_; }
    int num_clbits() const { return num_clbits_; }
    const std::vector<Instruction>& instructions() const { return instructions_; }

    /// Appends after validating qubit ranges, arity and parameters.
    Circuit& append(Instruction inst);
    Circuit& append(Gate gate, std::vector<int> qubits, int clbit = -1);

    Circuit& h(int q) { return append(Gate{GateKind::H}, {q}); }
    Circuit& x(int q) { return append(Gate{GateKind::X}, {q}); }
    Circuit& y(int q) { return append(Gate{GateKind::Y}, {q}); }
    Circuit& z(int q) { return append(Gate{GateKind::Z}, {q}); }
    Circuit& t(int q) { return append(Gate{GateKind::T}, {q}); }
    Circuit& tdg(int q) { return append(Gate{GateKind::Tdg}, {q}); }
    Circuit& rz(double theta, int q) { return append(Gate::rz(theta), {q}); }
    Circuit& cx(int control, int target) { return append(Gate{GateKind::CX}, {control, target}); }
    Circuit& delay(Nanos ns, int q) { return append(Gate::delay_for(ns), {q}); }
    Circuit& barrier(std::vector<int> qubits) { return append(Gate{GateKind::Barrier}, std::move(qubits)); }
    Circuit& measure(int q, int c) { return append(Gate{GateKind::Measure}, {q}, c); }

    friend bool operator==(const Circuit&, const Circuit&) = default;

  private:
    int num_qubits_;
    int num_clbits_;
    std::vector<Instruction> instructions_;
};

/// Gate durations in ns. Delay is never looked up; it carries its own length.
class DurationTable {
  public:
    /// 60 ns single-qubit, 660 ns CX, 1400 ns Measure, RZ and Barrier 0.
    static DurationTable defaults();

    void set(GateKind kind, Nanos ns);
    void erase(GateKind kind) { table_.erase(kind); }
    std::optional<Nanos> find(GateKind kind) const;
    /// Duration of a concrete gate; throws CircuitError on a missing entry.
    Nanos duration(const Gate& gate) const;

  private:
    std::map<GateKind, Nanos> table_;
};

struct TimedInstruction {
    Instruction inst;
    Nanos start = 0;
    Nanos duration = 0;

    Nanos end() const { return start + duration; }
    friend bool operator==(const TimedInstruction&, const TimedInstruction&) = default;
};

/// Time-stamped circuit. Instructions are kept sorted by start time; ties
/// keep insertion order, which preserves per-qubit program order for
/// zero-duration instructions.
class ScheduledCircuit {
  public:
    ScheduledCircuit() = default;
    ScheduledCircuit(int num_qubits, int num_clbits, std::vector<TimedInstruction> timed);

    int num_qubits() const { return num_qubits_; }
    int num_clbits() const { return num_clbits_; }
    const std::vector<TimedInstruction>& timed() const { return timed_; }
    Nanos total_duration() const { return total_duration_; }

    /// Throws CircuitError if two instructions overlap on a qubit.
    void check_disjoint() const;

  private:
    int num_qubits_ = 0;
    int num_clbits_ = 0;
    std::vector<TimedInstruction> timed_;
    Nanos total_duration_ = 0;
};

/// ASAP: every instruction starts at the latest end time among earlier
/// instructions sharing one of its qubits.
ScheduledCircuit schedule(const Circuit& c, const DurationTable& d);

struct Window {
    Nanos start = 0;
    Nanos end = 0;

    Nanos width() const { return end - start; }
    friend bool operator==(const Window&, const Window&) = default;
};

/// Gaps on qubit q between consecutive instructions touching q. Time before
/// the first and after the last instruction is not idle.
std::vector<Window> idle_windows(const ScheduledCircuit& s, int q);

/// Flattens a schedule back into program order. Where ASAP would start an
/// instruction earlier than recorded, a Delay is inserted on its latest
/// qubit, so schedule() on the result reproduces every start time. ASAP
/// input round-trips without added delays.
Circuit to_circuit(const ScheduledCircuit& s);

}  // namespace qxtalk
