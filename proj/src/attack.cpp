#include "qxtalk/attack.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace qxtalk {

std::string to_string(ControlInit init) {
    switch (init) {
        case ControlInit::Zero:
            return "0";
        case ControlInit::One:
            return "1";
        case ControlInit::Plus:
            return "+";
    }
    return "?";
}

ControlInit control_init_from_string(const std::string& s) {
    if (s == "0") return ControlInit::Zero;
    if (s == "1") return ControlInit::One;
    if (s == "+" || s == "plus") return ControlInit::Plus;
    throw std::invalid_argument("control init must be 0, 1 or +, got '" + s + "'");
}

std::vector<Nanos> trail_slot_starts(int count, Nanos window_start, Nanos width, Nanos slot) {
    if (count < 0) throw std::invalid_argument("slot count must be non-negative");
    std::vector<Nanos> starts;
    if (count == 0) return starts;
    const Nanos n = count;
    if (width < n * slot) throw std::invalid_argument("window too short for the requested gates");
    starts.reserve(static_cast<std::size_t>(count));
    for (Nanos i = 0; i < n; ++i) {
        // centre - slot/2 = (width * (2i + 1) - n * slot) / (2n), rounded half up.
        const Nanos num = width * (2 * i + 1) - n * slot;
        starts.push_back(window_start + (num + n) / (2 * n));
    }
    return starts;
}

namespace {

void fill_delays(std::vector<TimedInstruction>& out, int q, Nanos from, Nanos to) {
    if (to > from) out.push_back({Instruction{Gate::delay_for(to - from), {q}}, from, to - from});
}

std::optional<Gate> prep_gate(ControlInit init) {
    switch (init) {
        case ControlInit::Zero:
            return std::nullopt;
        case ControlInit::One:
            return Gate{GateKind::X};
        case ControlInit::Plus:
            return Gate{GateKind::H};
    }
    return std::nullopt;
}

ScheduledCircuit build_fragment(const AttackSpec& spec, Nanos total_duration, const DurationTable& d, bool placebo) {
    const auto [control, target] = spec.pair;
    if (control < 0 || target < 0 || control == target) throw std::invalid_argument("attack pair needs two distinct qubits");
    if (spec.n_cnot < 0) throw std::invalid_argument("n_cnot must be non-negative");
    const auto prep = prep_gate(spec.control_init);
    const Nanos prep_end = prep ? d.duration(*prep) : 0;
    const Nanos cx = d.duration(Gate{GateKind::CX});
    if (total_duration < prep_end + spec.n_cnot * cx) {
        throw std::invalid_argument("window of " + std::to_string(total_duration) + " ns too short for " +
                                    std::to_string(spec.n_cnot) + " CX");
    }
    const auto starts = trail_slot_starts(spec.n_cnot, prep_end, total_duration - prep_end, cx);

    std::vector<TimedInstruction> out;
    Nanos control_free = 0;
    if (prep && !placebo) {
        out.push_back({Instruction{*prep, {control}}, 0, prep_end});
        control_free = prep_end;
    }
    Nanos target_free = 0;
    for (Nanos s : starts) {
        fill_delays(out, control, control_free, s);
        fill_delays(out, target, target_free, s);
        if (placebo) {
            out.push_back({Instruction{Gate::delay_for(cx), {control}}, s, cx});
            out.push_back({Instruction{Gate::delay_for(cx), {target}}, s, cx});
        } else {
            out.push_back({Instruction{Gate{GateKind::CX}, {control, target}}, s, cx});
        }
        control_free = target_free = s + cx;
    }
    fill_delays(out, control, control_free, total_duration);
    fill_delays(out, target, target_free, total_duration);
    return ScheduledCircuit(std::max(control, target) + 1, 0, std::move(out));
}

}  // namespace

ScheduledCircuit build_attack_trail(const AttackSpec& spec, Nanos total_duration, const DurationTable& d) {
    return build_fragment(spec, total_duration, d, false);
}

ScheduledCircuit build_placebo(const AttackSpec& spec, Nanos total_duration, const DurationTable& d) {
    return build_fragment(spec, total_duration, d, true);
}

ScheduledCircuit compose(const ScheduledCircuit& victim, const std::vector<ScheduledCircuit>& fragments,
                         const Layout& layout) {
    if (victim.num_qubits() > static_cast<int>(layout.victim.size())) {
        throw std::invalid_argument("victim circuit has more qubits than the layout provides");
    }
    int width = 0;
    auto widen = [&](int q) { width = std::max(width, q + 1); };
    for (int q : layout.victim) widen(q);
    for (int q : layout.attacker_qubits()) widen(q);
    for (int q : layout.buffer) widen(q);

    std::set<int> reserved(layout.victim.begin(), layout.victim.end());
    reserved.insert(layout.buffer.begin(), layout.buffer.end());

    std::vector<TimedInstruction> merged;
    for (const auto& ti : victim.timed()) {
        TimedInstruction g = ti;
        for (int& q : g.inst.qubits) q = layout.victim[static_cast<std::size_t>(q)];
        merged.push_back(std::move(g));
    }
    std::set<int> claimed;
    for (const auto& frag : fragments) {
        std::set<int> mine;
        for (const auto& ti : frag.timed()) {
            if (ti.inst.gate.kind == GateKind::Measure) throw std::invalid_argument("fragments may not measure");
            mine.insert(ti.inst.qubits.begin(), ti.inst.qubits.end());
        }
        for (int q : mine) {
            if (reserved.count(q) || claimed.count(q)) {
                throw std::invalid_argument("qubit collision on " + std::to_string(q) + " while composing");
            }
            widen(q);
        }
        claimed.insert(mine.begin(), mine.end());
        merged.insert(merged.end(), frag.timed().begin(), frag.timed().end());
    }
    return ScheduledCircuit(width, victim.num_clbits(), std::move(merged));
}

}  // namespace qxtalk
