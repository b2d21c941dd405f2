#include "qxtalk/dd.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <complex>
#include <deque>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qxtalk {

namespace {

using C = std::complex<double>;
using M2 = std::array<C, 4>;

M2 mul(const M2& a, const M2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

M2 pauli(GateKind k) {
    if (k == GateKind::X) return {0.0, 1.0, 1.0, 0.0};
    return {0.0, C(0, -1), C(0, 1), 0.0};
}

}  // namespace

DDSequence::DDSequence(std::string name, std::vector<GateKind> pulses) : name_(std::move(name)), pulses_(std::move(pulses)) {
    if (pulses_.empty()) throw std::invalid_argument("DD sequence needs at least one pulse");
    M2 product{1.0, 0.0, 0.0, 1.0};
    for (GateKind k : pulses_) {
        if (k != GateKind::X && k != GateKind::Y) throw std::invalid_argument("DD pulses must be X or Y");
        product = mul(pauli(k), product);
    }
    const bool identity = std::abs(product[1]) < 1e-12 && std::abs(product[2]) < 1e-12 &&
                          std::abs(product[0] - product[3]) < 1e-12;
    if (!identity) throw std::invalid_argument("DD sequence '" + name_ + "' does not compose to the identity");
}

DDSequence DDSequence::xx() { return DDSequence("xx", {GateKind::X, GateKind::X}); }

DDSequence DDSequence::xyxy() { return DDSequence("xyxy", {GateKind::X, GateKind::Y, GateKind::X, GateKind::Y}); }

DDSequence DDSequence::parse(const std::string& spec) {
    std::string lower = spec;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (lower == "xx") return xx();
    if (lower == "xyxy") return xyxy();
    std::vector<GateKind> pulses;
    std::stringstream ss(lower);
    std::string item;
    std::string name;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char ch) { return std::isspace(ch); }),
                   item.end());
        if (item == "x") {
            pulses.push_back(GateKind::X);
        } else if (item == "y") {
            pulses.push_back(GateKind::Y);
        } else {
            throw std::invalid_argument("unknown DD pulse '" + item + "'");
        }
        name += item;
    }
    return DDSequence(name, std::move(pulses));
}

std::vector<Nanos> dd_gaps(Nanos slack, int m) {
    if (m < 1) throw std::invalid_argument("need at least one pulse");
    if (slack < 0) throw std::invalid_argument("negative slack");
    std::vector<Nanos> gaps(static_cast<std::size_t>(m) + 1);
    const Nanos edge = slack / (2 * m);
    const Nanos inner = slack / m;
    gaps.front() = edge;
    for (int i = 1; i < m; ++i) gaps[static_cast<std::size_t>(i)] = inner;
    gaps.back() = slack - edge - inner * (m - 1);
    return gaps;
}

ScheduledCircuit pad_dd(const ScheduledCircuit& s, const std::vector<int>& qubits, const DDSequence& seq,
                        const DurationTable& d) {
    std::vector<Nanos> pulse_len;
    Nanos total = 0;
    for (GateKind k : seq.pulses()) {
        pulse_len.push_back(d.duration(Gate{k}));
        total += pulse_len.back();
    }
    std::vector<TimedInstruction> out = s.timed();
    const std::set<int> unique(qubits.begin(), qubits.end());
    for (int q : unique) {
        for (const Window& w : idle_windows(s, q)) {
            if (w.width() < total) continue;
            const auto gaps = dd_gaps(w.width() - total, seq.size());
            Nanos t = w.start;
            for (std::size_t i = 0; i < gaps.size(); ++i) {
                if (gaps[i] > 0) out.push_back({Instruction{Gate::delay_for(gaps[i]), {q}}, t, gaps[i]});
                t += gaps[i];
                if (i < pulse_len.size()) {
                    out.push_back({Instruction{Gate{seq.pulses()[i]}, {q}}, t, pulse_len[i]});
                    t += pulse_len[i];
                }
            }
        }
    }
    return ScheduledCircuit(s.num_qubits(), s.num_clbits(), std::move(out));
}

namespace {

std::vector<int> distance_from(const CouplingMap& map, const std::vector<int>& sources) {
    std::vector<int> dist(static_cast<std::size_t>(map.num_qubits()), std::numeric_limits<int>::max());
    std::deque<int> frontier;
    for (int v : sources) {
        dist[static_cast<std::size_t>(v)] = 0;
        frontier.push_back(v);
    }
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop_front();
        for (int w : map.neighbors(u)) {
            if (dist[static_cast<std::size_t>(w)] != std::numeric_limits<int>::max()) continue;
            dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
            frontier.push_back(w);
        }
    }
    return dist;
}

}  // namespace

Layout apply_buffer(const Layout& layout, const CouplingMap& map) {
    validate_layout(map, layout);
    if (layout.attackers.empty()) return layout;
    const int current = attacker_victim_distance(map, layout);
    if (current < 0 || current >= 2) return layout;

    const auto dist = distance_from(map, layout.victim);
    auto dv = [&](int q) { return dist[static_cast<std::size_t>(q)]; };
    const std::set<int> victim(layout.victim.begin(), layout.victim.end());

    Layout out = layout;
    out.attackers.clear();
    std::set<int> taken;
    for (std::size_t i = 0; i < layout.attackers.size(); ++i) {
        const AttackPair& old = layout.attackers[i];
        std::set<int> reserved;
        for (std::size_t j = i + 1; j < layout.attackers.size(); ++j) {
            reserved.insert(layout.attackers[j].control);
            reserved.insert(layout.attackers[j].target);
        }
        const bool control_near = dv(old.control) <= dv(old.target);
        auto usable = [&](int q) { return !victim.count(q) && !taken.count(q) && !reserved.count(q) && dv(q) >= 2; };

        std::optional<AttackPair> best;
        int best_cost = std::numeric_limits<int>::max();
        for (const auto& [e, rate] : map.edges()) {
            for (const auto& cand : {AttackPair{e.a, e.b}, AttackPair{e.b, e.a}}) {
                if (!usable(cand.control) || !usable(cand.target)) continue;
                if (std::min(dv(cand.control), dv(cand.target)) != 2) continue;
                if (control_near ? dv(cand.control) > dv(cand.target) : dv(cand.target) > dv(cand.control)) continue;
                const int cost = map.distance(old.control, cand.control) + map.distance(old.target, cand.target);
                if (cost < 0) continue;
                if (!best || cost < best_cost ||
                    (cost == best_cost && std::pair(cand.control, cand.target) < std::pair(best->control, best->target))) {
                    best = cand;
                    best_cost = cost;
                }
            }
        }
        if (!best) {
            throw TopologyError("no buffered placement for attacker pair (" + std::to_string(old.control) + ", " +
                                std::to_string(old.target) + ")");
        }
        taken.insert(best->control);
        taken.insert(best->target);
        out.attackers.push_back(*best);
    }

    std::set<int> buffer;
    for (int q = 0; q < map.num_qubits(); ++q) {
        if (dv(q) != 1) continue;
        for (int w : map.neighbors(q)) {
            if (taken.count(w)) buffer.insert(q);
        }
    }
    out.buffer.assign(buffer.begin(), buffer.end());
    validate_layout(map, out);
    return out;
}

double refocusing_check(double nu_hz, double window_ns, const std::optional<DDSequence>& seq) {
    if (window_ns < 0.0) throw std::invalid_argument("window must be non-negative");
    // With the spectator fixed in |1>, Z(x)Z acts as -Z on the protected qubit.
    auto free_evolution = [&](double t_ns) {
        const double phi = std::numbers::pi * nu_hz * t_ns * 1e-9;
        return M2{std::polar(1.0, phi), 0.0, 0.0, std::polar(1.0, -phi)};
    };
    M2 u{1.0, 0.0, 0.0, 1.0};
    if (!seq) {
        u = free_evolution(window_ns);
    } else {
        const int m = seq->size();
        for (int i = 0; i <= m; ++i) {
            const double gap = (i == 0 || i == m) ? window_ns / (2.0 * m) : window_ns / m;
            u = mul(free_evolution(gap), u);
            if (i < m) u = mul(pauli(seq->pulses()[static_cast<std::size_t>(i)]), u);
        }
    }
    const double r = std::numbers::sqrt2 / 2.0;
    const C amp = r * (r * (u[0] + u[1]) + r * (u[2] + u[3]));
    return std::norm(amp);
}

}  // namespace qxtalk
