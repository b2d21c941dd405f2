#include "qxtalk/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <exception>
#include <thread>

namespace qxtalk {

namespace {

constexpr Amplitude kI{0.0, 1.0};

inline double zsign(std::size_t x, int k) { return ((x >> k) & 1u) ? -1.0 : 1.0; }

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9E3779B97F4A7C15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::array<Amplitude, 4> gate_matrix(const Gate& gate) {
    const double r = std::numbers::sqrt2 / 2.0;
    switch (gate.kind) {
        case GateKind::H:
            return {r, r, r, -r};
        case GateKind::X:
            return {0.0, 1.0, 1.0, 0.0};
        case GateKind::Y:
            return {0.0, -kI, kI, 0.0};
        case GateKind::Z:
            return {1.0, 0.0, 0.0, -1.0};
        case GateKind::S:
            return {1.0, 0.0, 0.0, kI};
        case GateKind::Sdg:
            return {1.0, 0.0, 0.0, -kI};
        case GateKind::T:
            return {1.0, 0.0, 0.0, std::polar(1.0, std::numbers::pi / 4)};
        case GateKind::Tdg:
            return {1.0, 0.0, 0.0, std::polar(1.0, -std::numbers::pi / 4)};
        case GateKind::SX:
            return {Amplitude(0.5, 0.5), Amplitude(0.5, -0.5), Amplitude(0.5, -0.5), Amplitude(0.5, 0.5)};
        case GateKind::RZ:
            return {std::polar(1.0, -gate.angle / 2), 0.0, 0.0, std::polar(1.0, gate.angle / 2)};
        default:
            throw SimulationError("no single-qubit matrix for '" + std::string(gate_name(gate.kind)) + "'");
    }
}

Statevector::Statevector(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 0 || num_qubits > 26) throw SimulationError("unsupported statevector size");
    amps_.assign(std::size_t{1} << num_qubits, Amplitude{});
    amps_[0] = 1.0;
}

void Statevector::reset() {
    std::fill(amps_.begin(), amps_.end(), Amplitude{});
    amps_[0] = 1.0;
}

void Statevector::apply_1q(int q, const std::array<Amplitude, 4>& m) {
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t x = 0; x < amps_.size(); ++x) {
        if (x & bit) continue;
        const Amplitude a0 = amps_[x];
        const Amplitude a1 = amps_[x | bit];
        amps_[x] = m[0] * a0 + m[1] * a1;
        amps_[x | bit] = m[2] * a0 + m[3] * a1;
    }
}

void Statevector::apply_cx(int control, int target) {
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    for (std::size_t x = 0; x < amps_.size(); ++x) {
        if ((x & cbit) && !(x & tbit)) std::swap(amps_[x], amps_[x | tbit]);
    }
}

void Statevector::apply_gate(const Gate& gate, std::span<const int> qubits) {
    switch (gate.kind) {
        case GateKind::CX:
            apply_cx(qubits[0], qubits[1]);
            return;
        case GateKind::Delay:
        case GateKind::Barrier:
            return;
        case GateKind::Measure:
            throw SimulationError("measurement is not a unitary");
        default:
            apply_1q(qubits[0], gate_matrix(gate));
    }
}

void Statevector::apply_phases(std::span<const double> angles) {
    for (std::size_t x = 0; x < amps_.size(); ++x) amps_[x] *= std::polar(1.0, angles[x]);
}

double Statevector::probability_one(int q) const {
    const std::size_t bit = std::size_t{1} << q;
    double p = 0.0;
    for (std::size_t x = 0; x < amps_.size(); ++x) {
        if (x & bit) p += std::norm(amps_[x]);
    }
    return p;
}

void Statevector::collapse(int q, int outcome, double p_outcome) {
    const std::size_t bit = std::size_t{1} << q;
    const double scale = 1.0 / std::sqrt(p_outcome);
    for (std::size_t x = 0; x < amps_.size(); ++x) {
        const bool one = (x & bit) != 0;
        amps_[x] = (one == (outcome == 1)) ? amps_[x] * scale : Amplitude{};
    }
}

double Statevector::norm_squared() const {
    double n = 0.0;
    for (const auto& a : amps_) n += std::norm(a);
    return n;
}

std::vector<double> Statevector::probabilities() const {
    std::vector<double> p(amps_.size());
    for (std::size_t x = 0; x < amps_.size(); ++x) p[x] = std::norm(amps_[x]);
    return p;
}

std::string bitstring(std::size_t value, int width) {
    std::string s(static_cast<std::size_t>(width), '0');
    for (int c = 0; c < width; ++c) {
        if ((value >> c) & 1u) s[static_cast<std::size_t>(width - 1 - c)] = '1';
    }
    return s;
}

std::map<std::string, std::uint64_t> Counts::to_map() const {
    std::map<std::string, std::uint64_t> out;
    for (std::size_t v = 0; v < histogram.size(); ++v) {
        if (histogram[v]) out[bitstring(v, num_clbits)] = histogram[v];
    }
    return out;
}

std::vector<double> Counts::distribution() const {
    std::vector<double> p(histogram.size(), 0.0);
    if (shots == 0) return p;
    for (std::size_t v = 0; v < histogram.size(); ++v) p[v] = static_cast<double>(histogram[v]) / static_cast<double>(shots);
    return p;
}

std::uint64_t Counts::count(const std::string& bits) const {
    if (static_cast<int>(bits.size()) != num_clbits) throw SimulationError("bitstring width does not match register");
    std::size_t v = 0;
    for (int c = 0; c < num_clbits; ++c) {
        const char ch = bits[static_cast<std::size_t>(num_clbits - 1 - c)];
        if (ch == '1') {
            v |= std::size_t{1} << c;
        } else if (ch != '0') {
            throw SimulationError("bitstring must be binary");
        }
    }
    return histogram.at(v);
}

namespace {

// Everything about a run that does not depend on the shot.
struct Plan {
    struct Op {
        Gate gate;
        int q0 = -1;
        int q1 = -1;
        int clbit = -1;
    };
    struct Event {
        bool is_interval = false;
        double dt_ns = 0.0;
        int config = -1;
        Op op;
    };

    int num_qubits = 0;       // circuit qubits (detuning draws)
    std::vector<int> global;  // simulated index -> circuit qubit
    int num_clbits = 0;
    std::vector<Event> events;
    std::vector<std::vector<double>> config_energy;  // Hz, per basis state
};

Plan make_plan(const ScheduledCircuit& s, const CouplingMap& map, const NoiseModel& noise) {
    Plan plan;
    plan.num_qubits = s.num_qubits();
    plan.num_clbits = s.num_clbits();
    if (s.num_qubits() > kMaxSimQubits) {
        throw SimulationError("circuit has " + std::to_string(s.num_qubits()) + " qubits; the limit is " +
                              std::to_string(kMaxSimQubits));
    }

    std::vector<int> local(static_cast<std::size_t>(s.num_qubits()), -1);
    for (const auto& ti : s.timed()) {
        const GateKind k = ti.inst.gate.kind;
        if (k == GateKind::Delay || k == GateKind::Barrier) continue;
        for (int q : ti.inst.qubits) local[static_cast<std::size_t>(q)] = 0;
    }
    for (int q = 0; q < s.num_qubits(); ++q) {
        if (local[static_cast<std::size_t>(q)] == 0) {
            local[static_cast<std::size_t>(q)] = static_cast<int>(plan.global.size());
            plan.global.push_back(q);
        }
    }
    const int m = static_cast<int>(plan.global.size());
    const std::size_t dim = std::size_t{1} << m;

    // Delays and barriers change nothing physically, so they do not split
    // the timeline.
    std::vector<const TimedInstruction*> physical;
    std::vector<Nanos> times{0, s.total_duration()};
    for (const auto& ti : s.timed()) {
        const GateKind k = ti.inst.gate.kind;
        if (k == GateKind::Delay || k == GateKind::Barrier) continue;
        physical.push_back(&ti);
        times.push_back(ti.start);
        times.push_back(ti.end());
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    auto coupled = [&](int a, int b) { return a < map.num_qubits() && b < map.num_qubits(); };

    std::map<std::set<Edge>, int> config_index;
    auto config_for = [&](const std::set<Edge>& active) {
        auto it = config_index.find(active);
        if (it != config_index.end()) return it->second;
        std::vector<double> energy(dim, 0.0);
        for (int gi = 0; gi < s.num_qubits(); ++gi) {
            for (int gj = gi + 1; gj < s.num_qubits(); ++gj) {
                if (!coupled(gi, gj)) continue;
                const int li = local[static_cast<std::size_t>(gi)];
                const int lj = local[static_cast<std::size_t>(gj)];
                if (li < 0 && lj < 0) continue;  // global phase
                const double rate = effective_zz(map, noise.kappa, active, gi, gj);
                if (rate == 0.0) continue;
                for (std::size_t x = 0; x < dim; ++x) {
                    // Idle qubits never leave |0>, so they act as a fixed field.
                    const double zi = li < 0 ? 1.0 : zsign(x, li);
                    const double zj = lj < 0 ? 1.0 : zsign(x, lj);
                    energy[x] += rate * zi * zj;
                }
            }
        }
        const int idx = static_cast<int>(plan.config_energy.size());
        plan.config_energy.push_back(std::move(energy));
        config_index.emplace(active, idx);
        return idx;
    };

    std::size_t next_op = 0;
    std::vector<const TimedInstruction*> by_end = physical;
    std::stable_sort(by_end.begin(), by_end.end(),
                     [](const TimedInstruction* a, const TimedInstruction* b) { return a->end() < b->end(); });
    for (std::size_t k = 0; k < times.size(); ++k) {
        const Nanos t = times[k];
        while (next_op < by_end.size() && by_end[next_op]->end() == t) {
            const auto& inst = by_end[next_op]->inst;
            Plan::Op op;
            op.gate = inst.gate;
            op.q0 = local[static_cast<std::size_t>(inst.qubits[0])];
            if (inst.qubits.size() > 1) op.q1 = local[static_cast<std::size_t>(inst.qubits[1])];
            op.clbit = inst.clbit;
            plan.events.push_back(Plan::Event{false, 0.0, -1, op});
            ++next_op;
        }
        if (k + 1 == times.size()) break;
        const Nanos t1 = times[k + 1];
        std::set<Edge> active;
        for (const auto* ti : physical) {
            if (ti->inst.gate.kind == GateKind::CX && ti->start <= t && ti->end() >= t1) {
                active.insert(Edge::of(ti->inst.qubits[0], ti->inst.qubits[1]));
            }
        }
        plan.events.push_back(Plan::Event{true, static_cast<double>(t1 - t), config_for(active), {}});
    }
    return plan;
}

class Trajectory {
  public:
    Trajectory(const Plan& plan, const NoiseModel& noise, bool check_norm)
        : plan_(plan),
          noise_(noise),
          check_norm_(check_norm),
          m_(static_cast<int>(plan.global.size())),
          state_(m_),
          field_(state_.amplitudes().size()),
          diag_(state_.amplitudes().size()),
          angles_(state_.amplitudes().size()),
          tau_(plan.config_energy.size(), 0.0) {}

    std::size_t run(std::uint64_t seed, std::uint64_t shot) {
        std::mt19937_64 detune_rng(mix_seed(mix_seed(seed, shot), 1));
        std::mt19937_64 gate_rng(mix_seed(mix_seed(seed, shot), 2));
        std::mt19937_64 meas_rng(mix_seed(mix_seed(seed, shot), 3));
        std::uniform_real_distribution<double> uniform(0.0, 1.0);

        state_.reset();
        std::fill(diag_.begin(), diag_.end(), 0.0);
        std::fill(tau_.begin(), tau_.end(), 0.0);
        field_time_ = 0.0;
        pending_ = false;

        // One draw per circuit qubit, so a physical qubit sees the same
        // detuning in every circuit run with this seed.
        std::vector<double> detuning(static_cast<std::size_t>(plan_.num_qubits), 0.0);
        if (noise_.detuning_sigma_hz > 0.0) {
            std::normal_distribution<double> normal(0.0, noise_.detuning_sigma_hz);
            for (auto& d : detuning) d = normal(detune_rng);
        }
        std::fill(field_.begin(), field_.end(), 0.0);
        for (int k = 0; k < m_; ++k) {
            const double delta = detuning[static_cast<std::size_t>(plan_.global[static_cast<std::size_t>(k)])];
            if (delta == 0.0) continue;
            for (std::size_t x = 0; x < field_.size(); ++x) field_[x] += delta * zsign(x, k);
        }

        std::size_t outcome = 0;
        for (const auto& ev : plan_.events) {
            if (ev.is_interval) {
                tau_[static_cast<std::size_t>(ev.config)] += ev.dt_ns;
                field_time_ += ev.dt_ns;
                pending_ = true;
                if (noise_.include_t2_markovian) {
                    const double p = 0.5 * (1.0 - std::exp(-ev.dt_ns / noise_.t2_ns));
                    for (int k = 0; k < m_; ++k) {
                        if (uniform(gate_rng) < p) fold_phase(k, std::numbers::pi);
                    }
                }
                continue;
            }
            const auto& op = ev.op;
            switch (op.gate.kind) {
                case GateKind::Measure: {
                    const double p1 = state_.probability_one(op.q0);
                    const int bit = uniform(meas_rng) < p1 ? 1 : 0;
                    state_.collapse(op.q0, bit, bit ? p1 : 1.0 - p1);
                    const std::size_t mask = std::size_t{1} << op.clbit;
                    outcome = bit ? (outcome | mask) : (outcome & ~mask);
                    break;
                }
                case GateKind::CX: {
                    flush();
                    state_.apply_cx(op.q0, op.q1);
                    if (noise_.p2 > 0.0 && uniform(gate_rng) < noise_.p2) {
                        const int which = 1 + static_cast<int>(uniform(gate_rng) * 15.0);
                        apply_pauli(op.q0, std::min(which, 15) / 4);
                        apply_pauli(op.q1, std::min(which, 15) % 4);
                    }
                    break;
                }
                default: {
                    apply_single(op.gate, op.q0);
                    if (op.gate.kind != GateKind::RZ && noise_.p1 > 0.0 && uniform(gate_rng) < noise_.p1) {
                        const int which = 1 + static_cast<int>(uniform(gate_rng) * 3.0);
                        apply_pauli(op.q0, std::min(which, 3));
                    }
                }
            }
            if (check_norm_) verify_norm();
        }
        return outcome;
    }

  private:
    void fold_phase(int k, double phi) {
        for (std::size_t x = 0; x < diag_.size(); ++x) {
            if ((x >> k) & 1u) diag_[x] += phi;
        }
        pending_ = true;
    }

    void apply_single(const Gate& g, int k) {
        switch (g.kind) {
            case GateKind::Z:
                return fold_phase(k, std::numbers::pi);
            case GateKind::S:
                return fold_phase(k, std::numbers::pi / 2);
            case GateKind::Sdg:
                return fold_phase(k, -std::numbers::pi / 2);
            case GateKind::T:
                return fold_phase(k, std::numbers::pi / 4);
            case GateKind::Tdg:
                return fold_phase(k, -std::numbers::pi / 4);
            case GateKind::RZ:
                // diag(1, e^{i theta}) up to global phase
                return fold_phase(k, g.angle);
            default:
                flush();
                state_.apply_1q(k, gate_matrix(g));
        }
    }

    // 0 = I, 1 = X, 2 = Y, 3 = Z
    void apply_pauli(int k, int which) {
        static const Gate kPaulis[] = {Gate{GateKind::X}, Gate{GateKind::Y}, Gate{GateKind::Z}};
        if (which == 0) return;
        apply_single(kPaulis[which - 1], k);
    }

    void flush() {
        if (!pending_) return;
        const double scale = -std::numbers::pi * 1e-9;
        for (std::size_t x = 0; x < angles_.size(); ++x) angles_[x] = field_time_ * field_[x];
        for (std::size_t c = 0; c < tau_.size(); ++c) {
            if (tau_[c] == 0.0) continue;
            const auto& e = plan_.config_energy[c];
            for (std::size_t x = 0; x < angles_.size(); ++x) angles_[x] += tau_[c] * e[x];
            tau_[c] = 0.0;
        }
        for (std::size_t x = 0; x < angles_.size(); ++x) angles_[x] = scale * angles_[x] + diag_[x];
        state_.apply_phases(angles_);
        std::fill(diag_.begin(), diag_.end(), 0.0);
        field_time_ = 0.0;
        pending_ = false;
    }

    void verify_norm() {
        const double n = state_.norm_squared();
        if (!std::isfinite(n)) throw SimulationError("non-finite amplitude in trajectory");
        if (std::abs(n - 1.0) > 1e-9) throw SimulationError("statevector norm drifted to " + std::to_string(n));
    }

    const Plan& plan_;
    const NoiseModel& noise_;
    bool check_norm_;
    int m_;
    Statevector state_;
    std::vector<double> field_;
    std::vector<double> diag_;
    std::vector<double> angles_;
    std::vector<double> tau_;
    double field_time_ = 0.0;
    bool pending_ = false;
};

}  // namespace

Counts simulate(const ScheduledCircuit& s, const CouplingMap& map, const NoiseModel& noise, std::uint64_t shots,
                std::uint64_t seed, const SimOptions& options) {
    noise.validate();
    if (s.num_clbits() > 24) throw SimulationError("too many classical bits");
    const Plan plan = make_plan(s, map, noise);

    Counts counts;
    counts.num_clbits = s.num_clbits();
    counts.shots = shots;
    counts.histogram.assign(std::size_t{1} << s.num_clbits(), 0);

    int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = static_cast<int>(std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(threads, 1)), 1,
                                                         std::max<std::uint64_t>(shots, 1)));

    std::vector<std::vector<std::uint64_t>> partial(static_cast<std::size_t>(threads), counts.histogram);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    auto work = [&](int w) {
        try {
            Trajectory traj(plan, noise, options.check_norm);
            const std::uint64_t begin = shots * static_cast<std::uint64_t>(w) / static_cast<std::uint64_t>(threads);
            const std::uint64_t end = shots * static_cast<std::uint64_t>(w + 1) / static_cast<std::uint64_t>(threads);
            auto& hist = partial[static_cast<std::size_t>(w)];
            for (std::uint64_t shot = begin; shot < end; ++shot) ++hist[traj.run(seed, shot)];
        } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    for (const auto& hist : partial) {
        for (std::size_t v = 0; v < hist.size(); ++v) counts.histogram[v] += hist[v];
    }
    return counts;
}

std::vector<double> exact_distribution(const ScheduledCircuit& s) {
    if (s.num_qubits() > kMaxSimQubits + 6) throw SimulationError("circuit too large for exact evaluation");
    Statevector psi(s.num_qubits());
    std::vector<int> measured_into(static_cast<std::size_t>(s.num_qubits()), -1);
    for (const auto& ti : s.timed()) {
        const auto& inst = ti.inst;
        const GateKind k = inst.gate.kind;
        if (k == GateKind::Delay || k == GateKind::Barrier) continue;
        if (k == GateKind::Measure) {
            measured_into[static_cast<std::size_t>(inst.qubits[0])] = inst.clbit;
            continue;
        }
        for (int q : inst.qubits) {
            if (measured_into[static_cast<std::size_t>(q)] >= 0) {
                throw SimulationError("exact_distribution needs measurements to be terminal");
            }
        }
        psi.apply_gate(inst.gate, inst.qubits);
    }
    std::vector<double> out(std::size_t{1} << s.num_clbits(), 0.0);
    const auto probs = psi.probabilities();
    for (std::size_t x = 0; x < probs.size(); ++x) {
        std::size_t c = 0;
        for (int q = 0; q < s.num_qubits(); ++q) {
            const int cb = measured_into[static_cast<std::size_t>(q)];
            if (cb >= 0 && ((x >> q) & 1u)) c |= std::size_t{1} << cb;
        }
        out[c] += probs[x];
    }
    return out;
}

std::vector<double> exact_distribution(const Circuit& c) {
    std::vector<TimedInstruction> timed;
    Nanos t = 0;
    for (const auto& inst : c.instructions()) timed.push_back({inst, t++, 0});
    return exact_distribution(ScheduledCircuit(c.num_qubits(), c.num_clbits(), std::move(timed)));
}

double classical_fidelity(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw SimulationError("fidelity needs distributions over the same outcomes");
    double bc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) bc += std::sqrt(std::max(p[i], 0.0) * std::max(q[i], 0.0));
    return std::min(1.0, bc * bc);
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw SimulationError("total variation needs equal-length distributions");
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
    return 0.5 * tv;
}

double marked_probability(const Counts& counts, const std::string& marked) {
    if (counts.shots == 0) throw SimulationError("no shots recorded");
    return static_cast<double>(counts.count(marked)) / static_cast<double>(counts.shots);
}

}  // namespace qxtalk
