#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qxtalk/dd.hpp"
#include "qxtalk/grover.hpp"
#include "qxtalk/harness.hpp"
#include "qxtalk/qasm.hpp"
#include "qxtalk/sim.hpp"

namespace py = pybind11;
using namespace qxtalk;

namespace {

NoiseConfig noise_from(const std::optional<std::string>& json) {
    return json ? noise_config_from_json(*json) : default_noise_config();
}

py::dict record_to_dict(const ExperimentRecord& r) {
    py::dict d;
    d["scenario"] = r.scenario;
    d["layout"] = r.layout;
    d["mitigation"] = r.mitigation;
    d["control_init"] = r.control_init;
    d["n_cnot"] = r.n_cnot;
    d["batch"] = r.batch;
    d["seed"] = r.seed;
    d["shots"] = r.shots;
    d["p_marked"] = r.p_marked;
    d["fidelity"] = r.fidelity;
    d["wall_ms"] = r.wall_ms;
    return d;
}

ExperimentRecord record_from_dict(const py::dict& d) {
    ExperimentRecord r;
    r.scenario = d["scenario"].cast<int>();
    r.layout = d["layout"].cast<std::string>();
    r.mitigation = d["mitigation"].cast<std::string>();
    r.control_init = d["control_init"].cast<std::string>();
    r.n_cnot = d["n_cnot"].cast<int>();
    r.batch = d["batch"].cast<int>();
    r.seed = d["seed"].cast<std::uint64_t>();
    r.shots = d["shots"].cast<int>();
    r.p_marked = d["p_marked"].cast<double>();
    r.fidelity = d["fidelity"].cast<double>();
    return r;
}

std::vector<ExperimentRecord> records_from(const py::list& items) {
    std::vector<ExperimentRecord> out;
    for (const auto& item : items) out.push_back(record_from_dict(item.cast<py::dict>()));
    return out;
}

py::dict counts_to_dict(const Counts& c) {
    py::dict d;
    for (const auto& [bits, n] : c.to_map()) d[py::str(bits)] = n;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Crosstalk attack and mitigation simulator";

    py::register_exception<CircuitError>(m, "CircuitError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<TopologyError>(m, "TopologyError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);

    py::class_<Circuit>(m, "Circuit")
        .def_property_readonly("num_qubits", &Circuit::num_qubits)
        .def_property_readonly("num_clbits", &Circuit::num_clbits)
        .def("__len__", [](const Circuit& c) { return c.instructions().size(); })
        .def("to_qasm", &emit_qasm);

    py::class_<ScheduledCircuit>(m, "ScheduledCircuit")
        .def_property_readonly("num_qubits", &ScheduledCircuit::num_qubits)
        .def_property_readonly("total_duration", &ScheduledCircuit::total_duration)
        .def("__len__", [](const ScheduledCircuit& s) { return s.timed().size(); })
        .def("to_circuit", &to_circuit);

    m.def("parse_qasm", [](const std::string& text) { return parse_qasm(text); }, py::arg("text"));
    m.def("emit_qasm", &emit_qasm, py::arg("circuit"));
    m.def("schedule", [](const Circuit& c) { return schedule(c, DurationTable::defaults()); }, py::arg("circuit"),
          "ASAP schedule with the default duration table.");
    m.def(
        "idle_windows",
        [](const ScheduledCircuit& s, int q) {
            std::vector<std::pair<Nanos, Nanos>> out;
            for (const auto& w : idle_windows(s, q)) out.emplace_back(w.start, w.end);
            return out;
        },
        py::arg("scheduled"), py::arg("qubit"));

    m.def(
        "build_grover",
        [](int n, const std::string& marked, int iterations) { return build_grover(GroverSpec{n, marked, iterations}); },
        py::arg("n") = 3, py::arg("marked") = "111", py::arg("iterations") = 2);
    m.def(
        "ideal_distribution",
        [](int n, const std::string& marked, int iterations) {
            return ideal_distribution(GroverSpec{n, marked, iterations});
        },
        py::arg("n") = 3, py::arg("marked") = "111", py::arg("iterations") = 2);

    m.def(
        "simulate",
        [](const Circuit& c, std::optional<std::string> noise_json, std::uint64_t shots, std::uint64_t seed,
           int threads) {
            const NoiseConfig cfg = noise_from(noise_json);
            const ScheduledCircuit s = schedule(c, DurationTable::defaults());
            Counts counts;
            {
                py::gil_scoped_release release;
                counts = simulate(s, device_map(cfg, c.num_qubits()), cfg.noise, shots, seed, SimOptions{threads});
            }
            return counts_to_dict(counts);
        },
        py::arg("circuit"), py::arg("noise_json") = py::none(), py::arg("shots") = 1024, py::arg("seed") = 1,
        py::arg("threads") = 0,
        "Counts keyed by bitstring (clbit 0 rightmost). Without noise_json the shipped defaults apply.");

    m.def(
        "pad_dd",
        [](const Circuit& c, const std::string& sequence, const std::vector<int>& qubits) {
            const DurationTable d = DurationTable::defaults();
            return to_circuit(pad_dd(schedule(c, d), qubits, DDSequence::parse(sequence), d));
        },
        py::arg("circuit"), py::arg("sequence"), py::arg("qubits"));
    m.def(
        "refocusing_check",
        [](double nu_hz, double window_ns, std::optional<std::string> sequence) {
            std::optional<DDSequence> seq;
            if (sequence) seq = DDSequence::parse(*sequence);
            return refocusing_check(nu_hz, window_ns, seq);
        },
        py::arg("nu_hz"), py::arg("window_ns"), py::arg("sequence") = py::none());

    m.def(
        "classical_fidelity",
        [](const std::vector<double>& p, const std::vector<double>& q) { return classical_fidelity(p, q); },
        py::arg("p"), py::arg("q"));
    m.def(
        "total_variation",
        [](const std::vector<double>& p, const std::vector<double>& q) { return total_variation(p, q); },
        py::arg("p"), py::arg("q"));

    m.def("default_noise_json", [] { return noise_config_to_json(default_noise_config()); });
    m.def(
        "layout_preset",
        [](const std::string& name, bool buffered) {
            const Preset p = layout_preset(name, buffered);
            py::dict d;
            d["num_qubits"] = p.map.num_qubits();
            std::vector<std::pair<int, int>> edges;
            for (const auto& [e, rate] : p.map.edges()) edges.emplace_back(e.a, e.b);
            d["edges"] = edges;
            d["victim"] = p.layout.victim;
            std::vector<std::pair<int, int>> attackers;
            for (const auto& a : p.layout.attackers) attackers.emplace_back(a.control, a.target);
            d["attackers"] = attackers;
            d["buffer"] = p.layout.buffer;
            return d;
        },
        py::arg("name"), py::arg("buffered") = false);

    m.def(
        "run_experiments",
        [](const std::string& config_json, const std::string& base_dir, std::optional<std::uint64_t> seed, int threads,
           std::vector<int> n_cnot_values) {
            auto configs = experiments_from_json(config_json, base_dir);
            std::vector<ExperimentRecord> all;
            {
                py::gil_scoped_release release;
                for (auto& cfg : configs) {
                    if (seed) cfg.seed = *seed;
                    auto records = run_scenario(cfg, RunOptions{threads, n_cnot_values});
                    all.insert(all.end(), records.begin(), records.end());
                }
            }
            py::list out;
            for (const auto& r : all) out.append(record_to_dict(r));
            return out;
        },
        py::arg("config_json"), py::arg("base_dir") = ".", py::arg("seed") = py::none(), py::arg("threads") = 0,
        py::arg("n_cnot_values") = std::vector<int>{},
        "Runs every experiment in a JSON run configuration and returns one dict per record.");
    m.def(
        "aggregate",
        [](const py::list& records) {
            py::list out;
            for (const auto& row : aggregate(records_from(records))) {
                py::dict d;
                d["scenario"] = row.scenario;
                d["layout"] = row.layout;
                d["mitigation"] = row.mitigation;
                d["control_init"] = row.control_init;
                d["n_cnot"] = row.n_cnot;
                d["count"] = row.count;
                d["mean_fidelity"] = row.mean_fidelity;
                d["std_fidelity"] = row.std_fidelity;
                d["mean_p_marked"] = row.mean_p_marked;
                d["std_p_marked"] = row.std_p_marked;
                out.append(d);
            }
            return out;
        },
        py::arg("records"));
    m.def(
        "records_to_csv", [](const py::list& records) { return records_to_csv(records_from(records)); },
        py::arg("records"));
    m.def(
        "render_svg", [](const py::list& records) { return render_svg(aggregate(records_from(records))); },
        py::arg("records"));
}
