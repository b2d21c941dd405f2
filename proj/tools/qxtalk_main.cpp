#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qxtalk/dd.hpp"
#include "qxtalk/harness.hpp"
#include "qxtalk/qasm.hpp"
#include "qxtalk/sim.hpp"

namespace {

using namespace qxtalk;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<int> parse_qubits(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const int q = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad qubit index '" + item + "'");
        out.push_back(q);
    }
    return out;
}

int cmd_run(const std::string& config_path, const std::string& out_path, const std::string& svg_path,
            const std::optional<std::uint64_t>& seed, int threads) {
    const auto base = std::filesystem::path(config_path).parent_path();
    auto experiments = experiments_from_json(read_file(config_path), base.empty() ? "." : base.string());
    std::vector<ExperimentRecord> all;
    for (auto& cfg : experiments) {
        if (seed) cfg.seed = *seed;
        auto records = run_scenario(cfg, RunOptions{threads});
        double ms = 0.0;
        for (const auto& r : records) ms += r.wall_ms;
        std::fprintf(stderr, "scenario %d layout %s mitigation %s control %s: %zu cells, %.0f ms cpu\n", cfg.scenario,
                     cfg.layout.c_str(), to_string(cfg.mitigation).c_str(), to_string(cfg.control_init).c_str(),
                     records.size(), ms);
        all.insert(all.end(), records.begin(), records.end());
    }
    write_file(out_path, records_to_csv(all));
    if (!svg_path.empty()) write_file(svg_path, render_svg(aggregate(all)));
    return 0;
}

int cmd_simulate(const std::string& in_path, const std::string& noise_path, std::uint64_t shots, std::uint64_t seed,
                 int threads) {
    const Circuit circuit = parse_qasm(read_file(in_path));
    const NoiseConfig cfg = noise_path.empty() ? default_noise_config() : noise_config_from_json(read_file(noise_path));
    const ScheduledCircuit s = schedule(circuit, DurationTable::defaults());
    const Counts counts = simulate(s, device_map(cfg, circuit.num_qubits()), cfg.noise, shots, seed, SimOptions{threads});
    nlohmann::ordered_json j;
    j["shots"] = counts.shots;
    j["seed"] = seed;
    j["counts"] = counts.to_map();
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_pad_dd(const std::string& in_path, const std::string& sequence, const std::string& qubits,
               const std::string& out_path) {
    const Circuit circuit = parse_qasm(read_file(in_path));
    const DurationTable d = DurationTable::defaults();
    const ScheduledCircuit padded = pad_dd(schedule(circuit, d), parse_qubits(qubits), DDSequence::parse(sequence), d);
    write_file(out_path, emit_qasm(to_circuit(padded)));
    return 0;
}

int cmd_report(const std::string& in_path, const std::string& svg_path) {
    const auto rows = aggregate(records_from_csv(read_file(in_path)));
    std::printf("scenario,layout,mitigation,control_init,n_cnot,count,mean_fidelity,std_fidelity,mean_p_marked\n");
    for (const auto& r : rows) {
        std::printf("%d,%s,%s,%s,%d,%d,%.6f,%.6f,%.6f\n", r.scenario, r.layout.c_str(), r.mitigation.c_str(),
                    r.control_init.c_str(), r.n_cnot, r.count, r.mean_fidelity, r.std_fidelity, r.mean_p_marked);
    }
    if (!svg_path.empty()) write_file(svg_path, render_svg(rows));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crosstalk attack and mitigation simulator"};
    app.require_subcommand(1);

    std::string config, out, svg, in, noise, sequence = "xyxy", qubits;
    std::uint64_t seed_value = 1, shots = 1024;
    int threads = 0;

    auto* run = app.add_subcommand("run", "Run the attack sweeps in a config file");
    run->add_option("--config", config, "Run configuration (JSON)")->required();
    run->add_option("--out", out, "CSV output path")->required();
    run->add_option("--svg", svg, "Also write a plot");
    auto* run_seed = run->add_option("--seed", seed_value, "Override the seed of every experiment");
    run->add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

    auto* sim = app.add_subcommand("simulate", "Sample a circuit under the noise model");
    sim->add_option("--in", in, "Circuit file")->required();
    sim->add_option("--noise", noise, "Noise configuration (JSON)");
    sim->add_option("--shots", shots, "Number of shots")->check(CLI::PositiveNumber);
    sim->add_option("--seed", seed_value, "Seed");
    sim->add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

    auto* pad = app.add_subcommand("pad-dd", "Insert dynamical decoupling into idle windows");
    pad->add_option("--in", in, "Circuit file")->required();
    pad->add_option("--sequence", sequence, "xx, xyxy or a pulse list like x,y,x,y");
    pad->add_option("--qubits", qubits, "Comma-separated qubits to protect")->required();
    pad->add_option("--out", out, "Output circuit file")->required();

    auto* report = app.add_subcommand("report", "Summarise a results CSV");
    report->add_option("--in", in, "Results CSV")->required();
    report->add_option("--svg", svg, "Plot output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            std::optional<std::uint64_t> seed;
            if (run_seed->count()) seed = seed_value;
            return cmd_run(config, out, svg, seed, threads);
        }
        if (*sim) return cmd_simulate(in, noise, shots, seed_value, threads);
        if (*pad) return cmd_pad_dd(in, sequence, qubits, out);
        if (*report) return cmd_report(in, svg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "qxtalk: %s\n", e.what());
        return 2;
    }
    return 1;
}
