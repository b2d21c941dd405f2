#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qxtalk/attack.hpp"
#include "qxtalk/circuit.hpp"
#include "qxtalk/grover.hpp"
#include "qxtalk/topology.hpp"

namespace qxtalk {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Mitigation { None, DDXX, DDXYXY, Buffer };

std::string to_string(Mitigation m);
/// "none", "dd-xx", "dd-xyxy" or "buffer".
Mitigation mitigation_from_string(const std::string& s);

/// Scenario 1: no attack (placebo delays on the attacker qubits).
/// Scenario 2: attack, no mitigation. Scenario 3: attack with mitigation.
struct ExperimentConfig {
    std::string layout = "a";
    int scenario = 1;
    Mitigation mitigation = Mitigation::None;
    ControlInit control_init = ControlInit::Zero;
    int n_cnot_max = 45;
    /// Attack window length in ns; 0 derives it (see attack_window).
    Nanos window_ns = 0;
    int shots = 1024;
    int batches = 20;
    std::uint64_t seed = 1;
    GroverSpec victim;
    NoiseConfig noise = default_noise_config();
    DurationTable durations = DurationTable::defaults();

    /// Throws ConfigError. Scenarios 1 and 2 take mitigation "none",
    /// scenario 3 anything else.
    void validate() const;
};

struct ExperimentRecord {
    int scenario = 1;
    std::string layout;
    std::string mitigation;
    std::string control_init;
    int n_cnot = 0;
    int batch = 0;
    std::uint64_t seed = 0;
    int shots = 0;
    double p_marked = 0.0;
    double fidelity = 0.0;
    /// Wall time of the cell; never written to CSV.
    double wall_ms = 0.0;
};

struct RunOptions {
    /// Worker threads over (n_cnot, batch) cells; 0 picks the hardware
    /// concurrency. Output does not depend on it.
    int threads = 0;
    /// Sweep points to run; empty means every n_cnot in 0..n_cnot_max.
    std::vector<int> n_cnot_values;
};

/// Length of the shared window every trail and placebo is stretched over:
/// cfg.window_ns when set, else the victim's duration, or the longest trail
/// when that does not fit. Throws ConfigError when an explicit window is
/// too short for n_cnot_max gates.
Nanos attack_window(const ExperimentConfig& cfg, Nanos victim_duration);

/// The fully composed (and, for DD, padded) circuit of one sweep point,
/// together with the device it runs on.
struct Cell {
    ScheduledCircuit circuit;
    Preset preset;
};
Cell build_cell(const ExperimentConfig& cfg, int n_cnot);

/// Sweeps n_cnot over 0..n_cnot_max with `batches` seeds each. Batch b uses
/// seed mix_seed(cfg.seed, b) at every n_cnot. Records come back ordered by
/// (n_cnot, batch). A failing cell is reported with its (n_cnot, batch).
std::vector<ExperimentRecord> run_scenario(const ExperimentConfig& cfg, const RunOptions& options = {});

struct AggregateRow {
    int scenario = 1;
    std::string layout;
    std::string mitigation;
    std::string control_init;
    int n_cnot = 0;
    int count = 0;
    double mean_fidelity = 0.0;
    double std_fidelity = 0.0;
    double mean_p_marked = 0.0;
    double std_p_marked = 0.0;
};

/// Mean and sample standard deviation (0 for a single record) per
/// (scenario, layout, mitigation, control_init, n_cnot), in that sort order.
std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& records);

std::string csv_header();
std::string records_to_csv(const std::vector<ExperimentRecord>& records);
/// Throws ConfigError on a wrong header or malformed row.
std::vector<ExperimentRecord> records_from_csv(const std::string& text);

/// Line plot of mean fidelity against n_cnot with +/- 1 std bands, one
/// series per (scenario, layout, mitigation, control_init). Deterministic
/// for a given input. Throws ConfigError when there is nothing to plot.
std::string render_svg(const std::vector<AggregateRow>& rows);

/// Parses a run configuration: one experiment object, or an object with an
/// "experiments" array whose entries override the top-level fields.
/// `base_dir` resolves a relative "noise_file".
std::vector<ExperimentConfig> experiments_from_json(const std::string& json_text, const std::string& base_dir = ".");

}  // namespace qxtalk
