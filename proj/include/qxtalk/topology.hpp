#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qxtalk {

class TopologyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Unordered qubit pair, stored with first < second.
struct Edge {
    int a = 0;
    int b = 0;

    static Edge of(int i, int j);
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Device graph with a static ZZ rate (Hz) per edge. Qubits two hops apart
/// couple at beta times the weaker of the two edges along the path.
class CouplingMap {
  public:
    CouplingMap() = default;
    CouplingMap(int num_qubits, double next_nearest_factor = 0.05);

    void add_edge(int i, int j, double zz_hz);

    int num_qubits() const { return num_qubits_; }
    double beta() const { return beta_; }
    void set_beta(double beta);

    /// Edges in ascending order with their rates.
    const std::vector<std::pair<Edge, double>>& edges() const { return edges_; }
    bool adjacent(int i, int j) const;
    std::optional<double> edge_rate(int i, int j) const;
    const std::vector<int>& neighbors(int q) const { return adj_.at(static_cast<std::size_t>(q)); }
    int degree(int q) const { return static_cast<int>(neighbors(q).size()); }

    /// Hop count, or -1 when disconnected.
    int distance(int i, int j) const;
    /// Static coupling for (i, j): edge rate, beta-scaled two-hop rate, or 0.
    double static_zz(int i, int j) const;

    /// Replaces every edge rate with `zz_hz`.
    void set_uniform_rate(double zz_hz);

    /// Subgraph on `qubits`, relabelled 0..k-1 in the given order.
    CouplingMap induced(const std::vector<int>& qubits) const;

  private:
    int num_qubits_ = 0;
    double beta_ = 0.05;
    std::vector<std::pair<Edge, double>> edges_;
    std::vector<std::vector<int>> adj_;
};

/// Heavy-hex lattice of rows x cols hexagons, each hexagon edge carrying an
/// extra degree-2 qubit. Numbering runs along each horizontal chain, then
/// over the bridge qubits linking it to the next chain.
CouplingMap heavy_hex_map(int rows, int cols, double default_zz_hz);

struct AttackPair {
    int control = 0;
    int target = 0;
    friend bool operator==(const AttackPair&, const AttackPair&) = default;
};

struct Layout {
    std::string name;
    std::vector<int> victim;
    std::vector<AttackPair> attackers;
    std::vector<int> buffer;

    std::vector<int> attacker_qubits() const;
    bool buffered() const { return !buffer.empty(); }
    friend bool operator==(const Layout&, const Layout&) = default;
};

/// Checks the layout against the map: victim is a connected path, attacker
/// pairs are edges, roles are disjoint, and attacker-victim distance is 1
/// (unbuffered) or at least 2 (buffered). Throws TopologyError.
void validate_layout(const CouplingMap& map, const Layout& layout);

/// Smallest hop distance from any attacker qubit to any victim qubit.
int attacker_victim_distance(const CouplingMap& map, const Layout& layout);

struct Preset {
    CouplingMap map;
    Layout layout;
};

/// Fixed attacker/victim placements "a".."e" on small heavy-hex patches.
///   a: victim on a chain, one attacker pair beside it, control nearest.
///   b: as a, with the target nearest and the control one hop further out.
///   c: attacker pair reaching the victim through a bridge qubit.
///   d: attacker pairs at both ends of the victim.
///   e: three attacker sites around a degree-3 victim qubit.
/// The buffered variant uses the same map with attackers moved one hop out.
Preset layout_preset(const std::string& name, bool buffered, double zz_hz = 50e3, double beta = 0.05);

const std::vector<std::string>& preset_names();

/// Quasi-static and gate noise applied by the simulator.
struct NoiseModel {
    double detuning_sigma_hz = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double kappa = 1.0;
    bool include_t2_markovian = false;
    double t2_ns = 0.0;

    void validate() const;
};

/// Coupling for (i, j) with the given CX gates running. The static rate is
/// multiplied by kappa when an active CX shares a qubit with (i, j) and is
/// not the pair itself.
double effective_zz(const CouplingMap& map, double kappa, const std::set<Edge>& active_cx, int i, int j);

/// Settings for topology and noise read from a JSON document.
struct NoiseConfig {
    double zz_hz = 50e3;
    double beta = 0.05;
    NoiseModel noise;
    /// Optional explicit device graph; otherwise a layout preset or none.
    std::optional<std::string> layout;
    std::vector<std::pair<int, int>> edges;
};

NoiseConfig noise_config_from_json(const std::string& json_text);
std::string noise_config_to_json(const NoiseConfig& cfg);

/// Device for a standalone circuit of `num_qubits`: the explicit edge list
/// if given, else the named preset's (unbuffered) map, else a chain
/// 0-1-...-(n-1). Every edge carries zz_hz.
CouplingMap device_map(const NoiseConfig& cfg, int num_qubits);

/// Defaults shipped with the repository (see configs/default_noise.json).
NoiseConfig default_noise_config();

}  // namespace qxtalk
