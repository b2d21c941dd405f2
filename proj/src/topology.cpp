#include "qxtalk/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include <nlohmann/json.hpp>

namespace qxtalk {

Edge Edge::of(int i, int j) { return i < j ? Edge{i, j} : Edge{j, i}; }

CouplingMap::CouplingMap(int num_qubits, double next_nearest_factor)
    : num_qubits_(num_qubits), adj_(static_cast<std::size_t>(std::max(num_qubits, 0))) {
    if (num_qubits < 0) throw TopologyError("qubit count must be non-negative");
    set_beta(next_nearest_factor);
}

void CouplingMap::set_beta(double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw TopologyError("next-nearest factor must lie in [0, 1]");
    beta_ = beta;
}

void CouplingMap::add_edge(int i, int j, double zz_hz) {
    if (i == j) throw TopologyError("self-edge on qubit " + std::to_string(i));
    if (i < 0 || j < 0 || i >= num_qubits_ || j >= num_qubits_) throw TopologyError("edge endpoint out of range");
    if (!(zz_hz >= 0.0) || !std::isfinite(zz_hz)) throw TopologyError("zz rate must be finite and non-negative");
    const Edge e = Edge::of(i, j);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e,
                               [](const auto& entry, const Edge& key) { return entry.first < key; });
    if (it != edges_.end() && it->first == e) {
        it->second = zz_hz;
        return;
    }
    edges_.insert(it, {e, zz_hz});
    auto& ni = adj_[static_cast<std::size_t>(i)];
    auto& nj = adj_[static_cast<std::size_t>(j)];
    ni.insert(std::upper_bound(ni.begin(), ni.end(), j), j);
    nj.insert(std::upper_bound(nj.begin(), nj.end(), i), i);
}

bool CouplingMap::adjacent(int i, int j) const { return edge_rate(i, j).has_value(); }

std::optional<double> CouplingMap::edge_rate(int i, int j) const {
    if (i == j) return std::nullopt;
    const Edge e = Edge::of(i, j);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e,
                               [](const auto& entry, const Edge& key) { return entry.first < key; });
    if (it != edges_.end() && it->first == e) return it->second;
    return std::nullopt;
}

int CouplingMap::distance(int i, int j) const {
    if (i == j) return 0;
    std::vector<int> dist(static_cast<std::size_t>(num_qubits_), -1);
    std::deque<int> frontier{i};
    dist[static_cast<std::size_t>(i)] = 0;
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop_front();
        for (int v : neighbors(u)) {
            if (dist[static_cast<std::size_t>(v)] >= 0) continue;
            dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
            if (v == j) return dist[static_cast<std::size_t>(v)];
            frontier.push_back(v);
        }
    }
    return -1;
}

double CouplingMap::static_zz(int i, int j) const {
    if (i == j) return 0.0;
    if (auto r = edge_rate(i, j)) return *r;
    double best = 0.0;
    bool two_hop = false;
    for (int k : neighbors(i)) {
        if (auto r = edge_rate(k, j)) {
            two_hop = true;
            best = std::max(best, std::min(*edge_rate(i, k), *r));
        }
    }
    return two_hop ? beta_ * best : 0.0;
}

void CouplingMap::set_uniform_rate(double zz_hz) {
    if (!(zz_hz >= 0.0)) throw TopologyError("zz rate must be non-negative");
    for (auto& e : edges_) e.second = zz_hz;
}

CouplingMap CouplingMap::induced(const std::vector<int>& qubits) const {
    std::map<int, int> relabel;
    for (std::size_t k = 0; k < qubits.size(); ++k) {
        if (qubits[k] < 0 || qubits[k] >= num_qubits_) throw TopologyError("induced subgraph qubit out of range");
        if (!relabel.emplace(qubits[k], static_cast<int>(k)).second) throw TopologyError("duplicate qubit in subgraph");
    }
    CouplingMap out(static_cast<int>(qubits.size()), beta_);
    for (const auto& [e, rate] : edges_) {
        auto ia = relabel.find(e.a);
        auto ib = relabel.find(e.b);
        if (ia != relabel.end() && ib != relabel.end()) out.add_edge(ia->second, ib->second, rate);
    }
    return out;
}

CouplingMap heavy_hex_map(int rows, int cols, double default_zz_hz) {
    if (rows < 1 || cols < 1) throw TopologyError("heavy-hex needs at least one row and column");
    // Brick-wall honeycomb: hexagon (r, c) spans columns 2c+o .. 2c+o+2 of
    // chains r and r+1, with o = r % 2.
    using Vertex = std::pair<int, int>;  // (chain, column)
    std::set<Vertex> vertices;
    std::set<std::pair<Vertex, Vertex>> horizontal, vertical;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int j0 = 2 * c + r % 2;
            for (int line : {r, r + 1}) {
                for (int j = j0; j <= j0 + 2; ++j) vertices.insert({line, j});
                horizontal.insert({{line, j0}, {line, j0 + 1}});
                horizontal.insert({{line, j0 + 1}, {line, j0 + 2}});
            }
            vertical.insert({{r, j0}, {r + 1, j0}});
            vertical.insert({{r, j0 + 2}, {r + 1, j0 + 2}});
        }
    }

    std::map<Vertex, int> vid;
    std::map<std::pair<Vertex, Vertex>, int> mid;
    int next = 0;
    for (int line = 0; line <= rows; ++line) {
        std::optional<Vertex> prev;
        for (const auto& v : vertices) {
            if (v.first != line) continue;
            if (prev && horizontal.count({*prev, v})) mid[{*prev, v}] = next++;
            vid[v] = next++;
            prev = v;
        }
        for (const auto& e : vertical) {
            if (e.first.first == line) mid[e] = next++;
        }
    }
    CouplingMap map(next);
    for (const auto& [e, m] : mid) {
        map.add_edge(vid.at(e.first), m, default_zz_hz);
        map.add_edge(m, vid.at(e.second), default_zz_hz);
    }
    return map;
}

std::vector<int> Layout::attacker_qubits() const {
    std::vector<int> out;
    for (const auto& p : attackers) {
        out.push_back(p.control);
        out.push_back(p.target);
    }
    return out;
}

int attacker_victim_distance(const CouplingMap& map, const Layout& layout) {
    int best = -1;
    for (int a : layout.attacker_qubits()) {
        for (int v : layout.victim) {
            const int d = map.distance(a, v);
            if (d >= 0 && (best < 0 || d < best)) best = d;
        }
    }
    return best;
}

void validate_layout(const CouplingMap& map, const Layout& layout) {
    auto in_range = [&](int q) { return q >= 0 && q < map.num_qubits(); };
    if (layout.victim.empty()) throw TopologyError("layout has no victim qubits");
    std::set<int> seen;
    auto claim = [&](int q, const char* role) {
        if (!in_range(q)) throw TopologyError(std::string(role) + " qubit out of range");
        if (!seen.insert(q).second) throw TopologyError("qubit " + std::to_string(q) + " has more than one role");
    };
    for (int q : layout.victim) claim(q, "victim");
    for (int q : layout.attacker_qubits()) claim(q, "attacker");
    for (int q : layout.buffer) claim(q, "buffer");
    for (std::size_t i = 1; i < layout.victim.size(); ++i) {
        if (!map.adjacent(layout.victim[i - 1], layout.victim[i])) throw TopologyError("victim qubits do not form a path");
    }
    for (const auto& p : layout.attackers) {
        if (!map.adjacent(p.control, p.target)) throw TopologyError("attacker pair is not a coupling edge");
    }
    if (layout.attackers.empty()) return;
    const int d = attacker_victim_distance(map, layout);
    if (layout.buffered()) {
        if (d >= 0 && d < 2) throw TopologyError("buffered layout has an attacker adjacent to the victim");
    } else if (d != 1) {
        throw TopologyError("unbuffered layout has no attacker adjacent to the victim");
    }
}

void NoiseModel::validate() const {
    if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0)) throw TopologyError("gate error rates must lie in [0, 1]");
    if (!(detuning_sigma_hz >= 0.0)) throw TopologyError("detuning sigma must be non-negative");
    if (!(kappa >= 1.0)) throw TopologyError("kappa must be at least 1");
    if (include_t2_markovian && !(t2_ns > 0.0)) throw TopologyError("Markovian T2 needs t2_ns > 0");
}

double effective_zz(const CouplingMap& map, double kappa, const std::set<Edge>& active_cx, int i, int j) {
    if (i == j) throw TopologyError("effective_zz needs two distinct qubits");
    const double base = map.static_zz(i, j);
    if (base == 0.0) return 0.0;
    const Edge self = Edge::of(i, j);
    for (const Edge& e : active_cx) {
        if (e == self) continue;
        if (e.a == i || e.a == j || e.b == i || e.b == j) return kappa * base;
    }
    return base;
}

namespace {

// Patch of heavy_hex_map(2, 2). Chain 12-13-...-22 runs through the middle;
// bridges 10 (to 4 above) and 24 (to 30 below) hang off 16 and 18.
const CouplingMap& reference_patch() {
    static const CouplingMap map = heavy_hex_map(2, 2, 1.0);
    return map;
}

struct PresetSpec {
    std::vector<int> qubits;  // global indices, in local order
    std::vector<int> victim;
    std::vector<AttackPair> open;
    std::vector<AttackPair> shielded;
    std::vector<int> buffer;
};

const std::map<std::string, PresetSpec>& preset_specs() {
    static const std::map<std::string, PresetSpec> specs{
        {"a", {{14, 15, 16, 17, 18, 19, 10, 24}, {17, 18, 19}, {{16, 15}}, {{15, 14}}, {16}}},
        {"b", {{14, 15, 16, 17, 18, 19, 10, 24}, {17, 18, 19}, {{15, 16}}, {{14, 15}}, {16}}},
        {"c", {{14, 15, 16, 17, 18, 10, 4, 3, 5}, {15, 16, 17}, {{10, 4}}, {{4, 3}}, {10}}},
        {"d", {{13, 14, 15, 16, 17, 18, 19, 20, 21}, {16, 17, 18}, {{15, 14}, {19, 20}}, {{14, 13}, {20, 21}}, {15, 19}}},
        {"e",
         {{12, 13, 14, 15, 16, 17, 18, 19, 20, 10, 4, 3},
          {15, 16, 17},
          {{14, 13}, {18, 19}, {10, 4}},
          {{13, 12}, {19, 20}, {4, 3}},
          {14, 18, 10}}},
    };
    return specs;
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"a", "b", "c", "d", "e"};
    return names;
}

Preset layout_preset(const std::string& name, bool buffered, double zz_hz, double beta) {
    auto it = preset_specs().find(name);
    if (it == preset_specs().end()) throw TopologyError("unknown layout preset '" + name + "'");
    const PresetSpec& spec = it->second;
    CouplingMap map = reference_patch().induced(spec.qubits);
    map.set_uniform_rate(zz_hz);
    map.set_beta(beta);

    std::map<int, int> local;
    for (std::size_t k = 0; k < spec.qubits.size(); ++k) local[spec.qubits[k]] = static_cast<int>(k);
    auto to_local = [&](const std::vector<int>& qs) {
        std::vector<int> out;
        for (int q : qs) out.push_back(local.at(q));
        return out;
    };
    Layout layout;
    layout.name = name;
    layout.victim = to_local(spec.victim);
    for (const auto& p : buffered ? spec.shielded : spec.open) {
        layout.attackers.push_back({local.at(p.control), local.at(p.target)});
    }
    if (buffered) layout.buffer = to_local(spec.buffer);
    validate_layout(map, layout);
    return Preset{std::move(map), std::move(layout)};
}

NoiseConfig noise_config_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw TopologyError(std::string("noise config: ") + e.what());
    }
    if (!j.is_object()) throw TopologyError("noise config must be a JSON object");
    NoiseConfig cfg = default_noise_config();
    try {
        cfg.zz_hz = j.value("zz_hz", cfg.zz_hz);
        cfg.beta = j.value("beta", cfg.beta);
        cfg.noise.kappa = j.value("kappa", cfg.noise.kappa);
        cfg.noise.detuning_sigma_hz = j.value("detuning_sigma_hz", cfg.noise.detuning_sigma_hz);
        cfg.noise.p1 = j.value("p1", cfg.noise.p1);
        cfg.noise.p2 = j.value("p2", cfg.noise.p2);
        cfg.noise.include_t2_markovian = j.value("include_t2_markovian", cfg.noise.include_t2_markovian);
        cfg.noise.t2_ns = j.value("t2_ns", cfg.noise.t2_ns);
        if (j.contains("layout")) cfg.layout = j.at("layout").get<std::string>();
        if (j.contains("edges")) cfg.edges = j.at("edges").get<std::vector<std::pair<int, int>>>();
    } catch (const nlohmann::json::exception& e) {
        throw TopologyError(std::string("noise config: ") + e.what());
    }
    if (!(cfg.zz_hz >= 0.0)) throw TopologyError("zz_hz must be non-negative");
    if (!(cfg.beta >= 0.0 && cfg.beta <= 1.0)) throw TopologyError("beta must lie in [0, 1]");
    cfg.noise.validate();
    return cfg;
}

std::string noise_config_to_json(const NoiseConfig& cfg) {
    nlohmann::ordered_json j;
    j["zz_hz"] = cfg.zz_hz;
    j["beta"] = cfg.beta;
    j["kappa"] = cfg.noise.kappa;
    j["detuning_sigma_hz"] = cfg.noise.detuning_sigma_hz;
    j["p1"] = cfg.noise.p1;
    j["p2"] = cfg.noise.p2;
    if (cfg.noise.include_t2_markovian) {
        j["include_t2_markovian"] = true;
        j["t2_ns"] = cfg.noise.t2_ns;
    }
    if (cfg.layout) j["layout"] = *cfg.layout;
    if (!cfg.edges.empty()) j["edges"] = cfg.edges;
    return j.dump(2) + "\n";
}

CouplingMap device_map(const NoiseConfig& cfg, int num_qubits) {
    if (!cfg.edges.empty()) {
        CouplingMap map(num_qubits, cfg.beta);
        for (const auto& [a, b] : cfg.edges) map.add_edge(a, b, cfg.zz_hz);
        return map;
    }
    if (cfg.layout) {
        CouplingMap map = layout_preset(*cfg.layout, false, cfg.zz_hz, cfg.beta).map;
        if (map.num_qubits() < num_qubits) throw TopologyError("circuit is wider than the layout's device");
        return map;
    }
    CouplingMap map(num_qubits, cfg.beta);
    for (int q = 0; q + 1 < num_qubits; ++q) map.add_edge(q, q + 1, cfg.zz_hz);
    return map;
}

NoiseConfig default_noise_config() {
    NoiseConfig cfg;
    // Calibrated with tools/calibrate.py so the no-attack fidelity sits near 0.66.
    cfg.zz_hz = 2e3;
    cfg.beta = 0.05;
    cfg.noise.kappa = 20.0;
    cfg.noise.detuning_sigma_hz = 30e3;
    cfg.noise.p1 = 0.001;
    cfg.noise.p2 = 0.015;
    return cfg;
}

}  // namespace qxtalk
