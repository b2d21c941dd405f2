#include "qxtalk/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "qxtalk/dd.hpp"
#include "qxtalk/sim.hpp"

namespace qxtalk {

std::string to_string(Mitigation m) {
    switch (m) {
        case Mitigation::None:
            return "none";
        case Mitigation::DDXX:
            return "dd-xx";
        case Mitigation::DDXYXY:
            return "dd-xyxy";
        case Mitigation::Buffer:
            return "buffer";
    }
    return "?";
}

Mitigation mitigation_from_string(const std::string& s) {
    if (s == "none") return Mitigation::None;
    if (s == "dd-xx") return Mitigation::DDXX;
    if (s == "dd-xyxy") return Mitigation::DDXYXY;
    if (s == "buffer") return Mitigation::Buffer;
    throw ConfigError("mitigation must be none, dd-xx, dd-xyxy or buffer, got '" + s + "'");
}

void ExperimentConfig::validate() const {
    const auto& names = preset_names();
    if (std::find(names.begin(), names.end(), layout) == names.end()) {
        throw ConfigError("unknown layout '" + layout + "'");
    }
    if (scenario < 1 || scenario > 3) throw ConfigError("scenario must be 1, 2 or 3");
    if (scenario == 3 && mitigation == Mitigation::None) throw ConfigError("scenario 3 needs a mitigation");
    if (scenario != 3 && mitigation != Mitigation::None) {
        throw ConfigError("scenario " + std::to_string(scenario) + " runs without mitigation");
    }
    if (n_cnot_max < 0) throw ConfigError("n_cnot_max must be non-negative");
    if (window_ns < 0) throw ConfigError("window_ns must be non-negative");
    if (shots < 1) throw ConfigError("shots must be positive");
    if (batches < 1) throw ConfigError("batches must be positive");
    try {
        victim.validate();
        noise.noise.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

Nanos attack_window(const ExperimentConfig& cfg, Nanos victim_duration) {
    Nanos prep = 0;
    for (GateKind k : {GateKind::X, GateKind::H}) prep = std::max(prep, cfg.durations.duration(Gate{k}));
    const Nanos trail = prep + cfg.n_cnot_max * cfg.durations.duration(Gate{GateKind::CX});
    if (cfg.window_ns > 0) {
        if (cfg.window_ns < trail) throw ConfigError("window_ns is shorter than the longest trail");
        return cfg.window_ns;
    }
    return std::max(victim_duration, trail);
}

Cell build_cell(const ExperimentConfig& cfg, int n_cnot) {
    const ScheduledCircuit victim = schedule(build_grover(cfg.victim), cfg.durations);
    const Nanos window = attack_window(cfg, victim.total_duration());
    Preset preset = layout_preset(cfg.layout, cfg.mitigation == Mitigation::Buffer, cfg.noise.zz_hz, cfg.noise.beta);

    std::vector<ScheduledCircuit> fragments;
    for (const AttackPair& pair : preset.layout.attackers) {
        const AttackSpec spec{n_cnot, cfg.control_init, pair};
        fragments.push_back(cfg.scenario == 1 ? build_placebo(spec, window, cfg.durations)
                                              : build_attack_trail(spec, window, cfg.durations));
    }
    ScheduledCircuit circuit = compose(victim, fragments, preset.layout);
    if (cfg.mitigation == Mitigation::DDXX || cfg.mitigation == Mitigation::DDXYXY) {
        const DDSequence seq = cfg.mitigation == Mitigation::DDXX ? DDSequence::xx() : DDSequence::xyxy();
        circuit = pad_dd(circuit, preset.layout.victim, seq, cfg.durations);
    }
    return Cell{std::move(circuit), std::move(preset)};
}

std::vector<ExperimentRecord> run_scenario(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    std::vector<int> sweep = options.n_cnot_values;
    if (sweep.empty()) {
        for (int n = 0; n <= cfg.n_cnot_max; ++n) sweep.push_back(n);
    }
    std::vector<Cell> cells;
    for (int n : sweep) {
        if (n < 0 || n > cfg.n_cnot_max) throw ConfigError("n_cnot " + std::to_string(n) + " outside the sweep");
        cells.push_back(build_cell(cfg, n));
    }
    const std::vector<double> ideal = ideal_distribution(cfg.victim);

    const std::size_t batches = static_cast<std::size_t>(cfg.batches);
    std::vector<ExperimentRecord> records(cells.size() * batches);
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors;
    std::mutex error_lock;

    auto work = [&] {
        for (std::size_t i = next++; i < records.size(); i = next++) {
            try {
                const auto t0 = std::chrono::steady_clock::now();
                const std::size_t ci = i / batches;
                const int n = sweep[ci];
                const int b = static_cast<int>(i % batches);
                const Cell& cell = cells[ci];
                const std::uint64_t seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(b));
                const Counts counts = simulate(cell.circuit, cell.preset.map, cfg.noise.noise,
                                               static_cast<std::uint64_t>(cfg.shots), seed, SimOptions{1, false});
                ExperimentRecord& r = records[i];
                r.scenario = cfg.scenario;
                r.layout = cfg.layout;
                r.mitigation = to_string(cfg.mitigation);
                r.control_init = to_string(cfg.control_init);
                r.n_cnot = n;
                r.batch = b;
                r.seed = seed;
                r.shots = cfg.shots;
                r.p_marked = marked_probability(counts, cfg.victim.marked);
                r.fidelity = classical_fidelity(counts.distribution(), ideal);
                r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_lock);
                errors.push_back(std::make_exception_ptr(std::runtime_error(
                    "cell n_cnot=" + std::to_string(sweep[i / batches]) + " batch=" +
                    std::to_string(i % batches) + ": " + e.what())));
                next = records.size();
            }
        }
    };

    int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(records.size(), 1)));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (!errors.empty()) std::rethrow_exception(errors.front());
    return records;
}

namespace {

using GroupKey = std::tuple<int, std::string, std::string, std::string>;

GroupKey series_key(const ExperimentRecord& r) { return {r.scenario, r.layout, r.mitigation, r.control_init}; }

double sample_std(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& records) {
    std::map<std::pair<GroupKey, int>, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& r : records) {
        auto& g = groups[{series_key(r), r.n_cnot}];
        g.first.push_back(r.fidelity);
        g.second.push_back(r.p_marked);
    }
    std::vector<AggregateRow> rows;
    for (const auto& [key, values] : groups) {
        AggregateRow row;
        std::tie(row.scenario, row.layout, row.mitigation, row.control_init) = key.first;
        row.n_cnot = key.second;
        row.count = static_cast<int>(values.first.size());
        row.mean_fidelity = mean_of(values.first);
        row.std_fidelity = sample_std(values.first, row.mean_fidelity);
        row.mean_p_marked = mean_of(values.second);
        row.std_p_marked = sample_std(values.second, row.mean_p_marked);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_header() { return "scenario,layout,mitigation,control_init,n_cnot,batch,seed,shots,p_marked,fidelity"; }

namespace {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

template <class T>
T parse_number(const std::string& field, std::size_t line_no) {
    std::istringstream in(field);
    T value{};
    in >> value;
    if (!in || !in.eof()) {
        throw ConfigError("line " + std::to_string(line_no) + ": bad number '" + field + "'");
    }
    return value;
}

}  // namespace

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
    std::string out = csv_header() + "\n";
    for (const auto& r : records) {
        out += std::to_string(r.scenario) + "," + r.layout + "," + r.mitigation + "," + r.control_init + "," +
               std::to_string(r.n_cnot) + "," + std::to_string(r.batch) + "," + std::to_string(r.seed) + "," +
               std::to_string(r.shots) + "," + fmt_double(r.p_marked) + "," + fmt_double(r.fidelity) + "\n";
    }
    return out;
}

std::vector<ExperimentRecord> records_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<ExperimentRecord> records;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != csv_header()) throw ConfigError("unexpected CSV header: " + line);
            header_seen = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 10) throw ConfigError("line " + std::to_string(line_no) + ": expected 10 fields");
        ExperimentRecord r;
        r.scenario = parse_number<int>(f[0], line_no);
        r.layout = f[1];
        r.mitigation = f[2];
        r.control_init = f[3];
        r.n_cnot = parse_number<int>(f[4], line_no);
        r.batch = parse_number<int>(f[5], line_no);
        r.seed = parse_number<std::uint64_t>(f[6], line_no);
        r.shots = parse_number<int>(f[7], line_no);
        r.p_marked = parse_number<double>(f[8], line_no);
        r.fidelity = parse_number<double>(f[9], line_no);
        records.push_back(std::move(r));
    }
    if (!header_seen) throw ConfigError("CSV has no header");
    return records;
}

namespace {

struct Style {
    std::string color;
    std::string dash;
};

Style series_style(int scenario, const std::string& mitigation) {
    if (scenario == 1) return {"#ff7f0e", ""};
    if (mitigation == "none") return {"#2ca02c", ""};
    if (mitigation == "dd-xx") return {"#1f77b4", ""};
    if (mitigation == "dd-xyxy") return {"#1f77b4", "6 3"};
    return {"#d62ad6", ""};
}

std::string series_label(const GroupKey& k, bool show_layout) {
    const auto& [scenario, layout, mitigation, init] = k;
    std::string label = scenario == 1 ? "no attack" : scenario == 2 ? "attack" : "attack + " + mitigation;
    label += " |" + init + "&gt;";
    if (show_layout) label += " [" + layout + "]";
    return label;
}

std::string f2(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

}  // namespace

std::string render_svg(const std::vector<AggregateRow>& rows) {
    if (rows.empty()) throw ConfigError("no data to plot");
    std::map<GroupKey, std::vector<const AggregateRow*>> series;
    std::set<std::string> layouts;
    int n_max = 0;
    for (const auto& r : rows) {
        series[{r.scenario, r.layout, r.mitigation, r.control_init}].push_back(&r);
        layouts.insert(r.layout);
        n_max = std::max(n_max, r.n_cnot);
    }
    const double W = 800, H = 500, left = 70, right = 210, top = 30, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;
    const double x_span = std::max(n_max, 1);
    auto px = [&](double n) { return left + pw * n / x_span; };
    auto py = [&](double f) { return top + ph * (1.0 - std::clamp(f, 0.0, 1.0)); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" viewBox=\"0 0 800 500\">\n";
    o << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
    o << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double f = i / 5.0;
        o << "<line x1=\"" << f2(left) << "\" y1=\"" << f2(py(f)) << "\" x2=\"" << f2(left + pw) << "\" y2=\""
          << f2(py(f)) << "\" stroke=\"#dddddd\"/>\n";
        o << "<text x=\"" << f2(left - 8) << "\" y=\"" << f2(py(f) + 4) << "\" text-anchor=\"end\">" << f2(f)
          << "</text>\n";
    }
    const int step = n_max <= 10 ? 1 : n_max <= 50 ? 5 : 10;
    for (int n = 0; n <= n_max; n += step) {
        o << "<text x=\"" << f2(px(n)) << "\" y=\"" << f2(top + ph + 18) << "\" text-anchor=\"middle\">" << n
          << "</text>\n";
    }
    o << "<rect x=\"" << f2(left) << "\" y=\"" << f2(top) << "\" width=\"" << f2(pw) << "\" height=\"" << f2(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << f2(left + pw / 2) << "\" y=\"" << f2(H - 15) << "\" text-anchor=\"middle\">attacker CX count</text>\n";
    o << "<text x=\"18\" y=\"" << f2(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << f2(top + ph / 2) << ")\">fidelity</text>\n";

    int index = 0;
    for (const auto& [key, pts] : series) {
        const Style st = series_style(std::get<0>(key), std::get<2>(key));
        std::string band, line;
        for (const auto* p : pts) band += f2(px(p->n_cnot)) + "," + f2(py(p->mean_fidelity + p->std_fidelity)) + " ";
        for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
            band += f2(px((*it)->n_cnot)) + "," + f2(py((*it)->mean_fidelity - (*it)->std_fidelity)) + " ";
        }
        for (const auto* p : pts) line += f2(px(p->n_cnot)) + "," + f2(py(p->mean_fidelity)) + " ";
        band.pop_back();
        line.pop_back();
        o << "<polygon points=\"" << band << "\" fill=\"" << st.color << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
        o << "<polyline points=\"" << line << "\" fill=\"none\" stroke=\"" << st.color << "\" stroke-width=\"2\"";
        if (!st.dash.empty()) o << " stroke-dasharray=\"" << st.dash << "\"";
        o << "/>\n";

        const double ly = top + 10 + 18 * index;
        o << "<line x1=\"" << f2(left + pw + 12) << "\" y1=\"" << f2(ly) << "\" x2=\"" << f2(left + pw + 36)
          << "\" y2=\"" << f2(ly) << "\" stroke=\"" << st.color << "\" stroke-width=\"2\"";
        if (!st.dash.empty()) o << " stroke-dasharray=\"" << st.dash << "\"";
        o << "/>\n";
        o << "<text x=\"" << f2(left + pw + 42) << "\" y=\"" << f2(ly + 4) << "\">"
          << series_label(key, layouts.size() > 1) << "</text>\n";
        ++index;
    }
    o << "</g>\n</svg>\n";
    return o.str();
}

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{"layout",  "scenario", "mitigation", "control_init", "n_cnot_max",
                                            "shots",   "batches",  "seed",       "victim",       "noise",
                                            "noise_file", "durations", "window_ns"};
    return keys;
}

ExperimentConfig config_from_object(const json& j, const std::string& base_dir) {
    for (const auto& [key, value] : j.items()) {
        if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    ExperimentConfig cfg;
    cfg.layout = j.value("layout", cfg.layout);
    cfg.scenario = j.value("scenario", cfg.scenario);
    cfg.mitigation = mitigation_from_string(j.value("mitigation", to_string(cfg.mitigation)));
    try {
        cfg.control_init = control_init_from_string(j.value("control_init", to_string(cfg.control_init)));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    cfg.n_cnot_max = j.value("n_cnot_max", cfg.n_cnot_max);
    cfg.window_ns = j.value("window_ns", cfg.window_ns);
    cfg.shots = j.value("shots", cfg.shots);
    cfg.batches = j.value("batches", cfg.batches);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("victim")) {
        const json& v = j.at("victim");
        cfg.victim.n = v.value("n", cfg.victim.n);
        cfg.victim.marked = v.value("marked", cfg.victim.marked);
        cfg.victim.iterations = v.value("iterations", cfg.victim.iterations);
    }
    if (j.contains("noise") && j.contains("noise_file")) throw ConfigError("give either noise or noise_file");
    try {
        if (j.contains("noise")) cfg.noise = noise_config_from_json(j.at("noise").dump());
        if (j.contains("noise_file")) {
            std::filesystem::path p = j.at("noise_file").get<std::string>();
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            std::ifstream in(p);
            if (!in) throw ConfigError("cannot read noise file " + p.string());
            std::stringstream ss;
            ss << in.rdbuf();
            cfg.noise = noise_config_from_json(ss.str());
        }
    } catch (const TopologyError& e) {
        throw ConfigError(e.what());
    }
    if (j.contains("durations")) {
        for (const auto& [name, ns] : j.at("durations").items()) {
            const auto kind = gate_from_name(name);
            if (!kind) throw ConfigError("unknown gate '" + name + "' in durations");
            cfg.durations.set(*kind, ns.get<Nanos>());
        }
    }
    cfg.validate();
    return cfg;
}

}  // namespace

std::vector<ExperimentConfig> experiments_from_json(const std::string& json_text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    std::vector<ExperimentConfig> out;
    try {
        if (!j.contains("experiments")) {
            out.push_back(config_from_object(j, base_dir));
            return out;
        }
        json base = j;
        base.erase("experiments");
        const json& list = j.at("experiments");
        if (!list.is_array() || list.empty()) throw ConfigError("experiments must be a non-empty array");
        for (const auto& entry : list) {
            if (!entry.is_object()) throw ConfigError("each experiment must be an object");
            json merged = base;
            if (entry.contains("noise") || entry.contains("noise_file")) {
                merged.erase("noise");
                merged.erase("noise_file");
            }
            merged.update(entry);
            out.push_back(config_from_object(merged, base_dir));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return out;
}

}  // namespace qxtalk
