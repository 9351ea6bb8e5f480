#include "remest/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace remest {
namespace io {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_header_block(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "# toolkit_version=" << toolkit_version() << "\n";
    out << "# config_hash=" << cfg.hash_hex() << "\n";
    out << "# master_seed=" << cfg.seed << "\n";
    return out.str();
}

ordered_json meta_json(const ExperimentConfig& cfg) {
    ordered_json meta;
    meta["toolkit_version"] = toolkit_version();
    meta["config_hash"] = cfg.hash_hex();
    meta["master_seed"] = cfg.seed;
    return meta;
}

void write_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void ensure_dir(const std::string& dir) { std::filesystem::create_directories(dir); }

std::string thresholds_csv(const ExperimentConfig& cfg, const ThresholdSchedule& sched) {
    std::ostringstream out;
    out << csv_header_block(cfg) << "t,s,k,refined\n";
    for (std::size_t t = 0; t < sched.k.size(); ++t)
        for (int s = 0; s < 2; ++s)
            out << t << ',' << s << ',' << format_double(sched.k[t][s]) << ','
                << (sched.refined[t][s] ? "true" : "false") << "\n";
    return out.str();
}

namespace {
ordered_json k_value_json(double k) {
    if (std::isinf(k)) return ordered_json("inf");
    return ordered_json(k);
}
} // namespace

ordered_json thresholds_json(const ExperimentConfig& cfg, const ThresholdSchedule& sched,
                             double initial_value, const StructureReport& report) {
    ordered_json j;
    j["meta"] = meta_json(cfg);
    j["horizon"] = sched.horizon();
    j["initial_value"] = initial_value;
    ordered_json entries = ordered_json::array();
    for (std::size_t t = 0; t < sched.k.size(); ++t) {
        for (int s = 0; s < 2; ++s) {
            ordered_json e;
            e["t"] = t;
            e["s"] = s;
            e["k"] = k_value_json(sched.k[t][s]);
            e["refined"] = sched.refined[t][s];
            e["sign_changes"] = sched.sign_changes[t][s];
            e["structure_ok"] = sched.structure_ok[t][s];
            entries.push_back(e);
        }
    }
    j["thresholds"] = entries;
    j["structure"] = structure_json(report);
    return j;
}

ThresholdSchedule thresholds_from_json(const std::string& text, double* initial_value) {
    ordered_json j = ordered_json::parse(text);
    std::size_t T = j.at("horizon").get<std::size_t>();
    ThresholdSchedule sched = ThresholdSchedule::constant(T, kThresholdInf);
    for (const auto& e : j.at("thresholds")) {
        auto t = e.at("t").get<std::size_t>();
        int s = e.at("s").get<int>();
        const auto& kv = e.at("k");
        sched.k[t][s] = kv.is_string() ? kThresholdInf : kv.get<double>();
        if (e.contains("refined")) sched.refined[t][s] = e.at("refined").get<bool>();
    }
    if (initial_value) {
        *initial_value = std::numeric_limits<double>::quiet_NaN();
        if (j.contains("initial_value") && j.at("initial_value").is_number())
            *initial_value = j.at("initial_value").get<double>();
    }
    return sched;
}

std::string value_grid_csv(const ExperimentConfig& cfg, const ValueGrid& vg) {
    std::ostringstream out;
    out << csv_header_block(cfg) << "t,s,e,J,J0,J1\n";
    for (std::size_t t = 0; t <= vg.horizon; ++t)
        for (int s = 0; s < 2; ++s)
            for (std::size_t i = 0; i < vg.grid.size(); ++i)
                out << t << ',' << s << ',' << format_double(vg.grid.point(i)) << ','
                    << format_double(vg.J[t][s][i]) << ',' << format_double(vg.J0[t][s][i]) << ','
                    << format_double(vg.J1[t][s][i]) << "\n";
    return out.str();
}

ordered_json structure_json(const StructureReport& report) {
    ordered_json j;
    j["max_evenness_violation"] = report.max_evenness_violation;
    j["max_ei_violation"] = report.max_ei_violation;
    j["max_min_identity_violation"] = report.max_min_identity_violation;
    j["max_terminal_violation"] = report.max_terminal_violation;
    j["m0_max_violation"] = report.m0_max_violation;
    j["max_sign_changes"] = report.max_sign_changes;
    j["prefix_violations"] = report.prefix_violations;
    ordered_json sc = ordered_json::array();
    for (std::size_t t = 0; t < report.sign_changes.size(); ++t)
        sc.push_back({report.sign_changes[t][0], report.sign_changes[t][1]});
    j["sign_changes"] = sc;
    j["ok"] = report.ok();
    return j;
}

ordered_json cost_json(const ExperimentConfig& cfg, const CostEstimate& est) {
    ordered_json j;
    j["meta"] = meta_json(cfg);
    j["mean"] = est.mean;
    j["std_error"] = est.std_error;
    j["n_reps"] = est.n_reps;
    j["transmission_mean"] = est.transmission_mean;
    j["distortion_mean"] = est.distortion_mean;
    j["tx_count_mean"] = est.tx_count_mean;
    j["tx_count_std_error"] = est.tx_count_std_error;
    return j;
}

std::string trajectories_csv(const ExperimentConfig& cfg,
                             const std::vector<TrajectoryRecord>& episodes) {
    std::ostringstream out;
    out << csv_header_block(cfg) << "rep,t,x,s,u,y_tag,y_value,xhat,cost\n";
    for (std::size_t r = 0; r < episodes.size(); ++r) {
        for (std::size_t t = 0; t < episodes[r].steps.size(); ++t) {
            const auto& st = episodes[r].steps[t];
            const char* tag = st.y.tag == ChannelSymbol::Tag::payload ? "payload"
                              : st.y.tag == ChannelSymbol::Tag::blank0 ? "blank0"
                                                                       : "blank1";
            out << r << ',' << t << ',' << format_double(st.x) << ',' << st.s << ',' << st.u
                << ',' << tag << ',' << (st.y.is_payload() ? format_double(st.y.value) : "")
                << ',' << format_double(st.xhat) << ',' << format_double(st.cost) << "\n";
        }
    }
    return out.str();
}

ordered_json finite_solution_json(const ExperimentConfig& cfg, const FiniteDPSolution& sol) {
    ordered_json j;
    j["meta"] = meta_json(cfg);
    j["horizon"] = sol.horizon();
    j["initial_value"] = sol.initial_value();
    j["node_count"] = sol.graph().node_count();
    ordered_json nodes = ordered_json::array();
    for (const auto& node : sol.graph().nodes) {
        ordered_json n;
        n["id"] = node.id;
        n["t"] = node.t;
        n["stage"] = node.stage == Stage::pre ? "pre" : "post";
        n["s"] = node.channel_bit;
        n["pmf"] = node.pmf.probs;
        n["value"] = sol.value(node.id);
        if (node.stage == Stage::pre && node.t <= sol.horizon()) {
            ordered_json bits = ordered_json::array();
            Prescription phi = sol.policy(node.id);
            for (auto b : phi.decide) bits.push_back(static_cast<int>(b));
            n["prescription"] = bits;
        }
        if (node.stage == Stage::post) n["estimate"] = sol.estimate(node.id);
        nodes.push_back(n);
    }
    j["nodes"] = nodes;
    return j;
}

std::string finite_summary_csv(const ExperimentConfig& cfg, const FiniteDPSolution& sol) {
    std::ostringstream out;
    out << csv_header_block(cfg) << "id,t,stage,s,value,prescription,estimate\n";
    for (const auto& node : sol.graph().nodes) {
        out << node.id << ',' << node.t << ','
            << (node.stage == Stage::pre ? "pre" : "post") << ',' << node.channel_bit << ','
            << format_double(sol.value(node.id)) << ',';
        if (node.stage == Stage::pre && node.t <= sol.horizon()) {
            Prescription phi = sol.policy(node.id);
            for (auto b : phi.decide) out << static_cast<int>(b);
            out << ',';
        } else {
            out << ',' << sol.estimate(node.id);
        }
        out << "\n";
    }
    return out.str();
}

ordered_json oracle_json(const ExperimentConfig& cfg, const oracle::SearchResult& result,
                         oracle::Granularity granularity) {
    ordered_json j;
    j["meta"] = meta_json(cfg);
    j["granularity"] = granularity == oracle::Granularity::full ? "full" : "restricted";
    j["min_cost"] = result.min_cost;
    j["enumerated_profiles"] = result.enumerated_profiles;
    j["transmitter_infoset_counts"] = result.infoset_counts;
    ordered_json tx = ordered_json::array();
    for (const auto& stage : result.argmin.transmitter) {
        ordered_json row = ordered_json::array();
        for (auto b : stage) row.push_back(static_cast<int>(b));
        tx.push_back(row);
    }
    j["argmin_transmitter"] = tx;
    ordered_json rx = ordered_json::array();
    for (const auto& stage : result.argmin.receiver) {
        ordered_json row = ordered_json::array();
        for (auto b : stage) row.push_back(static_cast<int>(b));
        rx.push_back(row);
    }
    j["argmin_receiver"] = rx;
    return j;
}

std::string density_csv(const GridDensity& density) {
    std::ostringstream out;
    out << "e,value\n";
    for (std::size_t i = 0; i < density.size(); ++i)
        out << format_double(density.grid.point(i)) << ',' << format_double(density.values[i])
            << "\n";
    return out.str();
}

} // namespace io
} // namespace remest
