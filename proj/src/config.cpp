#include "remest/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace remest {

std::string toolkit_version() { return "0.1.0"; }

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw validation_error(key + ": '" + v + "' is not a real number");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        unsigned long long u = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        throw validation_error(key + ": '" + v + "' is not a nonnegative integer");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw validation_error(key + ": '" + v + "' is not a boolean (true|false)");
}

std::vector<double> parse_vector(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::istringstream in(v);
    std::string tok;
    while (in >> tok) out.push_back(parse_real(key, tok));
    if (out.empty()) throw validation_error(key + ": empty vector");
    return out;
}

std::vector<std::vector<double>> parse_matrix(const std::string& key, const std::string& v) {
    std::vector<std::vector<double>> out;
    std::string row;
    std::istringstream in(v);
    while (std::getline(in, row, ';')) {
        row = trim(row);
        if (row.empty()) continue;
        out.push_back(parse_vector(key, row));
    }
    if (out.empty()) throw validation_error(key + ": empty matrix");
    return out;
}

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_vector(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += fmt_real(v[i]);
    }
    return out;
}

std::string fmt_matrix(const std::vector<std::vector<double>>& m) {
    std::string out;
    for (std::size_t r = 0; r < m.size(); ++r) {
        if (r) out += " ; ";
        out += fmt_vector(m[r]);
    }
    return out;
}

} // namespace

void ExperimentConfig::set(const std::string& dotted_key, const std::string& raw) {
    const std::string value = trim(raw);
    const std::string& k = dotted_key;
    if (k == "model.source") source_kind = value;
    else if (k == "model.a") a = parse_real(k, value);
    else if (k == "model.noise") noise = noise_family_from_string(value);
    else if (k == "model.noise_scale") noise_scale = parse_real(k, value);
    else if (k == "model.distortion") distortion_kind = value;
    else if (k == "model.distortion_power") distortion_power = static_cast<int>(parse_u64(k, value));
    else if (k == "model.distortion_matrix") distortion_matrix = parse_matrix(k, value);
    else if (k == "model.lambda") lambda = parse_real(k, value);
    else if (k == "model.transition") transition = parse_matrix(k, value);
    else if (k == "model.source_initial") source_initial = parse_vector(k, value);
    else if (k == "model.q") q = parse_matrix(k, value);
    else if (k == "model.channel_initial") channel_initial = parse_vector(k, value);
    else if (k == "solver.horizon") horizon = parse_u64(k, value);
    else if (k == "solver.grid_half_width") grid_half_width = parse_real(k, value);
    else if (k == "solver.grid_points") grid_points = parse_u64(k, value);
    else if (k == "solver.refine_thresholds") refine_thresholds = parse_bool(k, value);
    else if (k == "solver.backend") backend = value;
    else if (k == "solver.threads") threads = static_cast<int>(parse_u64(k, value));
    else if (k == "simulation.n_reps") n_reps = parse_u64(k, value);
    else if (k == "simulation.seed") seed = parse_u64(k, value);
    else if (k == "simulation.trajectories") trajectories = parse_u64(k, value);
    else if (k == "output.dir") out_dir = value;
    else if (k == "output.formats") formats = value;
    else throw validation_error("unknown config key '" + k + "'");
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw validation_error("config line " + std::to_string(lineno) +
                                       ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "model" && section != "solver" && section != "simulation" &&
                section != "output")
                throw validation_error("unknown config section '" + section + "'");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error("config line " + std::to_string(lineno) +
                                   ": expected key = value");
        if (section.empty())
            throw validation_error("config line " + std::to_string(lineno) +
                                   ": key outside any section");
        cfg.set(section + "." + trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void ExperimentConfig::validate() const {
    if (source_kind != "ar1" && source_kind != "finite")
        throw validation_error("model.source must be ar1 or finite");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw validation_error("model.lambda must be a nonnegative real");

    if (source_kind == "ar1") {
        if (!std::isfinite(a) || a == 0.0)
            throw validation_error("model.a must be finite and nonzero");
        if (!(noise_scale > 0.0)) throw validation_error("model.noise_scale must be positive");
        if (distortion_kind != "squared" && distortion_kind != "absolute" &&
            distortion_kind != "power")
            throw validation_error("model.distortion must be squared, absolute or power for ar1");
        if (distortion_kind == "power" && (distortion_power < 2 || distortion_power % 2 != 0))
            throw validation_error("model.distortion_power must be an even integer >= 2");
    } else {
        if (transition.empty()) throw validation_error("model.transition is required for finite");
        if (source_initial.empty())
            throw validation_error("model.source_initial is required for finite");
        FiniteMarkovSource src{transition.size(), transition, source_initial};
        try {
            src.validate();
        } catch (const validation_error& e) {
            throw validation_error(std::string("model.transition/source_initial: ") + e.what());
        }
        if (distortion_kind == "matrix") {
            FiniteDistortion fd{distortion_matrix};
            fd.validate();
            if (fd.size() != transition.size())
                throw validation_error("model.distortion_matrix size does not match the alphabet");
        } else if (distortion_kind != "zero_one") {
            throw validation_error("model.distortion must be zero_one or matrix for finite");
        }
    }

    {
        GilbertElliottChannel ch{q, channel_initial};
        try {
            ch.validate();
        } catch (const validation_error& e) {
            throw validation_error(std::string("model.q/channel_initial: ") + e.what());
        }
    }

    if (grid_points < 3 || grid_points % 2 == 0)
        throw validation_error("solver.grid_points must be odd and >= 3");
    if (grid_half_width < 0.0 || !std::isfinite(grid_half_width))
        throw validation_error("solver.grid_half_width must be a nonnegative real");
    if (backend != "analytic" && backend != "quadrature")
        throw validation_error("solver.backend must be analytic or quadrature");
    if (threads < 0) throw validation_error("solver.threads must be >= 0");
    if (n_reps < 2) throw validation_error("simulation.n_reps must be >= 2");
    bool fmt_ok = formats == "json" || formats == "csv" || formats == "json,csv" ||
                  formats == "csv,json";
    if (!fmt_ok) throw validation_error("output.formats must be json, csv or json,csv");
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream out;
    out << "[model]\n";
    out << "source = " << source_kind << "\n";
    if (source_kind == "ar1") {
        out << "a = " << fmt_real(a) << "\n";
        out << "noise = " << to_string(noise) << "\n";
        out << "noise_scale = " << fmt_real(noise_scale) << "\n";
        out << "distortion = " << distortion_kind << "\n";
        if (distortion_kind == "power")
            out << "distortion_power = " << distortion_power << "\n";
    } else {
        out << "transition = " << fmt_matrix(transition) << "\n";
        out << "source_initial = " << fmt_vector(source_initial) << "\n";
        out << "distortion = " << distortion_kind << "\n";
        if (distortion_kind == "matrix")
            out << "distortion_matrix = " << fmt_matrix(distortion_matrix) << "\n";
    }
    out << "lambda = " << fmt_real(lambda) << "\n";
    out << "q = " << fmt_matrix(q) << "\n";
    out << "channel_initial = " << fmt_vector(channel_initial) << "\n";
    out << "\n[solver]\n";
    out << "horizon = " << horizon << "\n";
    out << "grid_half_width = " << fmt_real(grid_half_width) << "\n";
    out << "grid_points = " << grid_points << "\n";
    out << "refine_thresholds = " << (refine_thresholds ? "true" : "false") << "\n";
    out << "backend = " << backend << "\n";
    out << "threads = " << threads << "\n";
    out << "\n[simulation]\n";
    out << "n_reps = " << n_reps << "\n";
    out << "seed = " << seed << "\n";
    out << "trajectories = " << trajectories << "\n";
    out << "\n[output]\n";
    out << "dir = " << out_dir << "\n";
    out << "formats = " << formats << "\n";
    return out.str();
}

std::string ExperimentConfig::hash_hex() const {
    // FNV-1a 64 over the canonical serialization.
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

DistortionFn ExperimentConfig::scalar_distortion() const {
    if (distortion_kind == "squared") return DistortionFn::squared();
    if (distortion_kind == "absolute") return DistortionFn::absolute();
    if (distortion_kind == "power") return DistortionFn::even_power(distortion_power);
    throw validation_error("model.distortion is not a scalar distortion");
}

Ar1Models ExperimentConfig::ar1_models() const {
    if (!is_ar1()) throw validation_error("this command needs an ar1 model");
    Ar1Models m;
    m.source = AR1Source{a, NoiseSpec(noise, noise_scale)};
    m.channel = GilbertElliottChannel{q, channel_initial};
    m.distortion = scalar_distortion();
    m.lambda = lambda;
    return m;
}

FiniteModels ExperimentConfig::finite_models() const {
    if (is_ar1()) throw validation_error("this command needs a finite model");
    FiniteModels m;
    m.source = FiniteMarkovSource{transition.size(), transition, source_initial};
    m.channel = GilbertElliottChannel{q, channel_initial};
    m.distortion = distortion_kind == "matrix" ? FiniteDistortion{distortion_matrix}
                                               : FiniteDistortion::zero_one(transition.size());
    m.lambda = lambda;
    return m;
}

double ExperimentConfig::effective_half_width() const {
    if (grid_half_width > 0.0) return grid_half_width;
    return default_half_width(AR1Source{a, NoiseSpec(noise, noise_scale)});
}

SolverGrid ExperimentConfig::make_solver_grid() const {
    return SolverGrid::make(effective_half_width(), grid_points, NoiseSpec(noise, noise_scale));
}

int ExperimentConfig::effective_threads() const {
    if (threads > 0) return threads;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

} // namespace remest
