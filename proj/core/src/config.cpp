#include "fedgen/config.hpp"

#include <stdexcept>

#include "fedgen/io.hpp"

namespace fedgen {

namespace {

bool parse_bool(std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("not a boolean: '" + std::string(v) + "'");
}

std::vector<int> parse_int_list(std::string_view v) {
    // Space-separated in config files, comma-separated on the command line.
    std::string spaced(v);
    for (char& ch : spaced)
        if (ch == ',') ch = ' ';
    std::vector<int> out;
    for (auto tok : split_ws(spaced)) out.push_back(static_cast<int>(parse_int(tok)));
    return out;
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(v[i]);
    }
    return out;
}

// Single assignment point shared by file parsing and --set overrides.
void set_key(RunConfig& c, const std::string& section, std::string_view key, std::string_view val) {
    const std::string full = section + "." + std::string(key);
    auto is = [&](const char* s) { return full == s; };

    if (is("run.mode")) c.mode = std::string(val);
    else if (is("run.learners")) c.learners = static_cast<int>(parse_int(val));
    else if (is("run.rounds")) c.rounds = static_cast<int>(parse_int(val));
    else if (is("run.seed")) c.seed = parse_u64(val);
    else if (is("run.out")) c.out_dir = std::string(val);
    else if (is("run.threads")) c.threads = static_cast<int>(parse_int(val));
    else if (is("run.sigma_probe_repeats")) c.sigma_probe_repeats = static_cast<int>(parse_int(val));
    else if (is("learner.r")) c.r = parse_double(val);
    else if (is("learner.rho")) c.rho = parse_double(val);
    else if (is("learner.q")) c.q = parse_double(val);
    else if (is("learner.gamma")) c.gamma = parse_double(val);
    else if (is("learner.n_env")) c.n_env = static_cast<int>(parse_int(val));
    else if (is("learner.n_init")) c.n_init = static_cast<int>(parse_int(val));
    else if (is("synthetic.kind")) c.synthetic_kind = std::string(val);
    else if (is("synthetic.dim")) c.dim = static_cast<int>(parse_int(val));
    else if (is("synthetic.center")) c.well_center = parse_double(val);
    else if (is("synthetic.gain")) c.well_gain = parse_double(val);
    else if (is("synthetic.m1")) c.well_m1 = parse_double(val);
    else if (is("synthetic.d1")) c.well_d1 = parse_double(val);
    else if (is("synthetic.m2")) c.well_m2 = parse_double(val);
    else if (is("synthetic.d2")) c.well_d2 = parse_double(val);
    else if (is("synthetic.base")) c.well_base = parse_double(val);
    else if (is("synthetic.wells")) c.wells = std::string(val);
    else if (is("synthetic.sigma_y")) c.sigma_y = parse_double(val);
    else if (is("synthetic.sigma_z")) c.sigma_z = parse_double(val);
    else if (is("synthetic.theta0_lo")) c.theta0_lo = parse_double(val);
    else if (is("synthetic.theta0_hi")) c.theta0_hi = parse_double(val);
    else if (is("motion.layers")) c.layers = parse_int_list(val);
    else if (is("motion.dt")) c.dt = parse_double(val);
    else if (is("motion.t_max")) c.t_max = parse_double(val);
    else if (is("motion.alpha")) c.alpha = parse_double(val);
    else if (is("motion.footprint")) c.footprint = parse_double(val);
    else if (is("motion.sensor_fan")) c.sensor_fan = std::string(val);
    else if (is("motion.pairs")) c.pairs = static_cast<int>(parse_int(val));
    else if (is("motion.sigma_init")) c.sigma_init = parse_double(val);
    else if (is("motion.sigma_floor")) c.sigma_floor = parse_double(val);
    else if (is("motion.resample_each_round")) c.resample_each_round = parse_bool(val);
    else if (is("motion.env_corpus")) c.env_corpus = std::string(val);
    else if (is("motion.stop_norm")) c.stop_norm = std::string(val);
    else if (is("motion.sigma_d")) c.disturbance.sigma_d = parse_double(val);
    else if (is("motion.corr_length")) c.disturbance.corr_length = parse_double(val);
    else if (is("motion.grid_res")) c.disturbance.grid_res = parse_double(val);
    else if (is("motion.d_max")) c.disturbance.d_max = parse_double(val);
    else if (is("motion.modes")) c.disturbance.modes = static_cast<int>(parse_int(val));
    else if (is("eval.samples")) c.eval_samples = static_cast<int>(parse_int(val));
    else if (is("eval.seed")) c.eval_seed = parse_u64(val);
    else throw std::invalid_argument("unknown config key: " + full);
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::string section;
    int lineno = 0;
    for (auto line : split_lines(text)) {
        ++lineno;
        // strip comments
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        std::size_t a = 0, b = line.size();
        while (a < b && (line[a] == ' ' || line[a] == '\t' || line[a] == '\r')) ++a;
        while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t' || line[b - 1] == '\r')) --b;
        line = line.substr(a, b - a);
        if (line.empty()) continue;

        try {
            if (line.front() == '[') {
                if (line.back() != ']') throw std::invalid_argument("unterminated section header");
                section = std::string(line.substr(1, line.size() - 2));
                continue;
            }
            const std::size_t eq = line.find('=');
            if (eq == std::string_view::npos) throw std::invalid_argument("expected 'key = value'");
            std::string_view key = line.substr(0, eq);
            std::string_view val = line.substr(eq + 1);
            while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.remove_suffix(1);
            while (!val.empty() && (val.front() == ' ' || val.front() == '\t')) val.remove_prefix(1);
            if (section.empty()) throw std::invalid_argument("key outside any [section]");
            set_key(cfg, section, key, val);
        } catch (const std::exception& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    validate_run_config(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
    try {
        return parse_config(read_text_file(file));
    } catch (const std::exception& e) {
        throw std::runtime_error(file.string() + ": " + e.what());
    }
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
    const std::size_t eq = assignment.find('=');
    const std::size_t dot = assignment.find('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq)
        throw std::invalid_argument("override must look like section.key=value, got '" +
                                    std::string(assignment) + "'");
    const std::string section(assignment.substr(0, dot));
    set_key(cfg, section, assignment.substr(dot + 1, eq - dot - 1), assignment.substr(eq + 1));
}

std::string serialize_config(const RunConfig& c) {
    std::string s;
    s += "[run]\n";
    s += "mode = " + c.mode + "\n";
    s += "learners = " + std::to_string(c.learners) + "\n";
    s += "rounds = " + std::to_string(c.rounds) + "\n";
    s += "seed = " + std::to_string(c.seed) + "\n";
    s += "out = " + c.out_dir + "\n";
    s += "threads = " + std::to_string(c.threads) + "\n";
    s += "sigma_probe_repeats = " + std::to_string(c.sigma_probe_repeats) + "\n";
    s += "\n[learner]\n";
    s += "r = " + format_double(c.r) + "\n";
    s += "rho = " + format_double(c.rho) + "\n";
    s += "q = " + format_double(c.q) + "\n";
    s += "gamma = " + format_double(c.gamma) + "\n";
    s += "n_env = " + std::to_string(c.n_env) + "\n";
    s += "n_init = " + std::to_string(c.n_init) + "\n";
    s += "\n[synthetic]\n";
    s += "kind = " + c.synthetic_kind + "\n";
    s += "dim = " + std::to_string(c.dim) + "\n";
    s += "center = " + format_double(c.well_center) + "\n";
    s += "gain = " + format_double(c.well_gain) + "\n";
    s += "m1 = " + format_double(c.well_m1) + "\n";
    s += "d1 = " + format_double(c.well_d1) + "\n";
    s += "m2 = " + format_double(c.well_m2) + "\n";
    s += "d2 = " + format_double(c.well_d2) + "\n";
    s += "base = " + format_double(c.well_base) + "\n";
    if (!c.wells.empty()) s += "wells = " + c.wells + "\n";
    s += "sigma_y = " + format_double(c.sigma_y) + "\n";
    s += "sigma_z = " + format_double(c.sigma_z) + "\n";
    s += "theta0_lo = " + format_double(c.theta0_lo) + "\n";
    s += "theta0_hi = " + format_double(c.theta0_hi) + "\n";
    s += "\n[motion]\n";
    s += "layers = " + join_ints(c.layers) + "\n";
    s += "dt = " + format_double(c.dt) + "\n";
    s += "t_max = " + format_double(c.t_max) + "\n";
    s += "alpha = " + format_double(c.alpha) + "\n";
    s += "footprint = " + format_double(c.footprint) + "\n";
    s += "sensor_fan = " + c.sensor_fan + "\n";
    s += "pairs = " + std::to_string(c.pairs) + "\n";
    s += "sigma_init = " + format_double(c.sigma_init) + "\n";
    s += "sigma_floor = " + format_double(c.sigma_floor) + "\n";
    s += std::string("resample_each_round = ") + (c.resample_each_round ? "true" : "false") + "\n";
    if (!c.env_corpus.empty()) s += "env_corpus = " + c.env_corpus + "\n";
    s += "stop_norm = " + c.stop_norm + "\n";
    s += "sigma_d = " + format_double(c.disturbance.sigma_d) + "\n";
    s += "corr_length = " + format_double(c.disturbance.corr_length) + "\n";
    s += "grid_res = " + format_double(c.disturbance.grid_res) + "\n";
    s += "d_max = " + format_double(c.disturbance.d_max) + "\n";
    s += "modes = " + std::to_string(c.disturbance.modes) + "\n";
    s += "\n[eval]\n";
    s += "samples = " + std::to_string(c.eval_samples) + "\n";
    s += "seed = " + std::to_string(c.eval_seed) + "\n";
    return s;
}

void validate_run_config(const RunConfig& c) {
    if (c.mode != "synthetic" && c.mode != "motion")
        throw std::invalid_argument("run.mode must be 'synthetic' or 'motion'");
    if (c.learners < 1) throw std::invalid_argument("run.learners must be >= 1");
    if (c.rounds < 0) throw std::invalid_argument("run.rounds must be >= 0");
    if (c.threads < 1) throw std::invalid_argument("run.threads must be >= 1");
    if (c.synthetic_kind != "quadratic_well" && c.synthetic_kind != "double_well" &&
        c.synthetic_kind != "multi_well")
        throw std::invalid_argument("synthetic.kind must be quadratic_well, double_well or multi_well");
    if (c.sensor_fan != "asymmetric" && c.sensor_fan != "symmetric")
        throw std::invalid_argument("motion.sensor_fan must be 'asymmetric' or 'symmetric'");
    if (c.stop_norm != "mu" && c.stop_norm != "full")
        throw std::invalid_argument("motion.stop_norm must be 'mu' or 'full'");
    if (c.eval_samples < 1) throw std::invalid_argument("eval.samples must be >= 1");
    if (c.dim < 1) throw std::invalid_argument("synthetic.dim must be >= 1");
}

}  // namespace fedgen
