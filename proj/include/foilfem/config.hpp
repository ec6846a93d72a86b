// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "foilfem/formulations.hpp"
#include "foilfem/solvers.hpp"

namespace foilfem {

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Minimal key/value configuration file with nested tables:
//   [section]
//   key = value        # number, "string", true/false, or [v1, v2, ...]
// Keys are exposed as "section.key".
class ConfigFile {
public:
    using Value = std::variant<double, bool, std::string, std::vector<double>,
                               std::vector<std::string>>;

    ConfigFile() = default;

    static ConfigFile parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("config: cannot open " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path);
    }

    static ConfigFile parse(const std::string& text, const std::string& name = "<string>") {
        ConfigFile cfg;
        std::istringstream in(text);
        std::string line, section;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string s = strip(line);
            if (s.empty() || s[0] == '#') continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw config_error(name + ":" + std::to_string(lineno) + ": bad section");
                section = strip(s.substr(1, s.size() - 2));
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw config_error(name + ":" + std::to_string(lineno) + ": expected key = value");
            const std::string key = strip(s.substr(0, eq));
            const std::string val = strip(s.substr(eq + 1));
            if (key.empty() || val.empty())
                throw config_error(name + ":" + std::to_string(lineno) + ": empty key or value");
            const std::string full = section.empty() ? key : section + "." + key;
            cfg.values_[full] = parse_value(val, name, lineno);
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    double number(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (const double* d = std::get_if<double>(&it->second)) return *d;
        throw config_error("config: " + key + " must be a number");
    }

    int integer(const std::string& key, int fallback) const {
        const double d = number(key, fallback);
        const int i = static_cast<int>(std::llround(d));
        if (std::abs(d - i) > 1e-9) throw config_error("config: " + key + " must be an integer");
        return i;
    }

    bool boolean(const std::string& key, bool fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (const bool* b = std::get_if<bool>(&it->second)) return *b;
        throw config_error("config: " + key + " must be a boolean");
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
        throw config_error("config: " + key + " must be a string");
    }

    std::vector<double> numbers(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return {};
        if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
        if (const double* d = std::get_if<double>(&it->second)) return {*d};
        throw config_error("config: " + key + " must be an array of numbers");
    }

    std::vector<std::string> texts(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return {};
        if (const auto* v = std::get_if<std::vector<std::string>>(&it->second)) return *v;
        if (const auto* s = std::get_if<std::string>(&it->second)) return {*s};
        throw config_error("config: " + key + " must be an array of strings");
    }

    void set(const std::string& key, Value v) { values_[key] = std::move(v); }

private:
    static std::string strip(const std::string& s) {
        std::size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        std::size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    static Value parse_value(const std::string& v, const std::string& name, std::size_t lineno) {
        if (v.front() == '"') {
            if (v.size() < 2 || v.back() != '"')
                throw config_error(name + ":" + std::to_string(lineno) + ": unterminated string");
            return v.substr(1, v.size() - 2);
        }
        if (v == "true") return true;
        if (v == "false") return false;
        if (v.front() == '[') {
            if (v.back() != ']')
                throw config_error(name + ":" + std::to_string(lineno) + ": unterminated array");
            std::vector<double> nums;
            std::vector<std::string> strs;
            std::string item;
            std::istringstream items(v.substr(1, v.size() - 2));
            while (std::getline(items, item, ',')) {
                const std::string t = strip(item);
                if (t.empty()) continue;
                if (t.front() == '"') {
                    if (t.back() != '"')
                        throw config_error(name + ":" + std::to_string(lineno) + ": bad string");
                    strs.push_back(t.substr(1, t.size() - 2));
                } else {
                    nums.push_back(to_number(t, name, lineno));
                }
            }
            if (!strs.empty() && !nums.empty())
                throw config_error(name + ":" + std::to_string(lineno) + ": mixed array");
            if (!strs.empty()) return strs;
            return nums;
        }
        return to_number(v, name, lineno);
    }

    static double to_number(const std::string& t, const std::string& name, std::size_t lineno) {
        std::size_t pos = 0;
        double d = 0.0;
        try {
            d = std::stod(t, &pos);
        } catch (const std::exception&) {
            throw config_error(name + ":" + std::to_string(lineno) + ": bad value '" + t + "'");
        }
        if (pos != t.size())
            throw config_error(name + ":" + std::to_string(lineno) + ": bad value '" + t + "'");
        return d;
    }

    std::map<std::string, Value> values_;
};

// "poly:p" (global polynomials of order p) or "pwl:N" (N piecewise linear
// hat functions)
inline VoltageBasis parse_basis_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw config_error("basis: expected poly:p or pwl:N, got '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    int value = 0;
    try {
        std::size_t pos = 0;
        value = std::stoi(spec.substr(colon + 1), &pos);
        if (pos != spec.size() - colon - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw config_error("basis: bad count in '" + spec + "'");
    }
    if (kind == "poly") {
        if (value < 0) throw config_error("basis: polynomial order must be >= 0");
        return build_voltage_basis(VoltageBasisKind::polynomial, value + 1);
    }
    if (kind == "pwl") {
        if (value < 1) throw config_error("basis: piecewise linear count must be >= 1");
        return build_voltage_basis(VoltageBasisKind::piecewise_linear, value);
    }
    throw config_error("basis: unknown kind '" + kind + "'");
}

inline std::string basis_spec_string(const VoltageBasis& b) {
    if (b.kind == VoltageBasisKind::polynomial) return "poly:" + std::to_string(b.n - 1);
    return "pwl:" + std::to_string(b.n);
}

inline std::pair<FormulationFamily, WindingModel> parse_formulation(const std::string& s) {
    const auto dash = s.find('-');
    if (dash == std::string::npos)
        throw config_error("formulation: expected e.g. av-resolved or hphi-fw, got '" + s + "'");
    const std::string fam = s.substr(0, dash);
    const std::string mod = s.substr(dash + 1);
    FormulationFamily family;
    if (fam == "av") family = FormulationFamily::av;
    else if (fam == "h" || fam == "fullh") family = FormulationFamily::fullh;
    else if (fam == "hphi") family = FormulationFamily::hphi;
    else throw config_error("formulation: unknown family '" + fam + "'");
    WindingModel model;
    if (mod == "resolved") model = WindingModel::resolved;
    else if (mod == "fw") model = WindingModel::fw;
    else throw config_error("formulation: unknown model '" + mod + "'");
    return {family, model};
}

inline std::string formulation_string(FormulationFamily f, WindingModel m) {
    std::string s = f == FormulationFamily::av ? "av" : (f == FormulationFamily::fullh ? "h" : "hphi");
    return s + (m == WindingModel::resolved ? "-resolved" : "-fw");
}

// Full description of one run, decoded from a config file plus command-line
// overrides.
struct RunConfig {
    GeometryPreset preset = GeometryPreset::axi20;
    BenchmarkParams geometry;
    std::string formulation = "hphi-fw";
    int refinement = 1;
    std::string basis = "poly:3";
    MaterialField materials;
    ExcitationSpec excitation;
    int transient_periods = 2;
    TransientConfig transient;
    std::string output_dir = "out";
    bool export_fields = false;
    bool sample_line = false;
    // sweep settings
    std::string sweep_axis = "refinement";
    std::vector<double> sweep_values;
    std::vector<std::string> sweep_basis_values;
    std::vector<std::string> sweep_formulations;
    std::string sweep_reference = "hphi-resolved";

    FormulationFamily family() const { return parse_formulation(formulation).first; }
    WindingModel model() const { return parse_formulation(formulation).second; }

    void validate() const {
        parse_formulation(formulation);
        if (model() == WindingModel::fw) parse_basis_spec(basis);
        if (refinement < 1) throw config_error("config: refinement must be >= 1");
        if (!(excitation.current >= 0.0)) throw config_error("config: current must be >= 0");
        if (!(excitation.frequency > 0.0)) throw config_error("config: frequency must be > 0");
        if (excitation.mode == ExcitationMode::transient) {
            if (transient_periods < 1) throw config_error("config: periods must be >= 1");
            transient.validate();
        }
    }
};

inline RunConfig load_run_config(const ConfigFile& c) {
    RunConfig r;
    const std::string preset = c.text("problem.preset", "axi20");
    if (preset == "axi20") r.preset = GeometryPreset::axi20;
    else if (preset == "hts20") r.preset = GeometryPreset::hts20;
    else if (preset == "custom") r.preset = GeometryPreset::custom;
    else throw config_error("config: unknown preset '" + preset + "'");

    r.formulation = c.text("problem.formulation", r.formulation);
    r.refinement = c.integer("problem.refinement", r.refinement);
    r.basis = c.text("problem.basis", r.basis);

    BenchmarkParams& g = r.geometry;
    const std::string coord = c.text("geometry.coordinate_system", "axisymmetric");
    if (coord == "axisymmetric") g.coord = CoordinateSystem::axisymmetric;
    else if (coord == "planar") g.coord = CoordinateSystem::planar;
    else throw config_error("config: unknown coordinate system '" + coord + "'");
    g.n_turns = c.integer("geometry.n_turns", g.n_turns);
    g.fill_factor = c.number("geometry.fill_factor", g.fill_factor);
    g.bulk_inner = c.number("geometry.bulk_inner", g.bulk_inner);
    g.bulk_thickness = c.number("geometry.bulk_thickness", g.bulk_thickness);
    g.bulk_height = c.number("geometry.bulk_height", g.bulk_height);
    g.core_radius = c.number("geometry.core_radius", g.core_radius);
    g.core_height = c.number("geometry.core_height", g.core_height);
    g.air_radius = c.number("geometry.air_radius", g.air_radius);
    g.air_height = c.number("geometry.air_height", g.air_height);
    g.mesh_size_air = c.number("geometry.mesh_air", g.mesh_size_air);
    g.mesh_size_core = c.number("geometry.mesh_core", g.mesh_size_core);
    g.mesh_size_foil = c.number("geometry.mesh_foil", g.mesh_size_foil);
    g.mesh_size_gap = c.number("geometry.mesh_gap", g.mesh_size_gap);
    g.mesh_size_axial = c.number("geometry.mesh_axial", g.mesh_size_axial);

    r.materials.foil.sigma = c.number("material.sigma_foil", r.materials.foil.sigma);
    r.materials.foil.mu = mu0 * c.number("material.mu_r_foil", 1.0);
    r.materials.core.mu = mu0 * c.number("material.mu_r_core", 10.0);
    r.materials.spurious_rho = c.number("material.spurious_rho", 1.0);
    if (c.boolean("hts.enabled", false)) {
        HtsLaw law;
        law.e_c = c.number("hts.e_c", law.e_c);
        law.j_c = c.number("hts.j_c", 0.0);
        law.n = c.number("hts.n", law.n);
        law.j_floor_rel = c.number("hts.j_floor_rel", law.j_floor_rel);
        law.validate();
        r.materials.foil.hts = law;
    }

    const std::string mode = c.text("excitation.mode", "harmonic");
    if (mode == "harmonic") r.excitation.mode = ExcitationMode::harmonic;
    else if (mode == "transient") r.excitation.mode = ExcitationMode::transient;
    else throw config_error("config: unknown excitation mode '" + mode + "'");
    r.excitation.current = c.number("excitation.current", r.excitation.current);
    r.excitation.frequency = c.number("excitation.frequency", r.excitation.frequency);
    r.excitation.background_h = c.number("excitation.background_h", 0.0);

    r.transient_periods = c.integer("transient.periods", r.transient_periods);
    r.transient.steps_per_period = c.integer("transient.steps_per_period", 200);
    r.transient.theta = c.number("transient.theta", 1.0);
    r.transient.newton_tol = c.number("transient.newton_tol", 1e-8);
    r.transient.newton_max_iter = c.integer("transient.newton_max_iter", 25);
    if (r.excitation.mode == ExcitationMode::transient) {
        r.excitation.t_end = r.transient_periods / r.excitation.frequency;
        r.excitation.n_steps = r.transient_periods * r.transient.steps_per_period;
    }

    r.output_dir = c.text("output.directory", r.output_dir);
    r.export_fields = c.boolean("output.fields", false);
    r.sample_line = c.boolean("output.sample_line", false);

    r.sweep_axis = c.text("sweep.axis", r.sweep_axis);
    r.sweep_values = c.numbers("sweep.values");
    r.sweep_basis_values = c.texts("sweep.basis_values");
    r.sweep_formulations = c.texts("sweep.formulations");
    r.sweep_reference = c.text("sweep.reference", r.sweep_reference);

    r.validate();
    return r;
}

}  // namespace foilfem
