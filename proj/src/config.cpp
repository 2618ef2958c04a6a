#include "nlai/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nlai/errors.hpp"

namespace nlai::config {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

bool parse_double(const std::string &text, double &out) {
    if (text.empty())
        return false;
    errno = 0;
    char *end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return errno == 0 && end == text.c_str() + text.size() && std::isfinite(out);
}

std::vector<std::string> split_list(const std::string &text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        parts.push_back(trim(item));
    return parts;
}

std::vector<KeySpec> build_specs() {
    using K = KeyKind;
    return {
        {"n_atoms", "1000", "atoms", "number of atoms N", K::integer, {}},
        {"atom_mass_kg", "1.4431e-25", "kg", "atomic mass M (Rb-87 default)", K::positive, {}},
        {"scattering_length_m", "5.2e-9", "m", "s-wave scattering length a", K::positive, {}},
        {"laser_wavelength_m", "7.8e-7", "m", "Bragg laser wavelength; k0 = 2 (2 pi / wavelength)",
         K::positive, {}},
        {"gravity_m_s2", "9.81", "m/s^2", "gravitational acceleration g", K::positive, {}},
        {"omega_x_hz", "20", "Hz", "radial trap frequency nu_x (x 2 pi -> rad/s)", K::positive, {}},
        {"omega_y_hz", "20", "Hz", "radial trap frequency nu_y, must equal nu_x", K::positive, {}},
        {"omega_z_hz", "100", "Hz", "axial trap frequency nu_z", K::positive, {}},
        {"omega_z_tilde_hz", "auto", "Hz",
         "axial frequency during interrogation; auto = same as omega_z_hz", K::positive, {}},
        {"oscillations", "1", "periods", "preparation time m in units of T (half-integer)",
         K::number, {}},
        {"density_model", "gaussian", "-", "condensate profile for chi_max", K::choice,
         {"gaussian", "thomas_fermi"}},
        {"source", "direct", "-",
         "direct: use tau, tau_tilde, theta as given; trap: derive them from the trap", K::choice,
         {"direct", "trap"}},
        {"tau", "0", "dimensionless", "preparation twisting strength", K::number, {}},
        {"tau_tilde", "0", "dimensionless", "interrogation twisting strength", K::number, {}},
        {"alpha", "0", "rad", "pre-rotation angle about x", K::number, {}},
        {"beta", "0", "rad", "post-rotation angle about x", K::number, {}},
        {"theta", "0", "rad", "encoded interferometer phase", K::number, {}},
        {"alpha_policy", "zero", "-", "pre-rotation used by optimize and scans", K::choice,
         {"zero", "half_pi", "alpha_h", "optimal", "fixed"}},
        {"beta_grid", "181", "points", "coarse beta grid over [-pi/2, pi/2]", K::integer, {}},
        {"alpha_grid", "90", "points", "coarse alpha grid over [0, pi)", K::integer, {}},
        {"refine_tolerance", "1e-6", "rad", "golden-section bracket width", K::positive, {}},
        {"tau_min", "0", "dimensionless", "squeeze: first tau", K::number, {}},
        {"tau_max", "0.05", "dimensionless", "squeeze: last tau", K::number, {}},
        {"tau_points", "201", "points", "squeeze: number of tau samples", K::integer, {}},
        {"theta_min", "-3.14159265358979", "rad", "fringe: first theta", K::number, {}},
        {"theta_max", "3.14159265358979", "rad", "fringe: last theta", K::number, {}},
        {"theta_points", "181", "points", "fringe: number of theta samples", K::integer, {}},
        {"chi_points", "401", "points", "tau: samples of chi(t) over one period T", K::integer, {}},
        {"husimi_polar", "64", "points", "husimi: polar samples over [0, pi]", K::integer, {}},
        {"husimi_azimuth", "128", "points", "husimi: azimuth samples over [0, 2 pi)", K::integer,
         {}},
        {"husimi_stage", "prepared", "-",
         "husimi: prepared (after twisting), rotated (after alpha) or output", K::choice,
         {"prepared", "rotated", "output"}},
        {"m_list", "0,0.5,1,1.5,2,2.5,3,3.5,4,4.5,5", "periods",
         "scan-m and tau: oscillation counts", K::list, {}},
        {"trap_m_list", "0.5,1", "periods", "scan-trap: oscillation counts", K::list, {}},
        {"sweep", "aspect_ratio", "-", "scan-trap: swept quantity", K::choice,
         {"aspect_ratio", "axial_frequency"}},
        {"sweep_values", "auto", "- or Hz",
         "scan-trap: aspect ratios, or axial frequencies in Hz; auto picks a default grid",
         K::list, {}},
    };
}

const ParamMap &checked(const ParamMap &p, const std::string &key) {
    if (!p.count(key))
        throw InvalidInput("missing required key '" + key + "'");
    return p;
}

} // namespace

const std::vector<KeySpec> &key_specs() {
    static const std::vector<KeySpec> specs = build_specs();
    return specs;
}

const KeySpec *find_key(std::string_view key) {
    for (const auto &s : key_specs())
        if (s.key == key)
            return &s;
    return nullptr;
}

ParamMap default_params() {
    ParamMap p;
    for (const auto &s : key_specs())
        p[s.key] = s.default_value;
    return p;
}

std::string kebab_flag(std::string_view key) {
    std::string f(key);
    std::replace(f.begin(), f.end(), '_', '-');
    return "--" + f;
}

ParamMap parse_config_text(std::string_view text, std::string_view origin) {
    ParamMap out;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string body = trim(line);
        if (body.empty())
            continue;
        const auto where = std::string(origin) + ":" + std::to_string(lineno);
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw InvalidInput(where + ": expected key = value, got '" + body + "'");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (!find_key(key))
            throw InvalidInput(where + ": unknown key '" + key + "'");
        if (value.empty())
            throw InvalidInput(where + ": missing value for key '" + key + "'");
        if (out.count(key))
            throw InvalidInput(where + ": duplicate key '" + key + "'");
        out[key] = value;
    }
    return out;
}

ParamMap read_config_file(const std::string &path) {
    std::ifstream f(path);
    if (!f)
        throw InvalidInput("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path);
}

void validate_params(const ParamMap &params) {
    for (const auto &[key, value] : params) {
        const KeySpec *spec = find_key(key);
        if (!spec)
            throw InvalidInput("unknown key '" + key + "'");
        if (value == "auto" && spec->default_value == "auto")
            continue;
        double x = 0.0;
        switch (spec->kind) {
        case KeyKind::integer:
            if (!parse_double(value, x) || x != std::floor(x) || x < 1 || x > 1e9)
                throw InvalidInput(key + ": expected a positive integer, got '" + value + "'");
            break;
        case KeyKind::number:
            if (!parse_double(value, x))
                throw InvalidInput(key + ": expected a finite number, got '" + value + "'");
            break;
        case KeyKind::positive:
            if (!parse_double(value, x))
                throw InvalidInput(key + ": expected a finite number, got '" + value + "'");
            if (!(x > 0.0))
                throw InvalidInput(key + ": must be positive, got '" + value + "'");
            break;
        case KeyKind::choice:
            if (std::find(spec->choices.begin(), spec->choices.end(), value) == spec->choices.end())
                throw InvalidInput(key + ": unknown value '" + value + "'");
            break;
        case KeyKind::list:
            for (const auto &item : split_list(value))
                if (!parse_double(item, x))
                    throw InvalidInput(key + ": unparsable list entry '" + item + "'");
            break;
        }
    }
}

double get_number(const ParamMap &params, const std::string &key) {
    double x = 0.0;
    const auto &v = checked(params, key).at(key);
    if (!parse_double(v, x))
        throw InvalidInput(key + ": expected a finite number, got '" + v + "'");
    return x;
}

int get_int(const ParamMap &params, const std::string &key) {
    return static_cast<int>(get_number(params, key));
}

const std::string &get_text(const ParamMap &params, const std::string &key) {
    return checked(params, key).at(key);
}

std::vector<double> get_list(const ParamMap &params, const std::string &key) {
    std::vector<double> out;
    for (const auto &item : split_list(get_text(params, key))) {
        double x = 0.0;
        if (!parse_double(item, x))
            throw InvalidInput(key + ": unparsable list entry '" + item + "'");
        out.push_back(x);
    }
    return out;
}

AtomTrapConfig trap_from_params(const ParamMap &p) {
    AtomTrapConfig c;
    c.n_atoms = get_int(p, "n_atoms");
    c.atom_mass = get_number(p, "atom_mass_kg");
    c.scattering_length = get_number(p, "scattering_length_m");
    c.k0 = 2.0 * two_pi / get_number(p, "laser_wavelength_m");
    c.gravity = get_number(p, "gravity_m_s2");
    c.omega_x = two_pi * get_number(p, "omega_x_hz");
    c.omega_y = two_pi * get_number(p, "omega_y_hz");
    c.omega_z = two_pi * get_number(p, "omega_z_hz");
    c.omega_z_tilde = get_text(p, "omega_z_tilde_hz") == "auto"
                          ? c.omega_z
                          : two_pi * get_number(p, "omega_z_tilde_hz");
    c.oscillations = get_number(p, "oscillations");
    c.validate();
    return c;
}

DensityModel model_from_params(const ParamMap &p) {
    return parse_density_model(get_text(p, "density_model"));
}

SequenceConfig sequence_from_params(const ParamMap &p) {
    SequenceConfig c;
    if (get_text(p, "source") == "trap") {
        c = sequence_from_trap(trap_from_params(p), model_from_params(p));
    } else {
        c.n_atoms = get_int(p, "n_atoms");
        c.tau = get_number(p, "tau");
        c.tau_tilde = get_number(p, "tau_tilde");
        c.theta = get_number(p, "theta");
    }
    c.alpha = get_number(p, "alpha");
    c.beta = get_number(p, "beta");
    c.validate();
    return c;
}

OptimizationSpec spec_from_params(const ParamMap &p) {
    OptimizationSpec s;
    s.alpha_value = get_number(p, "alpha");
    s.beta_grid = get_int(p, "beta_grid");
    s.alpha_grid = get_int(p, "alpha_grid");
    s.refine_tolerance = get_number(p, "refine_tolerance");
    s.validate();
    return s;
}

} // namespace nlai::config
