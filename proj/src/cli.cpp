#include "nlai/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlai/analytic.hpp"
#include "nlai/dicke.hpp"
#include "nlai/errors.hpp"
#include "nlai/interferometer.hpp"
#include "nlai/optimize.hpp"
#include "nlai/trap.hpp"

namespace nlai::cli {

namespace {

using json = nlohmann::ordered_json;
using config::ParamMap;
constexpr double two_pi = 2.0 * std::numbers::pi;

const std::vector<std::string> kSubcommands = {"squeeze", "tau",     "gain",  "optimize",
                                               "scan-m",  "scan-trap", "fringe", "husimi"};

json param_value(const std::string &key, const std::string &value) {
    const config::KeySpec *spec = config::find_key(key);
    if (!spec || value == "auto")
        return value;
    switch (spec->kind) {
    case config::KeyKind::integer:
        return static_cast<long long>(std::llround(std::strtod(value.c_str(), nullptr)));
    case config::KeyKind::number:
    case config::KeyKind::positive:
        return std::strtod(value.c_str(), nullptr);
    default:
        return value;
    }
}

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    if (const char *epoch = std::getenv("SOURCE_DATE_EPOCH"))
        now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

using Cell = std::variant<double, long long, std::string>;

class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<Cell> row) {
        if (row.size() != header_.size())
            throw std::logic_error("CSV row width does not match header");
        rows_.push_back(std::move(row));
    }

    void write(std::ostream &os) const {
        write_line(os, header_);
        for (const auto &row : rows_) {
            std::vector<std::string> cells;
            for (const auto &c : row)
                cells.push_back(std::visit(
                    [](const auto &v) -> std::string {
                        using T = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<T, double>)
                            return format_number(v);
                        else if constexpr (std::is_same_v<T, long long>)
                            return std::to_string(v);
                        else
                            return v;
                    },
                    c));
            write_line(os, cells);
        }
    }

  private:
    static void write_line(std::ostream &os, const std::vector<std::string> &cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            os << (i ? "," : "") << cells[i];
        os << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

struct Sink {
    std::string path; // "-" for standard output
    std::ostream &out;
};

void emit_text(const Sink &sink, const std::string &text) {
    if (sink.path == "-") {
        sink.out << text;
        return;
    }
    std::ofstream f(sink.path, std::ios::binary);
    if (!f)
        throw InvalidInput("cannot write output file '" + sink.path + "'");
    f << text;
}

// CSV to the sink; files get a <path>.manifest.json sidecar.
void emit_csv(const Sink &sink, const CsvTable &table, const RunManifest &manifest) {
    std::ostringstream ss;
    table.write(ss);
    emit_text(sink, ss.str());
    if (sink.path != "-")
        emit_text({sink.path + ".manifest.json", sink.out}, manifest.to_json() + "\n");
}

void emit_json(const Sink &sink, json body, const RunManifest &manifest) {
    json doc;
    doc["manifest"] = json::parse(manifest.to_json());
    for (auto it = body.begin(); it != body.end(); ++it)
        doc[it.key()] = it.value();
    emit_text(sink, doc.dump(2) + "\n");
}

json gain_json(const GainResult &g) {
    json j;
    j["gain"] = g.gain;
    j["xi"] = g.xi;
    j["sx_out"] = g.sx_out;
    j["sz_out"] = g.sz_out;
    j["sz2_out"] = g.sz2_out;
    j["d_sz_d_theta"] = g.d_sz_d_theta;
    j["delta_theta"] = g.delta_theta;
    j["alpha"] = g.alpha;
    j["beta"] = g.beta;
    return j;
}

json sequence_json(const SequenceConfig &c) {
    json j;
    j["n_atoms"] = c.n_atoms;
    j["tau"] = c.tau;
    j["tau_tilde"] = c.tau_tilde;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["theta"] = c.theta;
    return j;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

CsvTable scan_table(const std::vector<ScanRow> &rows) {
    CsvTable t({"policy", "m", "gamma", "omega_z_rad_s", "n_atoms", "tau", "tau_tilde", "alpha",
                "beta", "gain", "gain_linear"});
    for (const auto &r : rows)
        t.add({std::string(to_string(r.policy)), r.m, r.gamma, r.omega_z,
               static_cast<long long>(r.n_atoms), r.tau, r.tau_tilde, r.alpha, r.beta, r.gain,
               r.gain_linear});
    return t;
}

// ---- subcommands ----------------------------------------------------------

void cmd_squeeze(const ParamMap &p, const Sink &sink, const RunManifest &m) {
    const int n = config::get_int(p, "n_atoms");
    const OptimizationSpec spec = config::spec_from_params(p);
    CsvTable t({"tau", "alpha_h", "xi2_exact", "xi2_closed"});
    for (double tau : linspace(config::get_number(p, "tau_min"), config::get_number(p, "tau_max"),
                               config::get_int(p, "tau_points"))) {
        const double a = alpha_H(n, tau, spec);
        const double exact = wineland_xi2(spin_moments(prepared_state(n, tau)).rotated_about_x(a), n);
        t.add({tau, a, exact, xi2_closed(n, tau)});
    }
    emit_csv(sink, t, m);
}

void cmd_tau(const ParamMap &p, const Sink &sink, const std::string &chi_path,
             const RunManifest &m) {
    const AtomTrapConfig trap = config::trap_from_params(p);
    const DensityModel model = config::model_from_params(p);
    const double period = trap.period();
    const double tau_tilde = tau_interrogation(trap, model);
    CsvTable t({"m", "time_s", "tau_numeric", "tau_closed", "ratio", "tau_tilde"});
    for (double mm : config::get_list(p, "m_list")) {
        const double numeric = tau_accumulated(trap, model, mm * period);
        const double closed = tau_closed_form(trap, mm);
        t.add({mm, mm * period, numeric, closed, closed > 0 ? numeric / closed : 0.0, tau_tilde});
    }
    emit_csv(sink, t, m);

    if (!chi_path.empty()) {
        const TrapDerived d = derive_trap(trap, model);
        CsvTable c({"time_s", "z0_m", "chi_self", "chi_cross", "chi"});
        for (double time : linspace(0.0, period, config::get_int(p, "chi_points"))) {
            const ChiTerms terms = chi_terms(d, trap, time);
            c.add({time, mode_separation(d, trap, time), terms.self_phase, terms.cross_phase,
                   terms.total()});
        }
        emit_csv({chi_path, sink.out}, c, m);
    }
}

void cmd_gain(const ParamMap &p, const Sink &sink, const RunManifest &m) {
    const SequenceConfig seq = config::sequence_from_params(p);
    const GainResult g = seq.theta == 0.0 ? gain_at_zero(seq) : sensitivity(seq);
    json body;
    body["config"] = sequence_json(seq);
    body["result"] = gain_json(g);
    emit_json(sink, body, m);
}

void cmd_optimize(const ParamMap &p, const Sink &sink, const RunManifest &m) {
    const SequenceConfig seq = config::sequence_from_params(p);
    const OptimizationSpec spec = config::spec_from_params(p);
    const AlphaPolicy policy = parse_alpha_policy(config::get_text(p, "alpha_policy"));
    const SequenceEngine engine(seq.n_atoms, seq.tau, seq.tau_tilde);
    const OptimizationResult r = optimize_policy(engine, policy, spec);
    json body;
    body["config"] = sequence_json(seq);
    body["policy"] = std::string(to_string(policy));
    body["flat_landscape"] = r.flat_landscape;
    body["evaluations"] = r.evaluations;
    body["gain_linear"] = 1.0 / std::sqrt(xi2_closed(seq.n_atoms, seq.tau));
    body["result"] = gain_json(r.best);
    emit_json(sink, body, m);
}

void cmd_scan_m(const ParamMap &p, const Sink &sink, const RunManifest &m) {
    const auto rows =
        scan_m(config::trap_from_params(p), config::get_list(p, "m_list"),
               parse_alpha_policy(config::get_text(p, "alpha_policy")),
               config::model_from_params(p), config::spec_from_params(p));
    emit_csv(sink, scan_table(rows), m);
}

void cmd_scan_trap(const ParamMap &p, const Sink &sink, const RunManifest &m) {
    const bool axial = config::get_text(p, "sweep") == "axial_frequency";
    std::vector<double> values;
    if (config::get_text(p, "sweep_values") == "auto")
        values = axial ? std::vector<double>{25, 50, 75, 100, 150, 200}
                       : std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0};
    else
        values = config::get_list(p, "sweep_values");
    if (axial)
        for (auto &v : values)
            v *= two_pi;
    const auto rows = scan_trap(
        config::trap_from_params(p), axial ? TrapSweep::axial_frequency : TrapSweep::aspect_ratio,
        values, config::get_list(p, "trap_m_list"),
        parse_alpha_policy(config::get_text(p, "alpha_policy")), config::model_from_params(p),
        config::spec_from_params(p));
    emit_csv(sink, scan_table(rows), m);
}

void cmd_fringe(const ParamMap &p, const Sink &sink, const RunManifest &m) {
    const SequenceConfig seq = config::sequence_from_params(p);
    const auto grid = linspace(config::get_number(p, "theta_min"),
                               config::get_number(p, "theta_max"), config::get_int(p, "theta_points"));
    CsvTable t({"theta", "sz_mean", "sz_var"});
    for (const auto &pt : signal_curve(seq, grid))
        t.add({pt.theta, pt.sz_mean, pt.sz_var});
    emit_csv(sink, t, m);
}

void cmd_husimi(const ParamMap &p, const Sink &sink, const RunManifest &m) {
    const SequenceConfig seq = config::sequence_from_params(p);
    const std::string &stage = config::get_text(p, "husimi_stage");
    DickeState psi = prepared_state(seq.n_atoms, seq.tau);
    if (stage == "rotated")
        psi = apply_rotation(psi, {Axis::x, seq.alpha});
    else if (stage == "output")
        psi = run_sequence(seq);
    const HusimiGrid g =
        husimi_grid(psi, config::get_int(p, "husimi_polar"), config::get_int(p, "husimi_azimuth"));
    CsvTable t({"polar", "azimuth", "q_value"});
    for (std::size_t i = 0; i < g.polar.size(); ++i)
        for (std::size_t j = 0; j < g.azimuth.size(); ++j)
            t.add({g.polar[i], g.azimuth[j], g.at(i, j)});
    emit_csv(sink, t, m);
}

std::string help_footer() {
    return "Frequencies (*_hz) are ordinary frequencies nu in Hz; they are converted to angular\n"
           "frequencies omega = 2 pi nu internally. Angles are in radians.\n"
           "Precedence: command-line flag > --config file > --manifest-in > default.\n"
           "Config files hold one key = value per line (snake_case keys, # comments).\n"
           "CSV written to a file gets a <file>.manifest.json sidecar; JSON embeds its manifest.\n"
           "Dicke amplitudes are ordered m = +S ... -S.\n"
           "Exit codes: 0 success, 1 usage error, 2 numerical failure.";
}

} // namespace

std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

std::string RunManifest::to_json(int indent) const {
    json j;
    j["subcommand"] = subcommand;
    json params = json::object();
    for (const auto &[k, v] : this->params)
        params[k] = param_value(k, v);
    j["params"] = params;
    j["version"] = version;
    j["timestamp"] = timestamp;
    return j.dump(indent);
}

RunManifest RunManifest::from_json(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        throw InvalidInput(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (j.contains("manifest"))
        j = j["manifest"];
    RunManifest m;
    try {
        m.subcommand = j.at("subcommand").get<std::string>();
        m.version = j.value("version", std::string(kVersion));
        m.timestamp = j.value("timestamp", std::string());
        for (auto it = j.at("params").begin(); it != j.at("params").end(); ++it) {
            if (!config::find_key(it.key()))
                throw InvalidInput("manifest: unknown key '" + it.key() + "'");
            m.params[it.key()] = it.value().is_string() ? it.value().get<std::string>()
                                                        : it.value().dump();
        }
    } catch (const json::exception &e) {
        throw InvalidInput(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Nonlinear trapped-atom interferometer: squeezing, gain and optimization",
                 "nlai"};
    app.footer(help_footer());
    app.set_version_flag("--version", kVersion);

    std::map<std::string, std::string> flag_values;
    std::map<std::string, CLI::Option *> flag_options;
    for (const auto &spec : config::key_specs()) {
        std::string desc = spec.help + " [" + spec.unit + "] (default " + spec.default_value + ")";
        if (!spec.choices.empty()) {
            desc += " {";
            for (std::size_t i = 0; i < spec.choices.size(); ++i)
                desc += (i ? "|" : "") + spec.choices[i];
            desc += "}";
        }
        flag_options[spec.key] = app.add_option(config::kebab_flag(spec.key),
                                                flag_values[spec.key], desc);
    }
    std::string config_path, manifest_path, output_path = "-", chi_output;
    app.add_option("--config", config_path, "flat key = value parameter file");
    app.add_option("--manifest-in", manifest_path,
                   "replay the parameters and timestamp of a previous run");
    app.add_option("--output,-o", output_path, "output file, - for standard output");
    app.add_option("--chi-output", chi_output, "tau: also write the chi(t) curve CSV here");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"squeeze", "squeezing parameter over a tau sweep (CSV)"},
        {"tau", "twisting strengths per oscillation count (CSV), chi(t) curve"},
        {"gain", "gain of one sequence (JSON)"},
        {"optimize", "gain optimized over beta or (alpha, beta) (JSON)"},
        {"scan-m", "optimized gain versus oscillation count (CSV)"},
        {"scan-trap", "optimized gain versus aspect ratio or axial frequency (CSV)"},
        {"fringe", "mean and variance of S_z versus phase (CSV)"},
        {"husimi", "Husimi Q grid (CSV)"},
    };
    for (const auto &[name, desc] : commands)
        app.add_subcommand(name, desc)->fallthrough();
    app.require_subcommand(0, 1);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForVersion &) {
        out << kVersion << '\n';
        return ok;
    } catch (const CLI::ParseError &e) {
        err << "nlai: " << e.what() << '\n';
        return usage_error;
    }

    try {
        RunManifest manifest;
        manifest.params = config::default_params();
        if (!manifest_path.empty()) {
            std::ifstream f(manifest_path);
            if (!f)
                throw InvalidInput("cannot read manifest '" + manifest_path + "'");
            std::stringstream ss;
            ss << f.rdbuf();
            const RunManifest replay = RunManifest::from_json(ss.str());
            for (const auto &[k, v] : replay.params)
                manifest.params[k] = v;
            manifest.subcommand = replay.subcommand;
            manifest.timestamp = replay.timestamp;
        }
        if (!config_path.empty())
            for (const auto &[k, v] : config::read_config_file(config_path))
                manifest.params[k] = v;
        for (const auto &[k, opt] : flag_options)
            if (opt->count() > 0)
                manifest.params[k] = flag_values[k];
        config::validate_params(manifest.params);

        for (const auto *sub : app.get_subcommands())
            manifest.subcommand = sub->get_name();
        if (manifest.subcommand.empty()) {
            err << "nlai: no subcommand given (see --help)\n";
            return usage_error;
        }
        if (std::find(kSubcommands.begin(), kSubcommands.end(), manifest.subcommand) ==
            kSubcommands.end())
            throw InvalidInput("unknown subcommand '" + manifest.subcommand + "'");
        if (manifest.timestamp.empty())
            manifest.timestamp = utc_timestamp();

        const Sink sink{output_path, out};
        const auto &p = manifest.params;
        const std::string &cmd = manifest.subcommand;
        if (cmd == "squeeze")
            cmd_squeeze(p, sink, manifest);
        else if (cmd == "tau")
            cmd_tau(p, sink, chi_output, manifest);
        else if (cmd == "gain")
            cmd_gain(p, sink, manifest);
        else if (cmd == "optimize")
            cmd_optimize(p, sink, manifest);
        else if (cmd == "scan-m")
            cmd_scan_m(p, sink, manifest);
        else if (cmd == "scan-trap")
            cmd_scan_trap(p, sink, manifest);
        else if (cmd == "fringe")
            cmd_fringe(p, sink, manifest);
        else
            cmd_husimi(p, sink, manifest);
        return ok;
    } catch (const InvalidInput &e) {
        err << "nlai: " << e.what() << '\n';
        return usage_error;
    } catch (const NumericalError &e) {
        err << "nlai: numerical failure: " << e.what() << '\n';
        return numerical_failure;
    } catch (const std::exception &e) {
        err << "nlai: " << e.what() << '\n';
        return numerical_failure;
    }
}

} // namespace nlai::cli
