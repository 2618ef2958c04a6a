#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "nlai/cli.hpp"
#include "nlai/config.hpp"
#include "nlai/errors.hpp"

using namespace nlai;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {
constexpr double pi = std::numbers::pi;

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::vector<std::string> &args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
  public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("nlai_cli_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                 "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string &name) const { return (path_ / name).string(); }

  private:
    fs::path path_;
};

void write(const std::string &path, const std::string &text) { std::ofstream(path) << text; }

std::string slurp(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string &text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

int column(const std::vector<std::string> &header, const std::string &name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return static_cast<int>(i);
    return -1;
}
} // namespace

TEST(Config, DefaultsDescribeRbTrap) {
    const auto p = config::default_params();
    const auto trap = config::trap_from_params(p);
    EXPECT_EQ(trap.n_atoms, 1000);
    EXPECT_DOUBLE_EQ(trap.atom_mass, 1.4431e-25);
    EXPECT_DOUBLE_EQ(trap.scattering_length, 5.2e-9);
    EXPECT_NEAR(trap.omega_x, 2 * pi * 20, 1e-12);
    EXPECT_NEAR(trap.omega_y, 2 * pi * 20, 1e-12);
    EXPECT_NEAR(trap.omega_z, 2 * pi * 100, 1e-12);
    EXPECT_EQ(trap.omega_z_tilde, trap.omega_z);
    EXPECT_NEAR(trap.k0, 2 * (2 * pi / 780e-9), 1e-3);
    EXPECT_EQ(config::model_from_params(p), DensityModel::gaussian);
}

TEST(Config, ParseErrorsNameTheToken) {
    try {
        config::parse_config_text("n_atoms = 10\nbogus_key = 3\n", "f.cfg");
        FAIL();
    } catch (const InvalidInput &e) {
        EXPECT_NE(std::string(e.what()).find("bogus_key"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("f.cfg:2"), std::string::npos);
    }
    EXPECT_THROW(config::parse_config_text("n_atoms 10"), InvalidInput);
    EXPECT_THROW(config::parse_config_text("n_atoms ="), InvalidInput);
    EXPECT_THROW(config::parse_config_text("tau = 1\ntau = 2"), InvalidInput);
    const auto p = config::parse_config_text("# comment\n  tau = 0.5 # trailing\n\n");
    EXPECT_EQ(p.at("tau"), "0.5");
}

TEST(Config, ValidationNamesKey) {
    auto p = config::default_params();
    p["omega_z_hz"] = "-5";
    try {
        config::validate_params(p);
        FAIL();
    } catch (const InvalidInput &e) {
        EXPECT_NE(std::string(e.what()).find("omega_z_hz"), std::string::npos);
    }
    p = config::default_params();
    p["tau"] = "0.1x";
    EXPECT_THROW(config::validate_params(p), InvalidInput);
    p = config::default_params();
    p["n_atoms"] = "2.5";
    EXPECT_THROW(config::validate_params(p), InvalidInput);
    p = config::default_params();
    p["alpha_policy"] = "best";
    EXPECT_THROW(config::validate_params(p), InvalidInput);
    p = config::default_params();
    p.erase("tau");
    EXPECT_THROW(config::sequence_from_params(p), InvalidInput);
}

TEST(Cli, FlagBeatsConfigFile) {
    TempDir dir;
    write(dir.file("run.cfg"), "n_atoms = 1000\ntau = 0.01\n");
    const auto r = run({"gain", "--config", dir.file("run.cfg"), "--n-atoms=100"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["config"]["n_atoms"], 100);
    EXPECT_EQ(j["manifest"]["params"]["n_atoms"], 100);
    EXPECT_DOUBLE_EQ(j["config"]["tau"].get<double>(), 0.01);
}

TEST(Cli, ConfigErrors) {
    TempDir dir;
    write(dir.file("bad.cfg"), "omega_z_hz = -5\n");
    auto r = run({"tau", "--config", dir.file("bad.cfg")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("omega_z_hz"), std::string::npos);
    EXPECT_TRUE(r.out.empty());

    write(dir.file("unknown.cfg"), "colour = red\n");
    r = run({"gain", "--config", dir.file("unknown.cfg")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("colour"), std::string::npos);

    r = run({"gain", "--tau", "abc"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("tau"), std::string::npos);

    EXPECT_EQ(run({"gain", "--no-such-flag", "1"}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"gain", "--config", dir.file("missing.cfg")}).code, 1);
}

TEST(Cli, GainShotNoiseJson) {
    const auto r = run({"gain"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j["result"]["gain"].get<double>(), 1.0, 1e-12);
    EXPECT_EQ(j["manifest"]["subcommand"], "gain");
    EXPECT_EQ(j["manifest"]["version"], cli::kVersion);
    EXPECT_TRUE(r.err.empty());
}

TEST(Cli, NumericalFailureExitCode) {
    const auto r = run({"gain", "--n-atoms", "10", "--beta", "1.5707963267948966"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("numerical"), std::string::npos);
}

TEST(Cli, ScanMDefaultsReachHeadlineGain) {
    const auto r = run({"scan-m"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 12u);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')),
              "policy,m,gamma,omega_z_rad_s,n_atoms,tau,tau_tilde,alpha,beta,gain,gain_linear");
    const int g = column(rows[0], "gain");
    double best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i][0], "zero");
        best = std::max(best, std::stod(rows[i][static_cast<std::size_t>(g)]));
    }
    EXPECT_NEAR(best, 3.5, 0.5);
}

// The closed form is the Thomas-Fermi rate over m T/2, so the numeric
// integral over m T is about twice as large.
TEST(Cli, TauTableColumns) {
    TempDir dir;
    const auto r = run({"tau", "--m-list", "0.5,1,2", "--chi-output", dir.file("chi.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "m,time_s,tau_numeric,tau_closed,ratio,tau_tilde");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double num = std::stod(rows[i][2]), closed = std::stod(rows[i][3]);
        EXPECT_NEAR(num / closed, 2.0965, 1e-3);
        EXPECT_NEAR(std::stod(rows[i][4]), num / closed, 1e-9);
    }
    const auto chi = parse_csv(slurp(dir.file("chi.csv")));
    EXPECT_EQ(chi[0], (std::vector<std::string>{"time_s", "z0_m", "chi_self", "chi_cross", "chi"}));
    EXPECT_EQ(chi.size(), 402u);
    EXPECT_TRUE(fs::exists(dir.file("chi.csv.manifest.json")));
}

TEST(Cli, NumberFormatting) {
    EXPECT_EQ(cli::format_number(1.0), "1");
    EXPECT_EQ(cli::format_number(0.1), "0.1");
    EXPECT_EQ(cli::format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(cli::format_number(-2.5e-12), "-2.5e-12");
    EXPECT_EQ(cli::format_number(123456789012345.0), "1.23456789012e+14");
}

TEST(Cli, CsvCellsHaveTwelveDigits) {
    const auto r = run({"squeeze", "--tau-points", "5", "--tau-max", "0.02"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"tau", "alpha_h", "xi2_exact", "xi2_closed"}));
    for (std::size_t i = 1; i < rows.size(); ++i)
        for (const auto &cell : rows[i]) {
            std::size_t digits = 0;
            bool leading = true;
            for (char ch : cell.substr(0, cell.find('e'))) {
                if (!std::isdigit(static_cast<unsigned char>(ch)))
                    continue;
                leading = leading && ch == '0';
                digits += leading ? 0 : 1;
            }
            EXPECT_LE(digits, 12u) << cell;
            EXPECT_EQ(cell.find(' '), std::string::npos);
        }
    // xi2 columns agree.
    for (std::size_t i = 1; i < rows.size(); ++i)
        EXPECT_NEAR(std::stod(rows[i][2]), std::stod(rows[i][3]), 1e-9);
}

TEST(Cli, ManifestReplayIsByteIdentical) {
    TempDir dir;
    const std::string a = dir.file("a.csv"), b = dir.file("b.csv");
    auto r = run({"fringe", "--n-atoms", "50", "--tau", "0.03", "--theta-points", "21", "-o", a});
    ASSERT_EQ(r.code, 0) << r.err;
    ASSERT_TRUE(fs::exists(a + ".manifest.json"));
    r = run({"--manifest-in", a + ".manifest.json", "-o", b});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(slurp(a + ".manifest.json"), slurp(b + ".manifest.json"));

    const std::string ja = dir.file("a.json"), jb = dir.file("b.json");
    ASSERT_EQ(run({"optimize", "--n-atoms", "200", "--tau", "0.02", "--alpha-policy", "alpha_h",
                   "-o", ja})
                  .code,
              0);
    ASSERT_EQ(run({"--manifest-in", ja, "-o", jb}).code, 0);
    EXPECT_EQ(slurp(ja), slurp(jb));
}

TEST(Cli, ManifestRoundTrip) {
    cli::RunManifest m;
    m.subcommand = "gain";
    m.params = config::default_params();
    m.params["tau"] = "0.25";
    m.timestamp = "2020-01-01T00:00:00Z";
    const auto back = cli::RunManifest::from_json(m.to_json());
    EXPECT_EQ(back.subcommand, "gain");
    EXPECT_EQ(back.timestamp, m.timestamp);
    EXPECT_EQ(std::stod(back.params.at("tau")), 0.25);
    EXPECT_THROW(cli::RunManifest::from_json("{"), InvalidInput);
    EXPECT_THROW(cli::RunManifest::from_json(R"({"subcommand":"gain","params":{"zzz":1}})"),
                 InvalidInput);
}

TEST(Cli, HelpListsEveryKeyWithUnits) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    for (const auto &spec : config::key_specs()) {
        EXPECT_NE(r.out.find(config::kebab_flag(spec.key)), std::string::npos) << spec.key;
        EXPECT_NE(r.out.find("[" + spec.unit + "]"), std::string::npos) << spec.key;
    }
    EXPECT_NE(r.out.find("2 pi"), std::string::npos);
    EXPECT_EQ(run({"--version"}).out, std::string(cli::kVersion) + "\n");
}

TEST(Cli, HusimiAndOptimizeOutputs) {
    auto r = run({"husimi", "--n-atoms", "20", "--tau", "0.05", "--husimi-polar", "9",
                  "--husimi-azimuth", "8"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"polar", "azimuth", "q_value"}));
    EXPECT_EQ(rows.size(), 1u + 9 * 8);

    r = run({"optimize", "--n-atoms", "100", "--tau", "0.02", "--alpha-policy", "optimal",
             "--alpha-grid", "20"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["policy"], "optimal");
    EXPECT_NEAR(j["result"]["gain"].get<double>(), j["gain_linear"].get<double>(), 1e-4);
}

TEST(Cli, TrapSourceBuildsSequence) {
    const auto r = run({"gain", "--source", "trap", "--omega-z-tilde-hz", "80"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j["config"]["theta"].get<double>(), 450.377882230238, 1e-6);
    EXPECT_GT(j["config"]["tau"].get<double>(), 0.0);
}
