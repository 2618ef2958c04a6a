#include "nlai/trap.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nlai/errors.hpp"

namespace nlai {

namespace {

constexpr double pi = std::numbers::pi;

void require_positive(double x, const char *name) {
    if (!std::isfinite(x) || !(x > 0.0))
        throw InvalidInput(std::string(name) + " must be positive and finite, got " +
                           std::to_string(x));
}

struct Integral {
    double value;
    double error;
};

template <class F> Integral integrate(F f, double a, double b) {
    if (!(b > a))
        return {0.0, 0.0};
    double err = 0.0;
    const double v =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-10, &err);
    return {v, err};
}

} // namespace

std::string_view to_string(DensityModel model) {
    return model == DensityModel::gaussian ? "gaussian" : "thomas_fermi";
}

DensityModel parse_density_model(std::string_view text) {
    if (text == "gaussian")
        return DensityModel::gaussian;
    if (text == "thomas_fermi" || text == "thomas-fermi")
        return DensityModel::thomas_fermi;
    throw InvalidInput("unknown density model '" + std::string(text) +
                       "' (expected gaussian or thomas_fermi)");
}

AtomTrapConfig AtomTrapConfig::rb87_default() {
    AtomTrapConfig c;
    c.omega_x = 2 * pi * 20.0;
    c.omega_y = 2 * pi * 20.0;
    c.omega_z = 2 * pi * 100.0;
    c.omega_z_tilde = c.omega_z;
    c.k0 = 2.0 * (2 * pi / constants::rb87_wavelength);
    return c;
}

void AtomTrapConfig::validate() const {
    require_positive(atom_mass, "atom_mass");
    require_positive(scattering_length, "scattering_length");
    require_positive(omega_x, "omega_x");
    require_positive(omega_y, "omega_y");
    require_positive(omega_z, "omega_z");
    require_positive(omega_z_tilde, "omega_z_tilde");
    require_positive(k0, "k0");
    require_positive(gravity, "gravity");
    if (n_atoms < 1)
        throw InvalidInput("n_atoms must be positive, got " + std::to_string(n_atoms));
    if (std::abs(omega_x - omega_y) > 1e-12 * omega_x)
        throw InvalidInput("omega_x and omega_y must be equal (axially symmetric trap)");
    if (!std::isfinite(oscillations) || oscillations < 0.0 ||
        std::abs(2.0 * oscillations - std::round(2.0 * oscillations)) > 1e-9)
        throw InvalidInput("oscillations must be a non-negative half-integer, got " +
                           std::to_string(oscillations));
}

double AtomTrapConfig::period() const noexcept { return 2 * pi / omega_z; }
double AtomTrapConfig::period_tilde() const noexcept { return 2 * pi / omega_z_tilde; }

double gaussian_width_ratio() {
    return std::pow(2.0 / (225.0 * pi), 0.1) / std::sqrt(2.0);
}

TrapDerived derive_trap(const AtomTrapConfig &config, DensityModel model) {
    config.validate();
    if (config.n_atoms < 2)
        throw InvalidInput("derive_trap needs at least 2 atoms for interactions");
    const double hbar = constants::hbar, m = config.atom_mass, a = config.scattering_length;
    TrapDerived d;
    d.model = model;
    d.g_int = 4 * pi * hbar * hbar * a / m;
    d.omega_0 = std::cbrt(config.omega_x * config.omega_y * config.omega_z);
    d.mu = 0.5 * hbar * d.omega_0 *
           std::pow(15.0 * config.n_atoms * a * std::sqrt(m * d.omega_0 / hbar), 0.4);
    d.r_x = std::sqrt(2 * d.mu / (m * config.omega_x * config.omega_x));
    d.r_y = std::sqrt(2 * d.mu / (m * config.omega_y * config.omega_y));
    d.r_z = std::sqrt(2 * d.mu / (m * config.omega_z * config.omega_z));
    d.b = gaussian_width_ratio();
    d.sigma_x = d.b * d.r_x;
    d.sigma_y = d.b * d.r_y;
    d.sigma_z = d.b * d.r_z;
    const double volume = d.r_x * d.r_y * d.r_z;
    if (model == DensityModel::gaussian)
        d.chi_max = d.g_int / (std::pow(4 * pi * d.b * d.b, 1.5) * hbar * volume);
    else
        d.chi_max = (15.0 / (14.0 * pi)) * d.g_int / (hbar * volume);
    d.z_amp = hbar * config.k0 / (m * config.omega_z);
    d.z_sag = -config.gravity / (config.omega_z * config.omega_z);
    return d;
}

double mode_separation(const TrapDerived &derived, const AtomTrapConfig &config, double t,
                       Stage stage) {
    if (stage == Stage::preparation)
        return derived.z_amp * std::abs(std::sin(config.omega_z * t));
    const double amp = constants::hbar * config.k0 / (config.atom_mass * config.omega_z_tilde);
    return amp * std::abs(std::sin(config.omega_z_tilde * t));
}

ChiTerms chi_terms(const TrapDerived &derived, const AtomTrapConfig &config, double t,
                   Stage stage) {
    if (!std::isfinite(t) || t < 0.0)
        throw InvalidInput("time must be finite and non-negative");
    const double z = mode_separation(derived, config, t, stage) / derived.sigma_z;
    return {derived.chi_max, derived.chi_max * std::exp(-z * z)};
}

double chi_of_t(const TrapDerived &derived, const AtomTrapConfig &config, double t, Stage stage) {
    return chi_terms(derived, config, t, stage).total();
}

namespace {

// Integral of chi over [0, upto] for a stage whose integrand has period
// half_period: whole half periods are one integral times a count.
double periodic_integral(const TrapDerived &d, const AtomTrapConfig &config, Stage stage,
                         double half_period, double upto) {
    if (!std::isfinite(upto) || upto < 0.0)
        throw InvalidInput("integration bound must be finite and non-negative");
    if (upto == 0.0)
        return 0.0;
    auto f = [&](double t) { return chi_of_t(d, config, t, stage); };
    const double cycles = std::floor(upto / half_period + 1e-9);
    const double rest = std::max(0.0, upto - cycles * half_period);

    Integral whole{0.0, 0.0};
    if (cycles > 0)
        whole = integrate(f, 0.0, half_period);
    const Integral tail = integrate(f, 0.0, rest);

    const double value = cycles * whole.value + tail.value;
    const double error = cycles * whole.error + tail.error;
    const double target = 1e-6 * d.chi_max * upto;
    if (!(error <= target) || !std::isfinite(value))
        throw QuadratureError("chi(t) quadrature missed its tolerance", error, target);
    return value;
}

} // namespace

double tau_accumulated(const AtomTrapConfig &config, DensityModel model, double upto) {
    const TrapDerived d = derive_trap(config, model);
    return periodic_integral(d, config, Stage::preparation, 0.5 * config.period(), upto);
}

double tau_preparation(const AtomTrapConfig &config, DensityModel model) {
    return tau_accumulated(config, model, config.oscillations * config.period());
}

double tau_interrogation(const AtomTrapConfig &config, DensityModel model) {
    const TrapDerived d = derive_trap(config, model);
    const double half = 0.5 * config.period_tilde();
    return periodic_integral(d, config, Stage::interrogation, half, half);
}

double tau_closed_form(const AtomTrapConfig &config, double m, double hbar) {
    config.validate();
    if (!std::isfinite(m) || m < 0.0)
        throw InvalidInput("oscillation count must be finite and non-negative");
    const double gamma = config.aspect_ratio();
    const double base = 15.0 * config.scattering_length * gamma * gamma *
                        std::sqrt(config.atom_mass / hbar);
    const double n = config.n_atoms;
    return (2.0 * m * pi / 7.0) * std::pow(base, 0.4) * std::pow(config.omega_z / (n * n * n), 0.2);
}

double gravity_phase(const AtomTrapConfig &config) {
    config.validate();
    const double wt = config.omega_z_tilde, w = config.omega_z;
    return 2.0 * config.k0 * config.gravity * (1.0 / (wt * wt) - 1.0 / (w * w));
}

} // namespace nlai
