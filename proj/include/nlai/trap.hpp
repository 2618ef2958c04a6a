#pragma once

// Trap physics: chemical potential, condensate widths, nonlinear rate chi(t)
// from the overlap of the two separating wave packets, accumulated twisting
// strength, and the gravity phase. SI units throughout.

#include <string_view>

namespace nlai {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double rb87_mass = 1.4431e-25;        // kg
inline constexpr double rb87_scattering_length = 5.2e-9; // m
inline constexpr double rb87_wavelength = 780e-9;      // m
inline constexpr double standard_gravity = 9.81;       // m/s^2
} // namespace constants

enum class DensityModel { gaussian, thomas_fermi };

std::string_view to_string(DensityModel model);
DensityModel parse_density_model(std::string_view text);

struct AtomTrapConfig {
    double atom_mass = constants::rb87_mass;
    double scattering_length = constants::rb87_scattering_length;
    int n_atoms = 1000;
    double omega_x = 0; // rad/s
    double omega_y = 0;
    double omega_z = 0;
    double omega_z_tilde = 0; // axial frequency during interrogation
    double k0 = 0;            // two-photon wave vector, 1/m
    double gravity = constants::standard_gravity;
    double oscillations = 1.0; // m, in units of the full period T

    /// Rb-87, N = 1000, trap 2 pi {20, 20, 100} Hz, unchanged interrogation trap,
    /// k0 = 2 (2 pi / 780 nm).
    static AtomTrapConfig rb87_default();

    /// Throws InvalidInput on non-positive or non-finite fields, on
    /// omega_x != omega_y, or on oscillations that are not a half-integer.
    void validate() const;

    double aspect_ratio() const noexcept { return omega_x / omega_z; }
    double period() const noexcept;
    double period_tilde() const noexcept;
};

struct TrapDerived {
    DensityModel model = DensityModel::gaussian;
    double g_int = 0;   // 4 pi hbar^2 a / M, J m^3
    double mu = 0;      // chemical potential, J
    double r_x = 0, r_y = 0, r_z = 0;
    double sigma_x = 0, sigma_y = 0, sigma_z = 0;
    double omega_0 = 0;
    double b = 0;       // sigma_i / R_i
    double chi_max = 0; // rad/s
    double z_amp = 0;   // hbar k0 / (M omega_z)
    double z_sag = 0;   // -g / omega_z^2, informational
};

TrapDerived derive_trap(const AtomTrapConfig &config, DensityModel model);

/// Width-to-radius ratio of the variational Gaussian, (2/(225 pi))^{1/10}/sqrt(2).
double gaussian_width_ratio();

enum class Stage { preparation, interrogation };

/// chi = self - 2 cross, with self = chi_max and cross = chi_max exp(-z0^2/sigma_z^2).
struct ChiTerms {
    double self_phase;
    double cross_phase;
    double total() const noexcept { return self_phase - 2.0 * cross_phase; }
};

/// Packet half-separation z0(t) = z_amp |sin(omega t)| for the given stage.
double mode_separation(const TrapDerived &derived, const AtomTrapConfig &config, double t,
                       Stage stage = Stage::preparation);

ChiTerms chi_terms(const TrapDerived &derived, const AtomTrapConfig &config, double t,
                   Stage stage = Stage::preparation);

double chi_of_t(const TrapDerived &derived, const AtomTrapConfig &config, double t,
                Stage stage = Stage::preparation);

/// Integral of chi over [0, upto] during preparation. Exploits the T/2
/// periodicity of the integrand; each smooth piece goes to adaptive
/// Gauss-Kronrod with absolute target 1e-6 chi_max upto. Throws
/// QuadratureError if the estimate misses the target.
double tau_accumulated(const AtomTrapConfig &config, DensityModel model, double upto);

/// tau_accumulated over config.oscillations full periods.
double tau_preparation(const AtomTrapConfig &config, DensityModel model);

/// Twisting accumulated during the interrogation half period T~/2 with the
/// axial frequency switched to omega_z_tilde. Widths stay at their
/// preparation-trap values.
double tau_interrogation(const AtomTrapConfig &config, DensityModel model);

/// (2 m pi / 7) (15 a gamma^2 sqrt(M/hbar))^{2/5} (omega_z / N^3)^{1/5}.
/// `hbar` only changes for evaluations in non-SI units.
double tau_closed_form(const AtomTrapConfig &config, double m, double hbar = constants::hbar);

/// 2 k0 g (1/omega_z_tilde^2 - 1/omega_z^2).
double gravity_phase(const AtomTrapConfig &config);

} // namespace nlai
