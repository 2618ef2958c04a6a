#pragma once

// The trapped nonlinear interferometer:
//   psi_out = R_x(beta) exp(-i(tau~ S_y^2 + theta S_y)) R_x(alpha) OAT(tau) |CSS +x>
// and its phase sensitivity by linear error propagation on <S_z>.

#include <span>
#include <vector>

#include "nlai/dicke.hpp"
#include "nlai/rotation.hpp"
#include "nlai/trap.hpp"

namespace nlai {

struct SequenceConfig {
    int n_atoms = 2;
    double tau = 0;       // preparation twisting
    double tau_tilde = 0; // interrogation twisting
    double alpha = 0;
    double beta = 0;
    double theta = 0; // encoded phase

    void validate() const;
};

struct GainResult {
    double gain = 0;
    double xi = 0; // sqrt of xi^2 for the alpha-rotated prepared state
    double sx_out = 0, sz_out = 0, sz2_out = 0;
    double d_sz_d_theta = 0;
    double delta_theta = 0;
    double alpha = 0, beta = 0;
};

/// OAT(tau) applied to the coherent state along +x.
DickeState prepared_state(int n_atoms, double tau);

/// Output state, with the interrogation block evaluated in the S_y
/// eigenbasis, i.e. R_z(pi/2) V diag(.) V^T R_z(-pi/2).
DickeState run_sequence(const SequenceConfig &config);

/// Same output assembled pulse by pulse: R_y(pi/2) on the m = +S pole, OAT,
/// R_x(alpha), R_x(pi/2), the diagonal exp(-i(tau~ m^2 + theta m)), R_x(-pi/2),
/// R_x(beta).
DickeState run_sequence_pulses(const SequenceConfig &config);

/// Gain at theta = 0 (config.theta is ignored). Slope is -cos(beta) <S_x>_out.
/// Throws DegenerateStateError for vanishing output variance or mean spin.
GainResult gain_at_zero(const SequenceConfig &config);

/// Sensitivity at config.theta. The slope is analytic at theta = 0 and a
/// central difference with step 1e-5 elsewhere; |slope| < 1e-8 S throws
/// NumericalError.
GainResult sensitivity(const SequenceConfig &config);

/// Central finite-difference d<S_z>/dtheta at config.theta.
double slope_finite_difference(const SequenceConfig &config, double step = 1e-5);

struct SignalPoint {
    double theta;
    double sz_mean;
    double sz_var;
};

std::vector<SignalPoint> signal_curve(const SequenceConfig &config,
                                      std::span<const double> theta_grid);

/// Assembles a GainResult from the moments right before the beta pulse.
/// Returns gain 0 if the output variance vanishes.
GainResult gain_from_moments(int n_atoms, const SpinMoments &pre_beta, double alpha, double beta,
                             double xi);

/// Fast evaluator for gain_at_zero over many (alpha, beta) at fixed
/// (N, tau, tau~). Each alpha costs one S_x-eigenbasis mat-vec; beta is
/// applied to the moments analytically.
class SequenceEngine {
  public:
    SequenceEngine(int n_atoms, double tau, double tau_tilde,
                   KernelBackend backend = KernelBackend::parallel);

    int n_atoms() const noexcept { return n_atoms_; }
    double tau() const noexcept { return tau_; }
    double tau_tilde() const noexcept { return tau_tilde_; }

    /// Moments of the state before the beta pulse, at theta = 0.
    SpinMoments pre_beta_moments(double alpha) const;

    /// Moments of R_x(alpha) OAT(tau)|CSS +x>.
    SpinMoments input_moments(double alpha) const { return prepared_.rotated_about_x(alpha); }

    /// sqrt(xi^2) of the alpha-rotated prepared state; 0 if undefined.
    double input_xi(double alpha) const;

    GainResult evaluate(double alpha, double beta) const;

  private:
    int n_atoms_;
    double tau_, tau_tilde_;
    SpinRotator rotator_;
    std::vector<cplx> eigen_coeffs_; // V^T psi_e
    std::vector<cplx> diag_phases_;  // exp(-i tau~ m^2)
    SpinMoments prepared_;
};

/// Dimensionless sequence from trap physics: tau over config.oscillations
/// periods, tau~ over the interrogation half period, theta the gravity phase.
SequenceConfig sequence_from_trap(const AtomTrapConfig &config, DensityModel model);

} // namespace nlai
