#pragma once

// Closed-form moments of the one-axis-twisted coherent state and the
// perturbative (small interrogation twisting) output of the full sequence.
// Large powers cos(x)^n are evaluated in log space.

#include <complex>

namespace nlai {

/// sign(base)^n |base|^n for integer n >= 0, in log space.
double int_power(double base, int n);

/// Moments of R_x(alpha) OAT(tau) |CSS +x>.
struct AnalyticMoments {
    int n_atoms = 0;
    double tau = 0;
    double alpha = 0;
    double a_coef = 0; // 1 - cos(2 tau)^{2S-2}
    double b_coef = 0; // 4 sin(tau) cos(tau)^{2S-2}
    double delta = 0;  // atan2(B, A)/2, so pi/4 sign(B) when A = 0
    double sx = 0, sy = 0, sz = 0;
    double sx2 = 0, sy2 = 0, sz2 = 0;
};

AnalyticMoments oat_moments_closed(int n_atoms, double tau, double alpha);

/// Minimum over the pre-rotation angle of the squeezing parameter xi^2.
/// Throws NumericalError when |cos tau| < 1e-12.
double xi2_closed(int n_atoms, double tau);

/// First-order gain G^2 = [1 + (2S-1)(sin(2 beta) tau~ - sin(2 alpha + 2 beta) tau)] cos^2 beta.
double weak_gain_squared(int n_atoms, double tau, double tau_tilde, double alpha, double beta);

/// sqrt of weak_gain_squared, clamped at zero.
double weak_gain(int n_atoms, double tau, double tau_tilde, double alpha, double beta);

/// <S_+^k S_z^j> in OAT(tau)|CSS +x>, exact for any N, k and j.
/// Zero when k > N.
std::complex<double> oat_ladder_moment(int n_atoms, double tau, int k, int j);

/// Output moments to first order in the interrogation twisting, exact in tau.
struct PerturbativeMoments {
    double sx0 = 0, sx1 = 0;
    double sz2_0 = 0, sz2_1 = 0;
    double sx_out = 0;  // sx0 + tau~ sx1
    double sz2_out = 0; // sz2_0 + tau~ sz2_1

    /// cos^2(beta) sx_out^2 / (N sz2_out).
    double gain_squared(int n_atoms, double beta) const;
};

PerturbativeMoments output_moments_perturbative(int n_atoms, double tau, double tau_tilde,
                                                double alpha, double beta);

} // namespace nlai
