#include "nlai/interferometer.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nlai/errors.hpp"

namespace nlai {

namespace {

constexpr double half_pi = 0.5 * std::numbers::pi;

std::vector<cplx> copy_amps(const DickeState &s) {
    return {s.amplitudes().begin(), s.amplitudes().end()};
}

// exp(-i(tau~ m^2 + theta m)) in Dicke storage order.
std::vector<cplx> interrogation_diagonal(int n_atoms, double tau_tilde, double theta) {
    std::vector<cplx> d(static_cast<std::size_t>(n_atoms) + 1);
    const double s = 0.5 * n_atoms;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double m = s - static_cast<double>(k);
        d[k] = std::polar(1.0, -(tau_tilde * m * m + theta * m));
    }
    return d;
}

double safe_xi(const SpinMoments &m, int n_atoms) {
    try {
        return std::sqrt(wineland_xi2(m, n_atoms));
    } catch (const DegenerateStateError &) {
        return 0.0;
    }
}

bool variance_vanishes(double var, double s) { return !(var > 1e-14 * s); }

} // namespace

void SequenceConfig::validate() const {
    if (n_atoms < 2)
        throw InvalidInput("sequence needs n_atoms >= 2, got " + std::to_string(n_atoms));
    const double vals[] = {tau, tau_tilde, alpha, beta, theta};
    const char *names[] = {"tau", "tau_tilde", "alpha", "beta", "theta"};
    for (int i = 0; i < 5; ++i)
        if (!std::isfinite(vals[i]))
            throw InvalidInput(std::string(names[i]) + " must be finite");
}

DickeState prepared_state(int n_atoms, double tau) {
    return apply_oat(make_css(n_atoms, half_pi, 0.0), tau);
}

DickeState run_sequence(const SequenceConfig &c) {
    c.validate();
    const SpinRotator rot(c.n_atoms);
    auto psi = rot.rotate_x(prepared_state(c.n_atoms, c.tau).amplitudes(), c.alpha);

    // exp(-i f(S_y)) = R_z(pi/2) exp(-i f(S_x)) R_z(-pi/2)
    rotate_z_inplace(psi, c.n_atoms, -half_pi);
    const auto mu = rot.eigenvalues();
    std::vector<cplx> phases(mu.size());
    for (std::size_t j = 0; j < mu.size(); ++j)
        phases[j] = std::polar(1.0, -(c.tau_tilde * mu[j] * mu[j] + c.theta * mu[j]));
    psi = rot.apply_x_function(psi, phases);
    rotate_z_inplace(psi, c.n_atoms, half_pi);

    psi = rot.rotate_x(psi, c.beta);
    return make_state_unchecked(c.n_atoms, std::move(psi));
}

DickeState run_sequence_pulses(const SequenceConfig &c) {
    c.validate();
    DickeState psi = make_css(c.n_atoms, 0.0, 0.0);
    psi = apply_rotation(psi, {Axis::y, half_pi});
    psi = apply_oat(psi, c.tau);
    psi = apply_rotation(psi, {Axis::x, c.alpha});
    psi = apply_rotation(psi, {Axis::x, half_pi});
    auto amps = copy_amps(psi);
    const auto d = interrogation_diagonal(c.n_atoms, c.tau_tilde, c.theta);
    for (std::size_t k = 0; k < amps.size(); ++k)
        amps[k] *= d[k];
    psi = make_state_unchecked(c.n_atoms, std::move(amps));
    psi = apply_rotation(psi, {Axis::x, -half_pi});
    return apply_rotation(psi, {Axis::x, c.beta});
}

GainResult gain_from_moments(int n_atoms, const SpinMoments &pre_beta, double alpha, double beta,
                             double xi) {
    const SpinMoments out = pre_beta.rotated_about_x(beta);
    GainResult r;
    r.alpha = alpha;
    r.beta = beta;
    r.xi = xi;
    r.sx_out = out.sx;
    r.sz_out = out.sz;
    r.sz2_out = out.sz2;
    r.d_sz_d_theta = -std::cos(beta) * out.sx;
    const double var = out.var_z();
    if (variance_vanishes(var, 0.5 * n_atoms) || r.d_sz_d_theta == 0.0) {
        r.gain = 0.0;
        r.delta_theta = std::numeric_limits<double>::infinity();
        return r;
    }
    r.delta_theta = std::sqrt(var) / std::abs(r.d_sz_d_theta);
    r.gain = 1.0 / (std::sqrt(static_cast<double>(n_atoms)) * r.delta_theta);
    return r;
}

GainResult gain_at_zero(const SequenceConfig &config) {
    SequenceConfig c = config;
    c.theta = 0.0;
    const DickeState out = run_sequence(c);
    const SpinMoments m = spin_moments(out);
    const double s = 0.5 * c.n_atoms;
    if (variance_vanishes(m.var_z(), s))
        throw DegenerateStateError("output variance of S_z vanishes; gain undefined");
    if (!(std::abs(m.sx) > 1e-10 * s) || !(std::abs(std::cos(c.beta)) > 1e-12))
        throw DegenerateStateError("output slope vanishes; gain undefined");

    const SpinMoments in = spin_moments(prepared_state(c.n_atoms, c.tau)).rotated_about_x(c.alpha);
    GainResult r;
    r.alpha = c.alpha;
    r.beta = c.beta;
    r.xi = safe_xi(in, c.n_atoms);
    r.sx_out = m.sx;
    r.sz_out = m.sz;
    r.sz2_out = m.sz2;
    r.d_sz_d_theta = -std::cos(c.beta) * m.sx;
    r.delta_theta = std::sqrt(m.var_z()) / std::abs(r.d_sz_d_theta);
    r.gain = 1.0 / (std::sqrt(static_cast<double>(c.n_atoms)) * r.delta_theta);
    return r;
}

double slope_finite_difference(const SequenceConfig &config, double step) {
    SequenceConfig lo = config, hi = config;
    lo.theta -= step;
    hi.theta += step;
    const double up = spin_moments(run_sequence(hi)).sz;
    const double down = spin_moments(run_sequence(lo)).sz;
    return (up - down) / (2.0 * step);
}

GainResult sensitivity(const SequenceConfig &config) {
    config.validate();
    const double s = 0.5 * config.n_atoms;
    const DickeState out = run_sequence(config);
    const SpinMoments m = spin_moments(out);
    const double slope =
        config.theta == 0.0 ? -std::cos(config.beta) * m.sx : slope_finite_difference(config);
    if (!(std::abs(slope) >= 1e-8 * s))
        throw NumericalError("phase slope vanishes at theta = " + std::to_string(config.theta) +
                             "; working point is insensitive");
    const double var = m.var_z();
    if (variance_vanishes(var, s))
        throw DegenerateStateError("output variance of S_z vanishes");

    const SpinMoments in =
        spin_moments(prepared_state(config.n_atoms, config.tau)).rotated_about_x(config.alpha);
    GainResult r;
    r.alpha = config.alpha;
    r.beta = config.beta;
    r.xi = safe_xi(in, config.n_atoms);
    r.sx_out = m.sx;
    r.sz_out = m.sz;
    r.sz2_out = m.sz2;
    r.d_sz_d_theta = slope;
    r.delta_theta = std::sqrt(var) / std::abs(slope);
    r.gain = 1.0 / (std::sqrt(static_cast<double>(config.n_atoms)) * r.delta_theta);
    return r;
}

std::vector<SignalPoint> signal_curve(const SequenceConfig &config,
                                      std::span<const double> theta_grid) {
    if (theta_grid.empty())
        throw InvalidInput("theta grid must not be empty");
    config.validate();
    const SpinRotator rot(config.n_atoms);
    auto base = rot.rotate_x(prepared_state(config.n_atoms, config.tau).amplitudes(), config.alpha);
    rotate_z_inplace(base, config.n_atoms, -half_pi);
    std::vector<cplx> coeffs(base.size());
    rot.to_eigenbasis(base, coeffs);
    const auto mu = rot.eigenvalues();

    std::vector<SignalPoint> out;
    out.reserve(theta_grid.size());
    std::vector<cplx> t(coeffs.size()), psi(coeffs.size());
    for (double theta : theta_grid) {
        if (!std::isfinite(theta))
            throw InvalidInput("theta grid entries must be finite");
        for (std::size_t j = 0; j < mu.size(); ++j)
            t[j] = coeffs[j] * std::polar(1.0, -(config.tau_tilde * mu[j] * mu[j] + theta * mu[j]));
        rot.from_eigenbasis(t, psi);
        rotate_z_inplace(psi, config.n_atoms, half_pi);
        const SpinMoments m =
            spin_moments(psi, config.n_atoms).rotated_about_x(config.beta);
        out.push_back({theta, m.sz, m.var_z()});
    }
    return out;
}

SequenceEngine::SequenceEngine(int n_atoms, double tau, double tau_tilde, KernelBackend backend)
    : n_atoms_(n_atoms), tau_(tau), tau_tilde_(tau_tilde), rotator_(n_atoms, backend) {
    SequenceConfig{n_atoms, tau, tau_tilde, 0, 0, 0}.validate();
    const DickeState psi = prepared_state(n_atoms, tau);
    prepared_ = spin_moments(psi);
    eigen_coeffs_.resize(psi.dim());
    rotator_.to_eigenbasis(psi.amplitudes(), eigen_coeffs_);
    diag_phases_ = interrogation_diagonal(n_atoms, tau_tilde, 0.0);
}

SpinMoments SequenceEngine::pre_beta_moments(double alpha) const {
    // R_x(-pi/2) D R_x(pi/2) R_x(alpha) psi_e: one eigenbasis phase, one
    // mat-vec back, the diagonal, and the final -pi/2 applied to the moments.
    const auto mu = rotator_.eigenvalues();
    std::vector<cplx> t(eigen_coeffs_.size()), psi(eigen_coeffs_.size());
    for (std::size_t j = 0; j < t.size(); ++j)
        t[j] = eigen_coeffs_[j] * std::polar(1.0, -(alpha + half_pi) * mu[j]);
    rotator_.from_eigenbasis(t, psi);
    for (std::size_t k = 0; k < psi.size(); ++k)
        psi[k] *= diag_phases_[k];
    return spin_moments(psi, n_atoms_).rotated_about_x(-half_pi);
}

double SequenceEngine::input_xi(double alpha) const {
    return safe_xi(input_moments(alpha), n_atoms_);
}

GainResult SequenceEngine::evaluate(double alpha, double beta) const {
    return gain_from_moments(n_atoms_, pre_beta_moments(alpha), alpha, beta, input_xi(alpha));
}

SequenceConfig sequence_from_trap(const AtomTrapConfig &config, DensityModel model) {
    SequenceConfig c;
    c.n_atoms = config.n_atoms;
    c.tau = tau_preparation(config, model);
    c.tau_tilde = tau_interrogation(config, model);
    c.theta = gravity_phase(config);
    return c;
}

} // namespace nlai
