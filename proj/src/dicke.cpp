#include "nlai/dicke.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nlai/errors.hpp"
#include "nlai/kernels.hpp"
#include "nlai/rotation.hpp"

namespace nlai {

namespace {

constexpr double kNormTolerance = 1e-10;
constexpr double kUnderflowLog = -700.0;

void require_finite(double x, const char *what) {
    if (!std::isfinite(x))
        throw InvalidInput(std::string(what) + " must be finite");
}

using Vec = std::vector<cplx>;

Vec raise(int n, std::span<const cplx> in) {
    Vec out(in.size(), cplx{});
    for (std::size_t k = 1; k < in.size(); ++k)
        out[k - 1] = detail::raising_coefficient(n, k) * in[k];
    return out;
}

Vec lower(int n, std::span<const cplx> in) {
    Vec out(in.size(), cplx{});
    for (std::size_t k = 0; k + 1 < in.size(); ++k)
        out[k + 1] = detail::raising_coefficient(n, k + 1) * in[k];
    return out;
}

Vec times_z(int n, std::span<const cplx> in) {
    Vec out(in.size());
    const double s = 0.5 * n;
    for (std::size_t k = 0; k < in.size(); ++k)
        out[k] = (s - static_cast<double>(k)) * in[k];
    return out;
}

Vec times_x(int n, std::span<const cplx> in) {
    Vec up = raise(n, in), down = lower(n, in);
    for (std::size_t k = 0; k < up.size(); ++k)
        up[k] = 0.5 * (up[k] + down[k]);
    return up;
}

Vec times_y(int n, std::span<const cplx> in) {
    Vec up = raise(n, in), down = lower(n, in);
    const cplx half_over_i{0.0, -0.5};
    for (std::size_t k = 0; k < up.size(); ++k)
        up[k] = half_over_i * (up[k] - down[k]);
    return up;
}

// Applies op to `in`, composing the three elementary ladder/diagonal kernels.
Vec apply_op(int n, SpinOp op, std::span<const cplx> in) {
    switch (op) {
    case SpinOp::Sx: return times_x(n, in);
    case SpinOp::Sy: return times_y(n, in);
    case SpinOp::Sz: return times_z(n, in);
    case SpinOp::Sx2: return times_x(n, times_x(n, in));
    case SpinOp::Sy2: return times_y(n, times_y(n, in));
    case SpinOp::Sz2: return times_z(n, times_z(n, in));
    case SpinOp::Splus: return raise(n, in);
    case SpinOp::Sminus: return lower(n, in);
    case SpinOp::SplusSz: return raise(n, times_z(n, in));
    case SpinOp::Splus2Sz: return raise(n, raise(n, times_z(n, in)));
    case SpinOp::SplusSz2: return raise(n, times_z(n, times_z(n, in)));
    case SpinOp::SplusSminus: return raise(n, lower(n, in));
    case SpinOp::Splus2Sminus: return raise(n, raise(n, lower(n, in)));
    }
    throw InvalidInput("unknown spin operator label");
}

double sum_norm(std::span<const cplx> v) {
    double s = 0.0;
    for (const auto &c : v)
        s += std::norm(c);
    return s;
}

} // namespace

DickeState::DickeState(int n_atoms, std::vector<cplx> amplitudes)
    : n_atoms_(n_atoms), amps_(std::move(amplitudes)) {
    if (n_atoms_ < 1)
        throw InvalidInput("n_atoms must be >= 1");
    if (amps_.size() != static_cast<std::size_t>(n_atoms_) + 1)
        throw InvalidInput("amplitude vector must have n_atoms + 1 entries, got " +
                           std::to_string(amps_.size()));
    for (const auto &c : amps_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw InvalidInput("amplitudes must be finite");
    const double norm = sum_norm(amps_);
    if (std::abs(norm - 1.0) > kNormTolerance)
        throw InvalidInput("state is not normalized: sum |c|^2 = " + std::to_string(norm));
}

DickeState DickeState::normalized(int n_atoms, std::vector<cplx> amplitudes) {
    const double norm = sum_norm(amplitudes);
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw InvalidInput("cannot normalize a zero or non-finite vector");
    const double scale = 1.0 / std::sqrt(norm);
    for (auto &c : amplitudes)
        c *= scale;
    return DickeState(n_atoms, std::move(amplitudes));
}

double DickeState::norm_squared() const noexcept { return sum_norm(amps_); }

DickeState make_state_unchecked(int n_atoms, std::vector<cplx> amplitudes) {
    return DickeState(DickeState::Unchecked{}, n_atoms, std::move(amplitudes));
}

std::string_view to_string(SpinOp op) {
    switch (op) {
    case SpinOp::Sx: return "Sx";
    case SpinOp::Sy: return "Sy";
    case SpinOp::Sz: return "Sz";
    case SpinOp::Sx2: return "Sx2";
    case SpinOp::Sy2: return "Sy2";
    case SpinOp::Sz2: return "Sz2";
    case SpinOp::Splus: return "Splus";
    case SpinOp::Sminus: return "Sminus";
    case SpinOp::SplusSz: return "SplusSz";
    case SpinOp::Splus2Sz: return "Splus2Sz";
    case SpinOp::SplusSz2: return "SplusSz2";
    case SpinOp::SplusSminus: return "SplusSminus";
    case SpinOp::Splus2Sminus: return "Splus2Sminus";
    }
    return "?";
}

bool is_hermitian(SpinOp op) noexcept {
    switch (op) {
    case SpinOp::Sx:
    case SpinOp::Sy:
    case SpinOp::Sz:
    case SpinOp::Sx2:
    case SpinOp::Sy2:
    case SpinOp::Sz2:
    case SpinOp::SplusSminus:
        return true;
    default:
        return false;
    }
}

double HusimiGrid::sphere_integral() const {
    const std::size_t np = polar.size(), na = azimuth.size();
    if (np < 2 || na < 1)
        return 0.0;
    const double d_azimuth = 2.0 * std::numbers::pi / static_cast<double>(na);
    double total = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < na; ++j)
            row += at(i, j);
        double w = std::sin(polar[i]);
        if (i == 0)
            w *= 0.5 * (polar[1] - polar[0]);
        else if (i == np - 1)
            w *= 0.5 * (polar[i] - polar[i - 1]);
        else
            w *= 0.5 * (polar[i + 1] - polar[i - 1]);
        total += w * row * d_azimuth;
    }
    return total;
}

SpinMoments SpinMoments::rotated_about_x(double angle) const noexcept {
    const double c = std::cos(angle), s = std::sin(angle);
    SpinMoments r = *this;
    r.sy = c * sy - s * sz;
    r.sz = c * sz + s * sy;
    r.sy2 = c * c * sy2 + s * s * sz2 - c * s * syz;
    r.sz2 = c * c * sz2 + s * s * sy2 + c * s * syz;
    r.syz = (c * c - s * s) * syz + 2.0 * c * s * (sy2 - sz2);
    return r;
}

std::vector<double> detail::css_magnitudes(int n_atoms, double polar) {
    const int n = n_atoms;
    const double c = std::cos(0.5 * polar), s = std::sin(0.5 * polar);
    const double log_c = std::log(std::abs(c)), log_s = std::log(std::abs(s));
    const double log_nfact = std::lgamma(n + 1.0);
    std::vector<double> r(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
        double l = 0.5 * (log_nfact - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
        if (n - k > 0)
            l += (n - k) * log_c;
        if (k > 0)
            l += k * log_s;
        r[static_cast<std::size_t>(k)] = (l < kUnderflowLog) ? 0.0 : std::exp(l);
    }
    return r;
}

DickeState make_css(int n_atoms, double polar, double azimuth) {
    if (n_atoms < 1)
        throw InvalidInput("n_atoms must be >= 1");
    require_finite(polar, "polar angle");
    require_finite(azimuth, "azimuth angle");
    if (polar < 0.0 || polar > std::numbers::pi)
        throw InvalidInput("polar angle must lie in [0, pi]");

    const auto r = detail::css_magnitudes(n_atoms, polar);
    double norm = 0.0;
    for (double x : r)
        norm += x * x;
    const double scale = 1.0 / std::sqrt(norm);
    std::vector<cplx> amps(r.size());
    for (std::size_t k = 0; k < r.size(); ++k)
        amps[k] = r[k] * scale * std::polar(1.0, static_cast<double>(k) * azimuth);
    return make_state_unchecked(n_atoms, std::move(amps));
}

DickeState apply_oat(const DickeState &state, double tau) {
    require_finite(tau, "tau");
    std::vector<cplx> amps(state.amplitudes().begin(), state.amplitudes().end());
    for (std::size_t k = 0; k < amps.size(); ++k) {
        const double m = state.m(k);
        amps[k] *= std::polar(1.0, -tau * m * m);
    }
    return make_state_unchecked(state.n_atoms(), std::move(amps));
}

DickeState apply_rotation(const DickeState &state, Pulse pulse) {
    require_finite(pulse.angle, "rotation angle");
    if (pulse.axis == Axis::z) {
        std::vector<cplx> amps(state.amplitudes().begin(), state.amplitudes().end());
        for (std::size_t k = 0; k < amps.size(); ++k)
            amps[k] *= std::polar(1.0, -pulse.angle * state.m(k));
        return make_state_unchecked(state.n_atoms(), std::move(amps));
    }
    const SpinRotator rot(state.n_atoms());
    auto out = pulse.axis == Axis::x ? rot.rotate_x(state.amplitudes(), pulse.angle)
                                     : rot.rotate_y(state.amplitudes(), pulse.angle);
    return make_state_unchecked(state.n_atoms(), std::move(out));
}

cplx expectation(const DickeState &state, SpinOp op) {
    const auto psi = state.amplitudes();
    const Vec phi = apply_op(state.n_atoms(), op, psi);
    cplx acc{};
    double scale = 0.0;
    for (std::size_t k = 0; k < psi.size(); ++k) {
        acc += std::conj(psi[k]) * phi[k];
        scale += std::abs(psi[k]) * std::abs(phi[k]);
    }
    if (is_hermitian(op)) {
        if (std::abs(acc.imag()) > 1e-12 * std::max(1.0, scale))
            throw NumericalError("Hermitian expectation of " + std::string(to_string(op)) +
                                 " has imaginary part " + std::to_string(acc.imag()));
        return {acc.real(), 0.0};
    }
    return acc;
}

double expectation_real(const DickeState &state, SpinOp op) {
    if (!is_hermitian(op))
        throw InvalidInput("expectation_real needs a Hermitian operator, got " +
                           std::string(to_string(op)));
    return expectation(state, op).real();
}

SpinMoments spin_moments(std::span<const cplx> c, int n_atoms) {
    const double s = 0.5 * n_atoms;
    cplx p1{}, p1z{}, p2{};
    double pm = 0.0, sz = 0.0, sz2 = 0.0;
    const std::size_t dim = c.size();
    for (std::size_t k = 0; k < dim; ++k) {
        const double m = s - static_cast<double>(k);
        const double pop = std::norm(c[k]);
        sz += m * pop;
        sz2 += m * m * pop;
        const double a_next = k + 1 < dim ? detail::raising_coefficient(n_atoms, k + 1) : 0.0;
        pm += a_next * a_next * pop;
        if (k >= 1) {
            const double a = detail::raising_coefficient(n_atoms, k);
            const cplx t = std::conj(c[k - 1]) * c[k] * a;
            p1 += t;
            p1z += t * (2.0 * m + 1.0);
            if (k >= 2)
                p2 += std::conj(c[k - 2]) * c[k] * a *
                      detail::raising_coefficient(n_atoms, k - 1);
        }
    }
    SpinMoments r;
    r.sx = p1.real();
    r.sy = p1.imag();
    r.sz = sz;
    r.sz2 = sz2;
    r.sx2 = 0.5 * (p2.real() + pm - sz);
    r.sy2 = 0.5 * (-p2.real() + pm - sz);
    r.syz = p1z.imag();
    return r;
}

SpinMoments spin_moments(const DickeState &state) {
    return spin_moments(state.amplitudes(), state.n_atoms());
}

double wineland_xi2(const SpinMoments &mom, int n_atoms) {
    const double s = 0.5 * n_atoms;
    const double denom = mom.sx * mom.sx + mom.sy * mom.sy;
    if (!(denom >= 1e-20 * s * s))
        throw DegenerateStateError("mean spin vanishes; squeezing parameter undefined");
    return n_atoms * mom.var_z() / denom;
}

double wineland_xi2(const DickeState &state) {
    return wineland_xi2(spin_moments(state), state.n_atoms());
}

HusimiGrid husimi_grid(const DickeState &state, int n_polar, int n_azimuth) {
    if (n_polar < 2 || n_azimuth < 2)
        throw InvalidInput("Husimi grid needs at least 2 samples per axis");
    HusimiGrid g;
    g.polar.resize(static_cast<std::size_t>(n_polar));
    g.azimuth.resize(static_cast<std::size_t>(n_azimuth));
    for (int i = 0; i < n_polar; ++i)
        g.polar[static_cast<std::size_t>(i)] = std::numbers::pi * i / (n_polar - 1);
    for (int j = 0; j < n_azimuth; ++j)
        g.azimuth[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * j / n_azimuth;
    g.values.assign(g.polar.size() * g.azimuth.size(), 0.0);
    kernels::parallel::husimi(state.n_atoms(), state.amplitudes(), g.polar, g.azimuth, g.values);
    return g;
}

Eigen::MatrixXcd operator_matrix(int n_atoms, SpinOp op) {
    if (n_atoms < 1 || n_atoms > 64)
        throw InvalidInput("operator_matrix supports 1 <= n_atoms <= 64, got " +
                           std::to_string(n_atoms));
    const auto dim = static_cast<Eigen::Index>(n_atoms) + 1;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    Vec e(static_cast<std::size_t>(dim));
    for (Eigen::Index col = 0; col < dim; ++col) {
        std::fill(e.begin(), e.end(), cplx{});
        e[static_cast<std::size_t>(col)] = 1.0;
        const Vec v = apply_op(n_atoms, op, e);
        for (Eigen::Index row = 0; row < dim; ++row)
            out(row, col) = v[static_cast<std::size_t>(row)];
    }
    return out;
}

} // namespace nlai
