#include "nlai/analytic.hpp"

#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "nlai/errors.hpp"

namespace nlai {

namespace {

using cplx = std::complex<double>;

void require_finite(double x, const char *name) {
    if (!std::isfinite(x))
        throw InvalidInput(std::string(name) + " must be finite");
}

void require_atoms(int n_atoms) {
    if (n_atoms < 2)
        throw InvalidInput("closed forms need n_atoms >= 2, got " + std::to_string(n_atoms));
}

} // namespace

double int_power(double base, int n) {
    if (n < 0)
        throw InvalidInput("int_power needs a non-negative exponent");
    if (n == 0)
        return 1.0;
    if (base == 0.0)
        return 0.0;
    const double mag = std::exp(n * std::log(std::abs(base)));
    return (base < 0.0 && (n % 2 == 1)) ? -mag : mag;
}

AnalyticMoments oat_moments_closed(int n_atoms, double tau, double alpha) {
    require_atoms(n_atoms);
    require_finite(tau, "tau");
    require_finite(alpha, "alpha");
    const double s = 0.5 * n_atoms;
    const int n = n_atoms;
    AnalyticMoments r;
    r.n_atoms = n_atoms;
    r.tau = tau;
    r.alpha = alpha;
    r.a_coef = 1.0 - int_power(std::cos(2 * tau), n - 2);
    r.b_coef = 4.0 * std::sin(tau) * int_power(std::cos(tau), n - 2);
    r.delta = 0.5 * std::atan2(r.b_coef, r.a_coef);
    const double amp = std::hypot(r.a_coef, r.b_coef) * std::cos(2 * alpha + 2 * r.delta);
    r.sx = s * int_power(std::cos(tau), n - 1);
    r.sx2 = 0.5 * s * (2 * s - (s - 0.5) * r.a_coef);
    r.sy2 = 0.5 * s * (1.0 + (2 * s - 1) / 4.0 * (r.a_coef + amp));
    r.sz2 = 0.5 * s * (1.0 + (2 * s - 1) / 4.0 * (r.a_coef - amp));
    return r;
}

double xi2_closed(int n_atoms, double tau) {
    require_atoms(n_atoms);
    require_finite(tau, "tau");
    const double c = std::cos(tau);
    if (std::abs(c) < 1e-12)
        throw NumericalError("squeezing parameter is singular where cos(tau) = 0");
    const double s = 0.5 * n_atoms;
    const int n = n_atoms;
    const double a = 1.0 - int_power(std::cos(2 * tau), n - 2);
    const double b = 4.0 * std::sin(tau) * int_power(c, n - 2);
    return (4.0 + (2 * s - 1) * (a - std::hypot(a, b))) / (4.0 * int_power(c, 2 * n - 2));
}

double weak_gain_squared(int n_atoms, double tau, double tau_tilde, double alpha, double beta) {
    require_finite(tau, "tau");
    require_finite(tau_tilde, "tau_tilde");
    require_finite(alpha, "alpha");
    require_finite(beta, "beta");
    const double k = n_atoms - 1.0; // 2S - 1
    const double cb = std::cos(beta);
    return (1.0 + k * (std::sin(2 * beta) * tau_tilde - std::sin(2 * alpha + 2 * beta) * tau)) *
           cb * cb;
}

double weak_gain(int n_atoms, double tau, double tau_tilde, double alpha, double beta) {
    return std::sqrt(std::max(0.0, weak_gain_squared(n_atoms, tau, tau_tilde, alpha, beta)));
}

// <S_+^k S_z^j> = e^{i tau k^2} (-i d/dl)^j G_k(l) at l = 2 k tau, with
// G_k(l) = <CSS|S_+^k e^{i l S_z}|CSS> = P e^{-ikl/2} cos(l/2)^{2S-k},
// P = (2S)!/(2S-k)! 2^{-k}. Derivatives are tracked as sums of
// coef e^{-ikl/2} cos^a sin^b.
cplx oat_ladder_moment(int n_atoms, double tau, int k, int j) {
    if (n_atoms < 1 || k < 0 || j < 0)
        throw InvalidInput("oat_ladder_moment needs n_atoms >= 1 and k, j >= 0");
    require_finite(tau, "tau");
    if (k > n_atoms)
        return {0.0, 0.0};

    double prefactor = 1.0;
    for (int i = 0; i < k; ++i)
        prefactor *= 0.5 * (n_atoms - i);

    using Key = std::pair<int, int>;
    std::map<Key, cplx> terms{{{n_atoms - k, 0}, cplx{prefactor, 0.0}}};
    const cplx minus_i{0.0, -1.0};
    const cplx phase_rate{0.0, -0.5 * k};
    for (int step = 0; step < j; ++step) {
        std::map<Key, cplx> next;
        for (const auto &[key, coef] : terms) {
            const auto [a, b] = key;
            next[{a, b}] += minus_i * coef * phase_rate;
            if (a > 0)
                next[{a - 1, b + 1}] += minus_i * coef * (-0.5 * a);
            if (b > 0)
                next[{a + 1, b - 1}] += minus_i * coef * (0.5 * b);
        }
        terms = std::move(next);
    }

    const double lambda = 2.0 * k * tau;
    const double c = std::cos(0.5 * lambda), s = std::sin(0.5 * lambda);
    cplx acc{};
    for (const auto &[key, coef] : terms)
        acc += coef * int_power(c, key.first) * int_power(s, key.second);
    return acc * std::polar(1.0, -0.5 * k * lambda + tau * k * k);
}

double PerturbativeMoments::gain_squared(int n_atoms, double beta) const {
    const double cb = std::cos(beta);
    return cb * cb * sx_out * sx_out / (n_atoms * sz2_out);
}

PerturbativeMoments output_moments_perturbative(int n_atoms, double tau, double tau_tilde,
                                                double alpha, double beta) {
    require_atoms(n_atoms);
    require_finite(tau, "tau");
    require_finite(tau_tilde, "tau_tilde");
    require_finite(alpha, "alpha");
    require_finite(beta, "beta");
    const double s = 0.5 * n_atoms;
    const int n = n_atoms;
    const double ct = std::cos(tau), st = std::sin(tau);
    const double a_coef = 1.0 - int_power(std::cos(2 * tau), n - 2);
    const double g = alpha + beta;

    PerturbativeMoments r;
    r.sx0 = s * int_power(ct, n - 1);
    r.sx1 = s * (s - 0.5) *
            (2.0 * int_power(ct, n - 2) * st * std::cos(2 * alpha) +
             a_coef * std::sin(2 * alpha) / 2.0);
    r.sz2_0 = s / 2.0 * std::cos(g) * std::cos(g) +
              s * (2 * s - 1) * int_power(ct, n - 2) * st * std::sin(2 * g) / 2.0 +
              s * (1.0 + 2 * s - (2 * s - 1) * int_power(std::cos(2 * tau), n - 2)) *
                  std::sin(g) * std::sin(g) / 4.0;

    // First-order term i<[Y^2, Z^2]> with Y, Z the rotated S_y, S_z, reduced
    // to OAT ladder moments through the commutators of S_y^2, S_z^2 and
    // S_y S_z + S_z S_y.
    auto mom = [&](int k, int j) { return oat_ladder_moment(n, tau, k, j); };
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double cg = std::cos(g), sg = std::sin(g);
    const double a = ca * ca, b = sa * sa, c = -ca * sa;
    const double d = cg * cg, e = sg * sg, f = cg * sg;
    const cplx x = mom(2, 1) + mom(2, 0);
    const cplx w = 4.0 * mom(1, 2) + 4.0 * mom(1, 1) + mom(1, 0);
    const cplx v = s * (s + 1) * mom(1, 0) - mom(1, 2) - mom(1, 1) - mom(3, 0) - mom(1, 0);
    r.sz2_1 = -2.0 * (a * d - b * e) * x.imag() - (a * f - c * e) * v.real() +
              (b * f - c * d) * w.real();

    r.sx_out = r.sx0 + tau_tilde * r.sx1;
    r.sz2_out = r.sz2_0 + tau_tilde * r.sz2_1;
    return r;
}

} // namespace nlai
