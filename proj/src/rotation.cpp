#include "nlai/rotation.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nlai/errors.hpp"
#include "nlai/kernels.hpp"

namespace nlai {

namespace {

using cplx = std::complex<double>;

constexpr double kRescaleAbove = 1e150;
constexpr double kRescaleBy = 1e-150;

// Eigenvector of the symmetric tridiagonal matrix with zero diagonal and
// off-diagonals off[k] (between k and k+1) for eigenvalue mu. Forward
// recurrence from k = 0 and backward recurrence from k = n, each run into the
// middle where they are matched by least squares over two overlap points.
void eigenvector(const std::vector<double> &off, double mu, std::size_t n, double *col,
                 std::size_t stride) {
    const std::size_t mid = n / 2;
    std::vector<double> f(mid + 2, 0.0), g(n + 1, 0.0);

    f[0] = 1.0;
    for (std::size_t k = 0; k <= mid && k + 1 <= n; ++k) {
        const double prev = k > 0 ? off[k - 1] * f[k - 1] : 0.0;
        f[k + 1] = (mu * f[k] - prev) / off[k];
        if (std::abs(f[k + 1]) > kRescaleAbove)
            for (std::size_t i = 0; i <= k + 1; ++i)
                f[i] *= kRescaleBy;
    }

    g[n] = 1.0;
    for (std::size_t k = n; k > mid; --k) {
        const double next = k < n ? off[k] * g[k + 1] : 0.0;
        g[k - 1] = (mu * g[k] - next) / off[k - 1];
        if (std::abs(g[k - 1]) > kRescaleAbove)
            for (std::size_t i = k - 1; i <= n; ++i)
                g[i] *= kRescaleBy;
    }

    const double num = f[mid] * g[mid] + f[mid + 1] * g[mid + 1];
    const double den = g[mid] * g[mid] + g[mid + 1] * g[mid + 1];
    const double s = num / den;

    double norm = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double v = k <= mid ? f[k] : s * g[k];
        col[k * stride] = v;
        norm += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm);
    for (std::size_t k = 0; k <= n; ++k)
        col[k * stride] *= inv;
}

} // namespace

SpinRotator::SpinRotator(int n_atoms, KernelBackend backend)
    : n_atoms_(n_atoms), dim_(static_cast<std::size_t>(n_atoms) + 1), backend_(backend) {
    if (n_atoms < 1)
        throw InvalidInput("SpinRotator needs n_atoms >= 1, got " + std::to_string(n_atoms));
    const std::size_t n = dim_ - 1;
    std::vector<double> off(n);
    for (std::size_t k = 0; k < n; ++k)
        off[k] = 0.5 * std::sqrt(static_cast<double>(k + 1) * static_cast<double>(n - k));

    mu_.resize(dim_);
    v_.assign(dim_ * dim_, 0.0);
    const double s = 0.5 * n_atoms;
    const auto cols = static_cast<long>(dim_);
#pragma omp parallel for schedule(dynamic)
    for (long j = 0; j < cols; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        mu_[jj] = s - static_cast<double>(jj);
        eigenvector(off, mu_[jj], n, v_.data() + jj, dim_);
    }
}

void SpinRotator::to_eigenbasis(std::span<const cplx> in, std::span<cplx> out) const {
    if (backend_ == KernelBackend::parallel)
        kernels::parallel::matvec_transposed(v_, dim_, in, out);
    else
        kernels::serial::matvec_transposed(v_, dim_, in, out);
}

void SpinRotator::from_eigenbasis(std::span<const cplx> in, std::span<cplx> out) const {
    if (backend_ == KernelBackend::parallel)
        kernels::parallel::matvec(v_, dim_, in, out);
    else
        kernels::serial::matvec(v_, dim_, in, out);
}

std::vector<cplx> SpinRotator::apply_x_function(std::span<const cplx> in,
                                                std::span<const cplx> phases) const {
    if (in.size() != dim_ || phases.size() != dim_)
        throw InvalidInput("vector size does not match the rotator dimension");
    std::vector<cplx> t(dim_), out(dim_);
    to_eigenbasis(in, t);
    for (std::size_t j = 0; j < dim_; ++j)
        t[j] *= phases[j];
    from_eigenbasis(t, out);
    return out;
}

std::vector<cplx> SpinRotator::rotate_x(std::span<const cplx> in, double angle) const {
    std::vector<cplx> phases(dim_);
    for (std::size_t j = 0; j < dim_; ++j)
        phases[j] = std::polar(1.0, -angle * mu_[j]);
    return apply_x_function(in, phases);
}

std::vector<cplx> SpinRotator::rotate_y(std::span<const cplx> in, double angle) const {
    // exp(-i a S_y) = R_z(pi/2) exp(-i a S_x) R_z(-pi/2)
    std::vector<cplx> tmp(in.begin(), in.end());
    rotate_z_inplace(tmp, n_atoms_, -0.5 * std::numbers::pi);
    auto out = rotate_x(tmp, angle);
    rotate_z_inplace(out, n_atoms_, 0.5 * std::numbers::pi);
    return out;
}

void rotate_z_inplace(std::span<cplx> amps, int n_atoms, double angle) {
    const double s = 0.5 * n_atoms;
    for (std::size_t k = 0; k < amps.size(); ++k)
        amps[k] *= std::polar(1.0, -angle * (s - static_cast<double>(k)));
}

} // namespace nlai
