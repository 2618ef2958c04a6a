#include "nlai/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "nlai/dicke.hpp"

namespace nlai::kernels {

namespace {

inline cplx row_dot(const double *row, const cplx *x, std::size_t dim) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        re += row[j] * x[j].real();
        im += row[j] * x[j].imag();
    }
    return {re, im};
}

// Accumulates columns [c0, c1) of A^T x, walking rows in order.
inline void transposed_block(const double *a, std::size_t dim, const cplx *x, cplx *y,
                             std::size_t c0, std::size_t c1) {
    std::vector<double> re(c1 - c0, 0.0), im(c1 - c0, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        const double *row = a + i * dim;
        for (std::size_t j = c0; j < c1; ++j) {
            re[j - c0] += row[j] * xr;
            im[j - c0] += row[j] * xi;
        }
    }
    for (std::size_t j = c0; j < c1; ++j)
        y[j] = {re[j - c0], im[j - c0]};
}

constexpr std::size_t kColumnBlock = 64;

// One polar row of the Husimi grid: Horner evaluation of
// sum_k r_k psi_k z^k with z = exp(-i azimuth).
inline void husimi_row(int n_atoms, std::span<const cplx> psi, double polar,
                       std::span<const double> azimuth, double *out) {
    const auto r = nlai::detail::css_magnitudes(n_atoms, polar);
    std::vector<cplx> w(psi.size());
    for (std::size_t k = 0; k < psi.size(); ++k)
        w[k] = r[k] * psi[k];
    const double prefactor = (n_atoms + 1.0) / (4.0 * std::numbers::pi);
    for (std::size_t j = 0; j < azimuth.size(); ++j) {
        const cplx z = std::polar(1.0, -azimuth[j]);
        cplx acc{};
        for (std::size_t k = w.size(); k-- > 0;)
            acc = acc * z + w[k];
        out[j] = prefactor * std::norm(acc);
    }
}

} // namespace

namespace serial {

void matvec(std::span<const double> a, std::size_t dim, std::span<const cplx> x,
            std::span<cplx> y) {
    for (std::size_t i = 0; i < dim; ++i)
        y[i] = row_dot(a.data() + i * dim, x.data(), dim);
}

void matvec_transposed(std::span<const double> a, std::size_t dim, std::span<const cplx> x,
                       std::span<cplx> y) {
    for (std::size_t c0 = 0; c0 < dim; c0 += kColumnBlock)
        transposed_block(a.data(), dim, x.data(), y.data(), c0, std::min(dim, c0 + kColumnBlock));
}

void husimi(int n_atoms, std::span<const cplx> psi, std::span<const double> polar,
            std::span<const double> azimuth, std::span<double> out) {
    for (std::size_t i = 0; i < polar.size(); ++i)
        husimi_row(n_atoms, psi, polar[i], azimuth, out.data() + i * azimuth.size());
}

} // namespace serial

namespace parallel {

void matvec(std::span<const double> a, std::size_t dim, std::span<const cplx> x,
            std::span<cplx> y) {
    const auto n = static_cast<long>(dim);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        y[static_cast<std::size_t>(i)] =
            row_dot(a.data() + static_cast<std::size_t>(i) * dim, x.data(), dim);
}

void matvec_transposed(std::span<const double> a, std::size_t dim, std::span<const cplx> x,
                       std::span<cplx> y) {
    const auto blocks = static_cast<long>((dim + kColumnBlock - 1) / kColumnBlock);
#pragma omp parallel for schedule(static)
    for (long b = 0; b < blocks; ++b) {
        const std::size_t c0 = static_cast<std::size_t>(b) * kColumnBlock;
        transposed_block(a.data(), dim, x.data(), y.data(), c0, std::min(dim, c0 + kColumnBlock));
    }
}

void husimi(int n_atoms, std::span<const cplx> psi, std::span<const double> polar,
            std::span<const double> azimuth, std::span<double> out) {
    const auto rows = static_cast<long>(polar.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < rows; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        husimi_row(n_atoms, psi, polar[ii], azimuth, out.data() + ii * azimuth.size());
    }
}

} // namespace parallel

} // namespace nlai::kernels
