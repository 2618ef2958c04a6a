#pragma once

// Dense and grid kernels behind rotations and Husimi sampling. Both
// namespaces expose identical signatures; `serial` is the reference and
// `parallel` distributes independent output entries over OpenMP threads.
// Every output entry is accumulated in the same order in both versions, so
// results agree bit for bit regardless of the thread count.

#include <complex>
#include <cstddef>
#include <span>

namespace nlai::kernels {

using cplx = std::complex<double>;

namespace serial {

/// y = A x, A is dim x dim real row-major.
void matvec(std::span<const double> a, std::size_t dim, std::span<const cplx> x,
            std::span<cplx> y);

/// y = A^T x.
void matvec_transposed(std::span<const double> a, std::size_t dim, std::span<const cplx> x,
                       std::span<cplx> y);

/// out[i * azimuth.size() + j] = Q(polar[i], azimuth[j]).
void husimi(int n_atoms, std::span<const cplx> psi, std::span<const double> polar,
            std::span<const double> azimuth, std::span<double> out);

} // namespace serial

namespace parallel {

void matvec(std::span<const double> a, std::size_t dim, std::span<const cplx> x,
            std::span<cplx> y);

void matvec_transposed(std::span<const double> a, std::size_t dim, std::span<const cplx> x,
                       std::span<cplx> y);

void husimi(int n_atoms, std::span<const cplx> psi, std::span<const double> polar,
            std::span<const double> azimuth, std::span<double> out);

} // namespace parallel

} // namespace nlai::kernels
