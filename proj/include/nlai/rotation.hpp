#pragma once

#include <complex>
#include <span>
#include <vector>

namespace nlai {

enum class KernelBackend { serial, parallel };

/// Collective x/y rotations for a fixed atom number.
///
/// Holds the real orthonormal eigenbasis V of S_x in the Dicke basis
/// (eigenvalue S - j in column j), so that exp(-i angle S_x) = V diag V^T.
/// Columns come from a two-sided three-term recurrence on the tridiagonal
/// S_x, matched in the middle and rescaled against overflow; construction
/// costs O(N^2) and the basis takes (N+1)^2 doubles.
class SpinRotator {
  public:
    explicit SpinRotator(int n_atoms, KernelBackend backend = KernelBackend::parallel);

    int n_atoms() const noexcept { return n_atoms_; }
    std::size_t dim() const noexcept { return dim_; }
    KernelBackend backend() const noexcept { return backend_; }

    /// Eigenvalues of S_x, ordered S, S-1, ..., -S.
    std::span<const double> eigenvalues() const noexcept { return mu_; }

    /// Component k of eigenvector j.
    double basis(std::size_t k, std::size_t j) const noexcept { return v_[k * dim_ + j]; }
    std::span<const double> basis_data() const noexcept { return v_; }

    /// out = V^T in (Dicke basis -> S_x eigenbasis).
    void to_eigenbasis(std::span<const std::complex<double>> in,
                       std::span<std::complex<double>> out) const;
    /// out = V in.
    void from_eigenbasis(std::span<const std::complex<double>> in,
                         std::span<std::complex<double>> out) const;

    /// V diag(phases) V^T in: any function of S_x given by its values on the spectrum.
    std::vector<std::complex<double>> apply_x_function(std::span<const std::complex<double>> in,
                                                      std::span<const std::complex<double>> phases) const;

    std::vector<std::complex<double>> rotate_x(std::span<const std::complex<double>> in,
                                               double angle) const;
    std::vector<std::complex<double>> rotate_y(std::span<const std::complex<double>> in,
                                               double angle) const;

  private:
    int n_atoms_;
    std::size_t dim_;
    KernelBackend backend_;
    std::vector<double> v_;
    std::vector<double> mu_;
};

/// In-place exp(-i angle S_z) on Dicke amplitudes.
void rotate_z_inplace(std::span<std::complex<double>> amps, int n_atoms, double angle);

} // namespace nlai
