#pragma once

/**
 * @file
 * Collective-spin states of N two-level atoms restricted to the symmetric
 * (Dicke) subspace of total spin S = N/2.
 *
 * Storage convention, used everywhere in the library and in every file the
 * CLI writes: index k = 0..N holds the amplitude of |S, m = S - k>, i.e. the
 * magnetic quantum number is stored in descending order.
 */

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace nlai {

using cplx = std::complex<double>;

class DickeState {
  public:
    /// Takes ownership of `amplitudes`; throws InvalidInput unless the vector
    /// has N+1 finite entries with unit norm (within 1e-10).
    DickeState(int n_atoms, std::vector<cplx> amplitudes);

    /// Same as the constructor but rescales to unit norm first.
    static DickeState normalized(int n_atoms, std::vector<cplx> amplitudes);

    int n_atoms() const noexcept { return n_atoms_; }
    double spin() const noexcept { return 0.5 * n_atoms_; }
    std::size_t dim() const noexcept { return amps_.size(); }
    double m(std::size_t k) const noexcept { return spin() - static_cast<double>(k); }

    std::span<const cplx> amplitudes() const noexcept { return amps_; }
    const cplx &operator[](std::size_t k) const noexcept { return amps_[k]; }

    double norm_squared() const noexcept;

  private:
    struct Unchecked {};
    DickeState(Unchecked, int n_atoms, std::vector<cplx> amplitudes)
        : n_atoms_(n_atoms), amps_(std::move(amplitudes)) {}

    friend DickeState make_state_unchecked(int, std::vector<cplx>);

    int n_atoms_;
    std::vector<cplx> amps_;
};

// Operations inside the library produce unit-norm states up to rounding and
// skip the constructor's re-validation.
DickeState make_state_unchecked(int n_atoms, std::vector<cplx> amplitudes);

enum class SpinOp {
    Sx,
    Sy,
    Sz,
    Sx2,
    Sy2,
    Sz2,
    Splus,
    Sminus,
    SplusSz,
    Splus2Sz,
    SplusSz2,
    SplusSminus,
    Splus2Sminus,
};

std::string_view to_string(SpinOp op);
bool is_hermitian(SpinOp op) noexcept;

enum class Axis { x, y, z };

/// Instantaneous collective rotation exp(-i angle S_axis).
struct Pulse {
    Axis axis;
    double angle;
};

/// Q(polar, azimuth) sampled on a regular grid. `values` is row-major with
/// one row per polar sample.
struct HusimiGrid {
    std::vector<double> polar;
    std::vector<double> azimuth;
    std::vector<double> values;

    double at(std::size_t i_polar, std::size_t j_azimuth) const {
        return values[i_polar * azimuth.size() + j_azimuth];
    }

    /// Trapezoid rule in the polar angle (with the sin weight) and periodic
    /// rectangle rule in the azimuth.
    double sphere_integral() const;
};

/// First and second moments needed for squeezing and gain evaluation.
/// `syz` is <S_y S_z + S_z S_y>.
struct SpinMoments {
    double sx = 0, sy = 0, sz = 0;
    double sx2 = 0, sy2 = 0, sz2 = 0;
    double syz = 0;

    double var_z() const noexcept { return sz2 - sz * sz; }

    /// Moments of exp(-i angle S_x)|psi> given the moments of |psi>.
    SpinMoments rotated_about_x(double angle) const noexcept;
};

DickeState make_css(int n_atoms, double polar, double azimuth);

DickeState apply_oat(const DickeState &state, double tau);

DickeState apply_rotation(const DickeState &state, Pulse pulse);

/// Exact <psi|op|psi>. For Hermitian labels the imaginary part is checked
/// against rounding and then dropped; a larger residue throws NumericalError.
cplx expectation(const DickeState &state, SpinOp op);

/// expectation() for a Hermitian label, as a real number.
double expectation_real(const DickeState &state, SpinOp op);

SpinMoments spin_moments(const DickeState &state);
SpinMoments spin_moments(std::span<const cplx> amplitudes, int n_atoms);

/// N (Delta S_z)^2 / (<S_x>^2 + <S_y>^2), with the variance taken along z.
double wineland_xi2(const DickeState &state);
double wineland_xi2(const SpinMoments &moments, int n_atoms);

/// Q = (2S+1)/(4 pi) |<polar, azimuth|psi>|^2 on a grid with polar samples
/// i pi/(n_polar-1) and azimuth samples 2 pi j/n_azimuth.
HusimiGrid husimi_grid(const DickeState &state, int n_polar, int n_azimuth);

/// Dense (N+1)x(N+1) matrix of `op` in the Dicke basis. Only meant for
/// validation at small N; throws InvalidInput for N > 64.
Eigen::MatrixXcd operator_matrix(int n_atoms, SpinOp op);

namespace detail {

/// sqrt(k (N - k + 1)): S_+ maps index k to k-1 with this coefficient.
inline double raising_coefficient(int n_atoms, std::size_t k) noexcept;

/// Real coherent-state amplitudes sqrt(C(N,k)) cos^{N-k}(polar/2) sin^k(polar/2),
/// computed in log space; anything below e^-700 is stored as exact zero.
std::vector<double> css_magnitudes(int n_atoms, double polar);

} // namespace detail

} // namespace nlai

#include <cmath>

inline double nlai::detail::raising_coefficient(int n_atoms, std::size_t k) noexcept {
    const double kk = static_cast<double>(k);
    return std::sqrt(kk * (static_cast<double>(n_atoms) - kk + 1.0));
}
