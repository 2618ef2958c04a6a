#pragma once

// Independent dense-matrix reference used by the unit tests. Built from the
// textbook |S, m> matrix elements, without touching the library kernels.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "nlai/dicke.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct Spin {
    Mat sx, sy, sz, sp, sm;
};

// Index k holds m = S - k.
inline Spin spin_matrices(int n) {
    const double s = 0.5 * n;
    const int d = n + 1;
    Spin out;
    out.sp = Mat::Zero(d, d);
    out.sz = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const double m = s - k;
        out.sz(k, k) = m;
        if (k > 0)
            out.sp(k - 1, k) = std::sqrt(s * (s + 1) - m * (m + 1));
    }
    out.sm = out.sp.adjoint();
    out.sx = 0.5 * (out.sp + out.sm);
    out.sy = cplx(0, -0.5) * (out.sp - out.sm);
    return out;
}

inline Mat expi(const Mat &generator, double angle) {
    return (cplx(0, -angle) * generator).exp();
}

inline Vec to_vec(const nlai::DickeState &s) {
    Vec v(static_cast<Eigen::Index>(s.dim()));
    for (std::size_t k = 0; k < s.dim(); ++k)
        v(static_cast<Eigen::Index>(k)) = s[k];
    return v;
}

inline Vec to_vec(const std::vector<cplx> &a) {
    Vec v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t k = 0; k < a.size(); ++k)
        v(static_cast<Eigen::Index>(k)) = a[k];
    return v;
}

inline cplx expect(const Vec &psi, const Mat &op) { return psi.dot(op * psi); }

// OAT(tau) on the +x coherent state, straight from the binomial formula.
inline Vec oat_state(int n, double tau) {
    const double s = 0.5 * n;
    Vec v(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double logc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        const double m = s - k;
        v(k) = std::exp(0.5 * logc - 0.5 * n * std::log(2.0)) * std::exp(cplx(0, -tau * m * m));
    }
    return v;
}

inline std::vector<cplx> random_amplitudes(int n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    std::vector<cplx> a(static_cast<std::size_t>(n) + 1);
    double norm = 0;
    for (auto &c : a) {
        c = {g(rng), g(rng)};
        norm += std::norm(c);
    }
    for (auto &c : a)
        c /= std::sqrt(norm);
    return a;
}

inline nlai::DickeState random_state(int n, std::mt19937_64 &rng) {
    return nlai::DickeState::normalized(n, random_amplitudes(n, rng));
}

inline double max_abs_diff(const Vec &a, const Vec &b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace oracle
