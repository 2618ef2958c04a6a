#pragma once

// Gain maximization over the pre/post rotation angles and the parameter
// scans over oscillation count and trap geometry.

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "nlai/interferometer.hpp"
#include "nlai/trap.hpp"

namespace nlai {

enum class AlphaMode { fixed, alpha_h, scan };
enum class BetaMode { fixed, scan };

struct OptimizationSpec {
    AlphaMode alpha_mode = AlphaMode::fixed;
    double alpha_value = 0.0;
    BetaMode beta_mode = BetaMode::scan;
    double beta_value = 0.0;
    int beta_grid = 181;  // inclusive over [-pi/2, pi/2], 1 degree
    int alpha_grid = 90;  // over [0, pi)
    double refine_tolerance = 1e-6;
    int max_iterations = 200;
    int starts = 5;

    void validate() const;
};

struct OptimizationResult {
    GainResult best;
    bool flat_landscape = false;
    int evaluations = 0;
};

struct Extremum {
    double x;
    double value;
    int iterations;
};

/// Golden-section maximization of f on [lo, hi] to width `tolerance`.
Extremum golden_maximize(const std::function<double(double)> &f, double lo, double hi,
                         double tolerance, int max_iterations);

/// Best beta for the alpha selected by spec (fixed value or alpha_H) and
/// config.tau, config.tau_tilde. Grid then golden-section refinement; ties
/// toward the smallest |beta|.
OptimizationResult optimize_beta(const SequenceConfig &config, const OptimizationSpec &spec);
OptimizationResult optimize_beta(const SequenceEngine &engine, double alpha,
                                 const OptimizationSpec &spec);

/// Joint maximization: alpha grid x beta grid, then nested golden-section
/// refinement from the best `spec.starts` cells plus an alpha_H seed.
OptimizationResult optimize_alpha_beta(const SequenceConfig &config, const OptimizationSpec &spec);
OptimizationResult optimize_alpha_beta(const SequenceEngine &engine, const OptimizationSpec &spec);

/// Pre-rotation in [-pi/2, pi/2) that minimizes the exact squeezing
/// parameter of the rotated OAT state; 0 when the landscape is flat.
double alpha_H(int n_atoms, double tau, const OptimizationSpec &spec = {});

enum class AlphaPolicy { zero, half_pi, alpha_h, optimal, fixed };

std::string_view to_string(AlphaPolicy policy);
AlphaPolicy parse_alpha_policy(std::string_view text);

struct ScanRow {
    AlphaPolicy policy = AlphaPolicy::zero;
    double m = 0;
    double gamma = 0;
    double omega_z = 0;
    int n_atoms = 0;
    double tau = 0;
    double tau_tilde = 0;
    double alpha = 0;
    double beta = 0;
    double gain = 0;
    double gain_linear = 0; // 1/xi_min(tau): best linear sequence (tau~ = 0)
};

/// Evaluates one policy at fixed (N, tau, tau~).
OptimizationResult optimize_policy(const SequenceEngine &engine, AlphaPolicy policy,
                                   const OptimizationSpec &spec);

/// Rows for each m: tau = 2 m tau_{1/2}, tau~ from the interrogation half period.
std::vector<ScanRow> scan_m(const AtomTrapConfig &config, std::span<const double> m_values,
                            AlphaPolicy policy, DensityModel model = DensityModel::gaussian,
                            const OptimizationSpec &spec = {});

enum class TrapSweep { aspect_ratio, axial_frequency };

/// Aspect-ratio sweep at fixed omega_z, or axial-frequency sweep at fixed
/// aspect ratio. omega_z_tilde keeps its ratio to omega_z.
std::vector<ScanRow> scan_trap(const AtomTrapConfig &config, TrapSweep sweep,
                               std::span<const double> values, std::span<const double> m_values,
                               AlphaPolicy policy, DensityModel model = DensityModel::gaussian,
                               const OptimizationSpec &spec = {});

} // namespace nlai
