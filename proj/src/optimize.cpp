#include "nlai/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <string>

#include "nlai/analytic.hpp"
#include "nlai/errors.hpp"

namespace nlai {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kFlat = 1e-12;

bool nearly_equal(double a, double b) {
    return std::abs(a - b) <= kFlat * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// a beats b: larger value, or equal value and smaller |x|.
bool better(double value_a, double x_a, double value_b, double x_b) {
    if (nearly_equal(value_a, value_b))
        return std::abs(x_a) < std::abs(x_b);
    return value_a > value_b;
}

struct GridPick {
    std::size_t index = 0;
    double value = -std::numeric_limits<double>::infinity();
    double lowest = std::numeric_limits<double>::infinity();
    double highest = -std::numeric_limits<double>::infinity();
    bool flat() const { return highest - lowest < kFlat; }
};

template <class F> GridPick scan_grid(const std::vector<double> &xs, F f) {
    GridPick p;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double v = f(xs[i]);
        p.lowest = std::min(p.lowest, v);
        p.highest = std::max(p.highest, v);
        if (i == 0 || better(v, xs[i], p.value, xs[p.index])) {
            p.value = v;
            p.index = i;
        }
    }
    return p;
}

std::vector<double> beta_grid(int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = -0.5 * pi + pi * i / (n - 1);
    return g;
}

std::vector<double> alpha_grid(int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = pi * i / n;
    return g;
}

// Maximizes f over the grid, then refines around the winning cell.
Extremum grid_then_golden(const std::vector<double> &grid, const std::function<double(double)> &f,
                          double lo_bound, double hi_bound, const OptimizationSpec &spec,
                          bool &flat, int &evaluations) {
    const GridPick pick = scan_grid(grid, f);
    evaluations += static_cast<int>(grid.size());
    flat = pick.flat();
    const double x0 = grid[pick.index];
    if (flat)
        return {0.0, f(0.0), 0};
    const double step = grid.size() > 1 ? grid[1] - grid[0] : 0.1;
    const double lo = std::max(lo_bound, x0 - step), hi = std::min(hi_bound, x0 + step);
    const Extremum refined = golden_maximize(f, lo, hi, spec.refine_tolerance, spec.max_iterations);
    evaluations += refined.iterations + 2;
    if (better(refined.value, refined.x, pick.value, x0))
        return refined;
    return {x0, pick.value, refined.iterations};
}

template <class Fn> void parallel_rows(long count, Fn fn) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(nlai_scan_failure)
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

void require_half_integer(double m) {
    if (!std::isfinite(m) || m < 0.0 || std::abs(2 * m - std::round(2 * m)) > 1e-9)
        throw InvalidInput("m values must be non-negative half-integers, got " + std::to_string(m));
}

} // namespace

void OptimizationSpec::validate() const {
    if (beta_grid < 8 || alpha_grid < 8)
        throw InvalidInput("optimizer grids need at least 8 points");
    if (!(refine_tolerance > 0.0 && refine_tolerance <= 0.1))
        throw InvalidInput("refine_tolerance must lie in (0, 0.1]");
    if (max_iterations < 1 || starts < 1)
        throw InvalidInput("max_iterations and starts must be positive");
    if (!std::isfinite(alpha_value) || !std::isfinite(beta_value))
        throw InvalidInput("fixed angles must be finite");
}

Extremum golden_maximize(const std::function<double(double)> &f, double lo, double hi,
                         double tolerance, int max_iterations) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    int it = 0;
    while (b - a > tolerance && it < max_iterations) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        ++it;
    }
    return fc >= fd ? Extremum{c, fc, it} : Extremum{d, fd, it};
}

OptimizationResult optimize_beta(const SequenceEngine &engine, double alpha,
                                 const OptimizationSpec &spec) {
    spec.validate();
    const SpinMoments pre = engine.pre_beta_moments(alpha);
    const double xi = engine.input_xi(alpha);
    const int n = engine.n_atoms();
    OptimizationResult out;
    if (spec.beta_mode == BetaMode::fixed) {
        out.best = gain_from_moments(n, pre, alpha, spec.beta_value, xi);
        out.evaluations = 1;
        return out;
    }
    auto f = [&](double beta) { return gain_from_moments(n, pre, alpha, beta, xi).gain; };
    const Extremum e = grid_then_golden(beta_grid(spec.beta_grid), f, -0.5 * pi, 0.5 * pi, spec,
                                        out.flat_landscape, out.evaluations);
    out.best = gain_from_moments(n, pre, alpha, e.x, xi);
    return out;
}

OptimizationResult optimize_alpha_beta(const SequenceEngine &engine, const OptimizationSpec &spec) {
    spec.validate();
    const auto alphas = alpha_grid(spec.alpha_grid);
    const double step = alphas[1] - alphas[0];
    int evaluations = 0;

    std::vector<OptimizationResult> rows(alphas.size());
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        rows[j] = optimize_beta(engine, alphas[j], spec);
        evaluations += rows[j].evaluations;
    }
    double lowest = std::numeric_limits<double>::infinity();
    double highest = -lowest;
    for (const auto &r : rows) {
        lowest = std::min(lowest, r.best.gain);
        highest = std::max(highest, r.best.gain);
    }
    OptimizationResult out;
    if (highest - lowest < kFlat) {
        out = optimize_beta(engine, 0.0, spec);
        out.flat_landscape = true;
        out.evaluations += evaluations;
        return out;
    }

    std::vector<std::size_t> order(rows.size());
    for (std::size_t j = 0; j < order.size(); ++j)
        order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return better(rows[a].best.gain, alphas[a], rows[b].best.gain, alphas[b]);
    });

    std::vector<double> seeds;
    for (std::size_t i = 0; i < order.size() && static_cast<int>(i) < spec.starts; ++i)
        seeds.push_back(alphas[order[i]]);
    const double h = alpha_H(engine.n_atoms(), engine.tau(), spec);
    seeds.push_back(h < 0.0 ? h + pi : h);

    auto inner = [&](double alpha) {
        const auto r = optimize_beta(engine, alpha, spec);
        evaluations += r.evaluations;
        return r.best.gain;
    };

    GainResult best = rows[order.front()].best;
    for (double seed : seeds) {
        const Extremum e =
            golden_maximize(inner, seed - step, seed + step, spec.refine_tolerance, spec.max_iterations);
        const GainResult cand = optimize_beta(engine, e.x, spec).best;
        const bool wins =
            nearly_equal(cand.gain, best.gain)
                ? (std::abs(cand.alpha) < std::abs(best.alpha) ||
                   (std::abs(cand.alpha) == std::abs(best.alpha) &&
                    std::abs(cand.beta) < std::abs(best.beta)))
                : cand.gain > best.gain;
        if (wins)
            best = cand;
    }
    out.best = best;
    out.evaluations = evaluations;
    return out;
}

OptimizationResult optimize_beta(const SequenceConfig &config, const OptimizationSpec &spec) {
    config.validate();
    const SequenceEngine engine(config.n_atoms, config.tau, config.tau_tilde);
    switch (spec.alpha_mode) {
    case AlphaMode::scan:
        return optimize_alpha_beta(engine, spec);
    case AlphaMode::alpha_h:
        return optimize_beta(engine, alpha_H(config.n_atoms, config.tau, spec), spec);
    case AlphaMode::fixed:
        break;
    }
    return optimize_beta(engine, spec.alpha_value, spec);
}

OptimizationResult optimize_alpha_beta(const SequenceConfig &config, const OptimizationSpec &spec) {
    config.validate();
    const SequenceEngine engine(config.n_atoms, config.tau, config.tau_tilde);
    return optimize_alpha_beta(engine, spec);
}

double alpha_H(int n_atoms, double tau, const OptimizationSpec &spec) {
    spec.validate();
    const SpinMoments base = spin_moments(prepared_state(n_atoms, tau));
    auto f = [&](double alpha) {
        try {
            return -wineland_xi2(base.rotated_about_x(alpha), n_atoms);
        } catch (const DegenerateStateError &) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    const int n = 2 * spec.alpha_grid;
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        grid[static_cast<std::size_t>(i)] = -0.5 * pi + pi * i / n;
    bool flat = false;
    int evaluations = 0;
    const Extremum e = grid_then_golden(grid, f, -0.5 * pi - pi / n, 0.5 * pi, spec, flat, evaluations);
    return flat ? 0.0 : e.x;
}

std::string_view to_string(AlphaPolicy policy) {
    switch (policy) {
    case AlphaPolicy::zero: return "zero";
    case AlphaPolicy::half_pi: return "half_pi";
    case AlphaPolicy::alpha_h: return "alpha_h";
    case AlphaPolicy::optimal: return "optimal";
    case AlphaPolicy::fixed: return "fixed";
    }
    return "?";
}

AlphaPolicy parse_alpha_policy(std::string_view text) {
    for (auto p : {AlphaPolicy::zero, AlphaPolicy::half_pi, AlphaPolicy::alpha_h,
                   AlphaPolicy::optimal, AlphaPolicy::fixed})
        if (text == to_string(p))
            return p;
    throw InvalidInput("unknown alpha policy '" + std::string(text) +
                       "' (expected zero, half_pi, alpha_h, optimal or fixed)");
}

OptimizationResult optimize_policy(const SequenceEngine &engine, AlphaPolicy policy,
                                   const OptimizationSpec &spec) {
    switch (policy) {
    case AlphaPolicy::zero: return optimize_beta(engine, 0.0, spec);
    case AlphaPolicy::half_pi: return optimize_beta(engine, 0.5 * pi, spec);
    case AlphaPolicy::alpha_h:
        return optimize_beta(engine, alpha_H(engine.n_atoms(), engine.tau(), spec), spec);
    case AlphaPolicy::optimal: return optimize_alpha_beta(engine, spec);
    case AlphaPolicy::fixed: return optimize_beta(engine, spec.alpha_value, spec);
    }
    throw InvalidInput("unknown alpha policy");
}

namespace {

ScanRow evaluate_row(const AtomTrapConfig &config, double m, double tau_half, double tau_tilde,
                     AlphaPolicy policy, const OptimizationSpec &spec) {
    ScanRow row;
    row.policy = policy;
    row.m = m;
    row.gamma = config.aspect_ratio();
    row.omega_z = config.omega_z;
    row.n_atoms = config.n_atoms;
    row.tau = 2.0 * m * tau_half;
    row.tau_tilde = tau_tilde;
    const SequenceEngine engine(config.n_atoms, row.tau, row.tau_tilde);
    const OptimizationResult r = optimize_policy(engine, policy, spec);
    row.alpha = r.best.alpha;
    row.beta = r.best.beta;
    row.gain = r.best.gain;
    row.gain_linear = 1.0 / std::sqrt(xi2_closed(config.n_atoms, row.tau));
    return row;
}

} // namespace

std::vector<ScanRow> scan_m(const AtomTrapConfig &config, std::span<const double> m_values,
                            AlphaPolicy policy, DensityModel model, const OptimizationSpec &spec) {
    config.validate();
    spec.validate();
    for (double m : m_values)
        require_half_integer(m);
    const double tau_half = tau_accumulated(config, model, 0.5 * config.period());
    const double tau_tilde = tau_interrogation(config, model);
    std::vector<ScanRow> rows(m_values.size());
    parallel_rows(static_cast<long>(rows.size()), [&](std::size_t i) {
        rows[i] = evaluate_row(config, m_values[i], tau_half, tau_tilde, policy, spec);
    });
    return rows;
}

std::vector<ScanRow> scan_trap(const AtomTrapConfig &config, TrapSweep sweep,
                               std::span<const double> values, std::span<const double> m_values,
                               AlphaPolicy policy, DensityModel model,
                               const OptimizationSpec &spec) {
    config.validate();
    spec.validate();
    for (double m : m_values)
        require_half_integer(m);
    std::vector<AtomTrapConfig> traps;
    for (double v : values) {
        if (!std::isfinite(v) || !(v > 0.0))
            throw InvalidInput("sweep values must be positive, got " + std::to_string(v));
        AtomTrapConfig c = config;
        if (sweep == TrapSweep::aspect_ratio) {
            c.omega_x = c.omega_y = v * c.omega_z;
        } else {
            const double gamma = config.aspect_ratio();
            const double ratio = config.omega_z_tilde / config.omega_z;
            c.omega_z = v;
            c.omega_x = c.omega_y = gamma * v;
            c.omega_z_tilde = ratio * v;
        }
        traps.push_back(c);
    }

    std::vector<double> tau_half(traps.size()), tau_tilde(traps.size());
    parallel_rows(static_cast<long>(traps.size()), [&](std::size_t i) {
        tau_half[i] = tau_accumulated(traps[i], model, 0.5 * traps[i].period());
        tau_tilde[i] = tau_interrogation(traps[i], model);
    });

    const std::size_t nm = m_values.size();
    std::vector<ScanRow> rows(traps.size() * nm);
    parallel_rows(static_cast<long>(rows.size()), [&](std::size_t i) {
        const std::size_t t = i / nm, k = i % nm;
        rows[i] = evaluate_row(traps[t], m_values[k], tau_half[t], tau_tilde[t], policy, spec);
    });
    return rows;
}

} // namespace nlai
