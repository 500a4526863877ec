/*
Copyright 2026, lfqkit contributors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
// Test-only reference computations. Everything here is deliberately
// independent of the library implementation paths it checks: quadrature
// instead of the closed-form volume, finite differences instead of the
// analytic jacobian, counting instead of ranking shortcuts.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "lfq/feature.hpp"
#include "lfq/rng.hpp"

namespace oracle {

// ---- adaptive Simpson quadrature -------------------------------------

inline double simpson_slice(const std::function<double(double)>& f, double a,
                            double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fb,
                                   double fm, double whole, double tol,
                                   int depth, int force_depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson_slice(f, a, fa, m, fm, flm);
    const double right = simpson_slice(f, m, fm, b, fb, frm);
    // force_depth guards against a sparse initial sampling of a spiky
    // integrand looking converged by coincidence
    if (depth <= 0 ||
        (force_depth <= 0 && std::abs(left + right - whole) <= 15.0 * tol))
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, fm, flm, left, tol / 2, depth - 1,
                                force_depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, fb, frm, right, tol / 2, depth - 1,
                                force_depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = simpson_slice(f, a, fa, b, fb, fm);
    return adaptive_simpson_rec(f, a, b, fa, fb, fm, whole, tol, 40, 4);
}

/// 2-D volume of the feature surface over [mu +- 8 sigma] x
/// [zeta0 - 8 rho, zeta_{N-1} + 8 rho], treating evaluate_model as a black
/// box (nested adaptive Simpson). The m/z axis is cut into panels around
/// each isotope position first; a spiky integrand on one wide interval can
/// otherwise fool the initial Simpson estimate into an early exit.
inline double quadrature_volume(const lfq::FeatureParams& p, double tol = 2e-8) {
    const double t_lo = p.mu - 8.0 * p.sigma, t_hi = p.mu + 8.0 * p.sigma;

    std::vector<std::pair<double, double>> panels;
    for (int k = 0; k < p.n_peaks; ++k) {
        const double center = p.zeta0 + k * p.delta;
        const double lo = center - 8.0 * p.rho, hi = center + 8.0 * p.rho;
        if (!panels.empty() && lo <= panels.back().second)
            panels.back().second = hi;
        else
            panels.emplace_back(lo, hi);
    }

    const double scale =
        std::max(1e-300, p.amplitude * p.sigma * p.rho * 2.0 * 3.2);
    auto outer = [&](double t) {
        auto inner = [&](double m) { return lfq::evaluate_model(p, t, m); };
        double sum = 0.0;
        for (const auto& [lo, hi] : panels)
            sum += adaptive_simpson(
                inner, lo, hi,
                tol * scale / ((t_hi - t_lo) * static_cast<double>(panels.size())));
        return sum;
    };
    return adaptive_simpson(outer, t_lo, t_hi, tol * scale);
}

// ---- finite differences ----------------------------------------------

/// Characteristic scale of each free parameter: the surface varies over
/// sigma along t and over rho along m/z, so mu and zeta0 live on those
/// widths, not on their own (large) magnitudes.
inline double fd_scale(const lfq::FeatureParams& p, int index) {
    switch (index) {
        case 0: return std::max(p.amplitude, 1.0);
        case 1: return p.sigma;
        case 2: return p.sigma;
        case 3: return p.rho;
        case 4: return std::max(p.lambda, 1.0);
        default: return p.rho;
    }
}

/// Central finite difference of evaluate_model with respect to parameter
/// `index` in the order (A, mu, sigma, zeta0, lambda, rho), step
/// 1e-6 * the parameter's characteristic scale.
inline double finite_difference(const lfq::FeatureParams& p, int index, double t,
                                double m) {
    auto nudge = [&](double h) {
        lfq::FeatureParams q = p;
        switch (index) {
            case 0: q.amplitude += h; break;
            case 1: q.mu += h; break;
            case 2: q.sigma += h; break;
            case 3: q.zeta0 += h; break;
            case 4: q.lambda += h; break;
            default: q.rho += h; break;
        }
        return lfq::evaluate_model(q, t, m);
    };
    const double h = 1e-6 * fd_scale(p, index);
    return (nudge(h) - nudge(-h)) / (2.0 * h);
}

/// Worst normalized disagreement between the analytic jacobian and central
/// finite differences across the six partials at (t, m). Each component is
/// normalized by the larger of the two estimates and the derivative's
/// natural magnitude f / scale, so a partial that happens to vanish at the
/// probe point is compared in those absolute units. A wrong sign or a
/// missing factor in any component shows up as a disagreement of order one.
inline double jacobian_disagreement(const lfq::FeatureParams& p, double t,
                                    double m) {
    const auto j = lfq::model_jacobian(p, t, m);
    const double f = lfq::evaluate_model(p, t, m);
    double worst = 0.0;
    for (int i = 0; i < 6; ++i) {
        const double fd = finite_difference(p, i, t, m);
        const double natural = std::max(f, 1e-6) / fd_scale(p, i);
        const double denom = std::max({std::abs(j[i]), std::abs(fd), natural});
        worst = std::max(worst, std::abs(j[i] - fd) / denom);
    }
    return worst;
}

// ---- ranks by counting ------------------------------------------------

/// 1-based midrank of values[i]: smaller count plus half the ties.
inline std::vector<double> counting_ranks(const std::vector<double>& values) {
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        int less = 0, equal = 0;
        for (double v : values) {
            if (v < values[i]) ++less;
            if (v == values[i]) ++equal;
        }
        ranks[i] = less + 0.5 * (equal + 1);
    }
    return ranks;
}

/// Scaled Wilcoxon computed from counting ranks only.
inline double counting_w(const std::vector<double>& case_values,
                         const std::vector<double>& control_values) {
    std::vector<double> pooled = case_values;
    pooled.insert(pooled.end(), control_values.begin(), control_values.end());
    const auto ranks = counting_ranks(pooled);
    double w_sum = 0.0;
    for (std::size_t i = 0; i < case_values.size(); ++i) w_sum += ranks[i];
    const double n = static_cast<double>(case_values.size());
    const double m = static_cast<double>(control_values.size());
    const double w_min = 0.5 * n * (n + 1);
    const double w_max = 0.5 * n * (n + 2 * m + 1);
    return (2.0 * w_sum - (w_max + w_min)) / (w_max - w_min);
}

/// Tie-adjusted Mann-Whitney AUC by explicit pair counting.
inline double pair_counting_auc(const std::vector<double>& positives,
                                const std::vector<double>& negatives) {
    double wins = 0.0;
    for (double p : positives)
        for (double n : negatives) {
            if (p > n)
                wins += 1.0;
            else if (p == n)
                wins += 0.5;
        }
    return wins / (static_cast<double>(positives.size()) *
                   static_cast<double>(negatives.size()));
}

// ---- random valid feature parameters -----------------------------------

inline lfq::FeatureParams random_params(lfq::Rng& rng) {
    lfq::FeatureParams p;
    p.amplitude = rng.log_uniform(1.0, 1e4);
    p.mu = rng.uniform(20.0, 2000.0);
    p.sigma = rng.uniform(0.5, 8.0);
    p.zeta0 = rng.uniform(300.0, 1500.0);
    p.delta = lfq::kNeutronMassDa / (1 + static_cast<int>(rng.below(3)));
    p.lambda = rng.uniform(0.0, 3.0);
    p.rho = rng.uniform(0.005, 0.05);
    p.n_peaks = 1 + static_cast<int>(rng.below(6));
    return p;
}

} // namespace oracle
