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
#pragma once

#include <array>

#include "lfq/ingest.hpp"

namespace lfq {

/// Neutron mass spacing (Da); isotope peak spacing is this over the charge.
inline constexpr double kNeutronMassDa = 1.00335;

/// Parameters of the separable feature surface
///
///   f(t, m) = A exp(-(t-mu)^2 / 2 sigma^2)
///             * sum_{k=0}^{N-1} (lambda^k / k!) e^-lambda
///                               exp(-(m - zeta_k)^2 / 2 rho^2),
///
/// with zeta_k = zeta0 + k * delta: a Gaussian elution profile times an
/// isotopic envelope of N Gaussian peaks with Poisson-distributed amplitudes.
struct FeatureParams {
    double amplitude = 0.0; // A >= 0
    double mu = 0.0;        // time peak center, seconds
    double sigma = 1.0;     // time std dev, > 0
    double zeta0 = 0.0;     // first isotope peak center, Thomson
    double delta = 1.0;     // inter-peak spacing, > 0
    double lambda = 0.0;    // Poisson parameter, >= 0
    double rho = 0.01;      // m/z std dev, > 0
    int n_peaks = 1;        // N >= 1
};

void validate(const FeatureParams& p);

/// [mu - 2 sigma, mu + 2 sigma]; two features can compete for ions when
/// their extents intersect.
struct TimeExtent {
    double left = 0.0;
    double right = 0.0;
};

TimeExtent extent_2sigma(const FeatureParams& p);

/// Surface height at (t, m). Total on valid params, nonnegative, finite.
double evaluate_model(const FeatureParams& p, double t, double m);

/// Total volume under the surface:
/// 2 pi A sigma rho sum_{k<N} (lambda^k / k!) e^-lambda.
double analytic_volume(const FeatureParams& p);

/// Partial derivatives of evaluate_model with respect to the six free
/// parameters, in the order (A, mu, sigma, zeta0, lambda, rho).
/// delta and n_peaks are structural and held fixed.
std::array<double, 6> model_jacobian(const FeatureParams& p, double t, double m);

struct FitOptions {
    int max_iterations = 200;
    double objective_tol = 1e-8; // relative objective decrease
    double step_tol = 1e-8;      // parameter step norm (log-space)
    double damping_init = 1e-3;
    double damping_max = 1e12;
};

struct FitResult {
    FeatureParams params;
    double residual_norm = 0.0; // root-mean-square residual
    int iterations = 0;
    bool converged = false;
    double abundance = 0.0; // analytic_volume(params)
};

/// Data-driven starting point for fit_feature:
///   A      = max intensity in the window, mu = its time coordinate
///   sigma  = half width at half max of the time marginal (floor 0.5 s)
///   zeta0  = m/z of the most intense point, snapped to the nearest expected
///            isotope position at or below hint.precursor_mz
///   delta  = 1.00335 / charge, lambda = second/first isotope intensity
///            ratio clamped to [0.01, 10], rho = 0.01 Th, N = 4
/// Throws NoDataError on an empty or all-zero window.
FeatureParams initial_guess(const Raster& window, const Identification& hint);

/// Damped least-squares fit of the feature surface to a raster window.
/// A, sigma, lambda and rho are optimized in log space so positivity holds
/// without a constrained solver; delta and n_peaks stay fixed.
///
/// Convergence: relative objective decrease < objective_tol or step norm
/// < step_tol. Hitting the iteration cap returns the best point with
/// converged = false. Exhausting the damping schedule throws
/// SingularNormalEquations. A converged solution whose sigma (rho) exceeds
/// the window's full time (m/z) span is reported as not converged: such a
/// surface is wider than anything the window can constrain.
FitResult fit_feature(const Raster& window, const FeatureParams& guess,
                      const FitOptions& options = {});

/// Successful quantification gate: converged and RMS residual <= 0.5 A.
bool quantifiable(const FitResult& fit);

/// Raster points with time in [rt_hint - 30 s, rt_hint + 30 s] and m/z in
/// [mz_hint - 0.1, mz_hint + (N-1) delta + 0.1] for N = 4.
Raster extract_window(const Raster& raster, double rt_hint, double mz_hint,
                      int charge);

} // namespace lfq
