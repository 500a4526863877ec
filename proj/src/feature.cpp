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
#include "lfq/feature.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <map>

namespace lfq {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Poisson weights lambda^k e^-lambda / k! for k = 0..n-1, computed
/// iteratively (w_k = w_{k-1} lambda / k) for stability.
void poisson_weights(double lambda, int n, double* w) {
    w[0] = std::exp(-lambda);
    for (int k = 1; k < n; ++k) w[k] = w[k - 1] * lambda / static_cast<double>(k);
}

} // namespace

void validate(const FeatureParams& p) {
    if (!(p.amplitude >= 0)) throw DataError("feature: amplitude must be >= 0");
    if (!(p.sigma > 0)) throw DataError("feature: sigma must be > 0");
    if (!(p.rho > 0)) throw DataError("feature: rho must be > 0");
    if (!(p.delta > 0)) throw DataError("feature: delta must be > 0");
    if (!(p.lambda >= 0)) throw DataError("feature: lambda must be >= 0");
    if (p.n_peaks < 1) throw DataError("feature: n_peaks must be >= 1");
}

TimeExtent extent_2sigma(const FeatureParams& p) {
    return {p.mu - 2.0 * p.sigma, p.mu + 2.0 * p.sigma};
}

double evaluate_model(const FeatureParams& p, double t, double m) {
    const double dt = (t - p.mu) / p.sigma;
    const double time_term = std::exp(-0.5 * dt * dt);
    double w[64];
    const int n = std::min(p.n_peaks, 64);
    poisson_weights(p.lambda, n, w);
    double mz_term = 0.0;
    for (int k = 0; k < n; ++k) {
        const double dm = (m - (p.zeta0 + k * p.delta)) / p.rho;
        mz_term += w[k] * std::exp(-0.5 * dm * dm);
    }
    return p.amplitude * time_term * mz_term;
}

double analytic_volume(const FeatureParams& p) {
    double w[64];
    const int n = std::min(p.n_peaks, 64);
    poisson_weights(p.lambda, n, w);
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += w[k];
    return kTwoPi * p.amplitude * p.sigma * p.rho * sum;
}

std::array<double, 6> model_jacobian(const FeatureParams& p, double t, double m) {
    const double dt = (t - p.mu) / p.sigma;
    const double time_term = std::exp(-0.5 * dt * dt);
    double w[64];
    const int n = std::min(p.n_peaks, 64);
    poisson_weights(p.lambda, n, w);

    double s = 0.0;        // isotope envelope
    double s_zeta = 0.0;   // d envelope / d zeta0
    double s_rho = 0.0;    // d envelope / d rho
    double s_lambda = 0.0; // d envelope / d lambda
    for (int k = 0; k < n; ++k) {
        const double dm = (m - (p.zeta0 + k * p.delta)) / p.rho;
        const double g = std::exp(-0.5 * dm * dm);
        s += w[k] * g;
        s_zeta += w[k] * g * dm / p.rho;
        s_rho += w[k] * g * dm * dm / p.rho;
        // d w_k / d lambda = w_{k-1} - w_k
        const double prev = k > 0 ? w[k - 1] : 0.0;
        s_lambda += (prev - w[k]) * g;
    }

    const double f = p.amplitude * time_term * s;
    std::array<double, 6> out;
    out[0] = time_term * s;                        // d/dA
    out[1] = f * dt / p.sigma;                     // d/dmu
    out[2] = f * dt * dt / p.sigma;                // d/dsigma
    out[3] = p.amplitude * time_term * s_zeta;     // d/dzeta0
    out[4] = p.amplitude * time_term * s_lambda;   // d/dlambda
    out[5] = p.amplitude * time_term * s_rho;      // d/drho
    return out;
}

FeatureParams initial_guess(const Raster& window, const Identification& hint) {
    if (window.points.empty())
        throw NoDataError("initial_guess: empty raster window");

    double max_intensity = 0.0;
    double mu = 0.0;
    double mz_at_max = 0.0;
    for (const auto& pt : window.points) {
        if (pt.intensity > max_intensity) {
            max_intensity = pt.intensity;
            mu = pt.time;
            mz_at_max = pt.mz;
        }
    }
    if (max_intensity <= 0.0)
        throw NoDataError("initial_guess: window has no signal");

    FeatureParams p;
    p.amplitude = max_intensity;
    p.mu = mu;
    p.n_peaks = 4;
    p.rho = 0.01;
    p.delta = kNeutronMassDa / std::max(1, hint.species.charge);

    // Time marginal and its half width at half max around the marginal peak.
    std::map<double, double> marginal;
    for (const auto& pt : window.points) marginal[pt.time] += pt.intensity;
    std::vector<std::pair<double, double>> times(marginal.begin(), marginal.end());
    std::size_t peak = 0;
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i].second > times[peak].second) peak = i;
    const double half = times[peak].second / 2.0;
    std::size_t lo = peak, hi = peak;
    while (lo > 0 && times[lo - 1].second >= half) --lo;
    while (hi + 1 < times.size() && times[hi + 1].second >= half) ++hi;
    p.sigma = std::max(0.5, (times[hi].first - times[lo].first) / 2.0);

    // Snap the strongest point to the isotope grid anchored at (and not
    // above) the precursor m/z.
    double steps = std::round((hint.precursor_mz - mz_at_max) / p.delta);
    if (steps < 0) steps = 0;
    p.zeta0 = hint.precursor_mz - steps * p.delta;

    // lambda from the ratio of the second to the first isotope marginal.
    double first = 0.0, second = 0.0;
    for (const auto& pt : window.points) {
        const double k = std::round((pt.mz - p.zeta0) / p.delta);
        if (k == 0.0)
            first += pt.intensity;
        else if (k == 1.0)
            second += pt.intensity;
    }
    p.lambda = first > 0.0 ? std::clamp(second / first, 0.01, 10.0) : 0.01;
    return p;
}

namespace {

/// Solves the 6x6 symmetric positive definite system H x = b by Cholesky.
/// Returns false when H is not (numerically) positive definite.
bool cholesky_solve(const std::array<std::array<double, 6>, 6>& h,
                    const std::array<double, 6>& b, std::array<double, 6>& x) {
    std::array<std::array<double, 6>, 6> l{};
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = h[i][j];
            for (int k = 0; k < j; ++k) sum -= l[i][k] * l[j][k];
            if (i == j) {
                if (!(sum > 0.0) || !std::isfinite(sum)) return false;
                l[i][i] = std::sqrt(sum);
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    std::array<double, 6> y{};
    for (int i = 0; i < 6; ++i) {
        double sum = b[i];
        for (int k = 0; k < i; ++k) sum -= l[i][k] * y[k];
        y[i] = sum / l[i][i];
    }
    for (int i = 5; i >= 0; --i) {
        double sum = y[i];
        for (int k = i + 1; k < 6; ++k) sum -= l[k][i] * x[k];
        x[i] = sum / l[i][i];
    }
    return true;
}

// Optimization variables: (ln A, mu, ln sigma, zeta0, ln lambda, ln rho).
struct LogTheta {
    std::array<double, 6> v;

    static LogTheta from(const FeatureParams& p) {
        auto safe_log = [](double x) { return std::log(std::max(x, 1e-12)); };
        return {{safe_log(p.amplitude), p.mu, safe_log(p.sigma), p.zeta0,
                 safe_log(p.lambda), safe_log(p.rho)}};
    }

    FeatureParams to_params(const FeatureParams& shape) const {
        FeatureParams p = shape;
        p.amplitude = std::exp(v[0]);
        p.mu = v[1];
        p.sigma = std::exp(v[2]);
        p.zeta0 = v[3];
        p.lambda = std::exp(v[4]);
        p.rho = std::exp(v[5]);
        return p;
    }

    void clamp_logs() {
        for (int i : {0, 2, 4, 5}) v[i] = std::clamp(v[i], -60.0, 60.0);
    }
};

double sum_squared_error(const Raster& window, const FeatureParams& p) {
    double sse = 0.0;
    for (const auto& pt : window.points) {
        const double r = evaluate_model(p, pt.time, pt.mz) - pt.intensity;
        sse += r * r;
    }
    return sse;
}

} // namespace

FitResult fit_feature(const Raster& window, const FeatureParams& guess,
                      const FitOptions& options) {
    const std::size_t n_pts = window.points.size();
    if (n_pts < 8)
        throw NoDataError("fit_feature: window has fewer than 8 points");

    LogTheta theta = LogTheta::from(guess);
    theta.clamp_logs();
    FeatureParams current = theta.to_params(guess);
    double sse = sum_squared_error(window, current);

    double damping = options.damping_init;
    bool converged = false;
    int iterations = 0;

    std::array<std::array<double, 6>, 6> h{};
    std::array<double, 6> g{};

    auto build_normal_equations = [&](const FeatureParams& p) {
        for (auto& row : h) row.fill(0.0);
        g.fill(0.0);
        for (const auto& pt : window.points) {
            const double r = evaluate_model(p, pt.time, pt.mz) - pt.intensity;
            auto jp = model_jacobian(p, pt.time, pt.mz);
            // chain rule into log space for A, sigma, lambda, rho
            std::array<double, 6> j = {jp[0] * p.amplitude, jp[1],
                                       jp[2] * p.sigma,     jp[3],
                                       jp[4] * p.lambda,    jp[5] * p.rho};
            for (int a = 0; a < 6; ++a) {
                g[a] += j[a] * r;
                for (int b = 0; b <= a; ++b) h[a][b] += j[a] * j[b];
            }
        }
        for (int a = 0; a < 6; ++a)
            for (int b = a + 1; b < 6; ++b) h[a][b] = h[b][a];
    };

    build_normal_equations(current);

    while (iterations < options.max_iterations && !converged) {
        ++iterations;

        double max_diag = 0.0;
        for (int a = 0; a < 6; ++a) max_diag = std::max(max_diag, h[a][a]);

        std::array<double, 6> step{};
        bool solved = false;
        while (!solved) {
            std::array<std::array<double, 6>, 6> damped = h;
            for (int a = 0; a < 6; ++a)
                damped[a][a] += damping * std::max(h[a][a], 1e-12 * max_diag) +
                                1e-300;
            std::array<double, 6> rhs;
            for (int a = 0; a < 6; ++a) rhs[a] = -g[a];
            solved = cholesky_solve(damped, rhs, step);
            if (!solved) {
                damping *= 10.0;
                if (damping > options.damping_max)
                    throw SingularNormalEquations(
                        "fit_feature: damping exhausted, normal equations singular");
            }
        }

        double step_norm = 0.0;
        for (double s : step) step_norm += s * s;
        step_norm = std::sqrt(step_norm);

        LogTheta trial = theta;
        for (int a = 0; a < 6; ++a) trial.v[a] += step[a];
        trial.clamp_logs();
        FeatureParams trial_params = trial.to_params(guess);
        const double trial_sse = sum_squared_error(window, trial_params);

        if (std::isfinite(trial_sse) && trial_sse < sse) {
            const double decrease = (sse - trial_sse) / std::max(sse, DBL_MIN);
            theta = trial;
            current = trial_params;
            sse = trial_sse;
            damping = std::max(damping * 0.1, 1e-12);
            if (decrease < options.objective_tol || step_norm < options.step_tol ||
                sse == 0.0)
                converged = true;
            else
                build_normal_equations(current);
        } else {
            // Rejected. A negligible proposed step means we already sit at a
            // stationary point.
            if (step_norm < options.step_tol) {
                converged = true;
            } else {
                damping *= 10.0;
                if (damping > options.damping_max)
                    throw SingularNormalEquations(
                        "fit_feature: damping exhausted, normal equations singular");
            }
        }
    }

    FitResult result;
    result.params = current;
    result.iterations = iterations;
    result.residual_norm = std::sqrt(sse / static_cast<double>(n_pts));
    result.converged = converged;

    // Identifiability gate: a surface wider than the whole observation
    // window is unconstrained by the data (a flat window can be matched
    // exactly by sigma, rho -> infinity).
    double t_lo = window.points.front().time, t_hi = t_lo;
    double m_lo = window.points.front().mz, m_hi = m_lo;
    for (const auto& pt : window.points) {
        t_lo = std::min(t_lo, pt.time);
        t_hi = std::max(t_hi, pt.time);
        m_lo = std::min(m_lo, pt.mz);
        m_hi = std::max(m_hi, pt.mz);
    }
    if (result.converged) {
        bool finite = std::isfinite(current.amplitude) &&
                      std::isfinite(current.mu) && std::isfinite(current.sigma) &&
                      std::isfinite(current.zeta0) &&
                      std::isfinite(current.lambda) && std::isfinite(current.rho);
        if (!finite || current.sigma > (t_hi - t_lo) || current.rho > (m_hi - m_lo))
            result.converged = false;
    }

    result.abundance = analytic_volume(result.params);
    return result;
}

bool quantifiable(const FitResult& fit) {
    return fit.converged &&
           fit.residual_norm <= 0.5 * fit.params.amplitude;
}

Raster extract_window(const Raster& raster, double rt_hint, double mz_hint,
                      int charge) {
    const double delta = kNeutronMassDa / std::max(1, charge);
    const double t_lo = rt_hint - 30.0, t_hi = rt_hint + 30.0;
    const double m_lo = mz_hint - 0.1, m_hi = mz_hint + 3.0 * delta + 0.1;
    Raster window;
    window.sample_id = raster.sample_id;
    window.replicate_id = raster.replicate_id;
    // points are sorted by (time, mz); narrow the scan to the time slice
    auto first = std::lower_bound(
        raster.points.begin(), raster.points.end(), t_lo,
        [](const RasterPoint& pt, double t) { return pt.time < t; });
    for (auto it = first; it != raster.points.end() && it->time <= t_hi; ++it)
        if (it->mz >= m_lo && it->mz <= m_hi) window.points.push_back(*it);
    return window;
}

} // namespace lfq
