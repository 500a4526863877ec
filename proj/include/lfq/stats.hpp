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

#include <cstdint>
#include <span>

#include "lfq/ingest.hpp"
#include "lfq/quant.hpp"

namespace lfq {

/// Midranks (average rank of tied values, 1-based) parallel to the input.
std::vector<double> midranks(std::span<const double> values);

double median(std::vector<double> values);

struct WilcoxonResult {
    double rank_sum = 0.0; // W: sum of case midranks in the pooled ranking
    double w = 0.0;        // scaled statistic in [-1, 1]
    int n_case = 0;
    int n_control = 0;
};

/// Scaled rank-sum statistic. Ranks the pooled observations with midranks
/// for ties; W is the rank sum of the case group and
///   w = 2 (W - (Wmax + Wmin) / 2) / (Wmax - Wmin)
/// with [Wmin, Wmax] = [n(n+1)/2, n(n+2m+1)/2], so w = -1 exactly when the
/// cases occupy the lowest ranks and +1 when they occupy the highest.
/// Throws UndefinedStatistic when either group is empty.
WilcoxonResult wilcoxon_w(std::span<const double> case_values,
                          std::span<const double> control_values);

/// How missing cells enter a comparison. Spectral counts treat missing as
/// zero observations; ion abundances exclude them, shrinking the group.
enum class MissingPolicy { treat_as_zero, exclude };

MissingPolicy missing_policy_for(Measure m);

WilcoxonResult wilcoxon_w(std::span<const Cell> case_values,
                          std::span<const Cell> control_values,
                          MissingPolicy policy);

/// Per-element w used by the rollup statistic. After the missing rule, a
/// comparison with observations in only one group is maximal evidence:
/// +1 when only the case side is observed, -1 when only the control side is.
/// No observations at all yields nullopt (the element drops out).
std::optional<double> element_w(std::span<const Cell> case_values,
                                std::span<const Cell> control_values,
                                MissingPolicy policy);

/// Mean of the element w values; in [-1, 1] independent of the count.
double tau(std::span<const double> element_ws);

struct TauResult {
    std::string accession;
    Level level = Level::species;
    Measure measure = Measure::spectral_count;
    int k = 0;
    double tau = 0.0;
    double p_value = 1.0;
    double q_value = 1.0;
    std::string direction; // up / down / flat, for the case group
};

struct PermutationOptions {
    int permutations = 1500;
    std::uint64_t seed = 0;
    /// Enumerate every distinct relabeling instead of sampling; only
    /// sensible for small sample counts.
    bool exhaustive = false;
};

/// Permutation-calibrated test of the rollup statistic. For every protein,
/// tau is the mean w over its elements in the matrix; the null is built by
/// relabeling the sample groups (sizes preserved), recomputing every element
/// w (missing rule, n and m included) per relabeling, and the two-sided
/// p-value is (1 + #{|tau_b| >= |tau_obs|}) / (B + 1). Deterministic given
/// the seed. q-values are Benjamini-Hochberg over the returned proteins.
std::vector<TauResult> permutation_test(const QuantMatrix& m,
                                        const ProteinMap& pm,
                                        const PermutationOptions& options = {});

/// Benjamini-Hochberg step-up q-values, mapped back to input order.
std::vector<double> bh_qvalues(std::span<const double> p_values);

struct SpearmanResult {
    double rho = 0.0;
    double p_value = 1.0;
};

/// Spearman rank correlation: Pearson correlation of midranks, with a
/// two-sided permutation p-value (default 10^4 relabelings, fixed seed).
SpearmanResult spearman_rho(std::span<const double> x,
                            std::span<const double> y,
                            int permutations = 10000, std::uint64_t seed = 0);

void write_tau_results(const std::filesystem::path&,
                       const std::vector<TauResult>&);
std::vector<TauResult> read_tau_results(const std::filesystem::path&);

} // namespace lfq
