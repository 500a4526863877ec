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

#include "lfq/diagnostics.hpp"
#include "lfq/quant.hpp"
#include "lfq/stats.hpp"

namespace lfq {

struct QuantifyOptions {
    double fdr_threshold = 0.001;
    int min_presence = 3;
    FitOptions fit_options;
};

struct QuantifyOutput {
    QuantMatrix counts_replicate;    // raw integer counts per run
    QuantMatrix abundance_replicate; // fitted volumes per run
    QuantMatrix counts_final;        // averaged, filtered, normalized
    QuantMatrix abundance_final;
    std::vector<FitRecord> fits;

    std::size_t ids_total = 0;
    std::size_t ids_passing = 0;
    std::size_t species_counted = 0;
    std::size_t fits_attempted = 0;
    std::size_t fits_converged = 0;
    std::size_t fits_successful = 0;
};

/// FDR filter -> per-replicate count and abundance matrices -> technical
/// replicate averaging -> minimum-presence filter -> normalization.
QuantifyOutput run_quantify(const std::vector<Identification>& ids,
                            const std::vector<RunKey>& runs,
                            const RasterProvider& rasters,
                            const GroupMap& groups,
                            const QuantifyOptions& options = {});

struct DiagnoseOptions {
    std::string foreground_prefix; // class under analysis (suppressed)
    std::string background_prefix; // competing class
    /// Rank the control group instead of the case group when computing the
    /// per-species w for stratification. With equal group sizes this negates
    /// w; it reproduces analyses that rank the reference class.
    bool rank_control = false;
    bool proline_rule = true;
};

struct DiagnoseOutput {
    std::vector<InterferenceRecord> interference;
    std::map<std::string, Cohort> cohort_of; // foreground species -> cohort
    std::vector<std::pair<std::string, double>> species_w; // fg species, w
    std::vector<StratumSummary> by_abundance;
    std::vector<StratumSummary> by_missingness;
    std::vector<StratumSummary> by_cohort;
    std::vector<SemiTrypticProfile> semi_profile; // empty without sequences
    std::map<std::string, TrypticStatus> tryptic_status;
};

/// Interference-distance analysis over the successful fits, per-species w
/// stratifications (total control abundance, control missingness, cohort),
/// and, when protein sequences are available, the semi-tryptic profile.
DiagnoseOutput run_diagnose(
    const std::vector<FitRecord>& fits, const QuantMatrix& abundance,
    const GroupMap& groups, const ProteinMap& pm,
    const std::map<std::string, std::string>& protein_sequences,
    const DiagnoseOptions& options);

} // namespace lfq
