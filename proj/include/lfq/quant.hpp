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

#include <functional>
#include <optional>

#include "lfq/feature.hpp"
#include "lfq/ingest.hpp"

namespace lfq {

using Cell = std::optional<double>;

struct SampleColumn {
    std::string sample_id;
    std::string replicate_id; // empty once technical replicates are averaged
    Group group = Group::cases;

    std::string label() const {
        return RunKey{sample_id, replicate_id}.label();
    }
};

/// Entities x samples table of one quantitative measure, with explicit
/// missing cells. Rows are keyed by canonical species strings, bare
/// sequences, or protein accessions depending on the level.
struct QuantMatrix {
    Measure measure = Measure::spectral_count;
    Level level = Level::species;
    std::vector<std::string> entities;
    std::vector<SampleColumn> samples;
    std::vector<Cell> cells; // row-major, entities.size() * samples.size()

    Cell& cell(std::size_t entity, std::size_t sample) {
        return cells[entity * samples.size() + sample];
    }
    const Cell& cell(std::size_t entity, std::size_t sample) const {
        return cells[entity * samples.size() + sample];
    }
    std::size_t entity_index(const std::string& name) const;

    /// Indices of samples belonging to a group, in column order.
    std::vector<std::size_t> samples_in(Group g) const;
};

/// One fitting attempt, kept for reporting and diagnostics.
struct FitRecord {
    RunKey run;
    std::string species; // canonical
    FitResult result;
    bool attempted = false;
    bool success = false;
    std::string note; // "", "no_data", "window_too_small", "singular", ...
};

using RasterProvider = std::function<const Raster*(const RunKey&)>;

/// Species-level spectral counts per technical replicate. Cells follow the
/// observation rule: an identified species gets its count; a species not
/// identified in a run gets 0 when it was identified in another technical
/// replicate of the same biological sample, and is missing otherwise.
QuantMatrix spectral_counts(const std::vector<Identification>& ids,
                            const std::vector<RunKey>& runs,
                            const GroupMap& groups);

/// Convenience overload: the run list is taken from the identifications.
QuantMatrix spectral_counts(const std::vector<Identification>& ids,
                            const GroupMap& groups);

/// Species-level ion abundances per technical replicate: one fit per
/// (species, run), seeded from that species' lowest-fdr identification in
/// the run. Only quantifiable fits produce values; everything else is
/// missing, so the ion-quantified species of a run are a subset of the
/// count-quantified ones. Throws DataError when a referenced run has no
/// raster.
QuantMatrix ion_abundances(const std::vector<Identification>& ids,
                           const std::vector<RunKey>& runs,
                           const RasterProvider& rasters,
                           const GroupMap& groups,
                           std::vector<FitRecord>* fit_log = nullptr,
                           const FitOptions& fit_options = {});

/// Collapses technical replicates to one column per biological sample:
/// mean of the present values, the single present value, or missing.
QuantMatrix average_technical_replicates(const QuantMatrix& m);

/// Keeps entities present (non-missing) in at least k case samples or at
/// least k control samples, and drops rows whose non-missing values are all
/// <= 0.
QuantMatrix filter_min_presence(const QuantMatrix& m, int k);

/// Per-sample normalization. Spectral counts are scaled so every column
/// total equals the mean column total; ion abundances so every column
/// median equals the median of column medians. Missing cells stay missing.
/// A column without a positive value is an error naming the sample.
QuantMatrix normalize(const QuantMatrix& m);

void write_matrix(const std::filesystem::path&, const QuantMatrix&);
QuantMatrix read_matrix(const std::filesystem::path&, Measure, Level,
                        const GroupMap& groups);

void write_fit_records(const std::filesystem::path&,
                       const std::vector<FitRecord>&);
std::vector<FitRecord> read_fit_records(const std::filesystem::path&);

} // namespace lfq
