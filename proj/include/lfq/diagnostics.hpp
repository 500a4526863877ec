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
#include <map>

#include "lfq/feature.hpp"
#include "lfq/quant.hpp"

namespace lfq {

/// Minimum time separating two 2-sigma extents; exactly 0 when they
/// intersect (the features can compete for ions). Symmetric.
double pairwise_distance(const TimeExtent& a, const TimeExtent& b);

enum class Cohort { zero, positive, missing };
std::string to_string(Cohort c);

/// Interference distance of one foreground species: the mean over case
/// samples of the minimum distance from its extent to any background extent
/// in the same sample.
struct InterferenceRecord {
    std::string species;
    std::optional<double> distance; // seconds; nullopt when not computable
    Cohort cohort = Cohort::missing;
};

/// `foreground` maps species -> (run label -> extent) for runs where the
/// species' feature was quantified; `background` maps run label -> extents
/// of all competing features in that run. Runs where the foreground feature
/// or every background feature is absent contribute nothing; a species with
/// no contributing run lands in the missing cohort.
std::vector<InterferenceRecord> interference_distance(
    const std::map<std::string, std::map<std::string, TimeExtent>>& foreground,
    const std::map<std::string, std::vector<TimeExtent>>& background,
    const std::vector<std::string>& case_runs);

enum class TrypticStatus { fully_tryptic, strictly_semi_tryptic, non_tryptic };
std::string to_string(TrypticStatus s);

/// Trypsin consistency of a species occurrence inside a parent protein
/// sequence (`start` is 1-based). An end is tryptic when it coincides with a
/// protein terminus or lies after K/R; with the proline rule enabled a cut
/// followed by P does not count.
TrypticStatus classify_tryptic(const SpeciesKey& species,
                               const std::string& parent_sequence, int start,
                               bool proline_rule = true);

/// Most tryptic status over every occurrence of the species' sequence in
/// every mapped protein (fully > semi > non). Throws DataError when no
/// occurrence exists.
TrypticStatus best_tryptic_status(
    const SpeciesKey& species, const ProteinMap& pm,
    const std::map<std::string, std::string>& protein_sequences,
    bool proline_rule = true);

struct SemiTrypticProfile {
    std::string sample_label;
    int semi_count = 0;
    double semi_abundance_fraction = 0.0;
};

/// Per-sample count of strictly semi-tryptic species with a present cell and
/// the fraction of that sample's total (present) abundance they contribute.
std::vector<SemiTrypticProfile> semi_tryptic_profile(
    const QuantMatrix& m,
    const std::map<std::string, TrypticStatus>& status_by_entity);

/// Per-stratum summary of a set of w values: count, median, and a histogram
/// over [-1, 1] in 0.1-wide bins.
struct StratumSummary {
    std::string stratum;
    int count = 0;
    double median_w = 0.0;
    std::array<int, 20> histogram{};
};

std::vector<StratumSummary> stratified_w(
    const std::vector<std::pair<std::string, double>>& labeled_w);

} // namespace lfq
