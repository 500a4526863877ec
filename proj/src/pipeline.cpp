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
#include "lfq/pipeline.hpp"

#include <algorithm>

namespace lfq {

QuantifyOutput run_quantify(const std::vector<Identification>& ids,
                            const std::vector<RunKey>& runs,
                            const RasterProvider& rasters,
                            const GroupMap& groups,
                            const QuantifyOptions& options) {
    QuantifyOutput out;
    out.ids_total = ids.size();
    const auto passing = filter_by_fdr(ids, options.fdr_threshold);
    out.ids_passing = passing.size();

    out.counts_replicate = spectral_counts(passing, runs, groups);
    out.abundance_replicate = ion_abundances(passing, runs, rasters, groups,
                                             &out.fits, options.fit_options);
    out.species_counted = out.counts_replicate.entities.size();
    for (const auto& f : out.fits) {
        if (f.attempted) ++out.fits_attempted;
        if (f.attempted && f.result.converged) ++out.fits_converged;
        if (f.success) ++out.fits_successful;
    }

    auto finalize = [&](const QuantMatrix& m) {
        QuantMatrix averaged = average_technical_replicates(m);
        QuantMatrix filtered = filter_min_presence(averaged, options.min_presence);
        return normalize(filtered);
    };
    out.counts_final = finalize(out.counts_replicate);
    out.abundance_final = finalize(out.abundance_replicate);
    return out;
}

namespace {

bool matches_prefix(const std::string& s, const std::string& prefix) {
    return !prefix.empty() && s.size() >= prefix.size() &&
           s.compare(0, prefix.size(), prefix) == 0;
}

/// A species belongs to a class when any of its proteins carries the prefix.
bool species_in_class(const ProteinMap& pm, const std::string& canonical,
                      const std::string& prefix) {
    if (prefix.empty()) return true;
    const std::string seq = parse_species(canonical).sequence;
    if (!pm.contains(seq)) return false;
    for (const auto& acc : pm.proteins_of(seq))
        if (matches_prefix(acc, prefix)) return true;
    return false;
}

} // namespace

DiagnoseOutput run_diagnose(
    const std::vector<FitRecord>& fits, const QuantMatrix& abundance,
    const GroupMap& groups, const ProteinMap& pm,
    const std::map<std::string, std::string>& protein_sequences,
    const DiagnoseOptions& options) {
    DiagnoseOutput out;

    // extents of successfully fitted features, split into the analyzed
    // (foreground) and competing (background) classes
    std::map<std::string, std::map<std::string, TimeExtent>> fg_extents;
    std::map<std::string, std::vector<TimeExtent>> bg_extents;
    std::set<std::string> case_run_labels;
    for (const auto& rec : fits) {
        const std::string label = rec.run.label();
        if (group_of(groups, rec.run.sample_id) == Group::cases)
            case_run_labels.insert(label);
        if (!rec.success) continue;
        const bool is_background =
            !options.background_prefix.empty() &&
            species_in_class(pm, rec.species, options.background_prefix);
        if (is_background)
            bg_extents[label].push_back(extent_2sigma(rec.result.params));
        else if (options.foreground_prefix.empty() ||
                 species_in_class(pm, rec.species, options.foreground_prefix))
            fg_extents[rec.species][label] = extent_2sigma(rec.result.params);
    }
    const std::vector<std::string> case_runs(case_run_labels.begin(),
                                             case_run_labels.end());
    out.interference = interference_distance(fg_extents, bg_extents, case_runs);
    for (const auto& rec : out.interference)
        out.cohort_of[rec.species] = rec.cohort;

    // per-species w over the biological-sample matrix
    const MissingPolicy policy = missing_policy_for(abundance.measure);
    const auto case_idx = abundance.samples_in(Group::cases);
    const auto ctrl_idx = abundance.samples_in(Group::controls);
    std::vector<std::pair<std::string, double>> abundance_labeled;
    std::vector<std::pair<std::string, double>> missing_labeled;
    std::vector<std::pair<std::string, double>> cohort_labeled;

    std::vector<double> control_totals;
    std::vector<std::size_t> fg_rows;
    for (std::size_t e = 0; e < abundance.entities.size(); ++e) {
        const std::string& entity = abundance.entities[e];
        if (!options.foreground_prefix.empty() &&
            !species_in_class(pm, entity, options.foreground_prefix))
            continue;
        if (!options.background_prefix.empty() &&
            species_in_class(pm, entity, options.background_prefix))
            continue;
        std::vector<Cell> case_cells, ctrl_cells;
        for (std::size_t j : case_idx) case_cells.push_back(abundance.cell(e, j));
        for (std::size_t j : ctrl_idx) ctrl_cells.push_back(abundance.cell(e, j));
        const auto w = options.rank_control
                           ? element_w(ctrl_cells, case_cells, policy)
                           : element_w(case_cells, ctrl_cells, policy);
        if (!w) continue;
        out.species_w.emplace_back(entity, *w);
        fg_rows.push_back(e);
        double total = 0.0;
        for (std::size_t j : ctrl_idx)
            if (abundance.cell(e, j)) total += *abundance.cell(e, j);
        control_totals.push_back(total);
    }

    if (!fg_rows.empty()) {
        const double abundance_split = median(control_totals);
        const int n_ctrl = static_cast<int>(ctrl_idx.size());
        const int missing_threshold = (n_ctrl + 1) / 2;
        const std::string low_label =
            "missing_0_" + std::to_string(missing_threshold - 1);
        const std::string high_label = "missing_" +
                                       std::to_string(missing_threshold) + "_" +
                                       std::to_string(n_ctrl);
        for (std::size_t i = 0; i < fg_rows.size(); ++i) {
            const auto& [species, w] = out.species_w[i];
            abundance_labeled.emplace_back(control_totals[i] <= abundance_split
                                               ? "abundance_low"
                                               : "abundance_high",
                                           w);
            int missing = 0;
            for (std::size_t j : ctrl_idx)
                if (!abundance.cell(fg_rows[i], j)) ++missing;
            missing_labeled.emplace_back(
                missing < missing_threshold ? low_label : high_label, w);
            auto cohort = out.cohort_of.find(species);
            cohort_labeled.emplace_back(
                cohort == out.cohort_of.end() ? "missing"
                                              : to_string(cohort->second),
                w);
        }
        out.by_abundance = stratified_w(abundance_labeled);
        out.by_missingness = stratified_w(missing_labeled);
        out.by_cohort = stratified_w(cohort_labeled);
    }

    if (!protein_sequences.empty()) {
        for (const auto& entity : abundance.entities)
            out.tryptic_status[entity] = best_tryptic_status(
                parse_species(entity), pm, protein_sequences,
                options.proline_rule);
        out.semi_profile = semi_tryptic_profile(abundance, out.tryptic_status);
    }
    return out;
}

} // namespace lfq
