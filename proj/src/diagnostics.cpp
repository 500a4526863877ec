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
#include "lfq/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "lfq/stats.hpp"

namespace lfq {

double pairwise_distance(const TimeExtent& a, const TimeExtent& b) {
    if (a.left > b.right) return a.left - b.right;
    if (b.left > a.right) return b.left - a.right;
    return 0.0;
}

std::string to_string(Cohort c) {
    switch (c) {
        case Cohort::zero: return "zero";
        case Cohort::positive: return "positive";
        default: return "missing";
    }
}

std::vector<InterferenceRecord> interference_distance(
    const std::map<std::string, std::map<std::string, TimeExtent>>& foreground,
    const std::map<std::string, std::vector<TimeExtent>>& background,
    const std::vector<std::string>& case_runs) {
    std::vector<InterferenceRecord> out;
    out.reserve(foreground.size());
    for (const auto& [species, extents] : foreground) {
        double sum = 0.0;
        int contributing = 0;
        for (const auto& run : case_runs) {
            auto fg = extents.find(run);
            if (fg == extents.end()) continue;
            auto bg = background.find(run);
            if (bg == background.end() || bg->second.empty()) continue;
            double min_d = pairwise_distance(fg->second, bg->second.front());
            for (std::size_t j = 1; j < bg->second.size(); ++j)
                min_d = std::min(min_d,
                                 pairwise_distance(fg->second, bg->second[j]));
            sum += min_d;
            ++contributing;
        }
        InterferenceRecord rec;
        rec.species = species;
        if (contributing > 0) {
            rec.distance = sum / contributing;
            rec.cohort = *rec.distance == 0.0 ? Cohort::zero : Cohort::positive;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::string to_string(TrypticStatus s) {
    switch (s) {
        case TrypticStatus::fully_tryptic: return "fully_tryptic";
        case TrypticStatus::strictly_semi_tryptic: return "strictly_semi_tryptic";
        default: return "non_tryptic";
    }
}

TrypticStatus classify_tryptic(const SpeciesKey& species,
                               const std::string& parent_sequence, int start,
                               bool proline_rule) {
    const std::string& seq = species.sequence;
    if (start < 1 ||
        static_cast<std::size_t>(start - 1) + seq.size() > parent_sequence.size() ||
        parent_sequence.compare(static_cast<std::size_t>(start - 1), seq.size(),
                                seq) != 0)
        throw DataError("classify_tryptic: species not found at offset " +
                        std::to_string(start));

    const std::size_t begin = static_cast<std::size_t>(start - 1);
    const std::size_t end = begin + seq.size(); // one past the last residue

    bool n_tryptic;
    if (begin == 0) {
        n_tryptic = true;
    } else {
        const char prev = parent_sequence[begin - 1];
        n_tryptic = (prev == 'K' || prev == 'R') &&
                    (!proline_rule || seq.front() != 'P');
    }

    bool c_tryptic;
    if (end == parent_sequence.size()) {
        c_tryptic = true;
    } else {
        const char last = seq.back();
        c_tryptic = (last == 'K' || last == 'R') &&
                    (!proline_rule || parent_sequence[end] != 'P');
    }

    if (n_tryptic && c_tryptic) return TrypticStatus::fully_tryptic;
    if (n_tryptic || c_tryptic) return TrypticStatus::strictly_semi_tryptic;
    return TrypticStatus::non_tryptic;
}

TrypticStatus best_tryptic_status(
    const SpeciesKey& species, const ProteinMap& pm,
    const std::map<std::string, std::string>& protein_sequences,
    bool proline_rule) {
    TrypticStatus best = TrypticStatus::non_tryptic;
    bool found = false;
    if (!pm.contains(species.sequence))
        throw DataError("best_tryptic_status: sequence '" + species.sequence +
                        "' is not in the protein map");
    for (const auto& acc : pm.proteins_of(species.sequence)) {
        auto seq_it = protein_sequences.find(acc);
        if (seq_it == protein_sequences.end()) continue;
        const std::string& parent = seq_it->second;
        std::size_t pos = parent.find(species.sequence);
        while (pos != std::string::npos) {
            found = true;
            TrypticStatus s = classify_tryptic(
                species, parent, static_cast<int>(pos) + 1, proline_rule);
            if (s < best) best = s; // enum order: fully < semi < non
            pos = parent.find(species.sequence, pos + 1);
        }
    }
    if (!found)
        throw DataError("best_tryptic_status: no protein context contains '" +
                        species.sequence + "'");
    return best;
}

std::vector<SemiTrypticProfile> semi_tryptic_profile(
    const QuantMatrix& m,
    const std::map<std::string, TrypticStatus>& status_by_entity) {
    std::vector<bool> semi(m.entities.size());
    for (std::size_t e = 0; e < m.entities.size(); ++e) {
        auto it = status_by_entity.find(m.entities[e]);
        if (it == status_by_entity.end())
            throw DataError("semi_tryptic_profile: no tryptic status for '" +
                            m.entities[e] + "'");
        semi[e] = it->second == TrypticStatus::strictly_semi_tryptic;
    }

    std::vector<SemiTrypticProfile> out;
    out.reserve(m.samples.size());
    for (std::size_t j = 0; j < m.samples.size(); ++j) {
        SemiTrypticProfile p;
        p.sample_label = m.samples[j].label();
        double semi_sum = 0.0, total = 0.0;
        for (std::size_t e = 0; e < m.entities.size(); ++e) {
            const Cell& c = m.cell(e, j);
            if (!c) continue;
            total += *c;
            if (semi[e]) {
                ++p.semi_count;
                semi_sum += *c;
            }
        }
        p.semi_abundance_fraction = total > 0.0 ? semi_sum / total : 0.0;
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<StratumSummary> stratified_w(
    const std::vector<std::pair<std::string, double>>& labeled_w) {
    std::map<std::string, std::vector<double>> by_stratum;
    for (const auto& [label, w] : labeled_w) by_stratum[label].push_back(w);

    std::vector<StratumSummary> out;
    out.reserve(by_stratum.size());
    for (auto& [label, ws] : by_stratum) {
        StratumSummary s;
        s.stratum = label;
        s.count = static_cast<int>(ws.size());
        for (double w : ws) {
            int bin = static_cast<int>(std::floor((w + 1.0) / 0.1));
            s.histogram[static_cast<std::size_t>(std::clamp(bin, 0, 19))]++;
        }
        s.median_w = median(std::move(ws));
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace lfq
