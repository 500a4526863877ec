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
#include "lfq/quant.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "lfq/tsv.hpp"

namespace lfq {

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<RunKey> sorted_unique_runs(std::vector<RunKey> runs) {
    std::sort(runs.begin(), runs.end());
    runs.erase(std::unique(runs.begin(), runs.end()), runs.end());
    return runs;
}

std::vector<RunKey> runs_of(const std::vector<Identification>& ids) {
    std::vector<RunKey> runs;
    runs.reserve(ids.size());
    for (const auto& id : ids) runs.push_back({id.sample_id, id.replicate_id});
    return sorted_unique_runs(std::move(runs));
}

std::vector<std::string> sorted_species(const std::vector<Identification>& ids) {
    std::set<std::string> keys;
    for (const auto& id : ids) keys.insert(render_species(id.species));
    return {keys.begin(), keys.end()};
}

std::vector<SampleColumn> columns_for(const std::vector<RunKey>& runs,
                                      const GroupMap& groups) {
    std::vector<SampleColumn> cols;
    cols.reserve(runs.size());
    for (const auto& run : runs)
        cols.push_back({run.sample_id, run.replicate_id,
                        group_of(groups, run.sample_id)});
    return cols;
}

} // namespace

std::size_t QuantMatrix::entity_index(const std::string& name) const {
    auto it = std::lower_bound(entities.begin(), entities.end(), name);
    if (it == entities.end() || *it != name)
        throw DataError("matrix has no entity '" + name + "'");
    return static_cast<std::size_t>(it - entities.begin());
}

std::vector<std::size_t> QuantMatrix::samples_in(Group g) const {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < samples.size(); ++j)
        if (samples[j].group == g) idx.push_back(j);
    return idx;
}

QuantMatrix spectral_counts(const std::vector<Identification>& ids,
                            const std::vector<RunKey>& runs,
                            const GroupMap& groups) {
    QuantMatrix m;
    m.measure = Measure::spectral_count;
    m.level = Level::species;
    m.entities = sorted_species(ids);
    auto run_list = sorted_unique_runs(runs);
    m.samples = columns_for(run_list, groups);
    m.cells.assign(m.entities.size() * m.samples.size(), std::nullopt);

    std::map<std::pair<std::size_t, std::size_t>, double> counts;
    for (const auto& id : ids) {
        const std::size_t e = m.entity_index(render_species(id.species));
        const RunKey run{id.sample_id, id.replicate_id};
        auto it = std::lower_bound(run_list.begin(), run_list.end(), run);
        if (it == run_list.end() || !(*it == run))
            throw DataError("identification references unknown run '" +
                            run.label() + "'");
        counts[{e, static_cast<std::size_t>(it - run_list.begin())}] += 1.0;
    }

    for (std::size_t e = 0; e < m.entities.size(); ++e) {
        for (std::size_t j = 0; j < m.samples.size(); ++j) {
            auto it = counts.find({e, j});
            if (it != counts.end()) {
                m.cell(e, j) = it->second;
                continue;
            }
            // Zero only when the species was seen in a sibling replicate of
            // the same biological sample; otherwise it is unobserved.
            bool seen_in_sample = false;
            for (std::size_t j2 = 0; j2 < m.samples.size() && !seen_in_sample;
                 ++j2)
                if (j2 != j &&
                    m.samples[j2].sample_id == m.samples[j].sample_id &&
                    counts.count({e, j2}))
                    seen_in_sample = true;
            if (seen_in_sample) m.cell(e, j) = 0.0;
        }
    }
    return m;
}

QuantMatrix spectral_counts(const std::vector<Identification>& ids,
                            const GroupMap& groups) {
    return spectral_counts(ids, runs_of(ids), groups);
}

QuantMatrix ion_abundances(const std::vector<Identification>& ids,
                           const std::vector<RunKey>& runs,
                           const RasterProvider& rasters,
                           const GroupMap& groups,
                           std::vector<FitRecord>* fit_log,
                           const FitOptions& fit_options) {
    QuantMatrix m;
    m.measure = Measure::ion_abundance;
    m.level = Level::species;
    m.entities = sorted_species(ids);
    auto run_list = sorted_unique_runs(runs);
    m.samples = columns_for(run_list, groups);
    m.cells.assign(m.entities.size() * m.samples.size(), std::nullopt);

    // Best (lowest-fdr) identification per (run, species), keyed run-major
    // so each raster is visited exactly once.
    std::map<std::pair<std::size_t, std::size_t>, const Identification*> seeds;
    for (const auto& id : ids) {
        const std::size_t e = m.entity_index(render_species(id.species));
        const RunKey run{id.sample_id, id.replicate_id};
        auto it = std::lower_bound(run_list.begin(), run_list.end(), run);
        if (it == run_list.end() || !(*it == run))
            throw DataError("identification references unknown run '" +
                            run.label() + "'");
        const std::size_t j = static_cast<std::size_t>(it - run_list.begin());
        auto [pos, inserted] = seeds.try_emplace({j, e}, &id);
        if (!inserted && id.fdr < pos->second->fdr) pos->second = &id;
    }

    const Raster* raster = nullptr;
    std::size_t raster_run = static_cast<std::size_t>(-1);
    for (const auto& [key, hint] : seeds) {
        const auto [j, e] = key;
        if (j != raster_run) {
            raster = rasters(run_list[j]);
            if (!raster)
                throw DataError("no raster available for run '" +
                                run_list[j].label() + "'");
            raster_run = j;
        }

        FitRecord record;
        record.run = run_list[j];
        record.species = m.entities[e];
        Raster window = extract_window(*raster, hint->retention_time,
                                       hint->precursor_mz, hint->species.charge);
        try {
            if (window.points.size() < 8) {
                record.note = "window_too_small";
            } else {
                FeatureParams guess = initial_guess(window, *hint);
                record.result = fit_feature(window, guess, fit_options);
                record.attempted = true;
                if (quantifiable(record.result)) {
                    record.success = true;
                    m.cell(e, j) = record.result.abundance;
                } else {
                    record.note = record.result.converged ? "residual_gate"
                                                          : "not_converged";
                }
            }
        } catch (const NoDataError&) {
            record.note = "no_data";
        } catch (const SingularNormalEquations&) {
            record.attempted = true;
            record.note = "singular";
        }
        if (fit_log) fit_log->push_back(std::move(record));
    }
    return m;
}

QuantMatrix average_technical_replicates(const QuantMatrix& m) {
    QuantMatrix out;
    out.measure = m.measure;
    out.level = m.level;
    out.entities = m.entities;

    std::vector<std::pair<SampleColumn, std::vector<std::size_t>>> grouped;
    for (std::size_t j = 0; j < m.samples.size(); ++j) {
        auto it = std::find_if(grouped.begin(), grouped.end(), [&](const auto& g) {
            return g.first.sample_id == m.samples[j].sample_id;
        });
        if (it == grouped.end()) {
            grouped.push_back(
                {{m.samples[j].sample_id, "", m.samples[j].group}, {j}});
        } else {
            it->second.push_back(j);
        }
    }
    std::sort(grouped.begin(), grouped.end(), [](const auto& a, const auto& b) {
        return a.first.sample_id < b.first.sample_id;
    });

    for (auto& [col, idx] : grouped) out.samples.push_back(col);
    out.cells.assign(out.entities.size() * out.samples.size(), std::nullopt);
    for (std::size_t e = 0; e < out.entities.size(); ++e) {
        for (std::size_t s = 0; s < grouped.size(); ++s) {
            double sum = 0.0;
            int present = 0;
            for (std::size_t j : grouped[s].second) {
                if (m.cell(e, j)) {
                    sum += *m.cell(e, j);
                    ++present;
                }
            }
            if (present > 0) out.cell(e, s) = sum / present;
        }
    }
    return out;
}

QuantMatrix filter_min_presence(const QuantMatrix& m, int k) {
    if (k < 1) throw DataError("min presence k must be >= 1");
    const auto case_idx = m.samples_in(Group::cases);
    const auto ctrl_idx = m.samples_in(Group::controls);

    QuantMatrix out;
    out.measure = m.measure;
    out.level = m.level;
    out.samples = m.samples;

    std::vector<std::size_t> kept;
    for (std::size_t e = 0; e < m.entities.size(); ++e) {
        int in_case = 0, in_ctrl = 0;
        bool any_positive = false;
        for (std::size_t j : case_idx)
            if (m.cell(e, j)) {
                ++in_case;
                if (*m.cell(e, j) > 0) any_positive = true;
            }
        for (std::size_t j : ctrl_idx)
            if (m.cell(e, j)) {
                ++in_ctrl;
                if (*m.cell(e, j) > 0) any_positive = true;
            }
        if ((in_case >= k || in_ctrl >= k) && any_positive) kept.push_back(e);
    }

    for (std::size_t e : kept) out.entities.push_back(m.entities[e]);
    out.cells.reserve(kept.size() * m.samples.size());
    for (std::size_t e : kept)
        for (std::size_t j = 0; j < m.samples.size(); ++j)
            out.cells.push_back(m.cell(e, j));
    return out;
}

QuantMatrix normalize(const QuantMatrix& m) {
    if (m.entities.empty()) return m;

    const std::size_t n_samples = m.samples.size();
    std::vector<double> anchor(n_samples, 0.0);

    for (std::size_t j = 0; j < n_samples; ++j) {
        std::vector<double> present;
        bool any_positive = false;
        for (std::size_t e = 0; e < m.entities.size(); ++e)
            if (m.cell(e, j)) {
                present.push_back(*m.cell(e, j));
                if (*m.cell(e, j) > 0) any_positive = true;
            }
        if (!any_positive)
            throw DataError("normalize: sample '" + m.samples[j].label() +
                            "' has no positive values");
        if (m.measure == Measure::spectral_count) {
            double total = 0.0;
            for (double v : present) total += v;
            anchor[j] = total;
        } else {
            anchor[j] = median_of(std::move(present));
        }
        if (!(anchor[j] > 0))
            throw DataError("normalize: sample '" + m.samples[j].label() +
                            "' has a nonpositive scale denominator");
    }

    double center;
    if (m.measure == Measure::spectral_count) {
        center = 0.0;
        for (double t : anchor) center += t;
        center /= static_cast<double>(n_samples);
    } else {
        center = median_of(anchor);
    }

    QuantMatrix out = m;
    for (std::size_t j = 0; j < n_samples; ++j) {
        const double scale = center / anchor[j];
        for (std::size_t e = 0; e < m.entities.size(); ++e)
            if (out.cell(e, j)) out.cell(e, j) = *out.cell(e, j) * scale;
    }
    return out;
}

void write_matrix(const std::filesystem::path& path, const QuantMatrix& m) {
    std::vector<std::string> header = {"entity"};
    for (const auto& col : m.samples) header.push_back(col.label());
    TsvWriter out(path, header);
    for (std::size_t e = 0; e < m.entities.size(); ++e) {
        std::vector<std::string> row = {m.entities[e]};
        for (std::size_t j = 0; j < m.samples.size(); ++j)
            row.push_back(m.cell(e, j) ? fmt_double(*m.cell(e, j)) : "NA");
        out.row(row);
    }
}

QuantMatrix read_matrix(const std::filesystem::path& path, Measure measure,
                        Level level, const GroupMap& groups) {
    TsvReader in(path, {"entity"}, 2);
    QuantMatrix m;
    m.measure = measure;
    m.level = level;
    for (std::size_t c = 1; c < in.header().size(); ++c) {
        const std::string& label = in.header()[c];
        SampleColumn col;
        std::size_t sep = label.find("__");
        if (sep == std::string::npos) {
            col.sample_id = label;
        } else {
            col.sample_id = label.substr(0, sep);
            col.replicate_id = label.substr(sep + 2);
        }
        col.group = group_of(groups, col.sample_id);
        m.samples.push_back(std::move(col));
    }
    std::vector<std::vector<std::string>> rows;
    while (auto row = in.next()) {
        m.entities.push_back((*row)[0]);
        for (std::size_t j = 0; j < m.samples.size(); ++j) {
            const std::string& field = (*row)[j + 1];
            if (field == "NA") {
                m.cells.push_back(std::nullopt);
            } else {
                double v = in.as_double(field, m.samples[j].label());
                if (v < 0) in.fail("negative cell value");
                m.cells.push_back(v);
            }
        }
    }
    // Entity lookups assume sorted row keys.
    if (!std::is_sorted(m.entities.begin(), m.entities.end())) {
        std::vector<std::size_t> order(m.entities.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return m.entities[a] < m.entities[b];
        });
        QuantMatrix sorted = m;
        for (std::size_t i = 0; i < order.size(); ++i) {
            sorted.entities[i] = m.entities[order[i]];
            for (std::size_t j = 0; j < m.samples.size(); ++j)
                sorted.cell(i, j) = m.cell(order[i], j);
        }
        return sorted;
    }
    return m;
}

void write_fit_records(const std::filesystem::path& path,
                       const std::vector<FitRecord>& records) {
    TsvWriter out(path, {"sample_id", "replicate_id", "species", "A", "mu",
                         "sigma", "zeta0", "delta", "lambda", "rho", "n_peaks",
                         "residual", "converged", "abundance"});
    for (const auto& r : records) {
        const FeatureParams& p = r.result.params;
        out.row({r.run.sample_id, r.run.replicate_id, r.species,
                 fmt_double(p.amplitude), fmt_double(p.mu), fmt_double(p.sigma),
                 fmt_double(p.zeta0), fmt_double(p.delta), fmt_double(p.lambda),
                 fmt_double(p.rho), fmt_int(p.n_peaks),
                 fmt_double(r.result.residual_norm),
                 r.success ? "1" : "0", fmt_double(r.result.abundance)});
    }
}

std::vector<FitRecord> read_fit_records(const std::filesystem::path& path) {
    TsvReader in(path, {"sample_id", "replicate_id", "species", "A", "mu",
                        "sigma", "zeta0", "delta", "lambda", "rho", "n_peaks",
                        "residual", "converged", "abundance"});
    std::vector<FitRecord> records;
    while (auto row = in.next()) {
        FitRecord r;
        r.run = {(*row)[0], (*row)[1]};
        r.species = (*row)[2];
        FeatureParams& p = r.result.params;
        p.amplitude = in.as_double((*row)[3], "A");
        p.mu = in.as_double((*row)[4], "mu");
        p.sigma = in.as_double((*row)[5], "sigma");
        p.zeta0 = in.as_double((*row)[6], "zeta0");
        p.delta = in.as_double((*row)[7], "delta");
        p.lambda = in.as_double((*row)[8], "lambda");
        p.rho = in.as_double((*row)[9], "rho");
        p.n_peaks = static_cast<int>(in.as_int((*row)[10], "n_peaks"));
        r.result.residual_norm = in.as_double((*row)[11], "residual");
        const std::string& flag = (*row)[12];
        if (flag != "0" && flag != "1") in.fail("converged must be 0 or 1");
        r.success = flag == "1";
        r.result.converged = r.success;
        r.attempted = true;
        r.result.abundance = in.as_double((*row)[13], "abundance");
        records.push_back(std::move(r));
    }
    return records;
}

} // namespace lfq
