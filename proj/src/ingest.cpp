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
#include "lfq/ingest.hpp"

#include <algorithm>

#include "lfq/tsv.hpp"

namespace lfq {

const std::set<std::string>& ProteinMap::proteins_of(
    const std::string& sequence) const {
    auto it = entries.find(sequence);
    if (it == entries.end())
        throw DataError("sequence '" + sequence + "' is not in the protein map");
    return it->second;
}

std::size_t DesignTable::class_index(const std::string& cls) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i] == cls) return i;
    throw DataError("design has no class '" + cls + "'");
}

double DesignTable::abundance_of(const std::string& accession,
                                 std::size_t cls) const {
    for (const auto& row : rows)
        if (row.accession == accession) return row.abundance.at(cls);
    throw DataError("design has no protein '" + accession + "'");
}

std::vector<Identification> read_identifications(
    const std::filesystem::path& path) {
    TsvReader in(path, {"sample_id", "replicate_id", "species", "rt_sec", "mz",
                        "fdr"});
    std::vector<Identification> out;
    while (auto row = in.next()) {
        Identification id;
        id.sample_id = (*row)[0];
        id.replicate_id = (*row)[1];
        try {
            id.species = parse_species((*row)[2]);
        } catch (const ParseError& e) {
            in.fail(std::string("column 'species': ") + e.what());
        }
        id.retention_time = in.as_double((*row)[3], "rt_sec");
        id.precursor_mz = in.as_double((*row)[4], "mz");
        id.fdr = in.as_double((*row)[5], "fdr");
        if (id.retention_time < 0) in.fail("rt_sec must be >= 0");
        if (id.precursor_mz <= 0) in.fail("mz must be > 0");
        if (id.fdr < 0.0 || id.fdr > 1.0) in.fail("fdr must be in [0,1]");
        out.push_back(std::move(id));
    }
    return out;
}

Raster read_raster(const std::filesystem::path& path) {
    TsvReader in(path, {"rt_sec", "mz", "intensity"});
    Raster raster;

    // <sample_id>__<replicate_id>.raster.tsv
    std::string name = path.filename().string();
    const std::string suffix = ".raster.tsv";
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        name.resize(name.size() - suffix.size());
        std::size_t sep = name.find("__");
        if (sep != std::string::npos) {
            raster.sample_id = name.substr(0, sep);
            raster.replicate_id = name.substr(sep + 2);
        } else {
            raster.sample_id = name;
        }
    }

    while (auto row = in.next()) {
        RasterPoint p;
        p.time = in.as_double((*row)[0], "rt_sec");
        p.mz = in.as_double((*row)[1], "mz");
        p.intensity = in.as_double((*row)[2], "intensity");
        if (p.intensity < 0) in.fail("negative intensity");
        raster.points.push_back(p);
    }
    std::sort(raster.points.begin(), raster.points.end(),
              [](const RasterPoint& a, const RasterPoint& b) {
                  return std::tie(a.time, a.mz) < std::tie(b.time, b.mz);
              });
    for (std::size_t i = 1; i < raster.points.size(); ++i)
        if (raster.points[i].time == raster.points[i - 1].time &&
            raster.points[i].mz == raster.points[i - 1].mz)
            throw DataError(path.string() + ": duplicate (time, mz) point (" +
                            fmt_double(raster.points[i].time) + ", " +
                            fmt_double(raster.points[i].mz) + ")");
    return raster;
}

ProteinMap read_protein_map(const std::filesystem::path& path) {
    TsvReader in(path, {"sequence", "protein_accession"});
    ProteinMap pm;
    while (auto row = in.next()) {
        const std::string& seq = (*row)[0];
        const std::string& acc = (*row)[1];
        if (seq.empty()) in.fail("empty sequence");
        if (acc.empty()) in.fail("empty protein accession");
        for (char c : seq)
            if (!is_amino_acid(c))
                in.fail(std::string("non-amino-acid letter '") + c +
                        "' in sequence");
        pm.entries[seq].insert(acc);
    }
    return pm;
}

DesignTable read_design(const std::filesystem::path& path) {
    TsvReader in(path, {"protein_accession"}, 2);
    DesignTable design;
    design.classes.assign(in.header().begin() + 1, in.header().end());
    std::set<std::string> seen;
    while (auto row = in.next()) {
        DesignTable::Row r;
        r.accession = (*row)[0];
        if (r.accession.empty()) in.fail("empty protein accession");
        if (!seen.insert(r.accession).second)
            in.fail("duplicate protein accession '" + r.accession + "'");
        for (std::size_t c = 0; c < design.classes.size(); ++c) {
            double v = in.as_double((*row)[c + 1], design.classes[c]);
            if (v < 0) in.fail("abundance must be >= 0");
            r.abundance.push_back(v);
        }
        design.rows.push_back(std::move(r));
    }
    return design;
}

GroupMap read_groups(const std::filesystem::path& path) {
    TsvReader in(path, {"sample_id", "group"});
    GroupMap groups;
    while (auto row = in.next()) {
        if ((*row)[0].empty()) in.fail("empty sample_id");
        Group g;
        try {
            g = group_from_string((*row)[1]);
        } catch (const DataError& e) {
            in.fail(e.what());
        }
        if (!groups.emplace((*row)[0], g).second)
            in.fail("duplicate sample_id '" + (*row)[0] + "'");
    }
    return groups;
}

void write_groups(const std::filesystem::path& path, const GroupMap& groups) {
    TsvWriter out(path, {"sample_id", "group"});
    for (const auto& [sample, group] : groups)
        out.row({sample, to_string(group)});
}

std::map<std::string, std::string> read_protein_sequences(
    const std::filesystem::path& path) {
    TsvReader in(path, {"protein_accession", "sequence"});
    std::map<std::string, std::string> seqs;
    while (auto row = in.next()) {
        if ((*row)[0].empty()) in.fail("empty protein accession");
        if ((*row)[1].empty()) in.fail("empty sequence");
        if (!seqs.emplace((*row)[0], (*row)[1]).second)
            in.fail("duplicate protein accession '" + (*row)[0] + "'");
    }
    return seqs;
}

void write_protein_sequences(const std::filesystem::path& path,
                             const std::map<std::string, std::string>& seqs) {
    TsvWriter out(path, {"protein_accession", "sequence"});
    for (const auto& [acc, seq] : seqs) out.row({acc, seq});
}

void write_identifications(const std::filesystem::path& path,
                           const std::vector<Identification>& ids) {
    TsvWriter out(path,
                  {"sample_id", "replicate_id", "species", "rt_sec", "mz", "fdr"});
    for (const auto& id : ids)
        out.row({id.sample_id, id.replicate_id, render_species(id.species),
                 fmt_double(id.retention_time), fmt_double(id.precursor_mz),
                 fmt_double(id.fdr)});
}

void write_raster(const std::filesystem::path& path, const Raster& raster) {
    TsvWriter out(path, {"rt_sec", "mz", "intensity"});
    for (const auto& p : raster.points)
        out.row({fmt_double(p.time), fmt_double(p.mz), fmt_double(p.intensity)});
}

void write_protein_map(const std::filesystem::path& path, const ProteinMap& pm) {
    TsvWriter out(path, {"sequence", "protein_accession"});
    for (const auto& [seq, accs] : pm.entries)
        for (const auto& acc : accs) out.row({seq, acc});
}

void write_design(const std::filesystem::path& path, const DesignTable& design) {
    std::vector<std::string> header = {"protein_accession"};
    header.insert(header.end(), design.classes.begin(), design.classes.end());
    TsvWriter out(path, header);
    for (const auto& row : design.rows) {
        std::vector<std::string> fields = {row.accession};
        for (double v : row.abundance) fields.push_back(fmt_double(v));
        out.row(fields);
    }
}

std::vector<Identification> filter_by_fdr(const std::vector<Identification>& ids,
                                          double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw DataError("fdr threshold must be in (0, 1]");
    std::vector<Identification> out;
    out.reserve(ids.size());
    for (const auto& id : ids)
        if (id.fdr <= threshold) out.push_back(id);
    return out;
}

} // namespace lfq
