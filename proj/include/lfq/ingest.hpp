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

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lfq/species.hpp"
#include "lfq/types.hpp"

namespace lfq {

/// One quality-scored MS/MS identification of a species in a run.
struct Identification {
    std::string sample_id;
    std::string replicate_id;
    SpeciesKey species;
    double retention_time = 0.0; // seconds
    double precursor_mz = 0.0;   // Thomson
    double fdr = 0.0;            // [0, 1]
};

struct RasterPoint {
    double time = 0.0;      // seconds
    double mz = 0.0;        // Thomson
    double intensity = 0.0; // >= 0
};

/// Extracted scan intensities of one run as a sparse point list,
/// sorted by (time, mz) with no duplicate coordinates.
struct Raster {
    std::string sample_id;
    std::string replicate_id;
    std::vector<RasterPoint> points;
};

/// sequence -> set of protein accessions; shared sequences map to all of
/// their proteins.
struct ProteinMap {
    std::map<std::string, std::set<std::string>> entries;

    const std::set<std::string>& proteins_of(const std::string& sequence) const;
    bool contains(const std::string& sequence) const {
        return entries.count(sequence) != 0;
    }
};

/// Mixture design: per-protein abundance for each sample class.
struct DesignTable {
    std::vector<std::string> classes;
    struct Row {
        std::string accession;
        std::vector<double> abundance; // parallel to classes
    };
    std::vector<Row> rows;

    std::size_t class_index(const std::string& cls) const;
    double abundance_of(const std::string& accession, std::size_t cls) const;
};

/// Readers. All are pure functions of file contents and throw ParseError
/// with the offending 1-based row number on malformed input.
///
/// identifications TSV: sample_id  replicate_id  species  rt_sec  mz  fdr
std::vector<Identification> read_identifications(const std::filesystem::path&);

/// raster TSV: rt_sec  mz  intensity. Rows may arrive unsorted; they are
/// sorted on load. Negative intensities and duplicate (time, mz) pairs are
/// rejected. sample/replicate ids are taken from the
/// `<sample_id>__<replicate_id>.raster.tsv` filename pattern when present.
Raster read_raster(const std::filesystem::path&);

/// protein map TSV: sequence  protein_accession (one row per pair).
ProteinMap read_protein_map(const std::filesystem::path&);

/// design TSV: protein_accession  <class1>  <class2> ...
DesignTable read_design(const std::filesystem::path&);

/// groups TSV: sample_id  group  with group in {case, control}.
GroupMap read_groups(const std::filesystem::path&);
void write_groups(const std::filesystem::path&, const GroupMap&);

/// protein sequences TSV: protein_accession  sequence.
std::map<std::string, std::string> read_protein_sequences(const std::filesystem::path&);
void write_protein_sequences(const std::filesystem::path&,
                             const std::map<std::string, std::string>&);

void write_identifications(const std::filesystem::path&,
                           const std::vector<Identification>&);
void write_raster(const std::filesystem::path&, const Raster&);
void write_protein_map(const std::filesystem::path&, const ProteinMap&);
void write_design(const std::filesystem::path&, const DesignTable&);

/// Keeps exactly the identifications with fdr <= threshold, in stable order.
std::vector<Identification> filter_by_fdr(const std::vector<Identification>& ids,
                                          double threshold);

} // namespace lfq
