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

#include "lfq/quant.hpp"

namespace lfq {

/// Aggregates a matrix to a higher rollup level by simple summation.
/// Peptide groups collect all species sharing a primary sequence; protein
/// groups collect everything attributable to an accession, with shared
/// sequences counted toward every mapped protein. Missing cells are skipped;
/// a group with no present constituent stays missing. Sequences that cannot
/// be resolved through the protein map make a protein-level rollup fail with
/// an error listing the orphans.
QuantMatrix rollup_matrix(const QuantMatrix& m, Level target,
                          const ProteinMap& pm);

/// A protein's constituent entities at one rollup level, restricted to the
/// rows of a matrix. At protein level every protein is its own single
/// element.
struct ProteinElements {
    std::string accession;
    Level level = Level::species;
    std::vector<std::string> elements; // K = elements.size() >= 1
};

std::vector<ProteinElements> protein_elements(const ProteinMap& pm,
                                              const QuantMatrix& m,
                                              Level level);

} // namespace lfq
