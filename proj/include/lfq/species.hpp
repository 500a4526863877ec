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

#include <string>
#include <string_view>
#include <vector>

#include "lfq/errors.hpp"

namespace lfq {

/// Absolute tolerance for comparing modification masses (Daltons). The
/// canonical rendering keeps three decimals, so anything closer than half a
/// rendering step is the same mass.
inline constexpr double kModMassTolerance = 5e-4;

inline bool same_mass(double a, double b) {
    double d = a - b;
    return (d < 0 ? -d : d) <= kModMassTolerance;
}

/// A chemical modification: net mass change attached to one residue.
struct Modification {
    int position = 0; // 1-based index into the sequence
    double mass = 0.0; // Daltons

    bool operator==(const Modification& o) const {
        return position == o.position && same_mass(mass, o.mass);
    }
};

/// Identity of a quantifiable entity: primary amino acid sequence, its
/// modifications, and the charge state. One species corresponds to one
/// feature in (retention time, m/z) space.
///
/// Canonical text form: sequence letters with each modified residue followed
/// by "[<mass to 3 decimals>]", then "+<charge>". Example:
/// DEDTQAM[147.035]PFR+2 is DEDTQAMPFR with a 147.035 Da modification on
/// residue 7 and charge 2.
struct SpeciesKey {
    std::string sequence;
    std::vector<Modification> modifications; // positions strictly increasing
    int charge = 1;

    bool operator==(const SpeciesKey& o) const {
        return sequence == o.sequence && charge == o.charge &&
               modifications == o.modifications;
    }
};

/// True for the 20 standard amino acid letters (upper case).
bool is_amino_acid(char c);

/// Parses the canonical text form. Throws ParseError carrying the byte
/// offset of the offending character for: a non-amino-acid letter, a
/// modification bracket outside a residue context, or a malformed charge
/// suffix.
SpeciesKey parse_species(std::string_view text);

/// Canonical rendering; parse_species(render_species(k)) == k for any valid
/// key, and render(parse(text)) is the canonical form of any parseable text.
std::string render_species(const SpeciesKey& key);

/// Validates the SpeciesKey invariants, throwing DataError on violation.
void validate(const SpeciesKey& key);

} // namespace lfq
