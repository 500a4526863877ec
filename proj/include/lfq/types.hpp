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

#include <map>
#include <string>
#include <tuple>

#include "lfq/errors.hpp"

namespace lfq {

enum class Measure { spectral_count, ion_abundance };
enum class Level { species, peptide, protein };
enum class Group { cases, controls };

std::string to_string(Measure m);
std::string to_string(Level l);
std::string to_string(Group g);
Measure measure_from_string(const std::string& s);
Level level_from_string(const std::string& s);
Group group_from_string(const std::string& s);

/// One LC-MS/MS acquisition: a (biological sample, technical replicate) pair.
struct RunKey {
    std::string sample_id;
    std::string replicate_id;

    auto operator<=>(const RunKey&) const = default;

    /// Label used in matrix column headers and raster file names.
    std::string label() const {
        return replicate_id.empty() ? sample_id
                                    : sample_id + "__" + replicate_id;
    }
};

using GroupMap = std::map<std::string, Group>; // sample_id -> group

inline Group group_of(const GroupMap& groups, const std::string& sample_id) {
    auto it = groups.find(sample_id);
    if (it == groups.end())
        throw DataError("sample '" + sample_id + "' has no group assignment");
    return it->second;
}

} // namespace lfq
