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
#include "lfq/rollup.hpp"

#include <algorithm>
#include <map>

namespace lfq {

namespace {

std::string sequence_of_entity(const QuantMatrix& m, const std::string& entity) {
    return m.level == Level::species ? parse_species(entity).sequence : entity;
}

[[noreturn]] void orphan_error(const std::vector<std::string>& orphans) {
    std::string msg = "protein rollup: sequences missing from the protein map:";
    for (const auto& s : orphans) msg += " " + s;
    throw DataError(msg);
}

} // namespace

QuantMatrix rollup_matrix(const QuantMatrix& m, Level target,
                          const ProteinMap& pm) {
    if (m.level == Level::protein || target <= m.level)
        throw DataError("rollup target must be a higher level than the input");

    // group key -> member row indices, in row order
    std::map<std::string, std::vector<std::size_t>> members;
    std::vector<std::string> orphans;
    for (std::size_t e = 0; e < m.entities.size(); ++e) {
        const std::string seq = sequence_of_entity(m, m.entities[e]);
        if (target == Level::peptide) {
            members[seq].push_back(e);
        } else {
            if (!pm.contains(seq)) {
                orphans.push_back(seq);
                continue;
            }
            for (const auto& acc : pm.proteins_of(seq))
                members[acc].push_back(e);
        }
    }
    if (!orphans.empty()) {
        std::sort(orphans.begin(), orphans.end());
        orphans.erase(std::unique(orphans.begin(), orphans.end()),
                      orphans.end());
        orphan_error(orphans);
    }

    QuantMatrix out;
    out.measure = m.measure;
    out.level = target;
    out.samples = m.samples;
    for (const auto& [key, rows] : members) out.entities.push_back(key);
    out.cells.assign(out.entities.size() * out.samples.size(), std::nullopt);

    std::size_t g = 0;
    for (const auto& [key, rows] : members) {
        for (std::size_t j = 0; j < m.samples.size(); ++j) {
            double sum = 0.0;
            bool present = false;
            for (std::size_t e : rows) {
                if (m.cell(e, j)) {
                    sum += *m.cell(e, j);
                    present = true;
                }
            }
            if (present) out.cell(g, j) = sum;
        }
        ++g;
    }
    return out;
}

std::vector<ProteinElements> protein_elements(const ProteinMap& pm,
                                              const QuantMatrix& m,
                                              Level level) {
    if (level != m.level)
        throw DataError("protein_elements: level does not match the matrix");

    std::map<std::string, std::vector<std::string>> by_protein;
    if (level == Level::protein) {
        for (const auto& acc : m.entities) by_protein[acc] = {acc};
    } else {
        std::vector<std::string> orphans;
        for (const auto& entity : m.entities) {
            const std::string seq = sequence_of_entity(m, entity);
            if (!pm.contains(seq)) {
                orphans.push_back(seq);
                continue;
            }
            for (const auto& acc : pm.proteins_of(seq))
                by_protein[acc].push_back(entity);
        }
        if (!orphans.empty()) {
            std::sort(orphans.begin(), orphans.end());
            orphans.erase(std::unique(orphans.begin(), orphans.end()),
                          orphans.end());
            orphan_error(orphans);
        }
    }

    std::vector<ProteinElements> out;
    out.reserve(by_protein.size());
    for (auto& [acc, elements] : by_protein)
        out.push_back({acc, level, std::move(elements)});
    return out;
}

} // namespace lfq
