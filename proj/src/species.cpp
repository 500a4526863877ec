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
#include "lfq/species.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "lfq/errors.hpp"

namespace lfq {

bool is_amino_acid(char c) {
    switch (c) {
        case 'A': case 'C': case 'D': case 'E': case 'F': case 'G': case 'H':
        case 'I': case 'K': case 'L': case 'M': case 'N': case 'P': case 'Q':
        case 'R': case 'S': case 'T': case 'V': case 'W': case 'Y':
            return true;
        default:
            return false;
    }
}

namespace {

[[noreturn]] void bad(const std::string& what, std::size_t offset) {
    throw ParseError("species: " + what + " at byte " + std::to_string(offset),
                     offset);
}

} // namespace

SpeciesKey parse_species(std::string_view text) {
    if (text.empty()) bad("empty string", 0);

    SpeciesKey key;
    std::size_t i = 0;
    while (i < text.size() && text[i] != '+') {
        char c = text[i];
        if (c == '[') {
            // A bracket is only valid immediately after a residue letter,
            // and at most one per residue.
            bad("modification bracket outside a residue context", i);
        }
        if (!is_amino_acid(c)) bad(std::string("non-amino-acid letter '") + c + "'", i);
        key.sequence.push_back(c);
        ++i;
        if (i < text.size() && text[i] == '[') {
            std::size_t open = i;
            ++i;
            std::size_t close = text.find(']', i);
            if (close == std::string_view::npos) bad("unterminated modification bracket", open);
            double mass = 0.0;
            const char* first = text.data() + i;
            const char* last = text.data() + close;
            auto res = std::from_chars(first, last, mass);
            if (res.ec != std::errc() || res.ptr != last || first == last)
                bad("unparsable modification mass", i);
            key.modifications.push_back(
                {static_cast<int>(key.sequence.size()), mass});
            i = close + 1;
        }
    }

    if (key.sequence.empty()) bad("no residues before charge suffix", 0);
    if (i >= text.size() || text[i] != '+') bad("malformed charge suffix: '+' expected", i);
    ++i;
    if (i >= text.size()) bad("malformed charge suffix: missing charge digits", i);
    int charge = 0;
    const char* first = text.data() + i;
    const char* last = text.data() + text.size();
    auto res = std::from_chars(first, last, charge);
    if (res.ec != std::errc() || res.ptr != last)
        bad("malformed charge suffix: charge digits expected", i);
    if (charge < 1) bad("charge must be >= 1", i);
    key.charge = charge;
    return key;
}

std::string render_species(const SpeciesKey& key) {
    std::string out;
    out.reserve(key.sequence.size() + 12 * key.modifications.size() + 4);
    std::size_t next_mod = 0;
    for (std::size_t p = 0; p < key.sequence.size(); ++p) {
        out.push_back(key.sequence[p]);
        if (next_mod < key.modifications.size() &&
            key.modifications[next_mod].position == static_cast<int>(p) + 1) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "[%.3f]",
                          key.modifications[next_mod].mass);
            out += buf;
            ++next_mod;
        }
    }
    out.push_back('+');
    out += std::to_string(key.charge);
    return out;
}

void validate(const SpeciesKey& key) {
    if (key.sequence.empty()) throw DataError("species: empty sequence");
    for (char c : key.sequence)
        if (!is_amino_acid(c))
            throw DataError(std::string("species: non-amino-acid letter '") + c + "'");
    int prev = 0;
    for (const auto& mod : key.modifications) {
        if (mod.position < 1 ||
            mod.position > static_cast<int>(key.sequence.size()))
            throw DataError("species: modification position out of range");
        if (mod.position <= prev)
            throw DataError("species: modification positions must be strictly increasing");
        prev = mod.position;
    }
    if (key.charge < 1) throw DataError("species: charge must be >= 1");
}

} // namespace lfq
