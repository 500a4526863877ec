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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lfq/rng.hpp"
#include "lfq/rollup.hpp"

using namespace lfq;

namespace {

const std::vector<SampleColumn> kSamples = {{"A1", "", Group::cases},
                                            {"B1", "", Group::controls}};

QuantMatrix species_matrix(const std::vector<std::string>& entities,
                           const std::vector<Cell>& cells,
                           Measure measure = Measure::spectral_count) {
    QuantMatrix m;
    m.measure = measure;
    m.level = Level::species;
    m.entities = entities;
    m.samples = kSamples;
    m.cells = cells;
    return m;
}

ProteinMap map_of(std::initializer_list<std::pair<std::string, std::string>> pairs) {
    ProteinMap pm;
    for (const auto& [seq, acc] : pairs) pm.entries[seq].insert(acc);
    return pm;
}

} // namespace

TEST_CASE("species variants sum into their peptide") {
    const QuantMatrix m = species_matrix(
        {"DEDTQAM[147.035]PFR+2", "DEDTQAMPFR+2"},
        {Cell{2.0}, Cell{1.0}, Cell{3.0}, Cell{}});
    const QuantMatrix p = rollup_matrix(m, Level::peptide, ProteinMap{});
    REQUIRE(p.entities == std::vector<std::string>{"DEDTQAMPFR"});
    CHECK(*p.cell(0, 0) == 5.0); // 2 + 3 across the species variants
    CHECK(*p.cell(0, 1) == 1.0); // missing skipped, not zeroed
}

TEST_CASE("single-species peptide passes through") {
    const QuantMatrix m = species_matrix({"GGALDFADFK+2"}, {Cell{7.0}, Cell{}});
    const QuantMatrix p = rollup_matrix(m, Level::peptide, ProteinMap{});
    CHECK(*p.cell(0, 0) == 7.0);
    CHECK(!p.cell(0, 1).has_value());
}

TEST_CASE("an all-missing group stays missing") {
    const QuantMatrix m = species_matrix(
        {"DEDTQAMPFR+2", "DEDTQAMPFR+3"}, {Cell{1.0}, Cell{}, Cell{2.0}, Cell{}});
    const QuantMatrix p = rollup_matrix(m, Level::peptide, ProteinMap{});

    // brute-force aggregation oracle over the raw cells
    bool any_b1 = false;
    double sum_b1 = 0.0;
    for (std::size_t e = 0; e < m.entities.size(); ++e)
        if (m.cell(e, 1)) {
            any_b1 = true;
            sum_b1 += *m.cell(e, 1);
        }
    CHECK(!any_b1);
    CHECK(!p.cell(0, 1).has_value());
    CHECK(*p.cell(0, 0) == 3.0);
}

TEST_CASE("protein rollup with shared peptides") {
    const ProteinMap pm = map_of({{"AAK", "P1"}, {"CCK", "P1"}, {"CCK", "P2"}});
    const QuantMatrix m = species_matrix({"AAK+2", "CCK+2"},
                                         {Cell{3.0}, Cell{1.0}, Cell{5.0}, Cell{2.0}});
    const QuantMatrix p = rollup_matrix(m, Level::protein, pm);
    REQUIRE(p.entities == std::vector<std::string>{"P1", "P2"});
    CHECK(*p.cell(0, 0) == 8.0); // shared CCK counted toward P1
    CHECK(*p.cell(1, 0) == 5.0); // ... and toward P2
    CHECK(*p.cell(0, 1) == 3.0);
    CHECK(*p.cell(1, 1) == 2.0);
}

TEST_CASE("unmapped sequences fail a protein rollup with the orphan list") {
    const ProteinMap pm = map_of({{"AAK", "P1"}});
    const QuantMatrix m =
        species_matrix({"AAK+2", "CCK+2"}, {Cell{1.0}, Cell{1.0}, Cell{1.0}, Cell{1.0}});
    CHECK_THROWS_WITH_AS(rollup_matrix(m, Level::protein, pm),
                         doctest::Contains("CCK"), DataError);
}

TEST_CASE("two-step rollup equals one-step") {
    Rng rng(42);
    const ProteinMap pm = map_of({{"AAK", "P1"},
                                  {"CCK", "P1"},
                                  {"DDR", "P2"},
                                  {"EEK", "P2"},
                                  {"FFR", "P3"}});
    std::vector<std::string> entities = {"AAK+2", "AAK+3", "CCK+2", "DDR+2",
                                         "DDR+3", "EEK+2", "FFR+2"};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Cell> cells;
        for (std::size_t i = 0; i < entities.size() * kSamples.size(); ++i) {
            if (rng.uniform() < 0.3)
                cells.push_back(std::nullopt);
            else
                cells.push_back(rng.uniform(0.0, 50.0));
        }
        const QuantMatrix m =
            species_matrix(entities, cells, Measure::ion_abundance);
        const QuantMatrix direct = rollup_matrix(m, Level::protein, pm);
        const QuantMatrix stepped =
            rollup_matrix(rollup_matrix(m, Level::peptide, pm), Level::protein, pm);
        REQUIRE(direct.entities == stepped.entities);
        for (std::size_t i = 0; i < direct.cells.size(); ++i) {
            REQUIRE(direct.cells[i].has_value() == stepped.cells[i].has_value());
            if (direct.cells[i])
                CHECK(std::abs(*direct.cells[i] - *stepped.cells[i]) <=
                      1e-9 * std::max(1.0, std::abs(*direct.cells[i])));
        }
    }
}

TEST_CASE("peptide rollup conserves present mass and partitions species") {
    Rng rng(7);
    std::vector<std::string> entities = {"AAK+2", "AAK+3", "CCK+2",
                                         "DDR+2", "EEK+2"};
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < entities.size() * kSamples.size(); ++i)
        cells.push_back(rng.uniform() < 0.25 ? Cell{}
                                             : Cell{rng.uniform(0.0, 9.0)});
    const QuantMatrix m = species_matrix(entities, cells);
    const QuantMatrix p = rollup_matrix(m, Level::peptide, ProteinMap{});

    for (std::size_t j = 0; j < kSamples.size(); ++j) {
        double species_sum = 0.0, peptide_sum = 0.0;
        for (std::size_t e = 0; e < m.entities.size(); ++e)
            if (m.cell(e, j)) species_sum += *m.cell(e, j);
        for (std::size_t e = 0; e < p.entities.size(); ++e)
            if (p.cell(e, j)) peptide_sum += *p.cell(e, j);
        CHECK(species_sum == doctest::Approx(peptide_sum).epsilon(1e-12));
    }

    // every species lands in exactly one peptide group
    std::size_t grouped = 0;
    for (const auto& pep : p.entities)
        for (const auto& sp : m.entities)
            if (parse_species(sp).sequence == pep) ++grouped;
    CHECK(grouped == m.entities.size());
}

TEST_CASE("protein elements") {
    const ProteinMap pm = map_of({{"AAK", "P1"}, {"CCK", "P1"}, {"CCK", "P2"}});

    SUBCASE("species level lists the surviving species per protein") {
        const QuantMatrix m = species_matrix(
            {"AAK+2", "CCK+2", "CCK+3"},
            {Cell{1.0}, Cell{1.0}, Cell{1.0}, Cell{1.0}, Cell{1.0}, Cell{1.0}});
        const auto elements = protein_elements(pm, m, Level::species);
        REQUIRE(elements.size() == 2);
        CHECK(elements[0].accession == "P1");
        CHECK(elements[0].elements.size() == 3);
        // a shared species appears in both element lists
        CHECK(elements[1].accession == "P2");
        CHECK(elements[1].elements ==
              std::vector<std::string>{"CCK+2", "CCK+3"});
    }

    SUBCASE("protein level is always a singleton") {
        QuantMatrix m;
        m.measure = Measure::spectral_count;
        m.level = Level::protein;
        m.entities = {"P1", "P2"};
        m.samples = kSamples;
        m.cells = {Cell{1.0}, Cell{1.0}, Cell{1.0}, Cell{1.0}};
        const auto elements = protein_elements(pm, m, Level::protein);
        REQUIRE(elements.size() == 2);
        for (const auto& e : elements) {
            CHECK(e.elements.size() == 1);
            CHECK(e.elements[0] == e.accession);
        }
    }

    SUBCASE("peptide level counts surviving peptides") {
        QuantMatrix m;
        m.measure = Measure::spectral_count;
        m.level = Level::peptide;
        m.entities = {"AAK", "CCK"};
        m.samples = kSamples;
        m.cells = {Cell{1.0}, Cell{1.0}, Cell{1.0}, Cell{1.0}};
        const auto elements = protein_elements(pm, m, Level::peptide);
        CHECK(elements[0].elements.size() == 2); // P1: AAK, CCK
        CHECK(elements[1].elements.size() == 1); // P2: CCK
    }
}

TEST_CASE("rollup input level is validated") {
    QuantMatrix m;
    m.level = Level::protein;
    m.entities = {"P1"};
    m.samples = kSamples;
    m.cells = {Cell{1.0}, Cell{1.0}};
    CHECK_THROWS_AS(rollup_matrix(m, Level::protein, ProteinMap{}), DataError);
    m.level = Level::peptide;
    CHECK_THROWS_AS(rollup_matrix(m, Level::peptide, ProteinMap{}), DataError);
}
