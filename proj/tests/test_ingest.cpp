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

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "lfq/ingest.hpp"

using namespace lfq;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("lfq_ingest_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    fs::path file(const std::string& name, const std::string& contents) const {
        const fs::path p = path / name;
        std::ofstream out(p, std::ios::binary);
        out << contents;
        return p;
    }
};

} // namespace

TEST_CASE("identifications reader") {
    TempDir tmp;
    const auto path = tmp.file(
        "ids.tsv",
        "sample_id\treplicate_id\tspecies\trt_sec\tmz\tfdr\n"
        "A01\tt1\tDEDTQAMPFR+2\t431.5\t597.27\t0.0005\n"
        "A01\tt2\tDEDTQAM[147.035]PFR+2\t433.1\t605.27\t0.001\n"
        "B01\tt1\tGGALDFADFK+2\t890\t512.76\t0\n");

    const auto ids = read_identifications(path);
    REQUIRE(ids.size() == 3);
    CHECK(ids[0].sample_id == "A01");
    CHECK(ids[1].species.modifications.size() == 1);
    CHECK(ids[2].retention_time == 890.0);

    SUBCASE("row order is preserved") {
        CHECK(render_species(ids[0].species) == "DEDTQAMPFR+2");
        CHECK(render_species(ids[1].species) == "DEDTQAM[147.035]PFR+2");
    }
}

TEST_CASE("identifications reader errors carry the row number") {
    TempDir tmp;
    const std::string header = "sample_id\treplicate_id\tspecies\trt_sec\tmz\tfdr\n";

    SUBCASE("header only gives an empty list") {
        CHECK(read_identifications(tmp.file("empty.tsv", header)).empty());
    }
    SUBCASE("fdr out of range") {
        const auto p = tmp.file(
            "bad_fdr.tsv", header + "A\tt1\tMK+2\t10\t500\t1.5\n");
        CHECK_THROWS_WITH_AS(read_identifications(p),
                             doctest::Contains("row 2"), ParseError);
    }
    SUBCASE("unparsable number") {
        const auto p =
            tmp.file("bad_num.tsv", header + "A\tt1\tMK+2\tten\t500\t0.001\n");
        CHECK_THROWS_AS(read_identifications(p), ParseError);
    }
    SUBCASE("missing column") {
        const auto p = tmp.file("short.tsv", header + "A\tt1\tMK+2\t10\t500\n");
        CHECK_THROWS_WITH_AS(read_identifications(p),
                             doctest::Contains("row 2"), ParseError);
    }
    SUBCASE("wrong header") {
        const auto p = tmp.file("hdr.tsv", "a\tb\nc\td\n");
        CHECK_THROWS_AS(read_identifications(p), ParseError);
    }
}

TEST_CASE("raster reader") {
    TempDir tmp;
    SUBCASE("unsorted rows are sorted on load") {
        const auto p = tmp.file("S1__t1.raster.tsv",
                                "rt_sec\tmz\tintensity\n"
                                "12\t500.5\t3\n"
                                "10\t500.5\t1\n"
                                "10\t500.0\t2\n");
        const Raster r = read_raster(p);
        CHECK(r.sample_id == "S1");
        CHECK(r.replicate_id == "t1");
        REQUIRE(r.points.size() == 3);
        CHECK(r.points[0].time == 10.0);
        CHECK(r.points[0].mz == 500.0);
        CHECK(r.points[2].time == 12.0);
    }
    SUBCASE("negative intensity is rejected") {
        const auto p = tmp.file("neg.raster.tsv",
                                "rt_sec\tmz\tintensity\n10\t500\t-1\n");
        CHECK_THROWS_AS(read_raster(p), ParseError);
    }
    SUBCASE("duplicate (time, mz) is rejected") {
        const auto p = tmp.file("dup.raster.tsv",
                                "rt_sec\tmz\tintensity\n"
                                "10\t500\t1\n10\t500\t2\n");
        CHECK_THROWS_AS(read_raster(p), DataError);
    }
}

TEST_CASE("protein map reader") {
    TempDir tmp;
    const auto p = tmp.file("map.tsv",
                            "sequence\tprotein_accession\n"
                            "DEDTQAMPFR\tP001\n"
                            "DEDTQAMPFR\tP002\n"
                            "GGALDFADFK\tP001\n");
    const ProteinMap pm = read_protein_map(p);
    CHECK(pm.proteins_of("DEDTQAMPFR").size() == 2);
    CHECK(pm.proteins_of("GGALDFADFK").count("P001") == 1);
    CHECK_THROWS_AS(pm.proteins_of("MISSING"), DataError);

    const auto bad = tmp.file("bad_map.tsv", "sequence\tprotein_accession\n\tP1\n");
    CHECK_THROWS_AS(read_protein_map(bad), ParseError);
}

TEST_CASE("design reader") {
    TempDir tmp;
    const auto p = tmp.file("design.tsv",
                            "protein_accession\tmix1\tmix2\n"
                            "P001\t2.0\t1.0\n"
                            "P002\t0\t0.5\n");
    const DesignTable d = read_design(p);
    REQUIRE(d.classes == std::vector<std::string>{"mix1", "mix2"});
    CHECK(d.abundance_of("P001", d.class_index("mix2")) == 1.0);

    SUBCASE("negative abundance rejected") {
        const auto bad = tmp.file(
            "bad.tsv", "protein_accession\tm1\tm2\nP1\t-1\t0\n");
        CHECK_THROWS_AS(read_design(bad), ParseError);
    }
    SUBCASE("duplicate accession rejected") {
        const auto bad = tmp.file(
            "dup.tsv", "protein_accession\tm1\nP1\t1\nP1\t2\n");
        CHECK_THROWS_AS(read_design(bad), ParseError);
    }
}

TEST_CASE("groups reader round trip") {
    TempDir tmp;
    GroupMap groups{{"A01", Group::cases}, {"B01", Group::controls}};
    write_groups(tmp.path / "groups.tsv", groups);
    CHECK(read_groups(tmp.path / "groups.tsv") == groups);
}

TEST_CASE("fdr filter") {
    auto make = [](double fdr) {
        Identification id;
        id.sample_id = "A";
        id.replicate_id = "t1";
        id.species = parse_species("MK+2");
        id.retention_time = 1;
        id.precursor_mz = 500;
        id.fdr = fdr;
        return id;
    };
    const std::vector<Identification> ids = {make(0.0005), make(0.001),
                                             make(0.002)};

    SUBCASE("boundary is inclusive") {
        const auto kept = filter_by_fdr(ids, 0.001);
        REQUIRE(kept.size() == 2);
        CHECK(kept[0].fdr == 0.0005);
        CHECK(kept[1].fdr == 0.001);
    }
    SUBCASE("threshold 1 is the identity") {
        CHECK(filter_by_fdr(ids, 1.0).size() == ids.size());
    }
    SUBCASE("empty input") {
        CHECK(filter_by_fdr({}, 0.5).empty());
    }
    SUBCASE("monotone in the threshold") {
        for (double t1 : {0.0004, 0.001, 0.0015, 0.01})
            for (double t2 : {0.0004, 0.001, 0.0015, 0.01}) {
                if (t1 > t2) continue;
                const auto a = filter_by_fdr(ids, t1);
                const auto b = filter_by_fdr(ids, t2);
                CHECK(a.size() <= b.size());
                for (const auto& id : a) {
                    bool found = false;
                    for (const auto& other : b)
                        found = found || other.fdr == id.fdr;
                    CHECK(found);
                }
            }
    }
    SUBCASE("invalid threshold") {
        CHECK_THROWS_AS(filter_by_fdr(ids, 0.0), DataError);
        CHECK_THROWS_AS(filter_by_fdr(ids, 1.5), DataError);
    }
}
